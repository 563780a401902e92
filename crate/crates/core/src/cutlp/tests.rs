use super::*;
use crate::graph::{named, Graph};
use crate::instances::{
    build_layered, canonical_point, gadget_tight_family, layered_instance, make_base, pcst_gadget_instance,
    random_feasible_point, random_instance, BaseKind, CostScheme, PointMode, RandomSpec, DEFAULT_NODE_CAP,
};
use crate::rational::{int, rat, Penalty};
use crate::simplex::{solve_lp as simplex_solve, LpStatus, Relation, Row};
use rand::{Rng, SeedableRng};

fn path_instance(penalty: Penalty) -> PcsfInstance {
    PcsfInstance::new(named::path(3), vec![int(1), int(1)], vec![(0, 2)], vec![penalty]).unwrap()
}

fn c4_double_pair() -> PcsfInstance {
    PcsfInstance::new(named::cycle(4), vec![int(1); 4], vec![(0, 2), (1, 3)], vec![Penalty::Infinite; 2]).unwrap()
}

/// The cut LP written out over every node subset.
fn explicit_lp_value(inst: &PcsfInstance) -> Option<Rational> {
    let n = inst.graph.node_count();
    let m = inst.edge_count();
    let finite: Vec<usize> = (0..inst.pair_count()).filter(|&i| !inst.penalties[i].is_infinite()).collect();
    let mut costs: Vec<Rational> = inst.costs.clone();
    costs.extend(finite.iter().map(|&i| inst.penalties[i].finite().unwrap().clone()));
    let mut rows = Vec::new();
    for mask in 0u32..(1 << n) {
        let side: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
        let edges = inst.graph.cut_edges(&side);
        for (i, &(s, t)) in inst.pairs.iter().enumerate() {
            if side[s] && !side[t] {
                let mut coeffs: Vec<(usize, Rational)> = edges.iter().map(|&e| (e, int(1))).collect();
                if let Some(k) = finite.iter().position(|&f| f == i) {
                    coeffs.push((m + k, int(1)));
                }
                rows.push(Row { coeffs, relation: Relation::Ge, rhs: int(1) });
            }
        }
    }
    let (status, _, value, _) = simplex_solve(costs, rows);
    (status == LpStatus::Optimal).then_some(value)
}

#[test]
fn separation_examples() {
    let inst = path_instance(Penalty::Finite(int(1)));
    let zero = FracSolution::zeros(&inst);
    assert_eq!(separate(&inst, &zero, LpMode::Exact), Some(CutConstraint::Cut { pair: 0, side: vec![0] }));
    let lc = build_layered(&make_base(&BaseKind::K4).unwrap(), 4, 0, DEFAULT_NODE_CAP).unwrap();
    let layered = layered_instance(&lc, &CostScheme::Unit).unwrap();
    let point = canonical_point(&lc, PointMode::Gap).unwrap();
    assert_eq!(separate(&layered, &point, LpMode::Exact), None);
    let (gadget, gpoint, _) = pcst_gadget_instance(6).unwrap();
    assert_eq!(separate(&gadget, &gpoint, LpMode::Exact), None);
    assert_eq!(separate(&gadget, &gpoint, LpMode::Tol(1e-9)), None);
}

#[test]
fn small_lp_values() {
    let tri = PcsfInstance::new(named::complete(3), vec![int(1); 3], vec![(0, 1)], vec![Penalty::Finite(rat(1, 2))])
        .unwrap();
    let r = solve_lp(&tri, LpMode::Exact).unwrap();
    assert_eq!(r.value, rat(1, 2));
    assert_eq!(r.solution.z, vec![int(1)]);
    assert!(r.solution.x.iter().all(|v| v.is_zero()));

    let r = solve_lp(&path_instance(Penalty::Finite(int(3))), LpMode::Exact).unwrap();
    assert_eq!(r.value, int(2));

    let c4 = c4_double_pair();
    let r = solve_lp(&c4, LpMode::Exact).unwrap();
    assert_eq!(r.value, int(2));
    assert!(r.solution.x.iter().all(|v| *v == rat(1, 2)));
    assert_eq!(explicit_lp_value(&c4), Some(int(2)));
    assert_eq!(r.cut_weights.iter().sum::<Rational>(), r.value);
    let tol = solve_lp(&c4, LpMode::Tol(LpMode::DEFAULT_TOL)).unwrap();
    assert_eq!(tol.value, int(2));
}

#[test]
fn infeasible_when_infinite_pair_is_disconnected() {
    let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
    let inst = PcsfInstance::new(g, vec![int(1); 2], vec![(0, 3)], vec![Penalty::Infinite]).unwrap();
    assert!(matches!(solve_lp(&inst, LpMode::Exact), Err(Error::Infeasible(_))));
    let finite = inst.with_costs(vec![int(1); 2], vec![Penalty::Finite(int(2))]).unwrap();
    assert_eq!(solve_lp(&finite, LpMode::Exact).unwrap().value, int(2));
}

#[test]
fn matches_explicit_lp_on_random_instances() {
    let spec = RandomSpec { nodes: 6, max_edges: 10, pairs: 3, ..RandomSpec::default() };
    for seed in 0..40 {
        let inst = random_instance(&spec, seed).unwrap();
        let expected = explicit_lp_value(&inst);
        match solve_lp(&inst, LpMode::Exact) {
            Ok(r) => {
                assert_eq!(Some(r.value.clone()), expected, "seed {seed}");
                assert_eq!(inst.lp_objective(&r.solution), r.value);
                assert!(check_feasible(&inst, &r.solution).unwrap().is_feasible());
            }
            Err(Error::Infeasible(_)) => assert_eq!(expected, None, "seed {seed}"),
            Err(e) => panic!("seed {seed}: {e}"),
        }
    }
}

#[test]
fn feasibility_checks() {
    let (gadget, mut point, _) = pcst_gadget_instance(6).unwrap();
    point.x[0] = rat(1, 6);
    assert!(matches!(check_feasible(&gadget, &point).unwrap(), Feasibility::Violated(CutConstraint::Cut { .. })));
    let inst = path_instance(Penalty::Finite(int(1)));
    assert!(!check_feasible(&inst, &FracSolution::zeros(&inst)).unwrap().is_feasible());
    let mut neg = FracSolution::zeros(&inst);
    neg.x[1] = int(-1);
    assert_eq!(check_feasible(&inst, &neg).unwrap(), Feasibility::Violated(CutConstraint::NonnegX(1)));
    for seed in 0..10 {
        let inst = random_instance(&RandomSpec::default(), seed).unwrap();
        let p = random_feasible_point(&inst, seed, None).unwrap();
        assert!(check_feasible(&inst, &p).unwrap().is_feasible());
    }
}

#[test]
fn gadget_vertex_certificate() {
    let (inst, point, _) = pcst_gadget_instance(6).unwrap();
    let family = gadget_tight_family(&inst, 6).unwrap();
    let report = verify_vertex(&inst, &point, &family).unwrap();
    assert!(report.is_feasible && report.all_tight && report.unique);
    assert_eq!((report.rank, report.dimension), (157, 157));

    let without_14 = &family[..family.len() - 1];
    assert!(!verify_vertex(&inst, &point, without_14).unwrap().unique);
    let without_13_14 = &family[..family.len() - 2];
    assert!(!verify_vertex(&inst, &point, without_13_14).unwrap().unique);

    let mut moved = point.clone();
    moved.x[5] += rat(1, 100);
    assert!(!verify_vertex(&inst, &moved, &family).unwrap().all_tight);
}

#[test]
fn certified_vertex_is_the_unique_optimum() {
    // costs that are a positive combination of the family rows make the
    // family's tight face the optimal face
    let (inst, point, _) = pcst_gadget_instance(6).unwrap();
    let family = gadget_tight_family(&inst, 6).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let m = inst.edge_count();
    let mut costs = vec![Rational::zero(); m];
    let mut penalties = vec![Rational::zero(); inst.pair_count()];
    for c in &family {
        let w = int(rng.gen_range(1..4));
        for (j, a) in c.row(&inst) {
            if j < m {
                costs[j] += &w * a;
            } else {
                penalties[j - m] += &w * a;
            }
        }
    }
    let priced = inst.with_costs(costs, penalties.into_iter().map(Penalty::Finite).collect()).unwrap();
    let r = solve_lp(&priced, LpMode::Exact).unwrap();
    assert_eq!(r.solution, point);
}

#[test]
fn family_file_round_trip() {
    let (inst, _, _) = pcst_gadget_instance(4).unwrap();
    let family = gadget_tight_family(&inst, 4).unwrap();
    let text = family::format_family(&family, &inst);
    assert_eq!(family::parse_family(&text, &inst).unwrap(), family);
    assert!(family::parse_family("cut 0 r s\n", &inst).is_err());
    assert!(family::parse_family("xzero 999\n", &inst).is_err());
}
