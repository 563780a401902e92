use super::*;
use crate::exact::{enumerate_ip, solve_ip};
use crate::cutlp::{solve_lp, LpMode};
use crate::graph::{enumerate_forests, named};
use crate::instances::{
    build_layered, canonical_point, layered_instance, make_base, random_feasible_point, random_instance, BaseKind,
    CostScheme, LayeredConstruction, RandomSpec, DEFAULT_NODE_CAP,
};
use crate::rational::{int, rat, Penalty};
use crate::simplex::{solve_lp as simplex_solve, LpStatus, Relation, Row};

fn layered(m: usize, k: usize) -> LayeredConstruction {
    build_layered(&make_base(&BaseKind::K4).unwrap(), m, k, DEFAULT_NODE_CAP).unwrap()
}

fn triangle() -> (PcsfInstance, FracSolution) {
    let inst =
        PcsfInstance::new(named::complete(3), vec![int(1); 3], vec![(0, 1)], vec![Penalty::Finite(int(1))]).unwrap();
    let point = FracSolution { x: vec![rat(1, 3); 3], z: vec![rat(1, 3)] };
    (inst, point)
}

/// `min alpha` over all forests at once: `sum lambda (x^q, z^q) <= alpha (x, z)`, `sum lambda = 1`.
fn enumerated_alpha(inst: &PcsfInstance, point: &FracSolution) -> Rational {
    let forests = enumerate_forests(&inst.graph, 16).unwrap();
    let cols: Vec<FracSolution> = forests
        .iter()
        .filter(|f| inst.evaluate(f).is_ok())
        .map(|f| FracSolution::integral(inst, f))
        .collect();
    let q = cols.len();
    let mut rows = Vec::new();
    for e in 0..inst.edge_count() {
        let mut coeffs: Vec<(usize, Rational)> = (0..q).map(|j| (j, cols[j].x[e].clone())).collect();
        coeffs.push((q, -point.x[e].clone()));
        rows.push(Row { coeffs, relation: Relation::Le, rhs: int(0) });
    }
    for i in 0..inst.pair_count() {
        let mut coeffs: Vec<(usize, Rational)> = (0..q).map(|j| (j, cols[j].z[i].clone())).collect();
        coeffs.push((q, -point.z[i].clone()));
        rows.push(Row { coeffs, relation: Relation::Le, rhs: int(0) });
    }
    rows.push(Row { coeffs: (0..q).map(|j| (j, int(1))).collect(), relation: Relation::Eq, rhs: int(1) });
    let mut costs = vec![int(0); q];
    costs.push(int(1));
    let (status, _, value, _) = simplex_solve(costs, rows);
    assert_eq!(status, LpStatus::Optimal);
    value
}

#[test]
fn distribution_basics_and_file_format() {
    let g = named::cycle(4);
    let a: EdgeSet = [0, 1].into_iter().collect();
    let b: EdgeSet = [2].into_iter().collect();
    let dist = ForestDistribution::new(&g, vec![(a.clone(), rat(1, 4)), (b, rat(1, 2)), (a, rat(1, 4))]).unwrap();
    assert_eq!(dist.len(), 2);
    assert_eq!(dist.marginals(4), vec![rat(1, 2), rat(1, 2), rat(1, 2), int(0)]);
    let text = format_distribution(&dist);
    assert_eq!(parse_distribution(&text, &g).unwrap(), dist);
    assert!(ForestDistribution::new(&g, vec![(EdgeSet::new(), rat(1, 2))]).is_err());
    assert!(ForestDistribution::new(&g, vec![(EdgeSet::all(&g), int(1))]).is_err());
    assert!(parse_distribution("e 0\n", &g).is_err());
    assert!(parse_distribution("forest 1\ne 9\n", &g).is_err());
}

#[test]
fn single_tree_connects_everything() {
    let lc = layered(2, 0);
    let inst = layered_instance(&lc, &CostScheme::Unit).unwrap();
    let point = canonical_point(&lc, PointMode::Gap).unwrap();
    let tree = crate::graph::minimum_spanning_tree(&lc.graph, &crate::graph::Capacities::uniform(&lc.graph, int(1))).unwrap();
    let dist = ForestDistribution::single(&lc.graph, tree.clone()).unwrap();
    let report = verify_distribution(&inst, &point, &dist, PointMode::Gap, &int(3)).unwrap();
    assert!(report.pair_probs.iter().all(|p| p == &int(1)));
    assert!(tree.iter().all(|e| report.marginals[e] == int(1)));
    assert!(report.passes);
}

#[test]
fn spanning_tree_decompositions() {
    let k4 = spanning_tree_decomposition(&named::complete(4)).unwrap();
    assert_eq!(k4.len(), 16);
    assert!(k4.marginals(6).iter().all(|m| m == &rat(1, 2)));
    let c5 = spanning_tree_decomposition(&named::cycle(5)).unwrap();
    assert_eq!(c5.len(), 5);
    assert!(c5.marginals(5).iter().all(|m| m == &rat(4, 5)));
    let prism = spanning_tree_decomposition(&named::prism()).unwrap();
    assert!(prism.marginals(9).iter().all(|m| m <= &rat(10, 18)));
    assert!(prism.entries().iter().all(|(t, _)| t.len() == 5));
    assert!(spanning_tree_decomposition(&named::path(3)).is_err());
}

#[test]
fn explicit_distribution_on_k4() {
    let lc = layered(4, 1);
    let inst = layered_instance(&lc, &CostScheme::Unit).unwrap();
    let point = canonical_point(&lc, PointMode::Gap).unwrap();
    let alpha = rat(9, 4);
    let dist = explicit_gap_distribution(&lc, &alpha).unwrap();
    assert_eq!(dist.len(), 17);
    let report = verify_distribution(&inst, &point, &dist, PointMode::Gap, &alpha).unwrap();
    assert!(report.passes);
    assert!(report.marginals.iter().all(|m| m <= &rat(3, 4)));
    for ((_, kind), p) in lc.pairs().iter().zip(&report.pair_probs) {
        match kind {
            crate::instances::PairKind::SameCopy { .. } => assert_eq!(p, &int(1)),
            crate::instances::PairKind::Root => assert!(p >= &rat(1, 4)),
        }
    }
    // the largest marginal is 5/8, so the same forests also pass at 2 but not below 15/8
    assert_eq!(report.marginals.iter().max().unwrap(), &rat(5, 8));
    assert!(verify_distribution(&inst, &point, &dist, PointMode::Gap, &int(2)).unwrap().passes);
    assert!(!verify_distribution(&inst, &point, &dist, PointMode::Gap, &rat(7, 4)).unwrap().passes);

    assert!(explicit_gap_distribution(&lc, &rat(31, 10)).is_err());
    assert_eq!(explicit_gap_distribution(&lc, &int(2)).unwrap().len(), 16);
    assert_eq!(explicit_gap_distribution(&lc, &int(3)).unwrap().len(), 1);
}

#[test]
fn explicit_distribution_on_an_alpha_grid() {
    for (m, k) in [(2, 0), (2, 1), (4, 0), (4, 1)] {
        let lc = layered(m, k);
        let inst = layered_instance(&lc, &CostScheme::Unit).unwrap();
        let point = canonical_point(&lc, PointMode::Gap).unwrap();
        for alpha in (0..=12).map(|i| rat(9, 4) + rat(i, 16)) {
            let dist = explicit_gap_distribution(&lc, &alpha).unwrap();
            let report = verify_distribution(&inst, &point, &dist, PointMode::Gap, &alpha).unwrap();
            assert!(report.passes, "m={m} k={k} alpha={alpha}");
        }
    }
    // below 9/4 the replicated trees reach deep nodes too rarely: two base edges
    // of K4 share a uniform tree with probability 3/16 at worst
    let lc = layered(4, 1);
    let inst = layered_instance(&lc, &CostScheme::Unit).unwrap();
    let point = canonical_point(&lc, PointMode::Gap).unwrap();
    for (alpha, passes) in [(int(2), false), (rat(21, 10), false), (rat(117, 55), true)] {
        let dist = explicit_gap_distribution(&lc, &alpha).unwrap();
        let report = verify_distribution(&inst, &point, &dist, PointMode::Gap, &alpha).unwrap();
        assert_eq!(report.passes, passes, "alpha={alpha}");
        assert!(report.edge_violations.is_empty());
    }
    let lc = layered(4, 0);
    let inst = layered_instance(&lc, &CostScheme::Unit).unwrap();
    let point = canonical_point(&lc, PointMode::Gap).unwrap();
    let dist = explicit_gap_distribution(&lc, &int(2)).unwrap();
    assert!(verify_distribution(&inst, &point, &dist, PointMode::Gap, &int(2)).unwrap().passes);
}

#[test]
fn min_alpha_examples() {
    let (inst, point) = triangle();
    let dec = min_alpha(&inst, &point).unwrap();
    assert_eq!(dec.value, enumerated_alpha(&inst, &point));
    let report = verify_distribution(&inst, &point, &dec.distribution, PointMode::Gap, &dec.value).unwrap();
    assert!(report.passes);
    assert_eq!(dec.witness.value_at(&point), int(1));

    let forest: EdgeSet = [0].into_iter().collect();
    let integral = FracSolution::integral(&inst, &forest);
    let dec = min_alpha(&inst, &integral).unwrap();
    assert_eq!(dec.value, int(1));
    assert_eq!(dec.distribution.entries(), &[(forest, int(1))]);
}

#[test]
fn min_alpha_matches_enumeration() {
    let spec = RandomSpec { nodes: 5, edge_prob: 0.6, max_edges: 8, pairs: 3, ..RandomSpec::default() };
    for seed in 0..15 {
        let inst = random_instance(&spec, seed).unwrap();
        let point = solve_lp(&inst, LpMode::Exact).unwrap().solution;
        let dec = min_alpha(&inst, &point).unwrap();
        assert_eq!(dec.value, enumerated_alpha(&inst, &point), "seed {seed}");
        assert!(verify_distribution(&inst, &point, &dec.distribution, PointMode::Gap, &dec.value).unwrap().passes);
    }
}

#[test]
fn witness_round_trip_on_the_triangle() {
    let (inst, point) = triangle();
    let dec = min_alpha(&inst, &point).unwrap();
    let witness = witness_costs_from_dual(&inst, &dec.witness, PointMode::Gap, &int(1)).unwrap();
    assert!(witness.lp_objective(&point) <= int(1));
    assert!(solve_lp(&witness, LpMode::Exact).unwrap().value <= int(1));
    assert_eq!(solve_ip(&witness).unwrap().objective(), dec.value);
    assert_eq!(enumerate_ip(&witness).unwrap().0, dec.value);
    let zero = DualWitness { d: vec![int(0); 3], rho: vec![int(0)], gamma_dual: int(1) };
    assert!(witness_costs_from_dual(&inst, &zero, PointMode::Gap, &int(1)).is_err());
}

#[test]
fn beta_feasibility_is_monotone_around_the_optimum() {
    let gamma = rat(1, 3);
    let spec = RandomSpec { nodes: 5, edge_prob: 0.7, max_edges: 8, pairs: 3, infinite_prob: 0.0, ..RandomSpec::default() };
    let mut checked = 0;
    for seed in 0..20 {
        let inst = random_instance(&spec, seed).unwrap();
        let Ok(point) = random_feasible_point(&inst, seed, Some(&gamma)) else { continue };
        let dec = min_beta(&inst, &point).unwrap();
        assert!(dec.value <= int(2) + int(2) * &gamma, "seed {seed}");
        let report = verify_distribution(&inst, &point, &dec.distribution, PointMode::Lmp, &dec.value).unwrap();
        assert!(report.passes, "seed {seed}");
        let at = feasibility_at_beta(&inst, &point, &dec.value).unwrap();
        assert_eq!(at.value(), int(1));
        let below = feasibility_at_beta(&inst, &point, &(&dec.value - rat(1, 100))).unwrap();
        assert!(below.value() < int(1), "seed {seed}");
        checked += 1;
    }
    assert!(checked >= 5);
}

#[test]
fn min_beta_of_integral_point_is_one() {
    let (inst, _) = triangle();
    let forest: EdgeSet = [0].into_iter().collect();
    let point = FracSolution::integral(&inst, &forest);
    assert_eq!(min_beta(&inst, &point).unwrap().value, int(1));
}

#[test]
fn two_value_lmp_mix() {
    let gamma = rat(1, 3);
    let spec = RandomSpec { nodes: 5, edge_prob: 0.7, max_edges: 8, pairs: 3, infinite_prob: 0.0, ..RandomSpec::default() };
    let mut checked = 0;
    for seed in 0..20 {
        let inst = random_instance(&spec, seed).unwrap();
        let Ok(point) = random_feasible_point(&inst, seed, Some(&gamma)) else { continue };
        if point.z.iter().all(|z| z.is_zero()) {
            continue;
        }
        let (dist, beta) = two_value_lmp_distribution(&inst, &point).unwrap();
        assert_eq!(beta, rat(8, 3));
        assert!(verify_distribution(&inst, &point, &dist, PointMode::Lmp, &beta).unwrap().passes, "seed {seed}");
        checked += 1;
    }
    assert!(checked >= 5);
}

#[test]
fn bounds_closed_forms() {
    assert_eq!(bound_alpha(4, 1).unwrap(), rat(5, 8));
    // the 8s/n term keeps the finite bound about 6/n below the limit
    let far = bound_alpha(1_000_000, 100).unwrap();
    let gap = crate::rational::to_f64(&(bound_alpha_limit() - &far));
    assert!((gap - 6e-6).abs() < 1e-9, "{gap}");
    assert!(crate::rational::to_f64(&(bound_alpha_limit() - bound_alpha(1_000_000_000, 100).unwrap())) < 1e-8);
    for n in (4..=22).step_by(2) {
        for k in 0..10 {
            let here = bound_alpha(n, k).unwrap();
            assert!(bound_alpha(n + 2, k).unwrap() >= here);
            assert!(bound_alpha(n, k + 1).unwrap() >= here, "n={n} k={k}");
            assert!(here < bound_alpha_limit());
        }
    }
    for l in 3..=12u64 {
        let limit = bound_beta_limit(l).unwrap();
        assert_eq!(limit, int(4) - int(4) / int(l as i64));
        let far = bound_beta(l, 1_000_000_000, 200).unwrap();
        assert!((crate::rational::to_f64(&far) - crate::rational::to_f64(&limit)).abs() < 1e-6, "l={l}");
    }
    assert_eq!(bound_beta_limit(10).unwrap(), rat(36, 10));
    assert!(bound_beta(2, 4, 1).is_err());
}

#[test]
fn witness_nodes_and_chain_on_the_explicit_distribution() {
    let lc = layered(4, 1);
    let alpha = rat(9, 4);
    let dist = trim(&lc, &explicit_gap_distribution(&lc, &alpha).unwrap()).unwrap();
    let w = find_witness_node(&lc, &dist, 0, &|_| true).unwrap();
    assert!(w.meets_bounds);
    assert!(w.p_leaf <= rat(1, 2) && w.p_contained >= rat(1, 2));
    assert!(find_witness_node(&lc, &dist, 0, &|_| false).is_err());

    let trace = chain_trace(&lc, &dist, &alpha).unwrap();
    assert!(trace.holds);
    assert!(trace.steps.len() <= 2);

    let tree = crate::graph::minimum_spanning_tree(&lc.graph, &crate::graph::Capacities::uniform(&lc.graph, int(1))).unwrap();
    let single = ForestDistribution::single(&lc.graph, tree).unwrap();
    let trace = chain_trace(&lc, &single, &alpha).unwrap();
    assert_eq!(trace.steps.len(), 1);
    assert!(trace.truncated.is_some());
}
