use super::*;
use crate::cutlp::{solve_lp, LpMode};
use crate::graph::{named, Graph};
use crate::instances::{random_feasible_point, random_instance, RandomSpec};
use crate::rational::{rat, Penalty};

fn star() -> PcsfInstance {
    // center 0, leaves 1, 2, 3
    let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
    PcsfInstance::new(g, vec![int(1); 3], vec![(1, 2)], vec![Penalty::Finite(int(5))]).unwrap()
}

/// Steiner forest LP value for the listed pairs (all other pairs dropped).
fn steiner_lp(inst: &PcsfInstance, required: &[usize]) -> Rational {
    let sub = PcsfInstance::with_names(
        inst.graph.clone(),
        inst.node_names.clone(),
        inst.costs.clone(),
        required.iter().map(|&i| inst.pairs[i]).collect(),
        vec![Penalty::Infinite; required.len()],
    )
    .unwrap();
    solve_lp(&sub, LpMode::Exact).unwrap().value
}

#[test]
fn gw_examples() {
    let path = PcsfInstance::new(named::path(4), vec![int(1); 3], vec![(0, 3)], vec![Penalty::Infinite]).unwrap();
    assert_eq!(gw_steiner_forest(&path, &[0]).unwrap().as_slice(), &[0, 1, 2]);
    let s = star();
    let f = gw_steiner_forest(&s, &[0]).unwrap();
    assert_eq!(f.as_slice(), &[0, 1]);
    assert!(gw_steiner_forest(&s, &[]).unwrap().is_empty());
}

#[test]
fn gw_is_minimal_and_within_twice_the_lp() {
    let spec = RandomSpec { nodes: 7, max_edges: 13, pairs: 4, infinite_prob: 0.0, ..RandomSpec::default() };
    for seed in 0..40 {
        let inst = random_instance(&spec, seed).unwrap();
        let reach = components(&inst.graph, &EdgeSet::all(&inst.graph));
        let required: Vec<usize> = (0..inst.pair_count()).filter(|&i| reach.same(inst.pairs[i].0, inst.pairs[i].1)).collect();
        let (forest, dual) = gw_with_dual(&inst, &required).unwrap();
        assert!(forest.is_forest(&inst.graph));
        let comp = components(&inst.graph, &forest);
        assert!(required.iter().all(|&i| comp.same(inst.pairs[i].0, inst.pairs[i].1)));
        // every edge is needed by some pair
        for e in forest.iter() {
            let mut less = forest.clone();
            less.remove(e);
            let c = components(&inst.graph, &less);
            assert!(required.iter().any(|&i| !c.same(inst.pairs[i].0, inst.pairs[i].1)), "seed {seed}");
        }
        let cost: Rational = forest.iter().map(|e| inst.costs[e].clone()).sum();
        let lp = steiner_lp(&inst, &required);
        assert!(dual <= lp, "seed {seed}");
        assert!(cost <= int(2) * &dual, "seed {seed}: {cost} vs dual {dual}");
    }
}

#[test]
fn threshold_examples() {
    let s = star();
    let mut point = FracSolution::zeros(&s);
    point.z[0] = int(1);
    let sol = threshold_round(&s, &point, &rat(1, 3)).unwrap();
    assert!(sol.forest.is_empty());
    assert_eq!(sol.penalty, int(5));

    let full = FracSolution { x: vec![int(1); 3], z: vec![int(0)] };
    let theta = rat(1, 3);
    let sol = threshold_round(&s, &full, &theta).unwrap();
    assert!(sol.cost <= int(2) / (int(1) - &theta) * s.lp_objective(&full));
    assert!(threshold_round(&s, &full, &int(1)).is_err());
    assert!(threshold_round(&s, &FracSolution::zeros(&s), &theta).is_err());
    assert_eq!(threshold_bound(&rat(1, 3)), int(3));
}

#[test]
fn threshold_guarantee_on_random_points() {
    let spec = RandomSpec { nodes: 7, max_edges: 12, pairs: 4, ..RandomSpec::default() };
    for seed in 0..40 {
        let inst = random_instance(&spec, seed).unwrap();
        let point = random_feasible_point(&inst, seed, None).unwrap();
        let lp = inst.lp_objective(&point);
        let sol = threshold_round(&inst, &point, &rat(1, 3)).unwrap();
        assert!(sol.objective() <= int(3) * &lp, "seed {seed}");
        let (best, _) = best_threshold_round(&inst, &point).unwrap();
        assert!(best.objective() <= sol.objective());
    }
}

#[test]
fn best_threshold_on_integral_and_single_pair() {
    let s = star();
    let forest: EdgeSet = [0, 1].into_iter().collect();
    let point = FracSolution::integral(&s, &forest);
    let (sol, cand) = best_threshold_round(&s, &point).unwrap();
    assert_eq!(sol.objective(), s.lp_objective(&point));
    assert!(matches!(cand, RoundingCandidate::Support | RoundingCandidate::Threshold(_)));

    // single pair on a path of cost 2 with penalty 3/2: paying wins
    let path = PcsfInstance::new(named::path(3), vec![int(1); 2], vec![(0, 2)], vec![Penalty::Finite(rat(3, 2))]).unwrap();
    let lp = solve_lp(&path, LpMode::Exact).unwrap();
    let (sol, _) = best_threshold_round(&path, &lp.solution).unwrap();
    assert_eq!(sol.objective(), rat(3, 2));
}

#[test]
fn two_value_rounding() {
    let gamma = rat(1, 3);
    let spec = RandomSpec { nodes: 7, edge_prob: 0.7, max_edges: 12, pairs: 4, ..RandomSpec::default() };
    let mut checked = 0;
    for seed in 0..60 {
        let inst = random_instance(&spec, seed).unwrap();
        let Ok(point) = random_feasible_point(&inst, seed, Some(&gamma)) else { continue };
        let out = two_value_round(&inst, &point, &rat(3, 4)).unwrap();
        let lp = inst.lp_objective(&point);
        if two_value_gamma(&point).unwrap().is_some() {
            assert_eq!(out.bound, rat(9, 4));
        }
        assert!(out.solution.objective() <= &out.bound * &lp, "seed {seed}");
        checked += 1;
    }
    assert!(checked >= 20);

    // zero penalties: connecting nothing is free, so the z = 0 candidate wins
    let s = PcsfInstance::new(named::path(3), vec![int(1); 2], vec![(0, 2)], vec![Penalty::Finite(int(0))]).unwrap();
    let point = FracSolution { x: vec![rat(2, 3); 2], z: vec![rat(1, 3)] };
    let out = two_value_round(&s, &point, &rat(3, 4)).unwrap();
    assert_eq!(out.choice, TwoValueChoice::ZeroPairs);
    assert!(out.solution.forest.is_empty());
    assert!(two_value_round(&s, &point, &int(2)).is_err());
}

#[test]
fn mu_bound_values() {
    assert_eq!(mu_bound(&rat(1, 3)).unwrap(), (rat(9, 4), rat(3, 4)));
    assert_eq!(mu_bound(&rat(1, 4)).unwrap().0, rat(16, 7));
    assert!(mu_bound(&rat(1, 2)).is_err());
    assert!(mu_bound(&int(0)).is_err());
    // the bound is attained at p*
    for (n, d) in [(1, 10), (1, 5), (1, 4), (1, 3), (2, 5), (9, 20)] {
        let g = rat(n, d);
        let (mu, p) = mu_bound(&g).unwrap();
        assert_eq!(two_value_bound(&g, &p), mu);
    }
    // the maximum over a rational grid sits at 1/4
    let best = (1..500).map(|i| rat(i, 1000)).max_by(|a, b| mu_bound(a).unwrap().0.cmp(&mu_bound(b).unwrap().0)).unwrap();
    assert_eq!(best, rat(1, 4));
}

#[test]
fn evaluate_examples() {
    let s = star();
    let e = evaluate(&s, &EdgeSet::new(), &int(2)).unwrap();
    assert_eq!((e.cost, e.penalty.clone(), e.objective, e.lmp_objective), (int(0), int(5), int(5), int(10)));
    let all = evaluate(&s, &EdgeSet::all(&s.graph), &int(2)).unwrap();
    assert_eq!(all.penalty, int(0));
}
