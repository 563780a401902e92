use super::*;
use crate::graph::named;
use crate::instances::{random_instance, RandomSpec};
use crate::rational::{int, rat};

fn c4_double_pair() -> PcsfInstance {
    PcsfInstance::new(named::cycle(4), vec![int(1); 4], vec![(0, 2), (1, 3)], vec![Penalty::Infinite; 2]).unwrap()
}

#[test]
fn small_optima() {
    let tri = PcsfInstance::new(named::complete(3), vec![int(1); 3], vec![(0, 1)], vec![Penalty::Finite(rat(1, 2))])
        .unwrap();
    let sol = solve_ip(&tri).unwrap();
    assert_eq!(sol.objective(), rat(1, 2));
    assert!(sol.forest.is_empty());
    assert_eq!(solve_ip(&c4_double_pair()).unwrap().objective(), int(3));
    let path = PcsfInstance::new(named::path(3), vec![int(1); 2], vec![(0, 2)], vec![Penalty::Finite(int(3))]).unwrap();
    assert_eq!(solve_ip(&path).unwrap().objective(), int(2));
}

#[test]
fn enumeration_examples() {
    let empty = PcsfInstance::new(Graph::new(2), vec![], vec![(0, 1)], vec![Penalty::Finite(int(5))]).unwrap();
    assert_eq!(enumerate_ip(&empty).unwrap().0, int(5));
    let single = PcsfInstance::new(named::path(2), vec![int(1)], vec![(0, 1)], vec![Penalty::Finite(int(2))]).unwrap();
    let (value, all) = enumerate_ip(&single).unwrap();
    assert_eq!((value, all.len()), (int(1), 1));
    // C4 with both pairs forced: the four 3-edge paths
    let (value, all) = enumerate_ip(&c4_double_pair()).unwrap();
    assert_eq!((value, all.len()), (int(3), 4));
    let big = PcsfInstance::new(named::complete(7), vec![int(1); 21], vec![(0, 1)], vec![Penalty::Infinite]).unwrap();
    assert!(matches!(enumerate_ip(&big), Err(Error::ScaleCap { .. })));
}

#[test]
fn matches_enumeration_on_random_instances() {
    let spec = RandomSpec { nodes: 7, edge_prob: 0.6, max_edges: 14, pairs: 4, ..RandomSpec::default() };
    for seed in 0..100 {
        let inst = random_instance(&spec, seed).unwrap();
        let (value, optimal) = enumerate_ip(&inst).unwrap();
        let sol = solve_ip(&inst).unwrap();
        assert_eq!(sol.objective(), value, "seed {seed}");
        assert!(sol.forest.is_forest(&inst.graph));
        assert!(optimal.iter().all(|o| o.objective() == value));
    }
}

#[test]
fn search_without_lp_bound_agrees() {
    let spec = RandomSpec { nodes: 6, max_edges: 11, pairs: 3, ..RandomSpec::default() };
    let plain = IpOptions { lp_bound: false, frontier: false, ..IpOptions::default() };
    let branching = IpOptions { frontier: false, ..IpOptions::default() };
    for seed in 0..25 {
        let inst = random_instance(&spec, 1000 + seed).unwrap();
        let (a, _) = solve_ip_with(&inst, &branching).unwrap();
        let (b, _) = solve_ip_with(&inst, &plain).unwrap();
        assert_eq!(a.objective(), b.objective(), "seed {seed}");
    }
}

#[test]
fn frontier_program_agrees_with_branching() {
    let spec = RandomSpec { nodes: 8, edge_prob: 0.5, max_edges: 14, pairs: 5, infinite_prob: 0.3, ..RandomSpec::default() };
    let branching = IpOptions { frontier: false, ..IpOptions::default() };
    for seed in 0..60 {
        let inst = random_instance(&spec, 500 + seed).unwrap();
        let (a, stats) = solve_ip_with(&inst, &IpOptions::default()).unwrap();
        assert!(stats.frontier_width.is_some());
        let (b, _) = solve_ip_with(&inst, &branching).unwrap();
        assert_eq!(a.objective(), b.objective(), "seed {seed}");
        assert_eq!(a.objective(), enumerate_ip(&inst).unwrap().0, "seed {seed}");
    }
}

#[test]
fn gap_of_the_double_pair_cycle() {
    let r = gap(&c4_double_pair()).unwrap();
    assert_eq!((r.lp, r.ip, r.ratio), (int(2), int(3), rat(3, 2)));
    let path = PcsfInstance::new(named::path(3), vec![int(1); 2], vec![(0, 2)], vec![Penalty::Finite(int(3))]).unwrap();
    assert_eq!(gap(&path).unwrap().ratio, int(1));
}

#[test]
fn pricing_uses_the_given_weights() {
    let inst = c4_double_pair().with_costs(vec![int(1); 4], vec![Penalty::Finite(int(1)); 2]).unwrap();
    let sol = price(&inst, &[int(0), int(0), int(5), int(5)], &[int(9), int(9)]).unwrap();
    assert_eq!(sol.disconnected, Vec::<usize>::new());
    assert!(price(&inst, &[int(0)], &[int(1), int(1)]).is_err());
}

#[test]
fn infeasible_and_capped() {
    let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
    let inst = PcsfInstance::new(g, vec![int(1); 2], vec![(0, 3)], vec![Penalty::Infinite]).unwrap();
    assert!(matches!(solve_ip(&inst), Err(Error::Infeasible(_))));
    let opts = IpOptions { edge_cap: 1, ..IpOptions::default() };
    assert!(matches!(solve_ip_with(&inst, &opts), Err(Error::ScaleCap { .. })));
}
