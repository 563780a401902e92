//! Oracles for the integration tests. They avoid the crate's own solvers:
//! integral optima by scanning edge subsets, cut feasibility by scanning node
//! subsets, spanning-tree marginals by the matrix-tree theorem.

#![allow(dead_code)]

use num_traits::{One, Zero};
use pcsf::graph::{named, Graph};
use pcsf::instances::{FracSolution, PcsfInstance};
use pcsf::rational::{int, rat};
use pcsf::{Penalty, Rational};

pub fn c4_double_pair() -> PcsfInstance {
    PcsfInstance::new(named::cycle(4), vec![int(1); 4], vec![(0, 2), (1, 3)], vec![Penalty::Infinite; 2]).unwrap()
}

pub fn triangle() -> (PcsfInstance, FracSolution) {
    let inst =
        PcsfInstance::new(named::complete(3), vec![int(1); 3], vec![(0, 1)], vec![Penalty::Finite(int(1))]).unwrap();
    (inst, FracSolution { x: vec![rat(1, 3); 3], z: vec![rat(1, 3)] })
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

/// Component label of every node under the edges in `mask`.
pub fn labels(g: &Graph, mask: u64) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..g.node_count()).collect();
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if mask >> e & 1 == 1 {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            parent[a] = b;
        }
    }
    (0..g.node_count()).map(|v| find(&mut parent, v)).collect()
}

/// Minimum of cost plus penalties over every edge subset (cycles allowed;
/// costs are nonnegative so the minimum is attained by a forest).
pub fn brute_ip(inst: &PcsfInstance) -> Option<Rational> {
    let m = inst.edge_count();
    assert!(m <= 20, "brute force over {m} edges");
    let mut best: Option<Rational> = None;
    'subsets: for mask in 0u64..1 << m {
        let comp = labels(&inst.graph, mask);
        let mut total: Rational = (0..m).filter(|e| mask >> e & 1 == 1).map(|e| inst.costs[e].clone()).sum();
        for (&(s, t), p) in inst.pairs.iter().zip(&inst.penalties) {
            if comp[s] != comp[t] {
                match p {
                    Penalty::Infinite => continue 'subsets,
                    Penalty::Finite(v) => total += v,
                }
            }
        }
        if best.as_ref().is_none_or(|b| &total < b) {
            best = Some(total);
        }
    }
    best
}

/// Every cut constraint checked over every node subset.
pub fn brute_cut_feasible(inst: &PcsfInstance, point: &FracSolution) -> bool {
    let n = inst.graph.node_count();
    assert!(n <= 16, "brute force over {n} nodes");
    if point.x.iter().chain(&point.z).any(|v| v < &Rational::zero()) {
        return false;
    }
    for side in 0u64..1 << n {
        let crossing: Rational = inst
            .graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| (side >> u & 1) != (side >> v & 1))
            .map(|(e, _)| point.x[e].clone())
            .sum();
        for (i, &(s, t)) in inst.pairs.iter().enumerate() {
            if (side >> s & 1) == 1 && (side >> t & 1) == 0 {
                let z = if inst.penalties[i].is_infinite() { Rational::zero() } else { point.z[i].clone() };
                if &crossing + z < Rational::one() {
                    return false;
                }
            }
        }
    }
    true
}

/// Determinant by fraction-exact elimination.
pub fn determinant(mut a: Vec<Vec<Rational>>) -> Rational {
    let n = a.len();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else { return Rational::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let pivot = a[c][c].clone();
        det *= &pivot;
        for r in c + 1..n {
            let f = &a[r][c] / &pivot;
            if f.is_zero() {
                continue;
            }
            for k in c..n {
                let v = &f * &a[c][k];
                a[r][k] -= v;
            }
        }
    }
    det
}

/// Number of spanning trees of the graph on the edges with `keep[e]`.
pub fn tree_count(g: &Graph, keep: &[bool]) -> Rational {
    let n = g.node_count();
    let mut lap = vec![vec![Rational::zero(); n]; n];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if keep[e] && u != v {
            lap[u][u] += int(1);
            lap[v][v] += int(1);
            lap[u][v] -= int(1);
            lap[v][u] -= int(1);
        }
    }
    let minor: Vec<Vec<Rational>> = lap[1..].iter().map(|row| row[1..].to_vec()).collect();
    determinant(minor)
}

/// `Pr[e in T]` for a uniform spanning tree `T`.
pub fn uniform_tree_marginal(g: &Graph, e: usize) -> Rational {
    let all = vec![true; g.edge_count()];
    let mut without = all.clone();
    without[e] = false;
    Rational::one() - tree_count(g, &without) / tree_count(g, &all)
}

/// `(3 - 3t + 2s - 8s/n)/(s + 1)` in floating point, `s = sum_{i<=k} (2/3)^i`.
pub fn alpha_bound_f64(n: f64, k: u32) -> f64 {
    let q: f64 = 2.0 / 3.0;
    let s: f64 = (0..=k).map(|i| q.powi(i as i32)).sum();
    let t = q.powi(k as i32 + 1);
    (3.0 - 3.0 * t + 2.0 * s - 8.0 * s / n) / (s + 1.0)
}

/// `max((2 - 2 p g)/(1 - g), p/g)` minimised over `p` in `[0, 1]` by a grid
/// followed by ternary refinement (the function is convex in `p`).
pub fn two_value_minmax(g: f64) -> (f64, f64) {
    let f = |p: f64| ((2.0 - 2.0 * p * g) / (1.0 - g)).max(p / g);
    let steps = 10_000;
    let mut best = 0;
    for i in 0..=steps {
        if f(i as f64 / steps as f64) < f(best as f64 / steps as f64) {
            best = i;
        }
    }
    let (mut lo, mut hi) = (((best as f64) - 1.0).max(0.0) / steps as f64, ((best as f64) + 1.0).min(steps as f64) / steps as f64);
    for _ in 0..200 {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if f(a) <= f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let p = (lo + hi) / 2.0;
    (f(p), p)
}

/// The Steiner forest version of `inst`: pairs joined in the graph become
/// mandatory, the others are dropped.
pub fn steiner_version(inst: &PcsfInstance) -> PcsfInstance {
    let all = labels(&inst.graph, u64::MAX >> (64 - inst.edge_count().clamp(1, 63)));
    let pairs: Vec<(usize, usize)> = inst.pairs.iter().copied().filter(|&(s, t)| all[s] == all[t]).collect();
    let n = pairs.len();
    PcsfInstance::new(inst.graph.clone(), inst.costs.clone(), pairs, vec![Penalty::Infinite; n]).unwrap()
}

/// Edge masks of every acyclic edge subset.
pub fn forest_masks(g: &Graph) -> Vec<u64> {
    let m = g.edge_count();
    assert!(m <= 20, "forest scan over {m} edges");
    (0u64..1 << m)
        .filter(|&mask| {
            let mut parent: Vec<usize> = (0..g.node_count()).collect();
            g.edges().iter().enumerate().filter(|(e, _)| mask >> e & 1 == 1).all(|(_, &(u, v))| {
                let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                parent[a] = b;
                a != b
            })
        })
        .collect()
}

/// `min alpha` with every feasible forest as a column:
/// `sum lambda (x^q, z^q) <= alpha (x, z)`, `sum lambda = 1`.
pub fn enumerated_alpha(inst: &PcsfInstance, point: &FracSolution) -> Rational {
    use pcsf::simplex::{solve_lp, LpStatus, Relation, Row};
    let g = &inst.graph;
    let mut cols: Vec<(u64, Vec<bool>)> = Vec::new();
    for mask in forest_masks(g) {
        let comp = labels(g, mask);
        let apart: Vec<bool> = inst.pairs.iter().map(|&(s, t)| comp[s] != comp[t]).collect();
        if apart.iter().zip(&inst.penalties).any(|(a, p)| *a && p.is_infinite()) {
            continue;
        }
        cols.push((mask, apart));
    }
    let q = cols.len();
    let mut rows = Vec::new();
    for e in 0..inst.edge_count() {
        let mut coeffs: Vec<(usize, Rational)> =
            cols.iter().enumerate().filter(|(_, c)| c.0 >> e & 1 == 1).map(|(j, _)| (j, int(1))).collect();
        coeffs.push((q, -point.x[e].clone()));
        rows.push(Row { coeffs, relation: Relation::Le, rhs: int(0) });
    }
    for i in 0..inst.pair_count() {
        let mut coeffs: Vec<(usize, Rational)> =
            cols.iter().enumerate().filter(|(_, c)| c.1[i]).map(|(j, _)| (j, int(1))).collect();
        coeffs.push((q, -point.z[i].clone()));
        rows.push(Row { coeffs, relation: Relation::Le, rhs: int(0) });
    }
    rows.push(Row { coeffs: (0..q).map(|j| (j, int(1))).collect(), relation: Relation::Eq, rhs: int(1) });
    let mut costs = vec![int(0); q];
    costs.push(int(1));
    let (status, _, value, _) = solve_lp(costs, rows);
    assert_eq!(status, LpStatus::Optimal);
    value
}
