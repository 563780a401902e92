use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FracSolution, PcsfInstance};
use crate::error::{Error, Result};
use crate::graph::{components, min_cut, Capacities, EdgeSet, Graph};
use crate::rational::{int, rat, Penalty, Rational};

/// Erdős–Rényi graph with small rational costs and penalties.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomSpec {
    pub nodes: usize,
    pub edge_prob: f64,
    pub max_edges: usize,
    pub pairs: usize,
    /// Costs are multiples of 1/2 in `[0, cost_max]`.
    pub cost_max: i64,
    /// Penalties are multiples of 1/3 in `[0, penalty_max]`.
    pub penalty_max: i64,
    /// Chance that a pair whose endpoints are connected in the graph gets an infinite penalty.
    pub infinite_prob: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec { nodes: 6, edge_prob: 0.5, max_edges: 12, pairs: 3, cost_max: 3, penalty_max: 4, infinite_prob: 0.2 }
    }
}

pub fn random_instance(spec: &RandomSpec, seed: u64) -> Result<PcsfInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.nodes.max(2);
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(spec.edge_prob.clamp(0.0, 1.0)) {
                candidates.push((u, v));
            }
        }
    }
    candidates.shuffle(&mut rng);
    candidates.truncate(spec.max_edges);
    candidates.sort_unstable();
    let graph = Graph::from_edges(n, &candidates)?;
    let costs: Vec<Rational> = (0..graph.edge_count()).map(|_| rat(rng.gen_range(0..=2 * spec.cost_max), 2)).collect();

    let reach = components(&graph, &EdgeSet::all(&graph));
    let mut all_pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    all_pairs.shuffle(&mut rng);
    all_pairs.truncate(spec.pairs);
    let mut pairs = Vec::new();
    let mut penalties = Vec::new();
    for (u, v) in all_pairs {
        let (s, t) = if rng.gen_bool(0.5) { (u, v) } else { (v, u) };
        let infinite = reach.same(s, t) && rng.gen_bool(spec.infinite_prob.clamp(0.0, 1.0));
        pairs.push((s, t));
        penalties.push(if infinite {
            Penalty::Infinite
        } else {
            Penalty::Finite(rat(rng.gen_range(0..=3 * spec.penalty_max), 3))
        });
    }
    PcsfInstance::new(graph, costs, pairs, penalties)
}

/// A random feasible point. With `gamma`, every `z` is `0` or `gamma`;
/// otherwise `z_i = max(0, 1 - mincut_i)`. The two-valued variant needs
/// every pair connected in the graph.
pub fn random_feasible_point(inst: &PcsfInstance, seed: u64, gamma: Option<&Rational>) -> Result<FracSolution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let levels = [rat(0, 1), rat(1, 4), rat(1, 3), rat(1, 2), rat(2, 3), int(1)];
    let mut x: Vec<Rational> = (0..inst.edge_count()).map(|_| levels.choose(&mut rng).unwrap().clone()).collect();
    let g = &inst.graph;
    let reach = components(g, &EdgeSet::all(g));
    if gamma.is_some() && inst.pairs.iter().any(|&(s, t)| !reach.same(s, t)) {
        return Err(Error::invalid("two-valued point needs every pair connected in the graph"));
    }
    // pairs that must get z = 0
    let strict: Vec<bool> = inst
        .penalties
        .iter()
        .zip(&inst.pairs)
        .map(|(p, &(s, t))| p.is_infinite() || (gamma.is_some() && reach.same(s, t) && rng.gen_bool(0.4)))
        .collect();
    let bump = rat(1, 4);
    loop {
        let mut changed = false;
        for (i, &(s, t)) in inst.pairs.iter().enumerate() {
            if !reach.same(s, t) {
                continue;
            }
            let target = match (strict[i], gamma) {
                (true, _) => Rational::one(),
                (false, Some(gm)) => Rational::one() - gm,
                (false, None) => continue,
            };
            let (value, side) = min_cut(g, &Capacities::new(g, x.clone())?, s, t)?;
            if value < target {
                for e in g.cut_edges(&side) {
                    x[e] += &bump;
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let cap = Capacities::new(g, x.clone())?;
    let mut z = Vec::with_capacity(inst.pair_count());
    for &(s, t) in &inst.pairs {
        let cut = if reach.same(s, t) { min_cut(g, &cap, s, t)?.0 } else { Rational::zero() };
        let deficit = Rational::one() - cut;
        z.push(match gamma {
            Some(gm) if deficit.is_positive() => gm.clone(),
            Some(_) => Rational::zero(),
            None if deficit.is_positive() => deficit,
            None => Rational::zero(),
        });
    }
    Ok(FracSolution { x, z })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_valid() {
        let spec = RandomSpec::default();
        for seed in 0..20 {
            let a = random_instance(&spec, seed).unwrap();
            let b = random_instance(&spec, seed).unwrap();
            assert_eq!(a, b);
            assert!(a.edge_count() <= spec.max_edges);
            let p = random_feasible_point(&a, seed, None).unwrap();
            p.check(&a).unwrap();
        }
    }
}
