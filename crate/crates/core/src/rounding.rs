//! Rounding fractional points to forests: the moat-growing Steiner forest
//! subroutine, threshold rounding, best-of-thresholds, and the two-value
//! mixing rule with its bound.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cutlp::check_feasible;
use crate::error::{Error, Result};
use crate::graph::{components, minimum_spanning_forest, EdgeSet, UnionFind};
use crate::instances::{FracSolution, PcsfInstance};
use crate::rational::{fmt_rational, int, Rational};

/// A forest with the pairs it leaves disconnected and its cost split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralSolution {
    pub forest: EdgeSet,
    pub disconnected: Vec<usize>,
    pub cost: Rational,
    pub penalty: Rational,
}

impl IntegralSolution {
    /// Fails with `Infeasible` if an infinite-penalty pair is left disconnected.
    pub fn from_forest(inst: &PcsfInstance, forest: EdgeSet) -> Result<Self> {
        if !forest.is_forest(&inst.graph) {
            return Err(Error::invalid("edge set contains a cycle"));
        }
        let (cost, penalty, disconnected) = inst.evaluate(&forest)?;
        Ok(IntegralSolution { forest, disconnected, cost, penalty })
    }

    pub fn objective(&self) -> Rational {
        &self.cost + &self.penalty
    }
}

/// Moat growing: forest connecting every required pair, plus the total dual
/// grown (a lower bound on the Steiner forest LP for those pairs).
pub fn gw_with_dual(inst: &PcsfInstance, required: &[usize]) -> Result<(EdgeSet, Rational)> {
    let g = &inst.graph;
    let n = g.node_count();
    let mut uf = UnionFind::new(n);
    let mut load = vec![Rational::zero(); g.edge_count()];
    let mut chosen: Vec<usize> = Vec::new();
    let mut dual = Rational::zero();
    let pairs: Vec<(usize, usize)> = required.iter().map(|&i| inst.pairs[i]).collect();
    loop {
        let mut active = vec![false; n];
        let mut any = false;
        for &(s, t) in &pairs {
            let (a, b) = (uf.find(s), uf.find(t));
            if a != b {
                active[a] = true;
                active[b] = true;
                any = true;
            }
        }
        if !any {
            break;
        }
        // next edge to go tight: smallest time, then smallest edge id
        let mut best: Option<(Rational, usize)> = None;
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let (a, b) = (uf.find(u), uf.find(v));
            if a == b {
                continue;
            }
            let rate = active[a] as i64 + active[b] as i64;
            if rate == 0 {
                continue;
            }
            let time = (&inst.costs[e] - &load[e]) / int(rate);
            if best.as_ref().is_none_or(|(t, _)| &time < t) {
                best = Some((time, e));
            }
        }
        let Some((delta, edge)) = best else {
            return Err(Error::Infeasible("a required pair cannot be connected".into()));
        };
        let delta = if delta.is_negative() { Rational::zero() } else { delta };
        let active_count = (0..n).filter(|&c| active[c] && uf.find(c) == c).count();
        dual += &delta * int(active_count as i64);
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let (a, b) = (uf.find(u), uf.find(v));
            if a != b {
                let rate = active[a] as i64 + active[b] as i64;
                if rate > 0 {
                    load[e] += &delta * int(rate);
                }
            }
        }
        let (u, v) = g.endpoints(edge);
        uf.union(u, v);
        chosen.push(edge);
    }
    Ok((prune_to_pairs(inst, &chosen.into_iter().collect(), required), dual))
}

pub fn gw_steiner_forest(inst: &PcsfInstance, required: &[usize]) -> Result<EdgeSet> {
    gw_with_dual(inst, required).map(|(f, _)| f)
}

/// Keeps only the forest edges that lie on the path of some listed pair.
pub fn prune_to_pairs(inst: &PcsfInstance, forest: &EdgeSet, pairs: &[usize]) -> EdgeSet {
    let g = &inst.graph;
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.node_count()];
    for e in forest.iter() {
        let (u, v) = g.endpoints(e);
        adj[u].push((e, v));
        adj[v].push((e, u));
    }
    let mut keep = BTreeSet::new();
    for &i in pairs {
        let (s, t) = inst.pairs[i];
        // parent pointers of a search from s inside the forest
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; g.node_count()];
        let mut seen = vec![false; g.node_count()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &(e, w) in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((e, u));
                    stack.push(w);
                }
            }
        }
        if seen[t] {
            let mut v = t;
            while let Some((e, u)) = parent[v] {
                keep.insert(e);
                v = u;
            }
        }
    }
    keep.into_iter().collect()
}

fn require_feasible(inst: &PcsfInstance, point: &FracSolution) -> Result<()> {
    point.check(inst)?;
    if let crate::cutlp::Feasibility::Violated(c) = check_feasible(inst, point)? {
        return Err(Error::invalid(format!("point is not feasible: {}", c.describe(inst))));
    }
    Ok(())
}

/// Connects the pairs with `z_i < theta` and pays the rest.
pub fn threshold_round(inst: &PcsfInstance, point: &FracSolution, theta: &Rational) -> Result<IntegralSolution> {
    if !theta.is_positive() || theta >= &Rational::one() {
        return Err(Error::invalid(format!("threshold must lie in (0,1), got {}", fmt_rational(theta))));
    }
    require_feasible(inst, point)?;
    round_below(inst, point, theta)
}

fn round_below(inst: &PcsfInstance, point: &FracSolution, theta: &Rational) -> Result<IntegralSolution> {
    let required: Vec<usize> = (0..inst.pair_count()).filter(|&i| &point.z[i] < theta).collect();
    IntegralSolution::from_forest(inst, gw_steiner_forest(inst, &required)?)
}

/// `max(2/(1-theta), 1/theta)`.
pub fn threshold_bound(theta: &Rational) -> Rational {
    let a = int(2) / (Rational::one() - theta);
    let b = Rational::one() / theta;
    a.max(b)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RoundingCandidate {
    /// Threshold rounding at this threshold.
    Threshold(String),
    /// A cheapest spanning forest of the support of `x`, pruned to the pairs it connects.
    Support,
}

/// Best of threshold rounding over every distinct `z` value, `1/3`, and
/// (when all `z < 1`) the all-pairs threshold, compared also against the
/// support forest. Ties go to the smaller threshold.
pub fn best_threshold_round(inst: &PcsfInstance, point: &FracSolution) -> Result<(IntegralSolution, RoundingCandidate)> {
    require_feasible(inst, point)?;
    let mut thetas: BTreeSet<Rational> = point.z.iter().filter(|z| z.is_positive()).cloned().collect();
    thetas.insert(Rational::new(1.into(), 3.into()));
    if point.z.iter().all(|z| z < &Rational::one()) {
        thetas.insert(Rational::one());
    }
    let thetas: Vec<Rational> = thetas.into_iter().collect();
    let rounded: Vec<IntegralSolution> =
        thetas.par_iter().map(|t| round_below(inst, point, t)).collect::<Result<Vec<_>>>()?;
    let mut best: Option<(IntegralSolution, RoundingCandidate)> = None;
    for (sol, theta) in rounded.into_iter().zip(&thetas) {
        if best.as_ref().is_none_or(|(b, _)| sol.objective() < b.objective()) {
            best = Some((sol, RoundingCandidate::Threshold(fmt_rational(theta))));
        }
    }
    let support = support_forest(inst, point)?;
    let (best_sol, cand) = best.expect("at least one threshold");
    if support.objective() < best_sol.objective() {
        return Ok((support, RoundingCandidate::Support));
    }
    Ok((best_sol, cand))
}

fn support_forest(inst: &PcsfInstance, point: &FracSolution) -> Result<IntegralSolution> {
    let support = point.support();
    let tree = minimum_spanning_forest(&inst.graph, &inst.costs, &support);
    let comp = components(&inst.graph, &tree);
    let connected: Vec<usize> = (0..inst.pair_count()).filter(|&i| comp.same(inst.pairs[i].0, inst.pairs[i].1)).collect();
    IntegralSolution::from_forest(inst, prune_to_pairs(inst, &tree, &connected))
}

/// Which of the two candidates `two_value_round` returned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TwoValueChoice {
    /// Connect only the `z = 0` pairs and pay the others.
    ZeroPairs,
    /// Connect every pair.
    AllPairs,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoValueOutcome {
    pub solution: IntegralSolution,
    pub choice: TwoValueChoice,
    pub gamma: Rational,
    /// `max((2 - 2 p gamma)/(1 - gamma), p/gamma)`.
    pub bound: Rational,
}

/// The nonzero value of a point whose `z` takes at most two values, one of them 0.
pub fn two_value_gamma(point: &FracSolution) -> Result<Option<Rational>> {
    let values: BTreeSet<&Rational> = point.z.iter().filter(|z| !z.is_zero()).collect();
    match values.len() {
        0 => Ok(None),
        1 => Ok(values.into_iter().next().cloned()),
        _ => Err(Error::invalid("z takes more than one nonzero value")),
    }
}

pub fn two_value_bound(gamma: &Rational, p: &Rational) -> Rational {
    let one = Rational::one();
    let a = (int(2) - int(2) * p * gamma) / (&one - gamma);
    let b = p / gamma;
    a.max(b)
}

/// Cheaper of connecting only the `z = 0` pairs and connecting all pairs.
pub fn two_value_round(inst: &PcsfInstance, point: &FracSolution, p: &Rational) -> Result<TwoValueOutcome> {
    if p.is_negative() || p > &Rational::one() {
        return Err(Error::invalid("p must lie in [0,1]"));
    }
    require_feasible(inst, point)?;
    let gamma = two_value_gamma(point)?;
    if let Some(g) = &gamma {
        if g >= &Rational::new(1.into(), 2.into()) {
            return Err(Error::invalid(format!("gamma = {} is not below 1/2", fmt_rational(g))));
        }
    }
    let zero_pairs: Vec<usize> = (0..inst.pair_count()).filter(|&i| point.z[i].is_zero()).collect();
    let all: Vec<usize> = (0..inst.pair_count()).collect();
    let first = IntegralSolution::from_forest(inst, gw_steiner_forest(inst, &zero_pairs)?)?;
    let second = IntegralSolution::from_forest(inst, gw_steiner_forest(inst, &all)?)?;
    let (solution, choice) = if second.objective() < first.objective() {
        (second, TwoValueChoice::AllPairs)
    } else {
        (first, TwoValueChoice::ZeroPairs)
    };
    let (gamma, bound) = match gamma {
        Some(g) => {
            let b = two_value_bound(&g, p);
            (g, b)
        }
        None => (Rational::zero(), int(2)),
    };
    Ok(TwoValueOutcome { solution, choice, gamma, bound })
}

/// `mu = 2/(2 gamma^2 - gamma + 1)` and the minimising `p* = 2 gamma/(2 gamma^2 - gamma + 1)`.
pub fn mu_bound(gamma: &Rational) -> Result<(Rational, Rational)> {
    if !gamma.is_positive() || gamma >= &Rational::new(1.into(), 2.into()) {
        return Err(Error::invalid(format!("gamma must lie in (0, 1/2), got {}", fmt_rational(gamma))));
    }
    let denom = int(2) * gamma * gamma - gamma + Rational::one();
    Ok((int(2) / &denom, int(2) * gamma / denom))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub cost: Rational,
    pub penalty: Rational,
    pub objective: Rational,
    pub lmp_objective: Rational,
}

/// Cost, penalty, their sum, and `cost + beta * penalty`.
pub fn evaluate(inst: &PcsfInstance, forest: &EdgeSet, beta: &Rational) -> Result<Evaluation> {
    if forest.iter().any(|e| e >= inst.edge_count()) {
        return Err(Error::invalid("forest references an unknown edge"));
    }
    let (cost, penalty, _) = inst.evaluate(forest)?;
    Ok(Evaluation { objective: &cost + &penalty, lmp_objective: &cost + beta * &penalty, cost, penalty })
}

/// Total finite penalty of a pair list.
pub fn penalty_sum(inst: &PcsfInstance, pairs: &[usize]) -> Rational {
    pairs.iter().filter_map(|&i| inst.penalties[i].finite()).sum()
}

#[cfg(test)]
mod tests;
