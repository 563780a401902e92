//! Distributions over forests that are dominated by a fractional point:
//! column generation for the smallest scaling factor, explicit
//! distributions on the layered construction, and the exact probability
//! bookkeeping behind the lower-bound argument.

mod bounds;
mod chain;
mod colgen;
mod trees;

pub use bounds::{bound_alpha, bound_alpha_limit, bound_beta, bound_beta_limit};
pub use chain::{chain_trace, find_witness_node, trim, ChainStep, ChainTrace, WitnessNode};
pub use colgen::{
    feasibility_at_beta, min_alpha, min_beta, two_value_lmp_distribution, witness_costs_from_dual, BetaFeasibility,
    Decomposition, DualWitness,
};
pub use trees::{explicit_gap_distribution, spanning_tree_decomposition};

use std::path::Path;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{components, EdgeSet, Graph};
use crate::instances::io::{content_lines, read_text, write_text};
use crate::instances::{FracSolution, PcsfInstance, PointMode};
use crate::rational::{fmt_rational, parse_rational, serde_opt_rational, serde_rational, serde_rationals, Rational};

/// Forests with exact weights summing to one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestDistribution {
    entries: Vec<(EdgeSet, Rational)>,
}

impl ForestDistribution {
    /// Merges repeated forests and drops zero weights, keeping first-appearance order.
    pub fn new(g: &Graph, entries: Vec<(EdgeSet, Rational)>) -> Result<Self> {
        let mut merged: Vec<(EdgeSet, Rational)> = Vec::new();
        for (forest, w) in entries {
            if w.is_negative() {
                return Err(Error::invalid(format!("negative weight {}", fmt_rational(&w))));
            }
            if w.is_zero() {
                continue;
            }
            match merged.iter_mut().find(|(f, _)| *f == forest) {
                Some((_, acc)) => *acc += w,
                None => merged.push((forest, w)),
            }
        }
        let dist = ForestDistribution { entries: merged };
        dist.validate(g)?;
        Ok(dist)
    }

    pub fn single(g: &Graph, forest: EdgeSet) -> Result<Self> {
        Self::new(g, vec![(forest, Rational::one())])
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        let total: Rational = self.entries.iter().map(|(_, w)| w).sum();
        if !total.is_one() {
            return Err(Error::invalid(format!("weights sum to {}, not 1", fmt_rational(&total))));
        }
        for (i, (forest, _)) in self.entries.iter().enumerate() {
            if !forest.is_subset_of(g) {
                return Err(Error::invalid(format!("forest {i} uses an edge outside the graph")));
            }
            if !forest.is_forest(g) {
                return Err(Error::invalid(format!("forest {i} contains a cycle")));
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &[(EdgeSet, Rational)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Pr[e in F]` for every edge.
    pub fn marginals(&self, edge_count: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); edge_count];
        for (forest, w) in &self.entries {
            for e in forest.iter() {
                out[e] += w;
            }
        }
        out
    }

    /// Total weight of the forests satisfying `event`.
    pub fn probability(&self, event: impl Fn(&EdgeSet) -> bool) -> Rational {
        self.entries.iter().filter(|(f, _)| event(f)).map(|(_, w)| w).sum()
    }

    /// `Pr[s ~ t]` for each listed pair.
    pub fn pair_probabilities(&self, g: &Graph, pairs: &[(usize, usize)]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); pairs.len()];
        for (forest, w) in &self.entries {
            let comp = components(g, forest);
            for (i, &(s, t)) in pairs.iter().enumerate() {
                if comp.same(s, t) {
                    out[i] += w;
                }
            }
        }
        out
    }
}

/// Exact marginals and connection probabilities against the dominance targets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributionReport {
    pub mode: String,
    #[serde(rename = "alpha_or_beta", with = "serde_rational")]
    pub factor: Rational,
    #[serde(with = "serde_rationals")]
    pub marginals: Vec<Rational>,
    #[serde(with = "serde_rationals")]
    pub pair_probs: Vec<Rational>,
    /// Largest `Pr[e in F] / x_e` over edges with `x_e > 0`.
    #[serde(with = "serde_opt_rational")]
    pub worst_edge_ratio: Option<Rational>,
    /// Largest `Pr[s !~ t] / z_i` over pairs with `z_i > 0`.
    #[serde(with = "serde_opt_rational")]
    pub worst_pair_ratio: Option<Rational>,
    pub edge_violations: Vec<usize>,
    pub pair_violations: Vec<usize>,
    pub passes: bool,
}

/// Checks `Pr[e in F] <= f x_e` for every edge, and `Pr[s !~ t] <= f z_i`
/// (gap) or `Pr[s !~ t] <= z_i` (lmp) for every pair.
pub fn verify_distribution(
    inst: &PcsfInstance,
    point: &FracSolution,
    dist: &ForestDistribution,
    mode: PointMode,
    factor: &Rational,
) -> Result<DistributionReport> {
    point.check(inst)?;
    dist.validate(&inst.graph)?;
    let marginals = dist.marginals(inst.edge_count());
    let pair_probs = dist.pair_probabilities(&inst.graph, &inst.pairs);
    let mut edge_violations = Vec::new();
    let mut worst_edge_ratio: Option<Rational> = None;
    for (e, (p, x)) in marginals.iter().zip(&point.x).enumerate() {
        if p > &(factor * x) {
            edge_violations.push(e);
        }
        if x.is_positive() {
            let r = p / x;
            if worst_edge_ratio.as_ref().map_or(true, |w| &r > w) {
                worst_edge_ratio = Some(r);
            }
        }
    }
    let pair_factor = match mode {
        PointMode::Gap => factor.clone(),
        PointMode::Lmp => Rational::one(),
    };
    let mut pair_violations = Vec::new();
    let mut worst_pair_ratio: Option<Rational> = None;
    for (i, (p, z)) in pair_probs.iter().zip(&point.z).enumerate() {
        let apart = Rational::one() - p;
        if apart > &pair_factor * z {
            pair_violations.push(i);
        }
        if z.is_positive() {
            let r = &apart / z;
            if worst_pair_ratio.as_ref().map_or(true, |w| &r > w) {
                worst_pair_ratio = Some(r);
            }
        }
    }
    Ok(DistributionReport {
        mode: mode_name(mode).to_string(),
        factor: factor.clone(),
        passes: edge_violations.is_empty() && pair_violations.is_empty(),
        marginals,
        pair_probs,
        worst_edge_ratio,
        worst_pair_ratio,
        edge_violations,
        pair_violations,
    })
}

fn mode_name(mode: PointMode) -> &'static str {
    match mode {
        PointMode::Gap => "gap",
        PointMode::Lmp => "lmp",
    }
}

/// Blocks of `forest <weight>` followed by one `e <edge-id>` line per edge.
pub fn format_distribution(dist: &ForestDistribution) -> String {
    let mut out = String::new();
    for (forest, w) in dist.entries() {
        out.push_str(&format!("forest {}\n", fmt_rational(w)));
        for e in forest.iter() {
            out.push_str(&format!("e {e}\n"));
        }
    }
    out
}

pub fn parse_distribution(text: &str, g: &Graph) -> Result<ForestDistribution> {
    let mut entries: Vec<(EdgeSet, Rational)> = Vec::new();
    for (lineno, tokens) in content_lines(text) {
        let err = |msg: &str| Error::Parse(format!("line {lineno}: {msg}"));
        match tokens.as_slice() {
            ["forest", w] => entries.push((EdgeSet::new(), parse_rational(w)?)),
            ["e", id] => {
                let e: usize = id.parse().map_err(|_| err("bad edge id"))?;
                if e >= g.edge_count() {
                    return Err(err(&format!("edge {e} out of range")));
                }
                let Some((forest, _)) = entries.last_mut() else { return Err(err("edge before any forest line")) };
                forest.insert(e);
            }
            _ => return Err(err("expected `forest <weight>` or `e <edge-id>`")),
        }
    }
    ForestDistribution::new(g, entries)
}

pub fn read_distribution(path: &Path, g: &Graph) -> Result<ForestDistribution> {
    parse_distribution(&read_text(path)?, g)
}

pub fn write_distribution(dist: &ForestDistribution, path: &Path) -> Result<()> {
    write_text(path, &format_distribution(dist))
}

#[cfg(test)]
mod tests;
