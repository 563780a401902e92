//! Prize-collecting Steiner forest instances, fractional points, and the
//! generators for the layered and gadget constructions.

mod base;
mod gadget;
pub mod io;
mod layered;
mod random;

pub use base::{make_base, BaseGraph, BaseKind};
pub use gadget::{gadget_family_labels, gadget_tight_family, pcst_gadget_instance, GadgetLayout, WAVY_EDGES, STRAIGHT_EDGES};
pub use layered::{
    build_layered, canonical_point, layered_instance, CopyInfo, CostScheme, EdgeInfo, LayeredConstruction,
    NodeInfo, NodeRole, PairKind, PathGroup, PointMode, DEFAULT_NODE_CAP,
};
pub use random::{random_feasible_point, random_instance, RandomSpec};

use std::collections::HashSet;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{components, EdgeSet, Graph};
use crate::rational::{Penalty, Rational};

/// Graph, edge costs, terminal pairs and their penalties.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcsfInstance {
    pub graph: Graph,
    pub node_names: Vec<String>,
    pub costs: Vec<Rational>,
    pub pairs: Vec<(usize, usize)>,
    pub penalties: Vec<Penalty>,
}

impl PcsfInstance {
    pub fn new(
        graph: Graph,
        costs: Vec<Rational>,
        pairs: Vec<(usize, usize)>,
        penalties: Vec<Penalty>,
    ) -> Result<Self> {
        let names = (0..graph.node_count()).map(|v| v.to_string()).collect();
        Self::with_names(graph, names, costs, pairs, penalties)
    }

    pub fn with_names(
        graph: Graph,
        node_names: Vec<String>,
        costs: Vec<Rational>,
        pairs: Vec<(usize, usize)>,
        penalties: Vec<Penalty>,
    ) -> Result<Self> {
        let inst = PcsfInstance { graph, node_names, costs, pairs, penalties };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.graph;
        if self.node_names.len() != g.node_count() {
            return Err(Error::invalid("one name per node required"));
        }
        if self.costs.len() != g.edge_count() {
            return Err(Error::invalid(format!("{} costs for {} edges", self.costs.len(), g.edge_count())));
        }
        if let Some(e) = self.costs.iter().position(|c| c.is_negative()) {
            return Err(Error::invalid(format!("negative cost on edge {e}")));
        }
        if self.penalties.len() != self.pairs.len() {
            return Err(Error::invalid("one penalty per pair required"));
        }
        let mut seen = HashSet::new();
        for (i, &(s, t)) in self.pairs.iter().enumerate() {
            if s >= g.node_count() || t >= g.node_count() {
                return Err(Error::invalid(format!("pair {i} references a missing node")));
            }
            if s == t {
                return Err(Error::invalid(format!("pair {i} has identical endpoints")));
            }
            if !seen.insert((s.min(t), s.max(t))) {
                return Err(Error::invalid(format!("pair {i} duplicates an earlier pair")));
            }
            if let Penalty::Finite(p) = &self.penalties[i] {
                if p.is_negative() {
                    return Err(Error::invalid(format!("negative penalty on pair {i}")));
                }
            }
        }
        Ok(())
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.node_names.iter().position(|n| n == name)
    }

    /// Cost and penalty of a forest; `Err(Infeasible)` if an infinite-penalty pair stays apart.
    pub fn evaluate(&self, forest: &EdgeSet) -> Result<(Rational, Rational, Vec<usize>)> {
        let cost = forest.iter().fold(Rational::zero(), |acc, e| acc + &self.costs[e]);
        let comp = components(&self.graph, forest);
        let mut penalty = Rational::zero();
        let mut disconnected = Vec::new();
        for (i, &(s, t)) in self.pairs.iter().enumerate() {
            if !comp.same(s, t) {
                match &self.penalties[i] {
                    Penalty::Finite(p) => penalty += p,
                    Penalty::Infinite => {
                        return Err(Error::Infeasible(format!("pair {i} has infinite penalty but is not connected")))
                    }
                }
                disconnected.push(i);
            }
        }
        Ok((cost, penalty, disconnected))
    }

    /// `c.x + pi.z` over finite penalties.
    pub fn lp_objective(&self, point: &FracSolution) -> Rational {
        let cx = self.costs.iter().zip(&point.x).fold(Rational::zero(), |acc, (c, x)| acc + c * x);
        self.penalties.iter().zip(&point.z).fold(cx, |acc, (p, z)| match p {
            Penalty::Finite(p) => acc + p * z,
            Penalty::Infinite => acc,
        })
    }

    /// Same graph and pairs with new costs and penalties.
    pub fn with_costs(&self, costs: Vec<Rational>, penalties: Vec<Penalty>) -> Result<Self> {
        Self::with_names(self.graph.clone(), self.node_names.clone(), costs, self.pairs.clone(), penalties)
    }
}

/// A point `(x, z)` for the cut LP: one value per edge and per pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracSolution {
    pub x: Vec<Rational>,
    pub z: Vec<Rational>,
}

impl FracSolution {
    pub fn zeros(inst: &PcsfInstance) -> Self {
        FracSolution { x: vec![Rational::zero(); inst.edge_count()], z: vec![Rational::zero(); inst.pair_count()] }
    }

    /// Incidence vectors of a forest and its disconnected pairs.
    pub fn integral(inst: &PcsfInstance, forest: &EdgeSet) -> Self {
        let comp = components(&inst.graph, forest);
        FracSolution {
            x: (0..inst.edge_count())
                .map(|e| if forest.contains(e) { Rational::one() } else { Rational::zero() })
                .collect(),
            z: inst
                .pairs
                .iter()
                .map(|&(s, t)| if comp.same(s, t) { Rational::zero() } else { Rational::one() })
                .collect(),
        }
    }

    /// Dimension and range checks against an instance.
    pub fn check(&self, inst: &PcsfInstance) -> Result<()> {
        if self.x.len() != inst.edge_count() || self.z.len() != inst.pair_count() {
            return Err(Error::invalid(format!(
                "point has {} x and {} z values; instance has {} edges and {} pairs",
                self.x.len(),
                self.z.len(),
                inst.edge_count(),
                inst.pair_count()
            )));
        }
        if let Some(e) = self.x.iter().position(|v| v.is_negative()) {
            return Err(Error::invalid(format!("x is negative on edge {e}")));
        }
        for (i, z) in self.z.iter().enumerate() {
            if z.is_negative() || z > &Rational::one() {
                return Err(Error::invalid(format!("z of pair {i} is outside [0,1]")));
            }
            if inst.penalties[i].is_infinite() && !z.is_zero() {
                return Err(Error::invalid(format!("pair {i} has infinite penalty but z > 0")));
            }
        }
        Ok(())
    }

    pub fn max_coordinate(&self) -> Rational {
        self.x.iter().chain(&self.z).max().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_integral(&self) -> bool {
        self.x.iter().chain(&self.z).all(|v| v.is_integer())
    }

    pub fn support(&self) -> EdgeSet {
        self.x.iter().enumerate().filter(|(_, v)| v.is_positive()).map(|(e, _)| e).collect()
    }
}

/// Parameters recorded alongside gap and LMP runs.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GapParams {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
    pub p: Rational,
    pub epsilon: Rational,
    pub l: usize,
    pub n: usize,
    pub m: usize,
    pub k: usize,
}

impl GapParams {
    pub fn validate(&self) -> Result<()> {
        if self.l < 3 {
            return Err(Error::invalid(format!("l = {} < 3", self.l)));
        }
        Ok(())
    }
}
