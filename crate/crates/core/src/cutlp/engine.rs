//! Cutting planes on the dual side.
//!
//! The cut LP `min c.x + pi.z` over `x(delta(S)) + z_i >= 1` is solved through
//! its dual: one column `y_k` per generated cut, one row per edge (`<= c_e`)
//! and one per finite-penalty pair (`<= pi_i`). The slack basis is feasible,
//! new cuts are appended as columns and re-optimised from the current basis,
//! and the primal point is read off the row duals.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::{components, max_flow, EdgeSet};
use crate::instances::PcsfInstance;
use crate::rational::Penalty;
use crate::simplex::{LpStatus, Relation, Row, Scalar, Simplex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Cut {
    pub pair: usize,
    /// Source side, containing the pair's first endpoint.
    pub side: Vec<bool>,
    pub edges: Vec<usize>,
}

impl Cut {
    pub fn new(inst: &PcsfInstance, pair: usize, side: Vec<bool>) -> Self {
        let edges = inst.graph.cut_edges(&side);
        Cut { pair, side, edges }
    }

    pub fn around(inst: &PcsfInstance, pair: usize, node: usize, complement: bool) -> Self {
        let side = (0..inst.graph.node_count()).map(|v| (v == node) != complement).collect();
        Cut::new(inst, pair, side)
    }
}

/// Fails when an infinite-penalty pair cannot be connected at all.
pub(crate) fn check_connectable(inst: &PcsfInstance) -> Result<()> {
    let reach = components(&inst.graph, &EdgeSet::all(&inst.graph));
    for (i, &(s, t)) in inst.pairs.iter().enumerate() {
        if inst.penalties[i].is_infinite() && !reach.same(s, t) {
            return Err(Error::Infeasible(format!(
                "pair {i} ({}, {}) has infinite penalty but its endpoints are disconnected",
                inst.node_names[s], inst.node_names[t]
            )));
        }
    }
    Ok(())
}

pub(crate) struct CutLp<'a, S: Scalar> {
    inst: &'a PcsfInstance,
    pair_row: Vec<Option<usize>>,
    lp: Simplex<S>,
    pub cuts: Vec<Cut>,
    keys: HashSet<(Option<usize>, Vec<usize>)>,
    pub rounds: usize,
}

impl<'a, S: Scalar> CutLp<'a, S> {
    pub fn new(inst: &'a PcsfInstance) -> Self {
        let mut rows: Vec<Row<S>> = inst
            .costs
            .iter()
            .map(|c| Row { coeffs: Vec::new(), relation: Relation::Le, rhs: S::from_rational(c) })
            .collect();
        let mut pair_row = Vec::with_capacity(inst.pair_count());
        for p in &inst.penalties {
            match p {
                Penalty::Finite(pi) => {
                    pair_row.push(Some(rows.len()));
                    rows.push(Row { coeffs: Vec::new(), relation: Relation::Le, rhs: S::from_rational(pi) });
                }
                Penalty::Infinite => pair_row.push(None),
            }
        }
        CutLp { inst, pair_row, lp: Simplex::new(Vec::new(), rows), cuts: Vec::new(), keys: HashSet::new(), rounds: 0 }
    }

    /// Adds the column of a cut unless an identical one exists.
    pub fn add_cut(&mut self, cut: Cut) -> bool {
        let row = self.pair_row[cut.pair];
        if !self.keys.insert((row, cut.edges.clone())) {
            return false;
        }
        let mut coeffs: Vec<(usize, S)> = cut.edges.iter().map(|&e| (e, S::one())).collect();
        if let Some(r) = row {
            coeffs.push((r, S::one()));
        }
        self.lp.add_column(S::one().neg(), &coeffs);
        self.cuts.push(cut);
        true
    }

    pub fn add_singleton_cuts(&mut self) {
        for (i, &(s, t)) in self.inst.pairs.iter().enumerate() {
            self.add_cut(Cut::around(self.inst, i, s, false));
            self.add_cut(Cut::around(self.inst, i, t, true));
        }
    }

    fn solve_master(&mut self) -> Result<()> {
        match self.lp.solve() {
            LpStatus::Optimal => Ok(()),
            LpStatus::Unbounded => Err(Error::Infeasible("cut LP has no feasible point".into())),
            LpStatus::Infeasible => unreachable!("the slack basis is always feasible"),
        }
    }

    /// Current primal point `(x, z)`; `z` is zero on infinite-penalty pairs.
    pub fn point(&self) -> (Vec<S>, Vec<S>) {
        let duals = self.lp.duals();
        let clamp = |v: S| if v.is_positive() { v } else { S::zero() };
        let x = (0..self.inst.edge_count()).map(|e| clamp(duals[e].neg())).collect();
        let z = self.pair_row.iter().map(|r| r.map_or(S::zero(), |r| clamp(duals[r].neg()))).collect();
        (x, z)
    }

    pub fn value(&self) -> S {
        self.lp.objective().neg()
    }

    /// Dual weight of each generated cut.
    pub fn weights(&self) -> Vec<S> {
        self.lp.primal()
    }

    /// Violated cuts, one per pair, in pair order.
    pub fn violated(&self, x: &[S], z: &[S], tol: &S) -> Vec<Cut> {
        violated_cuts(self.inst, x, z, tol, usize::MAX)
    }

    /// Solves, separates and re-solves until no cut is violated by more than `tol`.
    pub fn run(&mut self, tol: &S, max_rounds: usize) -> Result<bool> {
        loop {
            self.solve_master()?;
            self.rounds += 1;
            let (x, z) = self.point();
            let found = self.violated(&x, &z, tol);
            if found.is_empty() {
                return Ok(true);
            }
            let mut added = false;
            for cut in found {
                added |= self.add_cut(cut);
            }
            if !added || self.rounds >= max_rounds {
                return Ok(false);
            }
        }
    }
}

/// Up to `limit` violated cuts (at most one per pair, pairs in index order).
pub(crate) fn violated_cuts<S: Scalar>(inst: &PcsfInstance, x: &[S], z: &[S], tol: &S, limit: usize) -> Vec<Cut> {
    let mut found = Vec::new();
    for (i, &(s, t)) in inst.pairs.iter().enumerate() {
        if found.len() >= limit {
            break;
        }
        let zi = if inst.penalties[i].is_infinite() { S::zero() } else { z[i].clone() };
        // the cut must carry at least `need` for the pair to be satisfied
        let need = S::one().sub(&zi).sub(tol);
        if !need.is_positive() {
            continue;
        }
        let (value, side) = max_flow(&inst.graph, x, s, t, Some(&need));
        if value.compare(&need) == std::cmp::Ordering::Less {
            found.push(Cut::new(inst, i, side));
        }
    }
    found
}
