//! The cut LP: solving it by cutting planes, checking points against it, and
//! certifying extreme points by their tight constraints.

mod engine;
pub mod family;
mod rank;

pub(crate) use engine::{check_connectable, violated_cuts, Cut, CutLp};
pub use rank::rank;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::max_flow;
use crate::instances::{FracSolution, PcsfInstance};
use crate::rational::{approximate, fmt_rational, from_f64, Penalty, Rational};

/// One inequality of the cut LP.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CutConstraint {
    /// `x(delta(side)) + z_pair >= 1`; `side` is sorted and contains the pair's first endpoint.
    Cut { pair: usize, side: Vec<usize> },
    NonnegX(usize),
    NonnegZ(usize),
}

impl CutConstraint {
    /// A cut constraint for `pair`; the side is replaced by its complement
    /// if it does not contain the pair's first endpoint.
    pub fn cut(inst: &PcsfInstance, pair: usize, side: Vec<usize>) -> Result<Self> {
        let n = inst.graph.node_count();
        let mut mask = vec![false; n];
        for v in side {
            if v >= n {
                return Err(Error::invalid(format!("cut references missing node {v}")));
            }
            mask[v] = true;
        }
        let &(s, t) = inst.pairs.get(pair).ok_or_else(|| Error::invalid(format!("unknown pair {pair}")))?;
        if mask[s] == mask[t] {
            return Err(Error::invalid(format!("cut does not separate the endpoints of pair {pair}")));
        }
        Ok(Self::from_mask(inst, pair, &mask))
    }

    pub(crate) fn from_mask(inst: &PcsfInstance, pair: usize, mask: &[bool]) -> Self {
        let s = inst.pairs[pair].0;
        let side = (0..mask.len()).filter(|&v| mask[v] == mask[s]).collect();
        CutConstraint::Cut { pair, side }
    }

    pub fn validate(&self, inst: &PcsfInstance) -> Result<()> {
        match self {
            CutConstraint::Cut { pair, side } => Self::cut(inst, *pair, side.clone()).map(|_| ()),
            CutConstraint::NonnegX(e) if *e < inst.edge_count() => Ok(()),
            CutConstraint::NonnegZ(i) if *i < inst.pair_count() => Ok(()),
            _ => Err(Error::invalid(format!("constraint references an unknown edge or pair: {self:?}"))),
        }
    }

    pub fn cut_edges(&self, inst: &PcsfInstance) -> Vec<usize> {
        match self {
            CutConstraint::Cut { side, .. } => {
                let mut mask = vec![false; inst.graph.node_count()];
                side.iter().for_each(|&v| mask[v] = true);
                inst.graph.cut_edges(&mask)
            }
            _ => Vec::new(),
        }
    }

    /// Sparse row over the variables: `x_e` is column `e`, `z_i` is column
    /// `|E| + i`. Infinite-penalty pairs contribute no `z` term.
    pub fn row(&self, inst: &PcsfInstance) -> Vec<(usize, Rational)> {
        let m = inst.edge_count();
        match self {
            CutConstraint::Cut { pair, .. } => {
                let mut row: Vec<(usize, Rational)> =
                    self.cut_edges(inst).into_iter().map(|e| (e, Rational::one())).collect();
                if !inst.penalties[*pair].is_infinite() {
                    row.push((m + pair, Rational::one()));
                }
                row
            }
            CutConstraint::NonnegX(e) => vec![(*e, Rational::one())],
            CutConstraint::NonnegZ(i) => vec![(m + i, Rational::one())],
        }
    }

    pub fn rhs(&self) -> Rational {
        match self {
            CutConstraint::Cut { .. } => Rational::one(),
            _ => Rational::zero(),
        }
    }

    pub fn lhs(&self, inst: &PcsfInstance, point: &FracSolution) -> Rational {
        let m = inst.edge_count();
        self.row(inst).into_iter().fold(Rational::zero(), |acc, (j, a)| {
            let v = if j < m { &point.x[j] } else { &point.z[j - m] };
            acc + a * v
        })
    }

    pub fn describe(&self, inst: &PcsfInstance) -> String {
        match self {
            CutConstraint::Cut { pair, side } => {
                let names: Vec<&str> = side.iter().map(|&v| inst.node_names[v].as_str()).collect();
                format!("cut pair {pair} side {{{}}}", names.join(","))
            }
            CutConstraint::NonnegX(e) => format!("x_{e} >= 0"),
            CutConstraint::NonnegZ(i) => format!("z_{i} >= 0"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LpMode {
    Exact,
    Tol(f64),
}

impl LpMode {
    pub const DEFAULT_TOL: f64 = 1e-9;
}

/// Optimal point of the cut LP together with the cuts that certify it.
#[derive(Clone, Debug, PartialEq)]
pub struct LpResult {
    pub solution: FracSolution,
    pub value: Rational,
    /// Cuts with positive dual weight.
    pub active_cuts: Vec<CutConstraint>,
    /// Dual weight of each active cut; they sum to `value` in exact mode.
    pub cut_weights: Vec<Rational>,
    pub iterations: usize,
}

/// Floating-point solve used for guidance and branch-and-bound bounds.
#[derive(Clone, Debug)]
pub(crate) struct FloatLp {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub value: f64,
    /// `(pair, cut edges)` of every generated cut, with dual weights.
    pub cuts: Vec<(usize, Vec<usize>)>,
    pub sides: Vec<Vec<bool>>,
    pub weights: Vec<f64>,
    pub rounds: usize,
}

const FLOAT_SEPARATION_TOL: f64 = 1e-7;
const MAX_FLOAT_ROUNDS: usize = 5_000;

pub(crate) fn solve_float(inst: &PcsfInstance) -> Result<FloatLp> {
    check_connectable(inst)?;
    let mut lp: CutLp<f64> = CutLp::new(inst);
    lp.add_singleton_cuts();
    lp.run(&FLOAT_SEPARATION_TOL, MAX_FLOAT_ROUNDS)?;
    let (x, z) = lp.point();
    Ok(FloatLp {
        value: lp.value(),
        x,
        z,
        cuts: lp.cuts.iter().map(|c| (c.pair, c.edges.clone())).collect(),
        sides: lp.cuts.iter().map(|c| c.side.clone()).collect(),
        weights: lp.weights(),
        rounds: lp.rounds,
    })
}

/// Solves the cut LP. Exact mode first runs the floating-point loop to
/// collect useful cuts, then finishes with exact simplex and exact separation.
pub fn solve_lp(inst: &PcsfInstance, mode: LpMode) -> Result<LpResult> {
    let float = solve_float(inst)?;
    match mode {
        LpMode::Tol(_) => {
            let den = num_bigint::BigInt::from(1_000_000_000u64);
            let r = |v: f64| approximate(&from_f64(v), &den);
            let active: Vec<usize> = (0..float.weights.len()).filter(|&k| float.weights[k] > 1e-12).collect();
            Ok(LpResult {
                solution: FracSolution { x: float.x.iter().map(|&v| r(v)).collect(), z: float.z.iter().map(|&v| r(v)).collect() },
                value: r(float.value),
                active_cuts: active
                    .iter()
                    .map(|&k| CutConstraint::from_mask(inst, float.cuts[k].0, &float.sides[k]))
                    .collect(),
                cut_weights: active.iter().map(|&k| r(float.weights[k])).collect(),
                iterations: float.rounds,
            })
        }
        LpMode::Exact => {
            let mut lp: CutLp<Rational> = CutLp::new(inst);
            for (k, w) in float.weights.iter().enumerate() {
                if *w > 1e-12 {
                    lp.add_cut(Cut::new(inst, float.cuts[k].0, float.sides[k].clone()));
                }
            }
            if lp.cuts.is_empty() {
                lp.add_singleton_cuts();
            }
            let converged = lp.run(&Rational::zero(), usize::MAX)?;
            debug_assert!(converged);
            let (x, z) = lp.point();
            let weights = lp.weights();
            let active: Vec<usize> = (0..weights.len()).filter(|&k| weights[k].is_positive()).collect();
            Ok(LpResult {
                solution: FracSolution { x, z },
                value: lp.value(),
                active_cuts: active.iter().map(|&k| CutConstraint::from_mask(inst, lp.cuts[k].pair, &lp.cuts[k].side)).collect(),
                cut_weights: active.iter().map(|&k| weights[k].clone()).collect(),
                iterations: float.rounds + lp.rounds,
            })
        }
    }
}

/// A violated cut for the first pair (in index order) that has one.
/// Exact mode reports any strict violation; `Tol(eps)` only violations above `eps`.
pub fn separate(inst: &PcsfInstance, point: &FracSolution, mode: LpMode) -> Option<CutConstraint> {
    let tol = match mode {
        LpMode::Exact => Rational::zero(),
        LpMode::Tol(eps) => from_f64(eps),
    };
    let x: Vec<Rational> = point.x.iter().map(|v| if v.is_negative() { Rational::zero() } else { v.clone() }).collect();
    violated_cuts(inst, &x, &point.z, &tol, 1)
        .into_iter()
        .next()
        .map(|c| CutConstraint::from_mask(inst, c.pair, &c.side))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Violated(CutConstraint),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible)
    }
}

/// Exact feasibility: nonnegativity, then full separation.
pub fn check_feasible(inst: &PcsfInstance, point: &FracSolution) -> Result<Feasibility> {
    if point.x.len() != inst.edge_count() || point.z.len() != inst.pair_count() {
        return Err(Error::invalid("point dimensions do not match the instance"));
    }
    if let Some(e) = point.x.iter().position(|v| v.is_negative()) {
        return Ok(Feasibility::Violated(CutConstraint::NonnegX(e)));
    }
    if let Some(i) = point.z.iter().position(|v| v.is_negative()) {
        return Ok(Feasibility::Violated(CutConstraint::NonnegZ(i)));
    }
    Ok(match separate(inst, point, LpMode::Exact) {
        Some(cut) => Feasibility::Violated(cut),
        None => Feasibility::Feasible,
    })
}

/// Outcome of an extreme-point certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexReport {
    pub is_feasible: bool,
    pub all_tight: bool,
    pub unique: bool,
    pub rank: usize,
    pub dimension: usize,
    /// Family members that are not tight at the point.
    pub loose: Vec<usize>,
    pub max_coordinate: String,
}

/// Checks feasibility, tightness of every family member, and whether the
/// tight system pins the point down (rank equals the number of variables).
/// Variables are all `x_e` and the `z_i` of finite-penalty pairs.
pub fn verify_vertex(inst: &PcsfInstance, point: &FracSolution, family: &[CutConstraint]) -> Result<VertexReport> {
    for c in family {
        c.validate(inst)?;
    }
    let is_feasible = check_feasible(inst, point)?.is_feasible();
    let loose: Vec<usize> =
        family.iter().enumerate().filter(|(_, c)| c.lhs(inst, point) != c.rhs()).map(|(k, _)| k).collect();
    let m = inst.edge_count();
    let mut column = vec![None; m + inst.pair_count()];
    let mut dimension = 0;
    for (j, slot) in column.iter_mut().enumerate() {
        if j < m || !inst.penalties[j - m].is_infinite() {
            *slot = Some(dimension);
            dimension += 1;
        }
    }
    let rows: Vec<Vec<Rational>> = family
        .iter()
        .map(|c| {
            let mut dense = vec![Rational::zero(); dimension];
            for (j, a) in c.row(inst) {
                if let Some(col) = column[j] {
                    dense[col] += a;
                }
            }
            dense
        })
        .collect();
    let r = rank(&rows);
    Ok(VertexReport {
        is_feasible,
        all_tight: loose.is_empty(),
        unique: r == dimension,
        rank: r,
        dimension,
        loose,
        max_coordinate: fmt_rational(&point.max_coordinate()),
    })
}

/// Minimum cut value of a pair under capacities `x` (exact).
pub fn pair_cut_value(inst: &PcsfInstance, x: &[Rational], pair: usize) -> Rational {
    let (s, t) = inst.pairs[pair];
    max_flow(&inst.graph, x, s, t, None).0
}

/// Rigorous lower bound on the LP (and hence integral) optimum from
/// approximate dual weights: rationalise, then scale down until every edge
/// and pair budget holds exactly.
pub(crate) fn certified_bound(inst: &PcsfInstance, cuts: &[(usize, Vec<usize>)], weights: &[f64]) -> Rational {
    let denominators = [num_bigint::BigInt::from(1_000), num_bigint::BigInt::from(1_000_000), num_bigint::BigInt::from(1_000_000_000)];
    let mut best = Rational::zero();
    for denom in denominators.iter().map(Some).chain([None]) {
        let y: Vec<Rational> = weights
            .iter()
            .map(|&w| {
                let r = from_f64(w.max(0.0));
                match denom {
                    Some(d) => approximate(&r, d),
                    None => r,
                }
            })
            .collect();
        let mut edge_load = vec![Rational::zero(); inst.edge_count()];
        let mut pair_load = vec![Rational::zero(); inst.pair_count()];
        let mut total = Rational::zero();
        for ((pair, edges), yk) in cuts.iter().zip(&y) {
            if yk.is_zero() {
                continue;
            }
            for &e in edges {
                edge_load[e] += yk;
            }
            pair_load[*pair] += yk;
            total += yk;
        }
        let mut scale = Rational::one();
        for (load, cost) in edge_load.iter().zip(&inst.costs) {
            if load.is_positive() && &(cost / load) < &scale {
                scale = cost / load;
            }
        }
        for (i, load) in pair_load.iter().enumerate() {
            if let Penalty::Finite(pi) = &inst.penalties[i] {
                if load.is_positive() && &(pi / load) < &scale {
                    scale = pi / load;
                }
            }
        }
        let bound = total * scale;
        if bound > best {
            best = bound;
        }
    }
    best
}

#[cfg(test)]
mod tests;
