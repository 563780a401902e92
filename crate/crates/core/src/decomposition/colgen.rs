//! Column generation over integral solutions.
//!
//! Three masters share one column type (a forest and the pairs it leaves
//! apart):
//! - `Alpha`: `max sum mu` with `sum mu (x^q, z^q) <= (x, z)`; `alpha* = 1 / value`.
//! - `Feasibility(beta)`: `max sum lambda` with `sum lambda x^q <= beta x`,
//!   `sum lambda z^q <= z`, `sum lambda <= 1`.
//! - `Beta`: `min beta` with `sum lambda x^q <= beta x`, `sum lambda z^q <= z`,
//!   `sum lambda >= 1`.
//!
//! Each is solved in floating point first (pricing on rounded duals), then
//! re-solved exactly from the collected columns with exact pricing.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::ForestDistribution;
use crate::cutlp::{check_feasible, Feasibility};
use crate::error::{Error, Result};
use crate::exact::price;
use crate::graph::{EdgeSet, Graph};
use crate::instances::{FracSolution, PcsfInstance, PointMode};
use crate::rational::{approximate, from_f64, int, serde_rational, serde_rationals, Penalty, Rational};
use crate::rounding::two_value_gamma;
use crate::simplex::{LpStatus, Relation, Row, Simplex};

const FLOAT_PRICE_TOL: f64 = 1e-9;
const MAX_FLOAT_ROUNDS: usize = 2_000;

/// Dual prices on edges and pairs with the convexity dual: every integral
/// solution has `d.x^q + rho.z^q >= gamma_dual`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualWitness {
    #[serde(with = "serde_rationals")]
    pub d: Vec<Rational>,
    #[serde(with = "serde_rationals")]
    pub rho: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub gamma_dual: Rational,
}

impl DualWitness {
    pub fn is_zero(&self) -> bool {
        self.d.iter().chain(&self.rho).all(Zero::is_zero)
    }

    /// `d.x + rho.z`.
    pub fn value_at(&self, point: &FracSolution) -> Rational {
        let dx: Rational = self.d.iter().zip(&point.x).map(|(a, b)| a * b).sum();
        self.rho.iter().zip(&point.z).fold(dx, |acc, (a, b)| acc + a * b)
    }
}

/// Optimal factor, a distribution attaining it, and the dual that proves it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub value: Rational,
    pub distribution: ForestDistribution,
    pub witness: DualWitness,
    pub columns: usize,
    pub rounds: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BetaFeasibility {
    Feasible { distribution: ForestDistribution, witness: DualWitness },
    Infeasible { value: Rational, certificate: DualWitness },
}

impl BetaFeasibility {
    /// Optimal value of the packing LP: 1 exactly when feasible.
    pub fn value(&self) -> Rational {
        match self {
            BetaFeasibility::Feasible { .. } => Rational::one(),
            BetaFeasibility::Infeasible { value, .. } => value.clone(),
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, BetaFeasibility::Feasible { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Alpha,
    Feasibility,
    Beta,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Column {
    forest: EdgeSet,
    disconnected: Vec<usize>,
}

/// Rows of the masters and the pricing instance on the support of `x`.
struct Layout<'a> {
    inst: &'a PcsfInstance,
    point: &'a FracSolution,
    edges: Vec<usize>,
    edge_row: Vec<Option<usize>>,
    pairs: Vec<usize>,
    pair_row: Vec<Option<usize>>,
    pricing: PcsfInstance,
}

impl<'a> Layout<'a> {
    fn new(inst: &'a PcsfInstance, point: &'a FracSolution) -> Result<Self> {
        point.check(inst)?;
        if inst.pair_count() == 0 {
            return Err(Error::invalid("instance has no pairs"));
        }
        if let Feasibility::Violated(c) = check_feasible(inst, point)? {
            return Err(Error::invalid(format!("point violates {}", c.describe(inst))));
        }
        let edges: Vec<usize> = (0..inst.edge_count()).filter(|&e| point.x[e].is_positive()).collect();
        let mut edge_row = vec![None; inst.edge_count()];
        for (r, &e) in edges.iter().enumerate() {
            edge_row[e] = Some(r);
        }
        let pairs: Vec<usize> =
            (0..inst.pair_count()).filter(|&i| !inst.penalties[i].is_infinite() && point.z[i].is_positive()).collect();
        let mut pair_row = vec![None; inst.pair_count()];
        for (r, &i) in pairs.iter().enumerate() {
            pair_row[i] = Some(r);
        }
        let graph = Graph::from_edges(inst.graph.node_count(), &edges.iter().map(|&e| inst.graph.endpoints(e)).collect::<Vec<_>>())?;
        let penalties = pair_row.iter().map(|r| if r.is_some() { Penalty::Finite(Rational::zero()) } else { Penalty::Infinite }).collect();
        let pricing = PcsfInstance::with_names(
            graph,
            inst.node_names.clone(),
            vec![Rational::zero(); edges.len()],
            inst.pairs.clone(),
            penalties,
        )?;
        Ok(Layout { inst, point, edges, edge_row, pairs, pair_row, pricing })
    }

    fn row_count(&self, kind: Kind) -> usize {
        self.edges.len() + self.pairs.len() + usize::from(kind != Kind::Alpha)
    }

    /// Cheapest column under prices on the layout's edges and pairs.
    fn price(&self, d: &[Rational], rho: &[Rational]) -> Result<(Column, Rational)> {
        let mut full = vec![Rational::zero(); self.inst.pair_count()];
        for (r, &i) in self.pairs.iter().enumerate() {
            full[i] = rho[r].clone();
        }
        let sol = price(&self.pricing, d, &full)?;
        let value = sol.objective();
        let forest = sol.forest.iter().map(|k| self.edges[k]).collect();
        Ok((Column { forest, disconnected: sol.disconnected }, value))
    }

    fn spread<S: Clone>(&self, d: &[S], rho: &[S], fill: &S) -> (Vec<S>, Vec<S>) {
        let full_d = self.edge_row.iter().map(|r| r.map_or_else(|| fill.clone(), |r| d[r].clone())).collect();
        let full_rho = self.pair_row.iter().map(|r| r.map_or_else(|| fill.clone(), |r| rho[r].clone())).collect();
        (full_d, full_rho)
    }
}

struct Master<'l, 'a, S: crate::simplex::Scalar> {
    kind: Kind,
    layout: &'l Layout<'a>,
    lp: Simplex<S>,
    offset: usize,
    columns: Vec<Column>,
    keys: HashSet<EdgeSet>,
}

impl<'l, 'a, S: crate::simplex::Scalar> Master<'l, 'a, S> {
    fn new(kind: Kind, layout: &'l Layout<'a>, beta: &Rational) -> Self {
        let x = &layout.point.x;
        let z = &layout.point.z;
        let mut rows: Vec<Row<S>> = Vec::with_capacity(layout.row_count(kind));
        for &e in &layout.edges {
            let (rhs, coeffs) = match kind {
                Kind::Alpha => (S::from_rational(&x[e]), Vec::new()),
                Kind::Feasibility => (S::from_rational(&(beta * &x[e])), Vec::new()),
                Kind::Beta => (S::zero(), vec![(0, S::from_rational(&-&x[e]))]),
            };
            rows.push(Row { coeffs, relation: Relation::Le, rhs });
        }
        for &i in &layout.pairs {
            rows.push(Row { coeffs: Vec::new(), relation: Relation::Le, rhs: S::from_rational(&z[i]) });
        }
        match kind {
            Kind::Alpha => {}
            Kind::Feasibility => rows.push(Row { coeffs: Vec::new(), relation: Relation::Le, rhs: S::one() }),
            Kind::Beta => rows.push(Row { coeffs: Vec::new(), relation: Relation::Ge, rhs: S::one() }),
        }
        let costs = if kind == Kind::Beta { vec![S::one()] } else { Vec::new() };
        Master { kind, layout, lp: Simplex::new(costs, rows), offset: usize::from(kind == Kind::Beta), columns: Vec::new(), keys: HashSet::new() }
    }

    fn add(&mut self, col: &Column) -> bool {
        if !self.keys.insert(col.forest.clone()) {
            return false;
        }
        let l = self.layout;
        let mut coeffs: Vec<(usize, S)> = col.forest.iter().filter_map(|e| l.edge_row[e]).map(|r| (r, S::one())).collect();
        coeffs.extend(col.disconnected.iter().filter_map(|&i| l.pair_row[i]).map(|r| (l.edges.len() + r, S::one())));
        if self.kind != Kind::Alpha {
            coeffs.push((l.edges.len() + l.pairs.len(), S::one()));
        }
        let cost = if self.kind == Kind::Beta { S::zero() } else { S::one().neg() };
        self.lp.add_column(cost, &coeffs);
        self.columns.push(col.clone());
        true
    }

    fn solve(&mut self) -> Result<()> {
        match self.lp.solve() {
            LpStatus::Optimal => Ok(()),
            LpStatus::Unbounded => Err(Error::invalid("decomposition master is unbounded")),
            LpStatus::Infeasible => Err(Error::Infeasible("no convex combination of the columns is dominated".into())),
        }
    }

    /// Edge prices, pair prices, convexity dual, and the pricing threshold.
    fn duals(&self) -> (Vec<S>, Vec<S>, S, S) {
        let y = self.lp.duals();
        let clamp = |v: S| if v.is_positive() { v } else { S::zero() };
        let ne = self.layout.edges.len();
        let np = self.layout.pairs.len();
        let d = (0..ne).map(|r| clamp(y[r].neg())).collect();
        let rho = (0..np).map(|r| clamp(y[ne + r].neg())).collect();
        let (gamma, threshold) = match self.kind {
            Kind::Alpha => (S::zero(), S::one()),
            Kind::Feasibility => {
                let g = clamp(y[ne + np].neg());
                (g.clone(), S::one().sub(&g))
            }
            Kind::Beta => {
                let g = clamp(y[ne + np].clone());
                (g.clone(), g)
            }
        };
        (d, rho, gamma, threshold)
    }

    fn value(&self) -> S {
        match self.kind {
            Kind::Beta => self.lp.objective(),
            _ => self.lp.objective().neg(),
        }
    }

    fn weights(&self) -> Vec<S> {
        self.lp.primal()[self.offset..].to_vec()
    }
}

fn column_price(col: &Column, layout: &Layout, d: &[f64], rho: &[f64]) -> f64 {
    let a: f64 = col.forest.iter().filter_map(|e| layout.edge_row[e]).map(|r| d[r]).sum();
    a + col.disconnected.iter().filter_map(|&i| layout.pair_row[i]).map(|r| rho[r]).sum::<f64>()
}

/// Floating-point column generation; returns every column it generated.
fn float_columns(kind: Kind, layout: &Layout, beta: &Rational, seeds: &[Column]) -> Result<(Vec<Column>, usize)> {
    let mut master: Master<f64> = Master::new(kind, layout, beta);
    for c in seeds {
        master.add(c);
    }
    let den = BigInt::from(1_000_000);
    let round = |v: &f64| approximate(&from_f64(v.max(0.0)), &den);
    let mut rounds = 0;
    while rounds < MAX_FLOAT_ROUNDS {
        rounds += 1;
        master.solve()?;
        let (d, rho, _, threshold) = master.duals();
        let d_q: Vec<Rational> = d.iter().map(round).collect();
        let rho_q: Vec<Rational> = rho.iter().map(round).collect();
        let (col, _) = layout.price(&d_q, &rho_q)?;
        if column_price(&col, layout, &d, &rho) >= threshold - FLOAT_PRICE_TOL || !master.add(&col) {
            break;
        }
    }
    Ok((master.columns, rounds))
}

/// Exact column generation seeded with `seeds`.
fn exact_master<'l, 'a>(
    kind: Kind,
    layout: &'l Layout<'a>,
    beta: &Rational,
    seeds: &[Column],
) -> Result<(Master<'l, 'a, Rational>, usize)> {
    let mut master: Master<Rational> = Master::new(kind, layout, beta);
    for c in seeds {
        master.add(c);
    }
    let mut rounds = 0;
    loop {
        rounds += 1;
        master.solve()?;
        let (d, rho, _, threshold) = master.duals();
        let (col, value) = layout.price(&d, &rho)?;
        if value >= threshold {
            return Ok((master, rounds));
        }
        if !master.add(&col) {
            return Err(Error::invalid("column generation stalled on a repeated column"));
        }
    }
}

fn solve_kind<'l, 'a>(
    kind: Kind,
    layout: &'l Layout<'a>,
    beta: &Rational,
    seeds: &[Column],
) -> Result<(Master<'l, 'a, Rational>, usize)> {
    let (columns, float_rounds) = float_columns(kind, layout, beta, seeds)?;
    let (master, rounds) = exact_master(kind, layout, beta, &columns)?;
    Ok((master, float_rounds + rounds))
}

fn distribution(master: &Master<Rational>, scale: &Rational) -> Result<ForestDistribution> {
    let entries = master.columns.iter().zip(master.weights()).map(|(c, w)| (c.forest.clone(), w / scale)).collect();
    ForestDistribution::new(&master.layout.inst.graph, entries)
}

/// Smallest `alpha` with a convex combination of integral solutions
/// dominated by `alpha (x, z)`. The witness is scaled so that
/// `d.x + rho.z = 1` and every integral solution prices at `alpha*` or more.
pub fn min_alpha(inst: &PcsfInstance, point: &FracSolution) -> Result<Decomposition> {
    let layout = Layout::new(inst, point)?;
    let (master, rounds) = solve_kind(Kind::Alpha, &layout, &Rational::one(), &[])?;
    let total = master.value();
    let alpha = total.recip();
    let (d, rho, _, _) = master.duals();
    let scale = |v: Vec<Rational>| v.into_iter().map(|x| x * &alpha).collect::<Vec<_>>();
    let (d, rho) = layout.spread(&scale(d), &scale(rho), &alpha);
    Ok(Decomposition {
        distribution: distribution(&master, &total)?,
        witness: DualWitness { d, rho, gamma_dual: alpha.clone() },
        value: alpha,
        columns: master.columns.len(),
        rounds,
    })
}

/// Solves the packing LP at `beta`: value 1 gives a distribution, anything
/// less comes with the optimal dual as a certificate.
pub fn feasibility_at_beta(inst: &PcsfInstance, point: &FracSolution, beta: &Rational) -> Result<BetaFeasibility> {
    if beta.is_negative() {
        return Err(Error::invalid("beta must be nonnegative"));
    }
    let layout = Layout::new(inst, point)?;
    let (master, _) = solve_kind(Kind::Feasibility, &layout, beta, &[])?;
    Ok(feasibility_outcome(&master))
}

fn feasibility_outcome(master: &Master<Rational>) -> BetaFeasibility {
    let value = master.value();
    let (d, rho, gamma, threshold) = master.duals();
    let (d, rho) = master.layout.spread(&d, &rho, &threshold);
    let witness = DualWitness { d, rho, gamma_dual: gamma };
    if value.is_one() {
        let distribution = distribution(master, &Rational::one()).expect("master weights form a distribution");
        BetaFeasibility::Feasible { distribution, witness }
    } else {
        BetaFeasibility::Infeasible { value, certificate: witness }
    }
}

/// Smallest `beta` with a convex combination satisfying
/// `sum lambda x^q <= beta x` and `sum lambda z^q <= z`.
pub fn min_beta(inst: &PcsfInstance, point: &FracSolution) -> Result<Decomposition> {
    let layout = Layout::new(inst, point)?;
    // at this beta no edge row can bind
    let big = layout
        .edges
        .iter()
        .map(|&e| point.x[e].recip())
        .max()
        .map_or_else(Rational::one, |b| b.max(Rational::one()));
    let (start, first_rounds) = solve_kind(Kind::Feasibility, &layout, &big, &[])?;
    if let BetaFeasibility::Infeasible { value, .. } = feasibility_outcome(&start) {
        return Err(Error::Infeasible(format!(
            "z cannot dominate any convex combination of integral solutions (packing value {})",
            crate::rational::fmt_rational(&value)
        )));
    }
    let (master, rounds) = solve_kind(Kind::Beta, &layout, &big, &start.columns)?;
    let beta = master.value();
    let total: Rational = master.weights().into_iter().sum();
    let (d, rho, gamma, _) = master.duals();
    let (d, rho) = layout.spread(&d, &rho, &gamma);
    Ok(Decomposition {
        distribution: distribution(&master, &total)?,
        witness: DualWitness { d, rho, gamma_dual: gamma },
        value: beta,
        columns: master.columns.len(),
        rounds: first_rounds + rounds,
    })
}

/// Instance with costs `d` and penalties `rho` (gap) or `rho / beta` (lmp);
/// infinite penalties of `inst` are kept.
pub fn witness_costs_from_dual(
    inst: &PcsfInstance,
    witness: &DualWitness,
    mode: PointMode,
    beta: &Rational,
) -> Result<PcsfInstance> {
    if witness.d.len() != inst.edge_count() || witness.rho.len() != inst.pair_count() {
        return Err(Error::invalid("witness dimensions do not match the instance"));
    }
    if witness.is_zero() {
        return Err(Error::invalid("dual witness is identically zero; it prices every solution at 0"));
    }
    if mode == PointMode::Lmp && !beta.is_positive() {
        return Err(Error::invalid("beta must be positive"));
    }
    let penalties = inst
        .penalties
        .iter()
        .zip(&witness.rho)
        .map(|(p, r)| match (p, mode) {
            (Penalty::Infinite, _) => Penalty::Infinite,
            (_, PointMode::Gap) => Penalty::Finite(r.clone()),
            (_, PointMode::Lmp) => Penalty::Finite(r / beta),
        })
        .collect();
    inst.with_costs(witness.d.clone(), penalties)
}

/// For `z` in `{0, gamma}`: weight `1 - gamma` on a decomposition of
/// `x / (1 - gamma)` connecting every pair, weight `gamma` on one of `x`
/// connecting only the `z = 0` pairs. Dominated by `(2 + 2 gamma) x` in `x`
/// and by `z` in `z`.
pub fn two_value_lmp_distribution(inst: &PcsfInstance, point: &FracSolution) -> Result<(ForestDistribution, Rational)> {
    let gamma = two_value_gamma(point)?.ok_or_else(|| Error::invalid("z has no nonzero value"))?;
    if gamma >= Rational::one() {
        return Err(Error::invalid("gamma must be below 1"));
    }
    let one = Rational::one();
    let all: Vec<usize> = (0..inst.pair_count()).collect();
    let zero_pairs: Vec<usize> = all.iter().copied().filter(|&i| point.z[i].is_zero()).collect();

    let scaled = FracSolution { x: point.x.iter().map(|v| v / (&one - &gamma)).collect(), z: vec![Rational::zero(); all.len()] };
    let connect_all = steiner_decomposition(inst, &all, &scaled)?;
    let connect_zero = if zero_pairs.is_empty() {
        (ForestDistribution::single(&inst.graph, EdgeSet::new())?, Rational::zero())
    } else {
        let x_only = FracSolution { x: point.x.clone(), z: vec![Rational::zero(); zero_pairs.len()] };
        steiner_decomposition(inst, &zero_pairs, &x_only)?
    };
    for (factor, what) in [(&connect_all.1, "all pairs"), (&connect_zero.1, "the z = 0 pairs")] {
        if factor > &int(2) {
            return Err(Error::Infeasible(format!("decomposition for {what} needs factor {factor} > 2")));
        }
    }
    let mut entries: Vec<(EdgeSet, Rational)> =
        connect_all.0.entries().iter().map(|(f, w)| (f.clone(), w * (&one - &gamma))).collect();
    entries.extend(connect_zero.0.entries().iter().map(|(f, w)| (f.clone(), w * &gamma)));
    let dist = ForestDistribution::new(&inst.graph, entries)?;
    Ok((dist, int(2) + int(2) * gamma))
}

/// `min_alpha` on the Steiner forest instance for `pairs` at `point`.
fn steiner_decomposition(inst: &PcsfInstance, pairs: &[usize], point: &FracSolution) -> Result<(ForestDistribution, Rational)> {
    let sub = PcsfInstance::with_names(
        inst.graph.clone(),
        inst.node_names.clone(),
        inst.costs.clone(),
        pairs.iter().map(|&i| inst.pairs[i]).collect(),
        vec![Penalty::Infinite; pairs.len()],
    )?;
    let dec = min_alpha(&sub, point)?;
    Ok((dec.distribution, dec.value))
}
