//! Exact optimum over forests by branch and bound.
//!
//! Node bounds come from the floating-point cut LP, turned into rigorous
//! rational bounds by rescaling its dual, and rounded up to the grid of
//! attainable objective values when the data have small denominators.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cutlp::{certified_bound, check_connectable, solve_float, solve_lp, LpMode};
use crate::error::{Error, Result};
use crate::graph::{minimum_spanning_forest, visit_forests, EdgeSet, Graph, UnionFind};
use crate::instances::PcsfInstance;
use crate::rational::{fmt_rational, serde_rational, to_f64, Penalty, Rational};
use crate::rounding::{gw_steiner_forest, prune_to_pairs, IntegralSolution};

mod frontier;

pub use frontier::WIDTH_CAP;

pub const DEFAULT_EDGE_CAP: usize = 40;
pub const ENUMERATION_CAP: usize = 20;

/// Largest objective denominator for which bounds are rounded up to the grid.
const GRID_DENOM_CAP: u64 = 1 << 40;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IpOptions {
    pub edge_cap: usize,
    /// With `false` the search only uses the cost of the forced edges as a bound.
    pub lp_bound: bool,
    /// Use the frontier dynamic program when the instance is narrow enough.
    pub frontier: bool,
}

impl Default for IpOptions {
    fn default() -> Self {
        IpOptions { edge_cap: DEFAULT_EDGE_CAP, lp_bound: true, frontier: true }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IpStats {
    pub nodes: usize,
    pub pruned: usize,
    pub exact_bounds: usize,
    /// Frontier width when the dynamic program was used.
    pub frontier_width: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchNode {
    pub forced_in: EdgeSet,
    pub forced_out: EdgeSet,
    pub lower_bound: Rational,
    pub depth: usize,
}

impl BranchNode {
    fn root() -> Self {
        BranchNode { forced_in: EdgeSet::new(), forced_out: EdgeSet::new(), lower_bound: Rational::zero(), depth: 0 }
    }
}

pub fn solve_ip(inst: &PcsfInstance) -> Result<IntegralSolution> {
    solve_ip_with(inst, &IpOptions::default()).map(|(s, _)| s)
}

/// Pricing form: minimum of `d.x + rho.z` over forests of `inst`'s graph and
/// pairs. Infinite penalties of `inst` stay infinite; their `rho` is ignored.
pub fn price(inst: &PcsfInstance, d: &[Rational], rho: &[Rational]) -> Result<IntegralSolution> {
    if d.len() != inst.edge_count() || rho.len() != inst.pair_count() {
        return Err(Error::invalid("pricing vector dimensions do not match the instance"));
    }
    let penalties = inst
        .penalties
        .iter()
        .zip(rho)
        .map(|(p, r)| if p.is_infinite() { Penalty::Infinite } else { Penalty::Finite(r.clone()) })
        .collect();
    solve_ip(&inst.with_costs(d.to_vec(), penalties)?)
}

pub fn solve_ip_with(inst: &PcsfInstance, opts: &IpOptions) -> Result<(IntegralSolution, IpStats)> {
    if inst.edge_count() > opts.edge_cap {
        return Err(Error::ScaleCap { what: "edge count", actual: inst.edge_count(), cap: opts.edge_cap });
    }
    check_connectable(inst)?;
    let mut search = Search { inst, opts, grid: objective_grid(inst), best: None, stats: IpStats::default() };
    if opts.frontier {
        let plan = frontier::plan(inst);
        if plan.width <= WIDTH_CAP {
            let forest = frontier::solve(inst, &plan)
                .ok_or_else(|| Error::Infeasible("no forest joins every pair with an infinite penalty".into()))?;
            search.offer(&forest);
            search.stats.frontier_width = Some(plan.width);
            let best = search.best.expect("the optimal forest is feasible");
            return Ok((best, search.stats));
        }
    }
    search.seed();
    let mut stack = vec![BranchNode::root()];
    while let Some(node) = stack.pop() {
        stack.extend(search.expand(node)?);
    }
    let best = search.best.expect("a spanning forest is always feasible");
    Ok((best, search.stats))
}

/// Common denominator of every attainable objective value, if it is small.
fn objective_grid(inst: &PcsfInstance) -> Option<BigInt> {
    let mut d = BigInt::one();
    for v in inst.costs.iter().chain(inst.penalties.iter().filter_map(Penalty::finite)) {
        d = d.lcm(v.denom());
        if d > BigInt::from(GRID_DENOM_CAP) {
            return None;
        }
    }
    Some(d)
}

struct Search<'a> {
    inst: &'a PcsfInstance,
    opts: &'a IpOptions,
    grid: Option<BigInt>,
    best: Option<IntegralSolution>,
    stats: IpStats,
}

impl<'a> Search<'a> {
    fn incumbent(&self) -> Option<Rational> {
        self.best.as_ref().map(IntegralSolution::objective)
    }

    fn beats_incumbent(&self, bound: &Rational) -> bool {
        self.incumbent().map_or(true, |inc| bound < &inc)
    }

    /// Keeps the forest if it improves the incumbent; ties go to the
    /// lexicographically smaller edge set.
    fn offer(&mut self, forest: &EdgeSet) {
        let connected = connected_pairs(self.inst, forest);
        let forest = prune_to_pairs(self.inst, forest, &connected);
        let Ok(sol) = IntegralSolution::from_forest(self.inst, forest) else { return };
        let better = match &self.best {
            None => true,
            Some(b) => {
                let (o, ob) = (sol.objective(), b.objective());
                o < ob || (o == ob && sol.forest.as_slice() < b.forest.as_slice())
            }
        };
        if better {
            self.best = Some(sol);
        }
    }

    fn seed(&mut self) {
        let g = &self.inst.graph;
        self.offer(&EdgeSet::new());
        self.offer(&minimum_spanning_forest(g, &self.inst.costs, &EdgeSet::all(g)));
        let all: Vec<usize> = (0..self.inst.pair_count()).collect();
        let reachable = connected_pairs(self.inst, &EdgeSet::all(g));
        if let Ok(f) = gw_steiner_forest(self.inst, &reachable) {
            self.offer(&f);
        }
        let forced: Vec<usize> = all.into_iter().filter(|&i| self.inst.penalties[i].is_infinite()).collect();
        if let Ok(f) = gw_steiner_forest(self.inst, &forced) {
            self.offer(&f);
        }
    }

    fn round_up(&self, bound: Rational) -> Rational {
        match &self.grid {
            Some(d) => {
                let scaled = &bound * Rational::from_integer(d.clone());
                Rational::new(scaled.ceil().to_integer(), d.clone())
            }
            None => bound,
        }
    }

    fn expand(&mut self, node: BranchNode) -> Result<Vec<BranchNode>> {
        self.stats.nodes += 1;
        let inst = self.inst;
        let g = &inst.graph;
        let mut uf = UnionFind::new(g.node_count());
        for e in node.forced_in.iter() {
            let (u, v) = g.endpoints(e);
            uf.union(u, v);
        }
        let free: Vec<usize> = (0..g.edge_count())
            .filter(|&e| {
                let (u, v) = g.endpoints(e);
                !node.forced_in.contains(e) && !node.forced_out.contains(e) && !uf.same(u, v)
            })
            .collect();
        self.offer(&node.forced_in);
        if free.is_empty() || !self.beats_incumbent(&node.lower_bound) {
            self.stats.pruned += usize::from(!free.is_empty());
            return Ok(Vec::new());
        }
        let base = node.forced_in.iter().fold(Rational::zero(), |acc, e| acc + &inst.costs[e]);

        if !self.opts.lp_bound {
            let e = free[0];
            return Ok(children(&node, e, base, true));
        }

        let (restricted, kept) = restrict(inst, &node.forced_in, &free)?;
        let float = match solve_float(&restricted) {
            Ok(f) => f,
            Err(Error::Infeasible(_)) => {
                self.stats.pruned += 1;
                return Ok(Vec::new());
            }
            Err(e) => return Err(e),
        };
        let mut bound = self.round_up(&base + certified_bound(&restricted, &float.cuts, &float.weights));
        if !self.beats_incumbent(&bound) {
            self.stats.pruned += 1;
            return Ok(Vec::new());
        }
        let inc = self.incumbent().map(|r| to_f64(&r)).unwrap_or(f64::INFINITY);
        let approx = to_f64(&base) + float.value;
        if approx >= inc - 1e-7 * (1.0 + inc.abs()) {
            self.stats.exact_bounds += 1;
            let exact = self.round_up(&base + solve_lp(&restricted, LpMode::Exact)?.value);
            if exact > bound {
                bound = exact;
            }
            if !self.beats_incumbent(&bound) {
                self.stats.pruned += 1;
                return Ok(Vec::new());
            }
        }

        // x on the original edge ids (forced edges read as 1, the rest 0)
        let mut x = vec![0.0; g.edge_count()];
        for (k, &e) in kept.iter().enumerate() {
            x[e] = float.x[k];
        }
        for e in node.forced_in.iter() {
            x[e] = 1.0;
        }
        let rounded: EdgeSet = (0..g.edge_count()).filter(|&e| x[e] >= 0.5 - 1e-9 && !node.forced_out.contains(e)).collect();
        let mut weights = inst.costs.clone();
        for e in node.forced_in.iter() {
            weights[e] = -Rational::one();
        }
        self.offer(&minimum_spanning_forest(g, &weights, &rounded));

        let e = free
            .iter()
            .copied()
            .min_by(|&a, &b| (x[a] - 0.5).abs().total_cmp(&(x[b] - 0.5).abs()).then(a.cmp(&b)))
            .expect("free is nonempty");
        Ok(children(&node, e, bound, x[e] >= 0.5))
    }
}

/// Children in stack order: the one explored first comes last.
fn children(node: &BranchNode, e: usize, bound: Rational, take_first: bool) -> Vec<BranchNode> {
    let mut with = node.clone();
    with.forced_in.insert(e);
    let mut without = node.clone();
    without.forced_out.insert(e);
    for child in [&mut with, &mut without] {
        child.depth += 1;
        child.lower_bound = bound.clone();
    }
    if take_first {
        vec![without, with]
    } else {
        vec![with, without]
    }
}

/// Instance on the forced and free edges, with forced edges made free of charge.
fn restrict(inst: &PcsfInstance, forced_in: &EdgeSet, free: &[usize]) -> Result<(PcsfInstance, Vec<usize>)> {
    let mut kept: Vec<usize> = forced_in.iter().chain(free.iter().copied()).collect();
    kept.sort_unstable();
    let edges: Vec<(usize, usize)> = kept.iter().map(|&e| inst.graph.endpoints(e)).collect();
    let graph = Graph::from_edges(inst.graph.node_count(), &edges)?;
    let costs = kept.iter().map(|&e| if forced_in.contains(e) { Rational::zero() } else { inst.costs[e].clone() }).collect();
    let sub = PcsfInstance::with_names(graph, inst.node_names.clone(), costs, inst.pairs.clone(), inst.penalties.clone())?;
    Ok((sub, kept))
}

fn connected_pairs(inst: &PcsfInstance, forest: &EdgeSet) -> Vec<usize> {
    let comp = crate::graph::components(&inst.graph, forest);
    (0..inst.pair_count()).filter(|&i| comp.same(inst.pairs[i].0, inst.pairs[i].1)).collect()
}

/// Optimal value and every optimal forest, by scanning all acyclic edge sets.
pub fn enumerate_ip(inst: &PcsfInstance) -> Result<(Rational, Vec<IntegralSolution>)> {
    if inst.edge_count() > ENUMERATION_CAP {
        return Err(Error::ScaleCap { what: "edge count", actual: inst.edge_count(), cap: ENUMERATION_CAP });
    }
    check_connectable(inst)?;
    let mut best: Option<Rational> = None;
    let mut optimal: Vec<IntegralSolution> = Vec::new();
    visit_forests(&inst.graph, ENUMERATION_CAP, |edges| {
        let forest: EdgeSet = edges.iter().copied().collect();
        let Ok(sol) = IntegralSolution::from_forest(inst, forest) else { return };
        let obj = sol.objective();
        match &best {
            Some(b) if &obj > b => {}
            Some(b) if &obj == b => optimal.push(sol),
            _ => {
                best = Some(obj);
                optimal = vec![sol];
            }
        }
    })?;
    let value = best.expect("the empty forest or a spanning forest is feasible");
    Ok((value, optimal))
}

/// LP value, integral optimum and their ratio.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    #[serde(with = "serde_rational")]
    pub lp: Rational,
    #[serde(with = "serde_rational")]
    pub ip: Rational,
    #[serde(with = "serde_rational")]
    pub ratio: Rational,
    #[serde(skip)]
    pub solution: IntegralSolution,
}

impl std::fmt::Display for GapReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "lp {} ip {} ratio {}", fmt_rational(&self.lp), fmt_rational(&self.ip), fmt_rational(&self.ratio))
    }
}

pub fn gap(inst: &PcsfInstance) -> Result<GapReport> {
    let lp = solve_lp(inst, LpMode::Exact)?.value;
    let solution = solve_ip(inst)?;
    let ip = solution.objective();
    if lp.is_zero() && ip.is_positive() {
        return Err(Error::invalid("LP value is zero but the integral optimum is positive"));
    }
    let ratio = if lp.is_zero() { Rational::one() } else { &ip / &lp };
    Ok(GapReport { lp, ip, ratio, solution })
}

#[cfg(test)]
mod tests;
