//! Spanning-tree decompositions of the base graph and the explicit
//! distribution on the layered construction.

use num_traits::{One, Zero};

use super::ForestDistribution;
use crate::error::{Error, Result};
use crate::graph::{enumerate_spanning_trees, minimum_spanning_tree, Capacities, EdgeSet, Graph};
use crate::instances::LayeredConstruction;
use crate::rational::{int, Rational};
use crate::simplex::{LpStatus, Relation, Row, Simplex};

/// Trees are enumerated (and the uniform distribution tried) up to this many.
const UNIFORM_TREE_CAP: usize = 5_000;
const UNIFORM_EDGE_CAP: usize = 20;

/// Distribution over spanning trees of a connected `d`-regular graph with
/// every edge marginal at most `2(n-1)/(d n)`. The uniform distribution is
/// used when it qualifies; otherwise column generation with minimum spanning
/// tree pricing.
pub fn spanning_tree_decomposition(p: &Graph) -> Result<ForestDistribution> {
    if !p.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = p.node_count();
    let d = p.degree(0);
    if (0..n).any(|v| p.degree(v) != d) {
        return Err(Error::invalid("base graph is not regular"));
    }
    if n == 1 {
        return ForestDistribution::single(p, EdgeSet::new());
    }
    let target = int(2 * (n as i64 - 1)) / int((d * n) as i64);
    if p.edge_count() <= UNIFORM_EDGE_CAP {
        let trees = enumerate_spanning_trees(p, UNIFORM_EDGE_CAP)?;
        if trees.len() <= UNIFORM_TREE_CAP {
            let w = Rational::one() / int(trees.len() as i64);
            let dist = ForestDistribution::new(p, trees.into_iter().map(|t| (t, w.clone())).collect())?;
            if dist.marginals(p.edge_count()).iter().all(|m| m <= &target) {
                return Ok(dist);
            }
        }
    }
    tree_column_generation(p, &target)
}

/// `max sum mu` with `sum mu chi_T <= target`; the targets sum to `n - 1`,
/// so the value reaches 1 exactly when the target point is in the polytope.
fn tree_column_generation(p: &Graph, target: &Rational) -> Result<ForestDistribution> {
    let rows = (0..p.edge_count()).map(|_| Row { coeffs: Vec::new(), relation: Relation::Le, rhs: target.clone() }).collect();
    let mut lp: Simplex<Rational> = Simplex::new(Vec::new(), rows);
    let mut trees: Vec<EdgeSet> = Vec::new();
    loop {
        if lp.solve() != LpStatus::Optimal {
            return Err(Error::invalid("spanning tree master did not solve"));
        }
        let y: Vec<Rational> = lp.duals().into_iter().map(|v| if v < Rational::zero() { -v } else { Rational::zero() }).collect();
        let tree = minimum_spanning_tree(p, &Capacities::new(p, y.clone())?)?;
        let price: Rational = tree.iter().map(|e| &y[e]).sum();
        if price >= Rational::one() || trees.contains(&tree) {
            break;
        }
        let coeffs: Vec<(usize, Rational)> = tree.iter().map(|e| (e, Rational::one())).collect();
        lp.add_column(-Rational::one(), &coeffs);
        trees.push(tree);
    }
    let total = -lp.objective();
    if !total.is_one() {
        return Err(Error::Infeasible(format!(
            "uniform marginal {target} is not in the spanning tree polytope (packing value {total})"
        )));
    }
    ForestDistribution::new(p, trees.into_iter().zip(lp.primal()).collect())
}

/// Weight `3 - alpha` spread over base spanning trees, each subdivided and
/// replicated in every copy; weight `alpha - 2` on the minimum spanning tree
/// of the whole graph under unit weights.
pub fn explicit_gap_distribution(lc: &LayeredConstruction, alpha: &Rational) -> Result<ForestDistribution> {
    if alpha < &int(2) || alpha > &int(3) {
        return Err(Error::invalid(format!("alpha = {alpha} is outside [2, 3]")));
    }
    if lc.l() != 3 {
        return Err(Error::invalid(format!("explicit distribution needs a 3-regular base graph, got l = {}", lc.l())));
    }
    let base = spanning_tree_decomposition(&lc.base.graph)?;
    let spread = int(3) - alpha;
    let mut entries: Vec<(EdgeSet, Rational)> = base
        .entries()
        .iter()
        .map(|(tree, w)| (replicate(lc, tree), w * &spread))
        .collect();
    let mst = minimum_spanning_tree(&lc.graph, &Capacities::uniform(&lc.graph, Rational::one()))?;
    entries.push((mst, alpha - int(2)));
    ForestDistribution::new(&lc.graph, entries)
}

/// The subdivided copy of a base tree in every copy.
fn replicate(lc: &LayeredConstruction, tree: &EdgeSet) -> EdgeSet {
    lc.copies
        .iter()
        .flat_map(|copy| tree.iter().flat_map(move |b| copy.groups[b].edges.iter().copied()))
        .collect()
}
