//! Exact probabilities behind the layered lower-bound argument: trimming,
//! witness nodes inside a copy, and the chain of witness nodes from the root.

use num_traits::{One, Zero};
use serde::Serialize;

use super::ForestDistribution;
use crate::error::{Error, Result};
use crate::graph::{components, EdgeSet, UnionFind};
use crate::instances::{LayeredConstruction, NodeRole};
use crate::rational::{int, serde_rational, Rational};

/// Drops, copy by copy, the forest edges whose component inside the copy
/// holds no branch node of that copy.
pub fn trim(lc: &LayeredConstruction, dist: &ForestDistribution) -> Result<ForestDistribution> {
    let entries = dist.entries().iter().map(|(f, w)| (trim_forest(lc, f), w.clone())).collect();
    ForestDistribution::new(&lc.graph, entries)
}

fn trim_forest(lc: &LayeredConstruction, forest: &EdgeSet) -> EdgeSet {
    let g = &lc.graph;
    let mut per_copy: Vec<Vec<usize>> = vec![Vec::new(); lc.copies.len()];
    for e in forest.iter() {
        per_copy[lc.edges[e].copy].push(e);
    }
    let mut kept = EdgeSet::new();
    for (c, edges) in per_copy.iter().enumerate() {
        let mut local = UnionFind::new(g.node_count());
        for &e in edges {
            let (u, v) = g.endpoints(e);
            local.union(u, v);
        }
        let branch = &lc.copies[c].branch;
        for &e in edges {
            let (u, _) = g.endpoints(e);
            if branch.iter().any(|&b| local.same(b, u)) {
                kept.insert(e);
            }
        }
    }
    kept
}

/// Edges of `forest` inside `copy`, and whether they form one tree through
/// every branch node of the copy.
fn copy_tree(lc: &LayeredConstruction, forest: &EdgeSet, copy: usize) -> (Vec<usize>, bool) {
    let g = &lc.graph;
    let edges: Vec<usize> = forest.iter().filter(|&e| lc.edges[e].copy == copy).collect();
    let mut uf = UnionFind::new(g.node_count());
    for &e in &edges {
        let (u, v) = g.endpoints(e);
        uf.union(u, v);
    }
    let branch = &lc.copies[copy].branch;
    let spans = branch.iter().all(|&b| uf.same(b, branch[0]))
        && edges.iter().all(|&e| uf.same(g.endpoints(e).0, branch[0]));
    (edges, spans)
}

/// A subdivision node of a copy with its exact leaf and containment probabilities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessNode {
    pub node: usize,
    pub copy: usize,
    pub base_edge: usize,
    pub position: usize,
    /// `Pr[deg(v) = 1]` inside the copy.
    #[serde(with = "serde_rational")]
    pub p_leaf: Rational,
    /// `Pr[Q_v in F | event]` for the path through `v`.
    #[serde(with = "serde_rational")]
    pub p_contained: Rational,
    #[serde(with = "serde_rational")]
    pub p_event: Rational,
    #[serde(with = "serde_rational")]
    pub leaf_bound: Rational,
    #[serde(with = "serde_rational")]
    pub containment_bound: Rational,
    pub meets_bounds: bool,
}

/// Picks the path whose containment given `event` is largest (ties by base
/// edge), then the node on it that is least often a leaf (ties by position).
/// Bounds checked: `Pr[leaf] <= 2/m` and `Pr[Q in F | event] >= (n-1)/|E(P)|`.
pub fn find_witness_node(
    lc: &LayeredConstruction,
    dist: &ForestDistribution,
    copy: usize,
    event: &dyn Fn(&EdgeSet) -> bool,
) -> Result<WitnessNode> {
    if copy >= lc.copies.len() {
        return Err(Error::invalid(format!("copy {copy} does not exist")));
    }
    let info = &lc.copies[copy];
    let mut trees = Vec::with_capacity(dist.len());
    for (i, (forest, w)) in dist.entries().iter().enumerate() {
        let (edges, spans) = copy_tree(lc, forest, copy);
        if !spans {
            return Err(Error::invalid(format!("support forest {i} is not a tree through the branch nodes of copy {copy}")));
        }
        trees.push((EdgeSet::from_iter(edges), w, event(forest)));
    }
    let p_event: Rational = trees.iter().filter(|t| t.2).map(|t| t.1).sum();
    if p_event.is_zero() {
        return Err(Error::invalid("event has probability 0"));
    }
    let contained = |group: usize| -> Rational {
        let path = &info.groups[group].edges;
        let hit: Rational = trees.iter().filter(|t| t.2 && path.iter().all(|&e| t.0.contains(e))).map(|t| t.1).sum();
        hit / &p_event
    };
    let mut best_group = 0;
    let mut best = contained(0);
    for group in 1..info.groups.len() {
        let c = contained(group);
        if c > best {
            best = c;
            best_group = group;
        }
    }
    let g = &lc.graph;
    let leaf = |v: usize| -> Rational {
        trees
            .iter()
            .filter(|t| g.incident(v).iter().filter(|&&(e, _)| t.0.contains(e)).count() == 1)
            .map(|t| t.1)
            .sum()
    };
    let group = &info.groups[best_group];
    let (position, node, p_leaf) = group
        .nodes
        .iter()
        .enumerate()
        .map(|(pos, &v)| (pos, v, leaf(v)))
        .min_by(|a, b| a.2.cmp(&b.2).then(a.0.cmp(&b.0)))
        .expect("paths have at least one internal node");
    debug_assert!(matches!(lc.nodes[node].role, NodeRole::Subdivision { .. }));
    let leaf_bound = int(2) / int(lc.m as i64);
    let containment_bound = int(lc.n() as i64 - 1) / int(lc.base.graph.edge_count() as i64);
    Ok(WitnessNode {
        node,
        copy,
        base_edge: group.base_edge,
        position,
        meets_bounds: p_leaf <= leaf_bound && best >= containment_bound,
        p_leaf,
        p_contained: best,
        p_event,
        leaf_bound,
        containment_bound,
    })
}

/// One link `r_j -> r_(j+1)` of the chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainStep {
    pub j: usize,
    pub witness: WitnessNode,
    /// `Pr[r_(j+1) ~ r_0]`.
    #[serde(with = "serde_rational")]
    pub p_root: Rational,
    /// `Pr[r_(j+1) ~ r_j]`.
    #[serde(with = "serde_rational")]
    pub p_parent: Rational,
    /// `Pr[Q in F and r_j !~ r_0]`.
    #[serde(with = "serde_rational")]
    pub p_joint: Rational,
    /// `p_parent <= alpha/l + 2/m`.
    pub step_bound: bool,
    /// `p_joint >= c (1 - Pr[r_j ~ r_0])`.
    pub joint_bound: bool,
    /// `p_root <= alpha/l + 2/m - c (1 - Pr[r_j ~ r_0])`.
    pub recursion: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainTrace {
    pub steps: Vec<ChainStep>,
    /// Why the chain stopped before the deepest copy, if it did.
    pub truncated: Option<String>,
    /// Every step met its premises and all three inequalities.
    pub holds: bool,
}

/// Follows witness nodes from the root copy down, conditioning each copy on
/// its root being apart from `r_0`. With `c = (n-1)/|E(P)|` the recursion
/// checked is at least as strong as `p' <= alpha/3 + 2/n - 2/3 + (2/3) p + 2/(3n)`.
pub fn chain_trace(lc: &LayeredConstruction, dist: &ForestDistribution, alpha: &Rational) -> Result<ChainTrace> {
    let dist = trim(lc, dist)?;
    let g = &lc.graph;
    let comps: Vec<_> = dist.entries().iter().map(|(f, _)| components(g, f)).collect();
    let r0 = lc.root;
    let prob = |pred: &dyn Fn(usize) -> bool| -> Rational {
        dist.entries().iter().enumerate().filter(|(i, _)| pred(*i)).map(|(_, (_, w))| w).sum()
    };
    let a = alpha / int(lc.l() as i64);
    let leaf_bound = int(2) / int(lc.m as i64);
    let c = int(lc.n() as i64 - 1) / int(lc.base.graph.edge_count() as i64);

    let mut steps = Vec::new();
    let mut truncated = None;
    let mut r_j = r0;
    let mut p_j = Rational::one();
    let mut copy = 0;
    for j in 0.. {
        let apart = |f: &EdgeSet| {
            let i = dist.entries().iter().position(|(x, _)| x == f).expect("support forest");
            !comps[i].same(r_j, r0)
        };
        let always = |_: &EdgeSet| true;
        let event: &dyn Fn(&EdgeSet) -> bool = if j == 0 { &always } else { &apart };
        if j > 0 && p_j.is_one() {
            truncated = Some(format!("r_{j} is connected to r_0 with probability 1"));
            break;
        }
        let witness = find_witness_node(lc, &dist, copy, event)?;
        let v = witness.node;
        let path = lc.copies[copy].groups[witness.base_edge].edges.clone();
        let p_root = prob(&|i| comps[i].same(v, r0));
        let p_parent = prob(&|i| comps[i].same(v, r_j));
        let p_joint = prob(&|i| {
            let f = &dist.entries()[i].0;
            path.iter().all(|&e| f.contains(e)) && !comps[i].same(r_j, r0)
        });
        let miss = Rational::one() - &p_j;
        let step = ChainStep {
            j,
            step_bound: p_parent <= &a + &leaf_bound,
            joint_bound: p_joint >= &c * &miss,
            recursion: p_root <= &a + &leaf_bound - &c * &miss,
            witness,
            p_root: p_root.clone(),
            p_parent,
            p_joint,
        };
        steps.push(step);
        match lc.rooted_copy[v] {
            Some(next) => {
                copy = next;
                r_j = v;
                p_j = p_root;
            }
            None => break,
        }
    }
    let holds = steps.iter().all(|s| s.witness.meets_bounds && s.step_bound && s.joint_bound && s.recursion);
    Ok(ChainTrace { steps, truncated, holds })
}
