use num_traits::{One, Zero};

use super::{BaseGraph, FracSolution, PcsfInstance};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rational::{int, rat, Penalty, Rational};

pub const DEFAULT_NODE_CAP: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeRole {
    /// Node `base` of the base graph, as seen by its copy.
    Branch { base: usize },
    /// `position`-th internal node (0-based) of the path replacing `base_edge`.
    Subdivision { base_edge: usize, position: usize },
}

/// Metadata of a node, recorded from the copy that created it. The root of a
/// child copy keeps the metadata of the subdivision node it is attached to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeInfo {
    pub copy: usize,
    pub role: NodeRole,
    pub level: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeInfo {
    pub copy: usize,
    /// Base edge whose path this edge lies on.
    pub group: usize,
    /// 0-based position along the path, from the lower base endpoint.
    pub position: usize,
}

/// The path that replaces one base edge inside one copy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathGroup {
    pub base_edge: usize,
    /// `m` internal nodes, ordered from the first base endpoint to the second.
    pub nodes: Vec<usize>,
    /// `m + 1` edges in path order.
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopyInfo {
    pub parent: Option<usize>,
    pub level: usize,
    /// Node of the whole graph playing base node `i`; entry 0 is the copy's root.
    pub branch: Vec<usize>,
    pub groups: Vec<PathGroup>,
}

impl CopyInfo {
    pub fn root(&self) -> usize {
        self.branch[0]
    }

    pub fn subdivision_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.groups.iter().flat_map(|g| g.nodes.iter().copied())
    }

    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.groups.iter().flat_map(|g| g.edges.iter().copied())
    }

    pub fn nodes(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.branch.iter().copied().chain(self.subdivision_nodes()).collect();
        all.sort_unstable();
        all
    }
}

/// The recursively attached subdivided copies of a base graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredConstruction {
    pub base: BaseGraph,
    pub m: usize,
    pub k: usize,
    pub graph: Graph,
    pub root: usize,
    pub nodes: Vec<NodeInfo>,
    pub edges: Vec<EdgeInfo>,
    pub copies: Vec<CopyInfo>,
    /// For each node, the copy rooted at it, if any.
    pub rooted_copy: Vec<Option<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    /// Two branch nodes of the same copy.
    SameCopy { copy: usize },
    /// The global root and a degree-2 node.
    Root,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CostScheme {
    /// Unit costs, infinite penalties on same-copy pairs, unit penalties on root pairs.
    Unit,
    Explicit { costs: Vec<Rational>, penalties: Vec<Penalty> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointMode {
    Gap,
    Lmp,
}

impl std::str::FromStr for PointMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gap" => Ok(PointMode::Gap),
            "lmp" => Ok(PointMode::Lmp),
            other => Err(Error::Parse(format!("unknown mode {other:?}; expected gap or lmp"))),
        }
    }
}

fn layered_node_count(base: &BaseGraph, m: usize, k: usize) -> Option<usize> {
    let n = base.n();
    let per_copy = m.checked_mul(base.graph.edge_count())?;
    let mut total = n.checked_add(per_copy)?;
    let mut copies: usize = 1;
    for _ in 0..k {
        copies = copies.checked_mul(per_copy)?;
        total = total.checked_add(copies.checked_mul(n - 1 + per_copy)?)?;
    }
    Some(total)
}

pub fn build_layered(base: &BaseGraph, m: usize, k: usize, node_cap: usize) -> Result<LayeredConstruction> {
    if m == 0 {
        return Err(Error::invalid("subdivision count m must be at least 1"));
    }
    match layered_node_count(base, m, k) {
        Some(total) if total <= node_cap => {}
        other => {
            return Err(Error::ScaleCap { what: "layered node count", actual: other.unwrap_or(usize::MAX), cap: node_cap })
        }
    }
    let mut lc = LayeredConstruction {
        base: base.clone(),
        m,
        k,
        graph: Graph::new(0),
        root: 0,
        nodes: Vec::new(),
        edges: Vec::new(),
        copies: Vec::new(),
        rooted_copy: Vec::new(),
    };
    let first = lc.attach_copy(None, None);
    let mut frontier: Vec<usize> = lc.copies[first].subdivision_nodes().collect();
    for _ in 0..k {
        let mut next = Vec::new();
        for v in frontier {
            let parent = lc.nodes[v].copy;
            let c = lc.attach_copy(Some(parent), Some(v));
            next.extend(lc.copies[c].subdivision_nodes());
        }
        frontier = next;
    }
    Ok(lc)
}

impl LayeredConstruction {
    fn new_node(&mut self, info: NodeInfo) -> usize {
        let v = self.graph.add_node();
        self.nodes.push(info);
        self.rooted_copy.push(None);
        v
    }

    fn attach_copy(&mut self, parent: Option<usize>, at: Option<usize>) -> usize {
        let id = self.copies.len();
        let level = parent.map_or(0, |p| self.copies[p].level + 1);
        let n = self.base.n();
        let mut branch = Vec::with_capacity(n);
        for b in 0..n {
            let v = match (b, at) {
                (0, Some(v)) => v,
                _ => self.new_node(NodeInfo { copy: id, role: NodeRole::Branch { base: b }, level }),
            };
            branch.push(v);
        }
        if let Some(v) = at {
            self.rooted_copy[v] = Some(id);
        }
        let mut groups = Vec::with_capacity(self.base.graph.edge_count());
        for (base_edge, &(a, b)) in self.base.graph.edges().to_vec().iter().enumerate() {
            let nodes: Vec<usize> = (0..self.m)
                .map(|position| {
                    self.new_node(NodeInfo { copy: id, role: NodeRole::Subdivision { base_edge, position }, level })
                })
                .collect();
            let mut chain = vec![branch[a]];
            chain.extend(&nodes);
            chain.push(branch[b]);
            let edges = chain
                .windows(2)
                .enumerate()
                .map(|(position, w)| {
                    let e = self.graph.add_edge(w[0], w[1]).expect("fresh nodes");
                    self.edges.push(EdgeInfo { copy: id, group: base_edge, position });
                    e
                })
                .collect();
            groups.push(PathGroup { base_edge, nodes, edges });
        }
        self.copies.push(CopyInfo { parent, level, branch, groups });
        id
    }

    pub fn l(&self) -> usize {
        self.base.l
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    /// Subdivision nodes of the deepest copies, in node order.
    pub fn degree_two_nodes(&self) -> Vec<usize> {
        (0..self.graph.node_count())
            .filter(|&v| {
                let info = &self.nodes[v];
                info.level == self.k && matches!(info.role, NodeRole::Subdivision { .. })
            })
            .collect()
    }

    /// Pairs of the layered instance with their kinds, in instance order.
    pub fn pairs(&self) -> Vec<((usize, usize), PairKind)> {
        let mut pairs = Vec::new();
        for (c, copy) in self.copies.iter().enumerate() {
            for a in 0..copy.branch.len() {
                for b in a + 1..copy.branch.len() {
                    pairs.push(((copy.branch[a], copy.branch[b]), PairKind::SameCopy { copy: c }));
                }
            }
        }
        for v in self.degree_two_nodes() {
            pairs.push(((self.root, v), PairKind::Root));
        }
        pairs
    }

    pub fn node_name(&self, v: usize) -> String {
        let info = &self.nodes[v];
        match info.role {
            NodeRole::Branch { base } => format!("c{}.b{base}", info.copy),
            NodeRole::Subdivision { base_edge, position } => format!("c{}.e{base_edge}.{position}", info.copy),
        }
    }

    /// Chain of copies from the root copy down to `copy`.
    pub fn ancestry(&self, copy: usize) -> Vec<usize> {
        let mut chain = vec![copy];
        let mut c = copy;
        while let Some(p) = self.copies[c].parent {
            chain.push(p);
            c = p;
        }
        chain.reverse();
        chain
    }
}

pub fn layered_instance(lc: &LayeredConstruction, scheme: &CostScheme) -> Result<PcsfInstance> {
    let tagged = lc.pairs();
    let pairs: Vec<(usize, usize)> = tagged.iter().map(|(p, _)| *p).collect();
    let (costs, penalties) = match scheme {
        CostScheme::Unit => (
            vec![Rational::one(); lc.graph.edge_count()],
            tagged
                .iter()
                .map(|(_, kind)| match kind {
                    PairKind::SameCopy { .. } => Penalty::Infinite,
                    PairKind::Root => Penalty::Finite(Rational::one()),
                })
                .collect(),
        ),
        CostScheme::Explicit { costs, penalties } => (costs.clone(), penalties.clone()),
    };
    let names = (0..lc.graph.node_count()).map(|v| lc.node_name(v)).collect();
    PcsfInstance::with_names(lc.graph.clone(), names, costs, pairs, penalties)
}

/// `x = 1/l` everywhere; `z = 0` on same-copy pairs and `1/3` (gap) or
/// `1 - 2/l` (lmp) on root pairs.
pub fn canonical_point(lc: &LayeredConstruction, mode: PointMode) -> Result<FracSolution> {
    let l = lc.l() as i64;
    if mode == PointMode::Gap && l != 3 {
        return Err(Error::invalid(format!("gap point needs a 3-regular base graph, got l = {l}")));
    }
    let root_z = mode.root_z(lc.l());
    Ok(FracSolution {
        x: vec![Rational::new(1.into(), l.into()); lc.graph.edge_count()],
        z: lc
            .pairs()
            .iter()
            .map(|(_, kind)| match kind {
                PairKind::SameCopy { .. } => Rational::zero(),
                PairKind::Root => root_z.clone(),
            })
            .collect(),
    })
}

impl PointMode {
    /// The root-pair `z` value of the canonical point for degree `l`.
    pub fn root_z(self, l: usize) -> Rational {
        match self {
            PointMode::Gap => rat(1, 3),
            PointMode::Lmp => Rational::one() - int(2) / int(l as i64),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::edge_connectivity;
    use crate::instances::{make_base, BaseKind};

    fn k4() -> BaseGraph {
        make_base(&BaseKind::K4).unwrap()
    }

    #[test]
    fn sizes_follow_recurrences() {
        let base = k4();
        for m in [1usize, 2, 4] {
            let mut nodes = 4 + 6 * m;
            let mut edges = 6 * (m + 1);
            let mut copies = 1usize;
            for k in 0..=2usize {
                if k > 0 {
                    copies *= 6 * m;
                    nodes += copies * (3 + 6 * m);
                    edges += copies * 6 * (m + 1);
                }
                let lc = build_layered(&base, m, k, DEFAULT_NODE_CAP).unwrap();
                assert_eq!(lc.graph.node_count(), nodes, "m={m} k={k}");
                assert_eq!(lc.graph.edge_count(), edges, "m={m} k={k}");
            }
        }
        let lc = build_layered(&base, 4, 1, DEFAULT_NODE_CAP).unwrap();
        assert_eq!((lc.graph.node_count(), lc.graph.edge_count()), (676, 750));
    }

    #[test]
    fn metadata_is_consistent() {
        let lc = build_layered(&k4(), 2, 2, DEFAULT_NODE_CAP).unwrap();
        let g = &lc.graph;
        for (c, copy) in lc.copies.iter().enumerate() {
            // degrees inside the copy
            let mut deg = std::collections::HashMap::new();
            for e in copy.edges() {
                assert_eq!(lc.edges[e].copy, c);
                let (u, v) = g.endpoints(e);
                *deg.entry(u).or_insert(0) += 1;
                *deg.entry(v).or_insert(0) += 1;
            }
            for &b in &copy.branch {
                assert_eq!(deg[&b], 3);
            }
            for group in &copy.groups {
                assert_eq!(group.nodes.len(), 2);
                assert_eq!(group.edges.len(), 3);
                for v in &group.nodes {
                    assert_eq!(deg[v], 2);
                }
            }
            // each path runs between the branch nodes of its base edge
            for group in &copy.groups {
                let (a, b) = lc.base.graph.endpoints(group.base_edge);
                let mut chain = vec![copy.branch[a]];
                chain.extend(&group.nodes);
                chain.push(copy.branch[b]);
                for (i, &e) in group.edges.iter().enumerate() {
                    let (u, v) = g.endpoints(e);
                    assert_eq!((u, v), (chain[i], chain[i + 1]));
                }
            }
        }
        let deg2: Vec<usize> = (0..g.node_count()).filter(|&v| g.degree(v) == 2).collect();
        assert_eq!(deg2, lc.degree_two_nodes());
        assert!(lc.copies.iter().skip(1).all(|c| lc.rooted_copy[c.root()].is_some()));
    }

    #[test]
    fn subdivided_k4_has_connectivity_two() {
        let lc = build_layered(&k4(), 4, 0, DEFAULT_NODE_CAP).unwrap();
        assert_eq!(edge_connectivity(&lc.graph), 2);
    }

    #[test]
    fn pair_counts() {
        let base = k4();
        let lc = build_layered(&base, 4, 0, DEFAULT_NODE_CAP).unwrap();
        assert_eq!(layered_instance(&lc, &CostScheme::Unit).unwrap().pair_count(), 30);
        let lc = build_layered(&base, 1, 0, DEFAULT_NODE_CAP).unwrap();
        assert_eq!(layered_instance(&lc, &CostScheme::Unit).unwrap().pair_count(), 12);
        let lc = build_layered(&base, 4, 1, DEFAULT_NODE_CAP).unwrap();
        let inst = layered_instance(&lc, &CostScheme::Unit).unwrap();
        assert_eq!(inst.pair_count(), 6 * 25 + 24 * 24);
    }

    #[test]
    fn canonical_points() {
        let lc = build_layered(&k4(), 4, 0, DEFAULT_NODE_CAP).unwrap();
        let p = canonical_point(&lc, PointMode::Gap).unwrap();
        assert!(p.x.iter().all(|v| *v == rat(1, 3)));
        assert!(p.z.iter().all(|v| v.is_zero() || *v == rat(1, 3)));
        assert_eq!(canonical_point(&lc, PointMode::Lmp).unwrap(), p);
        let k5 = make_base(&BaseKind::Complete(5)).unwrap();
        let lc = build_layered(&k5, 2, 0, DEFAULT_NODE_CAP).unwrap();
        assert!(canonical_point(&lc, PointMode::Gap).is_err());
        let p = canonical_point(&lc, PointMode::Lmp).unwrap();
        assert!(p.x.iter().all(|v| *v == rat(1, 4)));
        assert!(p.z.iter().all(|v| v.is_zero() || *v == rat(1, 2)));
    }

    #[test]
    fn node_cap_and_zero_m() {
        assert!(matches!(build_layered(&k4(), 4, 3, DEFAULT_NODE_CAP), Err(Error::ScaleCap { .. })));
        assert!(build_layered(&k4(), 0, 0, DEFAULT_NODE_CAP).is_err());
    }
}
