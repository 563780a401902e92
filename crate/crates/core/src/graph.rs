//! Undirected multigraphs with exact-capacity cuts, connectivity and trees.
//!
//! Every public computation here is over [`Rational`]. The flow routine is
//! generic so the floating-point LP guidance can share it inside the crate.
//! Ties are broken by smallest edge id, then smallest node id.

use std::collections::VecDeque;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Default cap on `|E|` for exhaustive enumerations.
pub const DEFAULT_ENUM_BOUND: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    pub fn new(node_count: usize) -> Self {
        Graph { node_count, edges: Vec::new(), adjacency: vec![Vec::new(); node_count] }
    }

    pub fn from_edges(node_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(node_count);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Adds an edge and returns its id. Parallel edges are allowed, self-loops are not.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<usize> {
        if u >= self.node_count || v >= self.node_count {
            return Err(Error::invalid(format!("edge ({u},{v}) has an endpoint outside 0..{}", self.node_count)));
        }
        if u == v {
            return Err(Error::invalid(format!("self-loop at node {u}")));
        }
        let id = self.edges.len();
        self.edges.push((u, v));
        self.adjacency[u].push((id, v));
        self.adjacency[v].push((id, u));
        Ok(id)
    }

    pub fn add_node(&mut self) -> usize {
        self.adjacency.push(Vec::new());
        self.node_count += 1;
        self.node_count - 1
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn endpoints(&self, edge: usize) -> (usize, usize) {
        self.edges[edge]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `(edge id, neighbour)` pairs in insertion order.
    pub fn incident(&self, node: usize) -> &[(usize, usize)] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node >= self.node_count {
            Err(Error::invalid(format!("node {node} out of range 0..{}", self.node_count)))
        } else {
            Ok(())
        }
    }

    /// Edges with exactly one endpoint on the marked side.
    pub fn cut_edges(&self, side: &[bool]) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| side[u] != side[v])
            .map(|(id, _)| id)
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        components(self, &EdgeSet::all(self)).count <= 1
    }
}

/// A set of edge ids, kept sorted and free of duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeSet(Vec<usize>);

impl EdgeSet {
    pub fn new() -> Self {
        EdgeSet(Vec::new())
    }

    pub fn all(g: &Graph) -> Self {
        EdgeSet((0..g.edge_count()).collect())
    }

    pub fn insert(&mut self, edge: usize) -> bool {
        match self.0.binary_search(&edge) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, edge);
                true
            }
        }
    }

    pub fn remove(&mut self, edge: usize) -> bool {
        match self.0.binary_search(&edge) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn contains(&self, edge: usize) -> bool {
        self.0.binary_search(&edge).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn mask(&self, edge_count: usize) -> Vec<bool> {
        let mut m = vec![false; edge_count];
        for &e in &self.0 {
            m[e] = true;
        }
        m
    }

    pub fn is_subset_of(&self, g: &Graph) -> bool {
        self.0.last().is_none_or(|&e| e < g.edge_count())
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        self.iter().chain(other.iter()).collect()
    }

    /// True when the edges contain no cycle.
    pub fn is_forest(&self, g: &Graph) -> bool {
        let mut uf = UnionFind::new(g.node_count());
        self.iter().all(|e| {
            let (u, v) = g.endpoints(e);
            uf.union(u, v)
        })
    }
}

impl FromIterator<usize> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        EdgeSet(v)
    }
}

/// Nonnegative rational value per edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Capacities(Vec<Rational>);

impl Capacities {
    pub fn new(g: &Graph, values: Vec<Rational>) -> Result<Self> {
        if values.len() != g.edge_count() {
            return Err(Error::invalid(format!(
                "{} capacities for {} edges",
                values.len(),
                g.edge_count()
            )));
        }
        if let Some(e) = values.iter().position(|c| c < &Rational::zero()) {
            return Err(Error::invalid(format!("negative capacity on edge {e}")));
        }
        Ok(Capacities(values))
    }

    pub fn uniform(g: &Graph, value: Rational) -> Self {
        Capacities(vec![value; g.edge_count()])
    }

    pub fn get(&self, edge: usize) -> &Rational {
        &self.0[edge]
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn cut_value(&self, g: &Graph, side: &[bool]) -> Rational {
        g.cut_edges(side).into_iter().fold(Rational::zero(), |acc, e| acc + &self.0[e])
    }
}

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; false if they were already merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }
}

/// Node partition into connected components; labels are numbered by smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    pub label: Vec<usize>,
    pub count: usize,
}

impl Components {
    pub fn same(&self, u: usize, v: usize) -> bool {
        self.label[u] == self.label[v]
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (node, &c) in self.label.iter().enumerate() {
            out[c].push(node);
        }
        out
    }
}

pub fn components(g: &Graph, forest: &EdgeSet) -> Components {
    let mut uf = UnionFind::new(g.node_count());
    for e in forest.iter() {
        let (u, v) = g.endpoints(e);
        uf.union(u, v);
    }
    let mut root_label = vec![usize::MAX; g.node_count()];
    let mut label = vec![0; g.node_count()];
    let mut count = 0;
    for node in 0..g.node_count() {
        let r = uf.find(node);
        if root_label[r] == usize::MAX {
            root_label[r] = count;
            count += 1;
        }
        label[node] = root_label[r];
    }
    Components { label, count }
}

/// Minimum `s`-`t` cut by shortest augmenting paths over exact capacities.
///
/// Returns the cut value and the source side (nodes reachable from `s` in the
/// final residual graph), so `side[s] && !side[t]`.
pub fn min_cut(g: &Graph, cap: &Capacities, s: usize, t: usize) -> Result<(Rational, Vec<bool>)> {
    g.check_node(s)?;
    g.check_node(t)?;
    if s == t {
        return Err(Error::invalid("min_cut needs distinct terminals"));
    }
    if cap.values().len() != g.edge_count() {
        return Err(Error::invalid("capacity vector does not match the graph"));
    }
    Ok(max_flow(g, cap.values(), s, t, None))
}

/// Shortest-augmenting-path max flow over any [`Scalar`](crate::simplex::Scalar). With `limit`, stops
/// as soon as the flow value reaches it; the returned side is then only a
/// cut when the value is below the limit.
pub(crate) fn max_flow<S: crate::simplex::Scalar>(g: &Graph, cap: &[S], s: usize, t: usize, limit: Option<&S>) -> (S, Vec<bool>) {
    // flow[e] > 0 means flow from the first endpoint to the second
    let mut flow = vec![S::zero(); g.edge_count()];
    let mut value = S::zero();
    let residual = |e: usize, from: usize, flow: &[S]| -> S {
        if from == g.endpoints(e).0 {
            cap[e].sub(&flow[e])
        } else {
            cap[e].add(&flow[e])
        }
    };
    let mut pred: Vec<Option<(usize, usize)>> = vec![None; g.node_count()];
    let mut seen = vec![false; g.node_count()];
    let mut queue = VecDeque::new();
    loop {
        pred.iter_mut().for_each(|p| *p = None);
        seen.iter_mut().for_each(|v| *v = false);
        seen[s] = true;
        queue.clear();
        queue.push_back(s);
        'bfs: while let Some(u) = queue.pop_front() {
            for &(e, w) in g.incident(u) {
                if !seen[w] && residual(e, u, &flow).is_positive() {
                    seen[w] = true;
                    pred[w] = Some((e, u));
                    if w == t {
                        break 'bfs;
                    }
                    queue.push_back(w);
                }
            }
        }
        if !seen[t] {
            return (value, seen);
        }
        let mut bottleneck: Option<S> = None;
        let mut node = t;
        while let Some((e, from)) = pred[node] {
            let r = residual(e, from, &flow);
            bottleneck = Some(match bottleneck {
                Some(b) if b.compare(&r) != std::cmp::Ordering::Greater => b,
                _ => r,
            });
            node = from;
        }
        let delta = bottleneck.expect("augmenting path has at least one edge");
        let mut node = t;
        while let Some((e, from)) = pred[node] {
            flow[e] = if from == g.endpoints(e).0 { flow[e].add(&delta) } else { flow[e].sub(&delta) };
            node = from;
        }
        value = value.add(&delta);
        if let Some(lim) = limit {
            if value.compare(lim) != std::cmp::Ordering::Less {
                return (value, seen);
            }
        }
    }
}

/// Global edge connectivity (unit capacities); 0 for disconnected graphs.
pub fn edge_connectivity(g: &Graph) -> usize {
    if g.node_count() <= 1 || !g.is_connected() {
        return 0;
    }
    let unit = Capacities::uniform(g, Rational::one());
    (1..g.node_count())
        .map(|t| {
            let (v, _) = min_cut(g, &unit, 0, t).expect("valid terminals");
            v.to_integer().try_into().unwrap_or(usize::MAX)
        })
        .min()
        .unwrap_or(0)
}

/// Kruskal with ties broken by smallest edge id.
pub fn minimum_spanning_tree(g: &Graph, weights: &Capacities) -> Result<EdgeSet> {
    let tree = minimum_spanning_forest(g, weights.values(), &EdgeSet::all(g));
    if tree.len() + 1 != g.node_count().max(1) {
        return Err(Error::Disconnected);
    }
    Ok(tree)
}

/// Kruskal restricted to `allowed`; a spanning forest of that subgraph.
pub fn minimum_spanning_forest(g: &Graph, weights: &[Rational], allowed: &EdgeSet) -> EdgeSet {
    let mut order: Vec<usize> = allowed.iter().collect();
    order.sort_by(|&a, &b| weights[a].cmp(&weights[b]).then(a.cmp(&b)));
    let mut uf = UnionFind::new(g.node_count());
    order.into_iter().filter(|&e| {
        let (u, v) = g.endpoints(e);
        uf.union(u, v)
    }).collect()
}

/// Every spanning tree exactly once, in lexicographic order of edge ids.
pub fn enumerate_spanning_trees(g: &Graph, bound: usize) -> Result<Vec<EdgeSet>> {
    if g.edge_count() > bound {
        return Err(Error::ScaleCap { what: "edge count", actual: g.edge_count(), cap: bound });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let need = g.node_count().saturating_sub(1);
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(need);
    extend_forests(g, 0, &mut UnionFind::new(g.node_count()), &mut chosen, &mut |edges| {
        if edges.len() == need {
            out.push(edges.iter().copied().collect());
        }
    }, Some(need));
    Ok(out)
}

/// Every acyclic edge subset (including the empty set) exactly once.
pub fn enumerate_forests(g: &Graph, bound: usize) -> Result<Vec<EdgeSet>> {
    if g.edge_count() > bound {
        return Err(Error::ScaleCap { what: "edge count", actual: g.edge_count(), cap: bound });
    }
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    extend_forests(g, 0, &mut UnionFind::new(g.node_count()), &mut chosen, &mut |edges| {
        out.push(edges.iter().copied().collect());
    }, None);
    Ok(out)
}

/// Calls `visit` on every acyclic edge subset without materialising the list.
pub fn visit_forests(g: &Graph, bound: usize, mut visit: impl FnMut(&[usize])) -> Result<()> {
    if g.edge_count() > bound {
        return Err(Error::ScaleCap { what: "edge count", actual: g.edge_count(), cap: bound });
    }
    let mut chosen = Vec::new();
    extend_forests(g, 0, &mut UnionFind::new(g.node_count()), &mut chosen, &mut visit, None);
    Ok(())
}

fn extend_forests(
    g: &Graph,
    next: usize,
    uf: &mut UnionFind,
    chosen: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
    target: Option<usize>,
) {
    if let Some(t) = target {
        if chosen.len() == t {
            visit(chosen);
            return;
        }
        if chosen.len() + (g.edge_count() - next) < t {
            return;
        }
    }
    if next == g.edge_count() {
        if target.is_none() {
            visit(chosen);
        }
        return;
    }
    let (u, v) = g.endpoints(next);
    if !uf.same(u, v) {
        let mut with = uf.clone();
        with.union(u, v);
        chosen.push(next);
        extend_forests(g, next + 1, &mut with, chosen, visit, target);
        chosen.pop();
    }
    extend_forests(g, next + 1, uf, chosen, visit, target);
}

/// Small named graphs used throughout tests and generators.
pub mod named {
    use super::Graph;

    pub fn complete(q: usize) -> Graph {
        let mut g = Graph::new(q);
        for u in 0..q {
            for v in u + 1..q {
                g.add_edge(u, v).expect("valid");
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            g.add_edge(u, (u + 1) % n).expect("valid");
        }
        g
    }

    pub fn path(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n.saturating_sub(1) {
            g.add_edge(u, u + 1).expect("valid");
        }
        g
    }

    /// Triangular prism K3 x K2.
    pub fn prism() -> Graph {
        let mut g = Graph::new(6);
        for (u, v) in [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)] {
            g.add_edge(u, v).expect("valid");
        }
        g
    }
}
