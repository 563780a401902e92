use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::graph::{edge_connectivity, min_cut, named, Capacities, Graph};
use crate::rational::one;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseKind {
    K4,
    Complete(usize),
    Prism,
    FromFile(PathBuf),
}

impl std::str::FromStr for BaseKind {
    type Err = Error;

    /// `k4`, `prism`, `k<q>` / `complete:<q>`, or `file:<path>`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        if lower == "k4" {
            return Ok(BaseKind::K4);
        }
        if lower == "prism" {
            return Ok(BaseKind::Prism);
        }
        if let Some(path) = t.strip_prefix("file:") {
            return Ok(BaseKind::FromFile(PathBuf::from(path)));
        }
        let digits = lower.strip_prefix("complete:").or_else(|| lower.strip_prefix('k'));
        if let Some(q) = digits.and_then(|d| d.parse::<usize>().ok()) {
            return Ok(BaseKind::Complete(q));
        }
        Err(Error::Parse(format!("unknown base graph {s:?}")))
    }
}

/// A base graph that has been checked to be `l`-regular and `l`-edge-connected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseGraph {
    pub graph: Graph,
    pub l: usize,
}

impl BaseGraph {
    pub fn validate(graph: Graph) -> Result<Self> {
        if graph.node_count() < 2 {
            return Err(Error::invalid("base graph needs at least two nodes"));
        }
        let l = graph.degree(0);
        if let Some(v) = (0..graph.node_count()).find(|&v| graph.degree(v) != l) {
            return Err(Error::invalid(format!(
                "base graph is not regular: node {v} has degree {}, node 0 has degree {l}",
                graph.degree(v)
            )));
        }
        let connectivity = edge_connectivity(&graph);
        if connectivity < l {
            let cap = Capacities::uniform(&graph, one());
            for t in 1..graph.node_count() {
                let (value, side) = min_cut(&graph, &cap, 0, t)?;
                if value < crate::rational::int(l as i64) {
                    let nodes: Vec<usize> = (0..graph.node_count()).filter(|&v| side[v]).collect();
                    return Err(Error::invalid(format!(
                        "base graph is only {connectivity}-edge-connected; cut around {nodes:?} has {value} edges"
                    )));
                }
            }
            return Err(Error::invalid(format!("base graph is only {connectivity}-edge-connected")));
        }
        Ok(BaseGraph { graph, l })
    }

    pub fn n(&self) -> usize {
        self.graph.node_count()
    }
}

pub fn make_base(kind: &BaseKind) -> Result<BaseGraph> {
    let graph = match kind {
        BaseKind::K4 => named::complete(4),
        BaseKind::Complete(q) => {
            if *q < 4 {
                return Err(Error::invalid(format!("complete base graph needs q >= 4, got {q}")));
            }
            named::complete(*q)
        }
        BaseKind::Prism => named::prism(),
        BaseKind::FromFile(path) => read_edge_list(path)?,
    };
    BaseGraph::validate(graph)
}

/// Edge list: one `u v` per line (optionally prefixed by `edge`), `#` comments.
fn read_edge_list(path: &std::path::Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    let mut names: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let index = |name: &str, names: &mut Vec<String>| match names.iter().position(|n| n == name) {
        Some(i) => i,
        None => {
            names.push(name.to_string());
            names.len() - 1
        }
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.first() == Some(&"edge") {
            tokens.remove(0);
        }
        if tokens.len() < 2 {
            return Err(Error::Parse(format!("line {}: expected two node names", lineno + 1)));
        }
        let u = index(tokens[0], &mut names);
        let v = index(tokens[1], &mut names);
        edges.push((u, v));
    }
    Graph::from_edges(names.len(), &edges)
}
