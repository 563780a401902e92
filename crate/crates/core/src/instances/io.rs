//! Text and JSON formats for instances and fractional points.
//!
//! ```text
//! pcsf 1
//! node a            # optional; fixes node order and allows isolated nodes
//! edge a b 2/3
//! pair a b inf
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FracSolution, PcsfInstance};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rational::{fmt_rational, parse_rational, serde_rational, Penalty, Rational};

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Lines with comments stripped, paired with 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = line.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

struct NameTable {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl NameTable {
    fn get_or_insert(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), self.names.len() - 1);
        self.names.len() - 1
    }
}

fn nonneg(value: Rational, what: &str, line: usize) -> Result<Rational> {
    if value < Rational::from_integer(0.into()) {
        return Err(Error::invalid(format!("line {line}: negative {what}")));
    }
    Ok(value)
}

pub fn parse_instance(text: &str) -> Result<PcsfInstance> {
    let mut table = NameTable { names: Vec::new(), index: HashMap::new() };
    let mut edges = Vec::new();
    let mut costs = Vec::new();
    let mut pairs = Vec::new();
    let mut penalties = Vec::new();
    let mut header = false;
    for (line, tokens) in content_lines(text) {
        let bad = |msg: &str| Error::Parse(format!("line {line}: {msg}"));
        match tokens[0] {
            "pcsf" => {
                if tokens.get(1) != Some(&"1") || tokens.len() != 2 {
                    return Err(bad("unsupported header, expected `pcsf 1`"));
                }
                header = true;
            }
            "node" if tokens.len() == 2 => {
                table.get_or_insert(tokens[1]);
            }
            "edge" if tokens.len() == 4 => {
                let u = table.get_or_insert(tokens[1]);
                let v = table.get_or_insert(tokens[2]);
                edges.push((u, v));
                costs.push(nonneg(parse_rational(tokens[3]).map_err(|e| bad(&e.to_string()))?, "cost", line)?);
            }
            "pair" if tokens.len() == 4 => {
                let s = table.get_or_insert(tokens[1]);
                let t = table.get_or_insert(tokens[2]);
                let p: Penalty = tokens[3].parse().map_err(|e: Error| bad(&e.to_string()))?;
                if let Penalty::Finite(v) = &p {
                    nonneg(v.clone(), "penalty", line)?;
                }
                pairs.push((s, t));
                penalties.push(p);
            }
            _ => return Err(bad(&format!("malformed line {:?}", tokens.join(" ")))),
        }
    }
    if !header {
        return Err(Error::Parse("missing `pcsf 1` header".into()));
    }
    let graph = Graph::from_edges(table.names.len(), &edges)?;
    PcsfInstance::with_names(graph, table.names, costs, pairs, penalties)
}

fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '#') {
        return Err(Error::invalid(format!("node name {name:?} cannot be written")));
    }
    Ok(())
}

pub fn format_instance(inst: &PcsfInstance) -> Result<String> {
    let mut out = String::from("pcsf 1\n");
    for name in &inst.node_names {
        check_name(name)?;
        writeln!(out, "node {name}").unwrap();
    }
    let name = |v: usize| &inst.node_names[v];
    for (e, &(u, v)) in inst.graph.edges().iter().enumerate() {
        writeln!(out, "edge {} {} {}", name(u), name(v), fmt_rational(&inst.costs[e])).unwrap();
    }
    for (i, &(s, t)) in inst.pairs.iter().enumerate() {
        writeln!(out, "pair {} {} {}", name(s), name(t), inst.penalties[i]).unwrap();
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct JsonEdge {
    u: String,
    v: String,
    #[serde(with = "serde_rational")]
    cost: Rational,
}

#[derive(Serialize, Deserialize)]
struct JsonPair {
    s: String,
    t: String,
    penalty: Penalty,
}

#[derive(Serialize, Deserialize)]
struct JsonInstance {
    version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nodes: Option<Vec<String>>,
    edges: Vec<JsonEdge>,
    pairs: Vec<JsonPair>,
}

pub fn parse_instance_json(text: &str) -> Result<PcsfInstance> {
    let raw: JsonInstance = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if raw.version != 1 {
        return Err(Error::Parse(format!("unsupported version {}", raw.version)));
    }
    let mut table = NameTable { names: Vec::new(), index: HashMap::new() };
    for name in raw.nodes.iter().flatten() {
        table.get_or_insert(name);
    }
    let mut edges = Vec::new();
    let mut costs = Vec::new();
    for e in &raw.edges {
        edges.push((table.get_or_insert(&e.u), table.get_or_insert(&e.v)));
        costs.push(e.cost.clone());
    }
    let mut pairs = Vec::new();
    let mut penalties = Vec::new();
    for p in raw.pairs {
        pairs.push((table.get_or_insert(&p.s), table.get_or_insert(&p.t)));
        penalties.push(p.penalty);
    }
    let graph = Graph::from_edges(table.names.len(), &edges)?;
    PcsfInstance::with_names(graph, table.names, costs, pairs, penalties)
}

pub fn format_instance_json(inst: &PcsfInstance) -> Result<String> {
    let name = |v: usize| inst.node_names[v].clone();
    let raw = JsonInstance {
        version: 1,
        nodes: Some(inst.node_names.clone()),
        edges: inst
            .graph
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(u, v))| JsonEdge { u: name(u), v: name(v), cost: inst.costs[e].clone() })
            .collect(),
        pairs: inst
            .pairs
            .iter()
            .enumerate()
            .map(|(i, &(s, t))| JsonPair { s: name(s), t: name(t), penalty: inst.penalties[i].clone() })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&raw).expect("serializable") + "\n")
}

/// Reads the text format, or JSON when the extension is `.json`.
pub fn read_instance(path: &Path) -> Result<PcsfInstance> {
    let text = read_text(path)?;
    if is_json(path) {
        parse_instance_json(&text)
    } else {
        parse_instance(&text)
    }
}

pub fn write_instance(inst: &PcsfInstance, path: &Path) -> Result<()> {
    let text = if is_json(path) { format_instance_json(inst)? } else { format_instance(inst)? };
    write_text(path, &text)
}

/// `x <edge-id> <value>` and `z <pair-id> <value>` lines; missing entries are 0.
pub fn parse_solution(text: &str, inst: &PcsfInstance) -> Result<FracSolution> {
    let mut point = FracSolution::zeros(inst);
    for (line, tokens) in content_lines(text) {
        let bad = |msg: String| Error::Parse(format!("line {line}: {msg}"));
        if tokens.len() != 3 {
            return Err(bad(format!("malformed line {:?}", tokens.join(" "))));
        }
        let id: usize = tokens[1].parse().map_err(|_| bad(format!("bad index {:?}", tokens[1])))?;
        let value = parse_rational(tokens[2]).map_err(|e| bad(e.to_string()))?;
        let slot = match tokens[0] {
            "x" => point.x.get_mut(id),
            "z" => point.z.get_mut(id),
            other => return Err(bad(format!("unknown entry {other:?}"))),
        };
        *slot.ok_or_else(|| bad(format!("index {id} out of range")))? = value;
    }
    point.check(inst)?;
    Ok(point)
}

pub fn format_solution(point: &FracSolution) -> String {
    let mut out = String::new();
    for (e, v) in point.x.iter().enumerate() {
        writeln!(out, "x {e} {}", fmt_rational(v)).unwrap();
    }
    for (i, v) in point.z.iter().enumerate() {
        writeln!(out, "z {i} {}", fmt_rational(v)).unwrap();
    }
    out
}

pub fn read_solution(path: &Path, inst: &PcsfInstance) -> Result<FracSolution> {
    parse_solution(&read_text(path)?, inst)
}

pub fn write_solution(point: &FracSolution, path: &Path) -> Result<()> {
    write_text(path, &format_solution(point))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{build_layered, canonical_point, layered_instance, make_base, BaseKind, CostScheme, PointMode};
    use crate::rational::rat;

    const SAMPLE: &str = "# triangle\npcsf 1\nedge a b 2/3\nedge b c 0.5\nedge a c 1\npair a c inf\npair b c 2\n";

    #[test]
    fn parses_sample() {
        let inst = parse_instance(SAMPLE).unwrap();
        assert_eq!(inst.node_names, vec!["a", "b", "c"]);
        assert_eq!(inst.costs[0], rat(2, 3));
        assert_eq!(inst.costs[1], rat(1, 2));
        assert_eq!(inst.penalties[0], Penalty::Infinite);
    }

    #[test]
    fn text_and_json_round_trip() {
        let base = make_base(&BaseKind::K4).unwrap();
        let lc = build_layered(&base, 2, 0, 1000).unwrap();
        let inst = layered_instance(&lc, &CostScheme::Unit).unwrap();
        assert_eq!(parse_instance(&format_instance(&inst).unwrap()).unwrap(), inst);
        assert_eq!(parse_instance_json(&format_instance_json(&inst).unwrap()).unwrap(), inst);
        let point = canonical_point(&lc, PointMode::Gap).unwrap();
        assert_eq!(parse_solution(&format_solution(&point), &inst).unwrap(), point);
    }

    #[test]
    fn isolated_nodes_survive() {
        let text = "pcsf 1\nnode lonely\nnode a\nnode b\nedge a b 1\npair a lonely 5\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.graph.node_count(), 3);
        assert_eq!(parse_instance(&format_instance(&inst).unwrap()).unwrap(), inst);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_instance("edge a b 1\n").is_err());
        assert!(parse_instance("pcsf 1\nedge a b -1\n").is_err());
        assert!(parse_instance("pcsf 1\nedge a b 1\npair a b -2\n").is_err());
        assert!(parse_instance("pcsf 1\nedge a b 1\npair a b 1\npair b a 2\n").is_err());
        assert!(parse_instance("pcsf 1\nedge a b\n").is_err());
        assert!(parse_instance("pcsf 1\nedge a a 1\n").is_err());
        let inst = parse_instance(SAMPLE).unwrap();
        assert!(parse_solution("x 7 1\n", &inst).is_err());
        assert!(parse_solution("z 0 1/2\n", &inst).is_err());
    }
}
