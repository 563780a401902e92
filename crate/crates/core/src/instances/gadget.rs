use num_traits::One;

use super::{FracSolution, PcsfInstance};
use crate::cutlp::CutConstraint;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rational::{int, Penalty, Rational};

/// Gadget edges carrying `x = 2/k`, as 1-based gadget node labels.
pub const WAVY_EDGES: [(usize, usize); 5] = [(1, 2), (3, 4), (5, 6), (7, 8), (9, 10)];
/// Gadget edges carrying `x = 1/k`.
pub const STRAIGHT_EDGES: [(usize, usize); 8] = [(2, 3), (1, 4), (2, 5), (3, 5), (6, 7), (6, 10), (7, 10), (8, 9)];

/// Node ids of the gadget instance. Gadget `g` (0-based) node `u_j` is
/// `nodes[g][j - 1]`; its pair with the root is `node - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetLayout {
    pub k: usize,
    pub r: usize,
    pub s: usize,
    pub nodes: Vec<[usize; 10]>,
    /// One line per wiring rule, for reports.
    pub wiring: Vec<String>,
}

impl GadgetLayout {
    pub fn new(k: usize) -> Self {
        GadgetLayout {
            k,
            r: 0,
            s: 1,
            nodes: (0..k).map(|g| std::array::from_fn(|j| 2 + 10 * g + j)).collect(),
            wiring: vec![
                "u1 of every gadget is joined to s".into(),
                "u8 of every gadget is joined to r".into(),
                "u9 of gadget i is joined to u4 of gadget i+1 (mod k)".into(),
                "penalty 1 on every pair (v, r)".into(),
            ],
        }
    }

    pub fn node(&self, gadget: usize, j: usize) -> usize {
        self.nodes[gadget][j - 1]
    }

    /// Pair index of `(v, r)`.
    pub fn pair_of(&self, v: usize) -> usize {
        v - 1
    }
}

/// The PCST instance on `r`, `s` and `k` ten-node gadgets, with its canonical point.
pub fn pcst_gadget_instance(k: usize) -> Result<(PcsfInstance, FracSolution, GadgetLayout)> {
    if k < 4 {
        return Err(Error::invalid(format!("gadget instance needs k >= 4, got {k}")));
    }
    let layout = GadgetLayout::new(k);
    let mut g = Graph::new(2 + 10 * k);
    let mut x = Vec::new();
    let kk = int(k as i64);
    let small = Rational::one() / &kk;
    let big = int(2) / &kk;
    for gi in 0..k {
        for &(a, b) in &WAVY_EDGES {
            g.add_edge(layout.node(gi, a), layout.node(gi, b))?;
            x.push(big.clone());
        }
        for &(a, b) in &STRAIGHT_EDGES {
            g.add_edge(layout.node(gi, a), layout.node(gi, b))?;
            x.push(small.clone());
        }
        g.add_edge(layout.node(gi, 1), layout.s)?;
        g.add_edge(layout.node(gi, 8), layout.r)?;
        g.add_edge(layout.node(gi, 9), layout.node((gi + 1) % k, 4))?;
        x.extend([small.clone(), small.clone(), small.clone()]);
    }
    let mut names = vec!["r".to_string(), "s".to_string()];
    for gi in 0..k {
        names.extend((1..=10).map(|j| format!("g{}u{j}", gi + 1)));
    }
    let pairs: Vec<(usize, usize)> = (1..g.node_count()).map(|v| (v, layout.r)).collect();
    let penalties = vec![Penalty::Finite(Rational::one()); pairs.len()];
    let z_u = Rational::one() - int(4) / &kk;
    let mut z = vec![z_u; pairs.len()];
    z[layout.pair_of(layout.s)] = Rational::from_integer(0.into());
    let costs = vec![Rational::one(); g.edge_count()];
    let inst = PcsfInstance::with_names(g, names, costs, pairs, penalties)?;
    Ok((inst, FracSolution { x, z }, layout))
}

fn family_members(k: usize) -> Vec<(String, Vec<usize>, usize, usize)> {
    // (label, gadget node labels in the cut, pair node label, gadget)
    let mut out = Vec::new();
    for g in 0..k {
        let tag = |fam: &str, rest: String| format!("{fam} gadget {} {rest}", g + 1);
        for i in 1..=10 {
            out.push((tag("node", format!("{{u{i}}}")), vec![i], i, g));
        }
        for i in 1..=10 {
            out.push((tag("whole", format!("gadget cut, z of u{i}")), (1..=10).collect(), i, g));
        }
        for i in [1, 3, 5, 7, 9] {
            out.push((tag("wavy", format!("{{u{i},u{}}}", i + 1)), vec![i, i + 1], i, g));
        }
        out.push((tag("quad", "{u1..u4}".into()), vec![1, 2, 3, 4], 1, g));
        out.push((tag("quad", "{u7..u10}".into()), vec![7, 8, 9, 10], 7, g));
    }
    out
}

/// The tight constraints that pin down the gadget point, in family order:
/// per gadget the node cuts, gadget cuts, wavy-pair cuts and the two
/// four-node cuts, then the cut around `r` for `s` and `z_s >= 0`.
pub fn gadget_tight_family(inst: &PcsfInstance, k: usize) -> Result<Vec<CutConstraint>> {
    if inst.graph.node_count() != 2 + 10 * k || inst.pair_count() != 1 + 10 * k {
        return Err(Error::invalid(format!("instance is not the gadget instance for k = {k}")));
    }
    let layout = GadgetLayout::new(k);
    let mut family = Vec::new();
    for (_, members, pair_node, g) in family_members(k) {
        let side: Vec<usize> = members.iter().map(|&j| layout.node(g, j)).collect();
        family.push(CutConstraint::cut(inst, layout.pair_of(layout.node(g, pair_node)), side)?);
    }
    let pair_s = layout.pair_of(layout.s);
    family.push(CutConstraint::cut(inst, pair_s, vec![layout.r])?);
    family.push(CutConstraint::NonnegZ(pair_s));
    Ok(family)
}

/// Human-readable labels matching [`gadget_tight_family`] entry by entry.
pub fn gadget_family_labels(k: usize) -> Vec<String> {
    let mut labels: Vec<String> = family_members(k).into_iter().map(|(label, ..)| label).collect();
    labels.push("root cut {r}, z of s".into());
    labels.push("z_s = 0".into());
    labels
}
