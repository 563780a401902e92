//! Dynamic program over a vertex ordering. Vertices enter a frontier, their
//! edges are decided, and they leave once every neighbour and pair partner
//! has entered. A state labels each frontier vertex with its block in the
//! final forest and its block under the edges chosen so far; the second
//! partition refines the first. A pair is charged when its first endpoint
//! leaves, at which point the partner is still on the frontier.

use std::collections::BTreeMap;
use std::rc::Rc;

use num_traits::Zero;

use crate::graph::EdgeSet;
use crate::instances::PcsfInstance;
use crate::rational::{Penalty, Rational};

/// Orderings whose frontier exceeds this are left to branch and bound.
pub const WIDTH_CAP: usize = 9;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Step {
    Enter(usize),
    Edge(usize),
    /// Leaving vertex and the pairs charged on the way out.
    Leave(usize, Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct Plan {
    steps: Vec<Step>,
    pub width: usize,
}

/// Greedy ordering: from every start vertex, repeatedly enter the vertex
/// that leaves the smallest frontier. The narrowest run is kept.
pub fn plan(inst: &PcsfInstance) -> Plan {
    let g = &inst.graph;
    let n = g.node_count();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in 0..g.edge_count() {
        let (u, v) = g.endpoints(e);
        if u != v {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    for &(s, t) in &inst.pairs {
        if s != t {
            adj[s].push(t);
            adj[t].push(s);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let relevant: Vec<usize> = (0..n).filter(|&v| !adj[v].is_empty()).collect();
    let mut best: Option<(usize, Vec<usize>)> = None;
    for &start in &relevant {
        let (order, width) = greedy_order(&adj, &relevant, start);
        if best.as_ref().map_or(true, |(w, _)| width < *w) {
            best = Some((width, order));
        }
    }
    let order = best.map(|(_, o)| o).unwrap_or_default();
    build_plan(inst, &adj, &order)
}

fn greedy_order(adj: &[Vec<usize>], relevant: &[usize], start: usize) -> (Vec<usize>, usize) {
    let n = adj.len();
    let mut entered = vec![false; n];
    // neighbours not yet entered, per vertex
    let mut missing: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut frontier = 0usize;
    let mut width = 0;
    let mut order = Vec::with_capacity(relevant.len());
    let mut next = Some(start);
    while let Some(v) = next {
        entered[v] = true;
        order.push(v);
        frontier += 1;
        width = width.max(frontier);
        for &w in &adj[v] {
            missing[w] -= 1;
            if entered[w] && missing[w] == 0 {
                frontier -= 1;
            }
        }
        if missing[v] == 0 {
            frontier -= 1;
        }
        // score: frontier growth, then fewest untouched neighbours
        next = relevant
            .iter()
            .copied()
            .filter(|&u| !entered[u])
            .min_by_key(|&u| {
                let closes = adj[u].iter().filter(|&&w| entered[w] && missing[w] == 1).count();
                let stays = usize::from(adj[u].iter().any(|&w| !entered[w]));
                (stays as isize - closes as isize, adj[u].iter().filter(|&&w| !entered[w]).count(), u)
            });
    }
    (order, width)
}

fn build_plan(inst: &PcsfInstance, adj: &[Vec<usize>], order: &[usize]) -> Plan {
    let g = &inst.graph;
    let n = g.node_count();
    let mut entered = vec![false; n];
    let mut left = vec![false; n];
    let mut missing: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut pairs_at: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &(s, t)) in inst.pairs.iter().enumerate() {
        if s != t {
            pairs_at[s].push(i);
            pairs_at[t].push(i);
        }
    }
    let mut charged = vec![false; inst.pair_count()];
    let mut steps = Vec::new();
    let mut frontier = 0usize;
    let mut width = 0;
    for &v in order {
        steps.push(Step::Enter(v));
        entered[v] = true;
        frontier += 1;
        width = width.max(frontier);
        for &(e, w) in g.incident(v) {
            if w != v && entered[w] && !left[w] {
                steps.push(Step::Edge(e));
            }
        }
        let mut closing = Vec::new();
        for &w in &adj[v] {
            missing[w] -= 1;
            if entered[w] && missing[w] == 0 {
                closing.push(w);
            }
        }
        if missing[v] == 0 {
            closing.push(v);
        }
        closing.sort_unstable();
        closing.dedup();
        for w in closing {
            let pairs: Vec<usize> = pairs_at[w].iter().copied().filter(|&i| !charged[i]).collect();
            for &i in &pairs {
                charged[i] = true;
            }
            steps.push(Step::Leave(w, pairs));
            left[w] = true;
            frontier -= 1;
        }
    }
    Plan { steps, width }
}

struct Link {
    edge: usize,
    prev: Option<Rc<Link>>,
}

struct Entry {
    cost: Rational,
    taken: Option<Rc<Link>>,
}

/// State key: final labels, then partial labels, both in frontier order.
type Key = Vec<u8>;

fn canonical(labels: &mut [u8]) {
    let mut map: Vec<Option<u8>> = vec![None; labels.len() + 1];
    let mut next = 0u8;
    for l in labels.iter_mut() {
        let slot = &mut map[*l as usize];
        *l = *slot.get_or_insert_with(|| {
            next += 1;
            next - 1
        });
    }
}

fn offer(states: &mut BTreeMap<Key, Entry>, key: Key, cost: Rational, taken: Option<Rc<Link>>) {
    match states.get(&key) {
        Some(old) if old.cost <= cost => {}
        _ => {
            states.insert(key, Entry { cost, taken });
        }
    }
}

/// Optimal forest, or `None` when an infinite-penalty pair cannot be joined.
pub fn solve(inst: &PcsfInstance, plan: &Plan) -> Option<EdgeSet> {
    let g = &inst.graph;
    let mut pos: Vec<Option<usize>> = vec![None; g.node_count()];
    let mut frontier: Vec<usize> = Vec::new();
    let mut states: BTreeMap<Key, Entry> = BTreeMap::new();
    states.insert(Vec::new(), Entry { cost: Rational::zero(), taken: None });
    for step in &plan.steps {
        let f = frontier.len();
        let mut next: BTreeMap<Key, Entry> = BTreeMap::new();
        match step {
            Step::Enter(v) => {
                for (key, entry) in states {
                    let blocks = key[..f].iter().map(|&l| l + 1).max().unwrap_or(0);
                    let parts = key[f..].iter().map(|&l| l + 1).max().unwrap_or(0);
                    for c in 0..=blocks {
                        let mut k = Vec::with_capacity(2 * f + 2);
                        k.extend_from_slice(&key[..f]);
                        k.push(c);
                        k.extend_from_slice(&key[f..]);
                        k.push(parts);
                        offer(&mut next, k, entry.cost.clone(), entry.taken.clone());
                    }
                }
                pos[*v] = Some(f);
                frontier.push(*v);
            }
            Step::Edge(e) => {
                let (u, v) = g.endpoints(*e);
                let (pu, pv) = (pos[u].expect("entered"), pos[v].expect("entered"));
                for (key, entry) in states {
                    if key[pu] == key[pv] && key[f + pu] != key[f + pv] {
                        let (from, to) = (key[f + pv], key[f + pu]);
                        let mut k = key.clone();
                        for l in &mut k[f..] {
                            if *l == from {
                                *l = to;
                            }
                        }
                        canonical(&mut k[f..]);
                        let link = Rc::new(Link { edge: *e, prev: entry.taken.clone() });
                        offer(&mut next, k, &entry.cost + &inst.costs[*e], Some(link));
                    }
                    offer(&mut next, key, entry.cost, entry.taken);
                }
            }
            Step::Leave(v, pairs) => {
                let p = pos[*v].expect("entered");
                'states: for (key, entry) in states {
                    let mut cost = entry.cost;
                    for &i in pairs {
                        let (s, t) = inst.pairs[i];
                        let other = if s == *v { t } else { s };
                        let q = pos[other].expect("partner is on the frontier");
                        if key[p] != key[q] {
                            match &inst.penalties[i] {
                                Penalty::Infinite => continue 'states,
                                Penalty::Finite(pi) => cost += pi,
                            }
                        }
                    }
                    let alone = (0..f).all(|q| q == p || key[f + q] != key[f + p]);
                    if alone && (0..f).any(|q| q != p && key[q] == key[p]) {
                        continue;
                    }
                    let mut k: Key = Vec::with_capacity(2 * f - 2);
                    k.extend((0..f).filter(|&q| q != p).map(|q| key[q]));
                    k.extend((0..f).filter(|&q| q != p).map(|q| key[f + q]));
                    canonical(&mut k[..f - 1]);
                    canonical(&mut k[f - 1..]);
                    offer(&mut next, k, cost, entry.taken);
                }
                frontier.remove(p);
                pos[*v] = None;
                for (i, &w) in frontier.iter().enumerate() {
                    pos[w] = Some(i);
                }
            }
        }
        states = next;
    }
    let entry = states.remove(&Vec::new())?;
    let mut forest = EdgeSet::new();
    let mut link = entry.taken;
    while let Some(l) = link {
        forest.insert(l.edge);
        link = l.prev.clone();
    }
    Some(forest)
}
