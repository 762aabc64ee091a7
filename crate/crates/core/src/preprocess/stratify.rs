use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::kernel::{Program, Sym, Term};

/// Edge `head -> body` of the temporal dependency graph. `shift` is the body
/// offset minus the head offset; `None` when the two time points are not
/// related by a fixed offset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ShiftEdge {
    pub from: Sym,
    pub to: Sym,
    pub negative: bool,
    pub shift: Option<i64>,
}

impl fmt::Display for ShiftEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let not = if self.negative { "not " } else { "" };
        match self.shift {
            Some(d) if d > 0 => write!(f, "{}(T) <- {not}{}(T+{d})", self.from, self.to),
            Some(0) => write!(f, "{}(T) <- {not}{}(T)", self.from, self.to),
            Some(d) => write!(f, "{}(T) <- {not}{}(T{d})", self.from, self.to),
            None => write!(f, "{}(T) <- {not}{}(_)", self.from, self.to),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratificationReport {
    pub stratified: bool,
    /// Edges of the finite dependency graph; the strata of every truncation
    /// are computed from them.
    pub edges: Vec<ShiftEdge>,
    /// Predicates grouped in components, dependencies first.
    pub order: Vec<Vec<Sym>>,
    /// A closed walk through a negative edge whose total shift is not
    /// negative.
    pub counterexample: Option<Vec<ShiftEdge>>,
    #[serde(skip)]
    temporal: BTreeSet<Sym>,
}

fn edge_shift(head: Option<&Term>, body: Option<&Term>) -> Option<i64> {
    match (head, body) {
        (Some(Term::TimeVar(v, j)), Some(Term::TimeVar(w, k))) if v == w => Some(k - j),
        (None, None) => Some(0),
        (Some(Term::TimeVar(..)), None) => Some(0),
        _ => None,
    }
}

fn collect_edges(p: &Program) -> Vec<ShiftEdge> {
    let mut edges = BTreeSet::new();
    for r in p.rules.iter().filter(|r| !r.is_fact()) {
        for l in &r.body {
            edges.insert(ShiftEdge {
                from: r.head.pred.clone(),
                to: l.atom.pred.clone(),
                negative: l.negated,
                shift: edge_shift(r.head.time(), l.atom.time()),
            });
        }
    }
    edges.into_iter().collect()
}

/// Longest-shift walks inside one component; `None` on a positive cycle.
fn longest_from(src: usize, nodes: &[Sym], edges: &[&ShiftEdge]) -> Option<(Vec<i64>, Vec<Option<usize>>)> {
    let pos: HashMap<&Sym, usize> = nodes.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut dist = vec![None::<i64>; nodes.len()];
    let mut via = vec![None; nodes.len()];
    dist[src] = Some(0);
    for round in 0..=nodes.len() {
        let mut changed = false;
        for (i, e) in edges.iter().enumerate() {
            let (a, b) = (pos[&e.from], pos[&e.to]);
            let Some(da) = dist[a] else { continue };
            let cand = da + e.shift.unwrap_or(0);
            if dist[b].is_none_or(|db| cand > db) {
                dist[b] = Some(cand);
                via[b] = Some(i);
                changed = true;
            }
        }
        if !changed {
            break;
        }
        if round == nodes.len() {
            return None;
        }
    }
    Some((dist.into_iter().map(|d| d.unwrap_or(i64::MIN)).collect(), via))
}

fn path_to(target: usize, src: usize, nodes: &[Sym], edges: &[&ShiftEdge], via: &[Option<usize>]) -> Vec<ShiftEdge> {
    let pos: HashMap<&Sym, usize> = nodes.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut out = Vec::new();
    let mut cur = target;
    while cur != src && out.len() <= nodes.len() {
        let Some(i) = via[cur] else { break };
        out.push(edges[i].clone());
        cur = pos[&edges[i].from];
    }
    out.reverse();
    out
}

fn component_counterexample(nodes: &[Sym], edges: &[&ShiftEdge]) -> Option<Vec<ShiftEdge>> {
    let negatives = edges.iter().filter(|e| e.negative);
    for neg in negatives {
        if edges.iter().any(|e| e.shift.is_none()) {
            return Some(vec![(*neg).clone()]);
        }
        let src = nodes.iter().position(|s| *s == neg.to).unwrap();
        let back = nodes.iter().position(|s| *s == neg.from).unwrap();
        match longest_from(src, nodes, edges) {
            None => return Some(vec![(*neg).clone()]),
            Some((dist, via)) => {
                if dist[back] != i64::MIN && neg.shift.unwrap() + dist[back] >= 0 {
                    let mut walk = vec![(*neg).clone()];
                    walk.extend(path_to(back, src, nodes, edges, &via));
                    return Some(walk);
                }
            }
        }
    }
    None
}

/// Decides whether the temporal closure of `p` is stratified: it is not
/// exactly when a negative edge lies on a closed walk whose offsets do not
/// decrease overall.
pub fn check_t_stratification(p: &Program) -> StratificationReport {
    let edges = collect_edges(p);
    let mut g: DiGraph<Sym, ()> = DiGraph::new();
    let mut idx: BTreeMap<Sym, NodeIndex> = BTreeMap::new();
    for pred in p.signature.keys().chain(edges.iter().flat_map(|e| [&e.from, &e.to])) {
        idx.entry(pred.clone()).or_insert_with(|| g.add_node(pred.clone()));
    }
    for e in &edges {
        g.add_edge(idx[&e.from], idx[&e.to], ());
    }
    let mut order = Vec::new();
    let mut counterexample = None;
    for comp in tarjan_scc(&g) {
        let mut nodes: Vec<Sym> = comp.iter().map(|&n| g[n].clone()).collect();
        nodes.sort();
        let inner: Vec<&ShiftEdge> = edges
            .iter()
            .filter(|e| nodes.contains(&e.from) && nodes.contains(&e.to))
            .collect();
        if counterexample.is_none() {
            counterexample = component_counterexample(&nodes, &inner);
        }
        order.push(nodes);
    }
    let temporal = p
        .signature
        .iter()
        .filter(|(_, info)| info.temporal)
        .map(|(s, _)| s.clone())
        .collect();
    StratificationReport {
        stratified: counterexample.is_none(),
        edges,
        order,
        counterexample,
        temporal,
    }
}

/// A node of a truncated temporal closure: a predicate and, for temporal
/// predicates, a time point.
pub type ClosureNode = (Sym, Option<u64>);

impl StratificationReport {
    /// Stratum of every node of the closure truncated at `horizon`. `None`
    /// when the program is not stratified.
    pub fn strata(&self, horizon: u64) -> Option<BTreeMap<ClosureNode, usize>> {
        if !self.stratified {
            return None;
        }
        let times = |pred: &Sym| -> Vec<Option<u64>> {
            if self.temporal.contains(pred) {
                (0..=horizon).map(Some).collect()
            } else {
                vec![None]
            }
        };
        let mut g: DiGraph<ClosureNode, bool> = DiGraph::new();
        let mut idx: BTreeMap<ClosureNode, NodeIndex> = BTreeMap::new();
        let mut node = |g: &mut DiGraph<ClosureNode, bool>, n: ClosureNode| {
            *idx.entry(n.clone()).or_insert_with(|| g.add_node(n))
        };
        for e in &self.edges {
            for t in times(&e.from) {
                let targets: Vec<Option<u64>> = match (t, e.shift, self.temporal.contains(&e.to)) {
                    (_, _, false) => vec![None],
                    (Some(t), Some(d), true) => {
                        let u = t as i64 + d;
                        if u < 0 || u as u64 > horizon {
                            vec![]
                        } else {
                            vec![Some(u as u64)]
                        }
                    }
                    _ => times(&e.to),
                };
                let h = node(&mut g, (e.from.clone(), t));
                for u in targets {
                    let b = node(&mut g, (e.to.clone(), u));
                    g.add_edge(h, b, e.negative);
                }
            }
        }
        let mut level: HashMap<NodeIndex, usize> = HashMap::new();
        for comp in tarjan_scc(&g) {
            let members: BTreeSet<NodeIndex> = comp.iter().copied().collect();
            let mut l = 0;
            for &n in &comp {
                for e in g.edges(n) {
                    use petgraph::visit::EdgeRef;
                    if members.contains(&e.target()) {
                        if *e.weight() {
                            return None;
                        }
                    } else {
                        l = l.max(level[&e.target()] + usize::from(*e.weight()));
                    }
                }
            }
            for n in comp {
                level.insert(n, l);
            }
        }
        Some(idx.into_iter().map(|(k, n)| (k, level[&n])).collect())
    }
}
