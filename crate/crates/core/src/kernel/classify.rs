use std::collections::{BTreeMap, BTreeSet, HashMap};

use petgraph::algo::is_cyclic_directed;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::{Dfs, Walker};
use serde::Serialize;

use super::syntax::{Atom, Program, Query, Rule, Sym};
use super::KernelError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub safe: bool,
    /// `true` for extensional predicates.
    pub edb: BTreeMap<Sym, bool>,
    pub connected: bool,
    pub nonrecursive: bool,
    pub negation: bool,
}

/// Predicate dependency graph: an edge `head -> body` per body literal,
/// weighted with `true` when the literal is negated.
pub fn dependency_graph(p: &Program) -> (DiGraph<Sym, bool>, HashMap<Sym, NodeIndex>) {
    let mut g = DiGraph::new();
    let mut idx = HashMap::new();
    for pred in p.signature.keys() {
        idx.insert(pred.clone(), g.add_node(pred.clone()));
    }
    let mut node = |g: &mut DiGraph<Sym, bool>, s: &Sym| {
        *idx.entry(s.clone()).or_insert_with(|| g.add_node(s.clone()))
    };
    for r in &p.rules {
        let h = node(&mut g, &r.head.pred);
        for l in &r.body {
            let b = node(&mut g, &l.atom.pred);
            match g.find_edge(h, b) {
                Some(e) => g[e] |= l.negated,
                None => {
                    g.add_edge(h, b, l.negated);
                }
            }
        }
    }
    (g, idx)
}

pub(crate) fn check_safety(r: &Rule) -> Result<(), KernelError> {
    let unsafe_var = |var: &Sym, reason| KernelError::UnsafeRule {
        rule: r.to_string(),
        var: var.to_string(),
        reason,
    };
    if r.is_fact() {
        if let Some(v) = r.head.vars().next() {
            return Err(unsafe_var(v, "occurs in a fact"));
        }
        return Ok(());
    }
    let mut positive = BTreeSet::new();
    for l in r.body.iter().filter(|l| !l.negated) {
        l.atom.collect_vars(&mut positive);
    }
    for v in r.head.vars() {
        if !positive.contains(v) {
            return Err(unsafe_var(v, "occurs in the head but not in a positive body literal"));
        }
    }
    for l in r.body.iter().filter(|l| l.negated) {
        for v in l.atom.vars() {
            if !positive.contains(v) {
                return Err(unsafe_var(v, "occurs in a negated literal only"));
            }
        }
    }
    Ok(())
}

fn check_signature(p: &Program, a: &Atom) -> Result<(), KernelError> {
    let Some(info) = p.info(&a.pred) else {
        return Err(KernelError::InconsistentSignature {
            pred: a.pred.to_string(),
            detail: "not declared".into(),
        });
    };
    if info.arity != a.args.len() {
        return Err(KernelError::InconsistentSignature {
            pred: a.pred.to_string(),
            detail: format!("used with arity {} and {}", info.arity, a.args.len()),
        });
    }
    if info.temporal != a.is_temporal() {
        return Err(KernelError::InconsistentSignature {
            pred: a.pred.to_string(),
            detail: format!("atom {a} disagrees with the temporal signature"),
        });
    }
    for (i, t) in a.args.iter().enumerate() {
        let last = i + 1 == a.args.len();
        if t.is_time() && !(last && info.temporal) {
            return Err(KernelError::InconsistentSignature {
                pred: a.pred.to_string(),
                detail: format!("time term {t} outside the last position in {a}"),
            });
        }
    }
    Ok(())
}

fn is_connected_rule(r: &Rule) -> bool {
    let vars = r.time_vars();
    if vars.len() > 1 {
        return false;
    }
    match vars.iter().next() {
        None => true,
        Some(v) => r.head.time_var().is_some_and(|(h, _)| h == v),
    }
}

/// Checks safety and sorts, and classifies the rules relevant to `q` (all
/// rules when no query is given).
pub fn validate_program(p: &Program, q: Option<&Query>) -> Result<Classification, KernelError> {
    for r in &p.rules {
        check_signature(p, &r.head)?;
        for l in &r.body {
            check_signature(p, &l.atom)?;
        }
        check_safety(r)?;
    }
    let (g, idx) = dependency_graph(p);
    let relevant: BTreeSet<Sym> = match q {
        Some(q) => {
            check_signature(p, &q.goal)?;
            match idx.get(&q.goal.pred) {
                Some(&start) => Dfs::new(&g, start).iter(&g).map(|n| g[n].clone()).collect(),
                None => BTreeSet::new(),
            }
        }
        None => p.signature.keys().cloned().collect(),
    };
    let sub = g.filter_map(
        |_, s| relevant.contains(s).then(|| s.clone()),
        |_, w| Some(*w),
    );
    let rules = p.rules.iter().filter(|r| relevant.contains(&r.head.pred));
    let connected = rules.clone().all(is_connected_rule);
    let negation = rules.clone().any(|r| r.body.iter().any(|l| l.negated));
    Ok(Classification {
        safe: true,
        edb: p.signature.iter().map(|(k, v)| (k.clone(), v.edb)).collect(),
        connected,
        nonrecursive: !is_cyclic_directed(&sub),
        negation,
    })
}
