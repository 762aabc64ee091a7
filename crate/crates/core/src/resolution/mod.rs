//! SLD resolution with future premises.

mod floors;
mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::kernel::{mgu, Atom, Literal, Matcher, Rule, Substitution, Sym, Term};

pub use floors::TimeFloors;
pub use search::{refute_with_future_premises, Guard, SearchConfig};

/// A goal `¬(β1 ∧ … ∧ βn)`; the empty goal is the contradiction.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Goal {
    pub literals: Vec<Literal>,
}

impl Goal {
    pub fn new(literals: Vec<Literal>) -> Goal {
        Goal { literals }
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return write!(f, "□");
        }
        let parts: Vec<String> = self.literals.iter().map(|l| l.to_string()).collect();
        write!(f, "¬({})", parts.join(" ∧ "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationStep {
    pub selected: usize,
    pub clause: Rule,
    pub mgu: Substitution,
    pub goal: Goal,
}

/// Resolves literal `k` of `g` with clause `c`, whose variables must be
/// disjoint from those of `g`.
pub fn resolve_step(g: &Goal, c: &Rule, k: usize) -> Option<DerivationStep> {
    let selected = g.literals.get(k)?;
    if selected.negated {
        return None;
    }
    let s = mgu(&selected.atom, &c.head).ok()?;
    let body = g.literals[..k]
        .iter()
        .chain(&c.body)
        .chain(&g.literals[k + 1..]);
    let literals = s.apply_all(body).ok()?;
    Some(DerivationStep {
        selected: k,
        clause: c.clone(),
        mgu: s,
        goal: Goal { literals },
    })
}

/// Renames every variable of `r` apart with the suffix `~n`.
pub fn rename_rule(r: &Rule, n: usize) -> Rule {
    let s: Substitution = r
        .vars()
        .into_iter()
        .map(|v| {
            let fresh: Sym = format!("{v}~{n}").into();
            let t = if is_time_var(r, &v) {
                Term::TimeVar(fresh, 0)
            } else {
                Term::Var(fresh)
            };
            (v, t)
        })
        .collect();
    Rule {
        head: s.apply(&r.head).expect("renaming cannot fail"),
        body: s.apply_all(&r.body).expect("renaming cannot fail"),
    }
}

fn is_time_var(r: &Rule, v: &Sym) -> bool {
    std::iter::once(&r.head)
        .chain(r.body.iter().map(|l| &l.atom))
        .any(|a| a.time_var().is_some_and(|(w, _)| w == v))
}

/// Search budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_depth: usize,
    pub max_nodes: usize,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits {
            max_depth: 64,
            max_nodes: 1_000_000,
        }
    }
}

/// A computed answer with premises: the answer substitution restricted to
/// the query variables and the residual future literals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComputedAnswer {
    pub theta: Substitution,
    pub premises: Vec<Literal>,
    pub floors: TimeFloors,
}

impl fmt::Display for ComputedAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.premises.iter().map(|l| l.to_string()).collect();
        write!(f, "<{}, [{}]>", self.theta, parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ResolutionError {
    #[error("search limit exceeded: {diagnosis}")]
    LimitExceeded {
        partial: Vec<ComputedAnswer>,
        diagnosis: String,
    },
}

/// Renames the variables outside `keep` to `V0, V1, …` in order of first
/// occurrence in `theta`'s right-hand sides and then in `lits`.
pub fn canonical_renaming<'a>(
    keep: &BTreeSet<Sym>,
    theta: &Substitution,
    lits: impl IntoIterator<Item = &'a Literal>,
) -> Substitution {
    let mut order: Vec<(Sym, bool)> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut visit = |t: &Term| {
        if let Some(v) = t.variable() {
            if !keep.contains(v) && seen.insert(v.clone()) {
                order.push((v.clone(), matches!(t, Term::TimeVar(..))));
            }
        }
    };
    for (_, t) in theta.iter() {
        visit(t);
    }
    for l in lits {
        for t in &l.atom.args {
            visit(t);
        }
    }
    let mut used: BTreeSet<Sym> = keep.clone();
    let mut n = 0;
    let mut out = BTreeMap::new();
    for (v, time) in order {
        let name: Sym = loop {
            let cand: Sym = format!("V{n}").into();
            n += 1;
            if !used.contains(&cand) {
                break cand;
            }
        };
        used.insert(name.clone());
        let t = if time {
            Term::TimeVar(name, 0)
        } else {
            Term::Var(name)
        };
        out.insert(v, t);
    }
    Substitution::from_pairs(out)
}

/// All substitutions σ grounding `m` such that every atom of `m·σ` is one of
/// `facts`. An empty conjunction yields the identity.
pub fn match_conjunct_against_facts(m: &[Atom], facts: &[Atom]) -> Vec<Substitution> {
    let mut out = Vec::new();
    let mut stack = vec![(0usize, Matcher::new())];
    while let Some((i, matcher)) = stack.pop() {
        if i == m.len() {
            out.push(matcher.into_substitution());
            continue;
        }
        for f in facts.iter().rev() {
            if f.pred != m[i].pred {
                continue;
            }
            let mut next = matcher.clone();
            if next.match_atom(&m[i], f) {
                stack.push((i + 1, next));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}
