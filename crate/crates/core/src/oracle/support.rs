use std::collections::{BTreeMap, BTreeSet};

use super::{GroundRule, OracleError};
use crate::kernel::{Atom, Literal, Program};

type Support = BTreeSet<Literal>;

/// Minimal leaf sets under which each ground IDB atom is derivable. Leaves
/// are positive and negative EDB literals and negative IDB literals.
#[derive(Clone, Debug, Default)]
pub struct Supports {
    table: BTreeMap<Atom, Vec<Support>>,
    static_facts: BTreeSet<Atom>,
}

fn minimize(mut sets: Vec<Support>) -> Vec<Support> {
    sets.sort_by_key(|s| s.len());
    sets.dedup();
    let mut out: Vec<Support> = Vec::new();
    for s in sets {
        if !out.iter().any(|o| o.is_subset(&s)) {
            out.push(s);
        }
    }
    out.sort();
    out
}

fn consistent(s: &Support) -> bool {
    s.iter().all(|l| !s.contains(&Literal { atom: l.atom.clone(), negated: !l.negated }))
}

impl Supports {
    pub fn compute(p: &Program, rules: &[GroundRule], budget: usize) -> Result<Supports, OracleError> {
        let mut sup = Supports {
            table: BTreeMap::new(),
            static_facts: p.static_facts().cloned().collect(),
        };
        let mut work = 0usize;
        loop {
            let mut next: BTreeMap<Atom, Vec<Support>> = BTreeMap::new();
            for r in rules.iter().filter(|r| p.is_idb(&r.head.pred)) {
                let mut acc: Vec<Support> = vec![Support::new()];
                for l in &r.body {
                    let options = sup.leaf_options(p, l);
                    let mut grown = Vec::new();
                    for a in &acc {
                        for o in &options {
                            work += 1;
                            if work > budget {
                                return Err(OracleError::BudgetExceeded(budget));
                            }
                            let u: Support = a.union(o).cloned().collect();
                            if consistent(&u) {
                                grown.push(u);
                            }
                        }
                    }
                    acc = minimize(grown);
                    if acc.is_empty() {
                        break;
                    }
                }
                next.entry(r.head.clone()).or_default().extend(acc);
            }
            let next: BTreeMap<Atom, Vec<Support>> = next.into_iter().map(|(a, s)| (a, minimize(s))).collect();
            if next == sup.table {
                return Ok(sup);
            }
            sup.table = next;
        }
    }

    fn leaf_options(&self, p: &Program, l: &Literal) -> Vec<Support> {
        if l.negated {
            return vec![[l.clone()].into_iter().collect()];
        }
        if p.is_edb(&l.atom.pred) {
            if self.static_facts.contains(&l.atom) {
                vec![Support::new()]
            } else if l.atom.is_temporal() {
                vec![[l.clone()].into_iter().collect()]
            } else {
                Vec::new()
            }
        } else {
            self.table.get(&l.atom).cloned().unwrap_or_default()
        }
    }

    pub fn of(&self, a: &Atom) -> &[BTreeSet<Literal>] {
        self.table.get(a).map_or(&[], |v| v.as_slice())
    }

    pub(crate) fn is_static(&self, a: &Atom) -> bool {
        self.static_facts.contains(a)
    }
}

/// Status of a ground IDB atom given the facts up to a tick.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    True,
    Impossible,
    Open,
}

/// A support split into its past and future leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Split {
    pub past: Support,
    pub future: Support,
}

pub(crate) struct Evaluator<'a> {
    pub program: &'a Program,
    pub supports: &'a Supports,
    pub history: &'a BTreeSet<Atom>,
    pub tau: i64,
    memo: BTreeMap<Atom, Status>,
}

fn is_past(a: &Atom, tau: i64) -> bool {
    a.timestamp().is_none_or(|n| (n as i64) <= tau)
}

impl<'a> Evaluator<'a> {
    pub fn new(program: &'a Program, supports: &'a Supports, history: &'a BTreeSet<Atom>, tau: i64) -> Self {
        Evaluator {
            program,
            supports,
            history,
            tau,
            memo: BTreeMap::new(),
        }
    }

    /// `None` when some leaf is already contradicted.
    pub fn split(&mut self, s: &Support) -> Option<Split> {
        let mut out = Split {
            past: Support::new(),
            future: Support::new(),
        };
        for l in s {
            if !is_past(&l.atom, self.tau) {
                out.future.insert(l.clone());
                continue;
            }
            if self.program.is_edb(&l.atom.pred) {
                let present = self.history.contains(&l.atom) || self.supports.is_static(&l.atom);
                if present == l.negated {
                    return None;
                }
                out.past.insert(l.clone());
                continue;
            }
            match self.status(&l.atom) {
                Status::True => return None,
                Status::Impossible => {
                    out.past.insert(l.clone());
                }
                Status::Open => {
                    out.future.insert(l.clone());
                }
            }
        }
        Some(out)
    }

    pub fn status(&mut self, a: &Atom) -> Status {
        if let Some(s) = self.memo.get(a) {
            return *s;
        }
        let mut status = Status::Impossible;
        for s in self.supports.of(a) {
            if let Some(split) = self.split(s) {
                if split.future.is_empty() {
                    status = Status::True;
                    break;
                }
                status = Status::Open;
            }
        }
        self.memo.insert(a.clone(), status);
        status
    }
}
