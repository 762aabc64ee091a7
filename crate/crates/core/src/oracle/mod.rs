//! Reference semantics by brute force over small ground instances.

mod enumerate;
mod support;

use std::collections::{BTreeMap, BTreeSet};

use crate::kernel::{Atom, Literal, Program, Substitution, Sym, Term};

pub use enumerate::{enumerate_hans, enumerate_hans_exhaustive, enumerate_sans, HypotheticalAnswer};
pub use support::{Status, Supports};

/// A finite restriction of the Herbrand universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundWorld {
    pub constants: Vec<Sym>,
    pub horizon: u64,
    pub facts: BTreeSet<Atom>,
}

impl GroundWorld {
    pub fn new(constants: impl IntoIterator<Item = Sym>, horizon: u64) -> GroundWorld {
        GroundWorld {
            constants: constants.into_iter().collect::<BTreeSet<_>>().into_iter().collect(),
            horizon,
            facts: BTreeSet::new(),
        }
    }

    /// The facts stamped at or before `tau`.
    pub fn history(&self, tau: i64) -> BTreeSet<Atom> {
        self.facts
            .iter()
            .filter(|f| f.timestamp().is_some_and(|n| (n as i64) <= tau))
            .cloned()
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("the truncated program is not stratified: {0}")]
    NotStratified(String),
    #[error("oracle budget of {0} exceeded")]
    BudgetExceeded(usize),
}

/// Work limit for the exponential enumerations.
pub const DEFAULT_BUDGET: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundRule {
    pub head: Atom,
    pub body: Vec<Literal>,
}

/// Largest time point instantiated for a program at `horizon`: far enough
/// that every derivation of an atom stamped within the horizon fits.
pub fn time_bound(p: &Program, horizon: u64) -> u64 {
    let mut max_offset = 0u64;
    let mut max_ground = 0u64;
    for r in &p.rules {
        for a in std::iter::once(&r.head).chain(r.body.iter().map(|l| &l.atom)) {
            match a.time() {
                Some(Term::TimeVar(_, k)) => max_offset = max_offset.max(k.unsigned_abs()),
                Some(Term::Time(n)) => max_ground = max_ground.max(*n),
                _ => {}
            }
        }
    }
    horizon.max(max_ground) + 2 * max_offset * (p.rules.len() as u64 + 1)
}

fn rule_vars(r: &crate::kernel::Rule) -> (BTreeSet<Sym>, BTreeSet<Sym>) {
    let mut objects = BTreeSet::new();
    let mut times = BTreeSet::new();
    for a in std::iter::once(&r.head).chain(r.body.iter().map(|l| &l.atom)) {
        for t in &a.args {
            match t {
                Term::Var(v) => {
                    objects.insert(v.clone());
                }
                Term::TimeVar(v, _) => {
                    times.insert(v.clone());
                }
                _ => {}
            }
        }
    }
    (objects, times)
}

fn within(a: &Atom, max_time: u64) -> bool {
    a.timestamp().is_none_or(|n| n <= max_time)
}

/// All instances of the rules of `p` over `constants` and `[0, max_time]`.
pub fn ground_program(p: &Program, constants: &[Sym], max_time: u64) -> Vec<GroundRule> {
    let mut out = Vec::new();
    for r in &p.rules {
        let (objects, times) = rule_vars(r);
        let mut subs: Vec<BTreeMap<Sym, Term>> = vec![BTreeMap::new()];
        for v in &objects {
            subs = subs
                .into_iter()
                .flat_map(|s| {
                    constants.iter().map(move |c| {
                        let mut s = s.clone();
                        s.insert(v.clone(), Term::Const(c.clone()));
                        s
                    })
                })
                .collect();
        }
        for v in &times {
            subs = subs
                .into_iter()
                .flat_map(|s| {
                    (0..=max_time).map(move |n| {
                        let mut s = s.clone();
                        s.insert(v.clone(), Term::Time(n));
                        s
                    })
                })
                .collect();
        }
        for s in subs {
            let s = Substitution::from_pairs(s);
            let (Ok(head), Ok(body)) = (s.apply(&r.head), s.apply_all(&r.body)) else {
                continue;
            };
            if within(&head, max_time) && body.iter().all(|l| within(&l.atom, max_time)) {
                out.push(GroundRule { head, body });
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// The least model of `p ∪ facts` restricted to `world`, computed stratum by
/// stratum over the ground instantiation.
pub fn ground_consequences(
    p: &Program,
    facts: &BTreeSet<Atom>,
    world: &GroundWorld,
) -> Result<BTreeSet<Atom>, OracleError> {
    let max_time = time_bound(p, world.horizon);
    let rules = ground_program(p, &world.constants, max_time);
    let strata = ground_strata(&rules)?;
    let mut model: BTreeSet<Atom> = facts.clone();
    let levels: BTreeSet<usize> = strata.values().copied().collect();
    for level in levels {
        loop {
            let mut changed = false;
            for r in rules.iter().filter(|r| strata.get(&r.head).copied().unwrap_or(0) == level) {
                if model.contains(&r.head) {
                    continue;
                }
                let holds = r.body.iter().all(|l| model.contains(&l.atom) != l.negated);
                if holds {
                    model.insert(r.head.clone());
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
    Ok(model)
}

/// Standard stratification of a ground program: levels such that positive
/// dependencies do not increase and negative ones strictly decrease.
pub fn ground_strata(rules: &[GroundRule]) -> Result<BTreeMap<Atom, usize>, OracleError> {
    let mut level: BTreeMap<Atom, usize> = BTreeMap::new();
    for r in rules {
        level.entry(r.head.clone()).or_insert(0);
        for l in &r.body {
            level.entry(l.atom.clone()).or_insert(0);
        }
    }
    let n = level.len();
    loop {
        let mut changed = false;
        for r in rules {
            let need = r
                .body
                .iter()
                .map(|l| level[&l.atom] + usize::from(l.negated))
                .max()
                .unwrap_or(0);
            if need > level[&r.head] {
                if need > n {
                    return Err(OracleError::NotStratified(format!("{} depends negatively on itself", r.head)));
                }
                level.insert(r.head.clone(), need);
                changed = true;
            }
        }
        if !changed {
            return Ok(level);
        }
    }
}

#[cfg(test)]
mod tests;
