use std::collections::{BTreeMap, BTreeSet};

use super::support::{Evaluator, Split, Supports};
use super::{ground_consequences, ground_program, time_bound, GroundWorld, OracleError, DEFAULT_BUDGET};
use crate::kernel::{Atom, Literal, Query, Substitution, Sym, Term};
use crate::online::GroundAnswer;

/// A ground hypothetical answer `⟨θ, H⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HypotheticalAnswer {
    pub theta: Substitution,
    pub hypotheses: BTreeSet<Literal>,
}

impl std::fmt::Display for HypotheticalAnswer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let hs: Vec<String> = self.hypotheses.iter().map(|l| l.to_string()).collect();
        write!(f, "<{}, H={{{}}}>", self.theta, hs.join(", "))
    }
}

/// Ground substitutions for the query variables: objects over the world's
/// constants, times within the horizon.
fn thetas(q: &Query, world: &GroundWorld) -> Vec<Substitution> {
    let mut out: Vec<BTreeMap<Sym, Term>> = vec![BTreeMap::new()];
    for t in &q.goal.args {
        let (v, vals): (&Sym, Vec<Term>) = match t {
            Term::Var(v) => (v, world.constants.iter().map(|c| Term::Const(c.clone())).collect()),
            Term::TimeVar(v, _) => (v, (0..=world.horizon).map(Term::Time).collect()),
            _ => continue,
        };
        if out.first().is_some_and(|s| s.contains_key(v)) {
            continue;
        }
        out = out
            .into_iter()
            .flat_map(|s| {
                vals.iter().map(move |x| {
                    let mut s = s.clone();
                    s.insert(v.clone(), x.clone());
                    s
                })
            })
            .collect();
    }
    out.into_iter().map(Substitution::from_pairs).collect()
}

fn within_horizon(s: &BTreeSet<Literal>, horizon: u64) -> bool {
    s.iter().all(|l| l.atom.timestamp().is_none_or(|n| n <= horizon))
}

fn minimal(sets: impl IntoIterator<Item = BTreeSet<Literal>>) -> Vec<BTreeSet<Literal>> {
    let all: BTreeSet<BTreeSet<Literal>> = sets.into_iter().collect();
    all.iter()
        .filter(|s| !all.iter().any(|o| o.len() < s.len() && o.is_subset(s)))
        .cloned()
        .collect()
}

/// Valid supports of every goal instance, split at `tau`.
fn splits(q: &Query, world: &GroundWorld, tau: i64) -> Result<Vec<(Substitution, Vec<Split>)>, OracleError> {
    let p = &q.program;
    let rules = ground_program(p, &world.constants, time_bound(p, world.horizon));
    let supports = Supports::compute(p, &rules, DEFAULT_BUDGET)?;
    let history = world.history(tau);
    let mut eval = Evaluator::new(p, &supports, &history, tau);
    let mut out = Vec::new();
    for theta in thetas(q, world) {
        let Ok(goal) = theta.apply(&q.goal) else { continue };
        let mut valid = Vec::new();
        for s in supports.of(&goal) {
            if let Some(split) = eval.split(s) {
                if within_horizon(&split.future, world.horizon) {
                    valid.push(split);
                }
            }
        }
        out.push((theta, valid));
    }
    Ok(out)
}

/// All ground hypothetical answers at `tau` whose hypotheses lie within the
/// world's horizon.
pub fn enumerate_hans(q: &Query, world: &GroundWorld, tau: i64) -> Result<BTreeSet<HypotheticalAnswer>, OracleError> {
    let mut out = BTreeSet::new();
    for (theta, valid) in splits(q, world, tau)? {
        for h in minimal(valid.into_iter().map(|s| s.future)) {
            out.insert(HypotheticalAnswer {
                theta: theta.clone(),
                hypotheses: h,
            });
        }
    }
    Ok(out)
}

/// All ground supported answers at `tau`.
pub fn enumerate_sans(q: &Query, world: &GroundWorld, tau: i64) -> Result<BTreeSet<GroundAnswer>, OracleError> {
    let mut out = BTreeSet::new();
    for (theta, valid) in splits(q, world, tau)? {
        for h in minimal(valid.iter().map(|s| s.future.clone())) {
            let pasts: Vec<BTreeSet<Literal>> = valid.iter().filter(|s| s.future == h).map(|s| s.past.clone()).collect();
            if pasts.iter().any(|e| e.is_empty()) {
                continue;
            }
            for e in minimal(pasts) {
                out.insert(GroundAnswer {
                    theta: theta.clone(),
                    hypotheses: h.clone(),
                    evidence: e,
                });
            }
        }
    }
    Ok(out)
}

/// Hypothetical answers of a negation-free query by checking entailment for
/// every set of future EDB facts, smallest first.
pub fn enumerate_hans_exhaustive(
    q: &Query,
    world: &GroundWorld,
    tau: i64,
    budget: usize,
) -> Result<BTreeSet<HypotheticalAnswer>, OracleError> {
    let p = &q.program;
    let lo = u64::try_from(tau + 1).unwrap_or(0);
    let mut candidates: Vec<Atom> = Vec::new();
    for (pred, info) in &p.signature {
        if !p.is_edb(pred) || !info.temporal {
            continue;
        }
        let mut args: Vec<Vec<Term>> = vec![Vec::new()];
        for _ in 0..info.arity - 1 {
            args = args
                .into_iter()
                .flat_map(|a| {
                    world.constants.iter().map(move |c| {
                        let mut a = a.clone();
                        a.push(Term::Const(c.clone()));
                        a
                    })
                })
                .collect();
        }
        for a in args {
            for n in lo..=world.horizon {
                let mut a = a.clone();
                a.push(Term::Time(n));
                candidates.push(Atom { pred: pred.clone(), args: a });
            }
        }
    }
    if candidates.len() >= usize::BITS as usize || (1usize << candidates.len()) > budget {
        return Err(OracleError::BudgetExceeded(budget));
    }
    let goals: Vec<(Substitution, Atom)> = thetas(q, world)
        .into_iter()
        .filter_map(|t| t.apply(&q.goal).ok().map(|g| (t, g)))
        .collect();
    let history = world.history(tau);
    let mut masks: Vec<u64> = (0..1u64 << candidates.len()).collect();
    masks.sort_by_key(|m| m.count_ones());
    let mut found: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    let mut out = BTreeSet::new();
    for m in masks {
        let mut facts = history.clone();
        facts.extend((0..candidates.len()).filter(|i| m & (1 << i) != 0).map(|i| candidates[i].clone()));
        let model = ground_consequences(p, &facts, world)?;
        for (i, (theta, goal)) in goals.iter().enumerate() {
            let prior = found.entry(i).or_default();
            if prior.iter().any(|f| f & m == *f) || !model.contains(goal) {
                continue;
            }
            prior.push(m);
            let hypotheses = (0..candidates.len())
                .filter(|j| m & (1 << j) != 0)
                .map(|j| Literal::pos(candidates[j].clone()))
                .collect();
            out.insert(HypotheticalAnswer {
                theta: theta.clone(),
                hypotheses,
            });
        }
    }
    Ok(out)
}
