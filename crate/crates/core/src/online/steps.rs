use std::collections::{BTreeSet, HashSet};

use super::history::History;
use super::tuple::{AnswerTuple, Content};
use crate::kernel::{Atom, Literal, Substitution, Sym, Term};
use crate::preprocess::{GroupKey, PreconditionEntry, QueryId};

pub(crate) struct Ctx<'a> {
    pub id: &'a QueryId,
    pub vars: &'a BTreeSet<Sym>,
    pub history: &'a History,
    pub tick: u64,
}

fn anchor(var: &Sym, offset: i64, tick: u64) -> Option<Substitution> {
    let value = tick as i64 - offset;
    (value >= 0).then(|| Substitution::from_pairs([(var.clone(), Term::Time(value as u64))]))
}

/// Matches the positive literals of `group` (ground-timed, stamped `tick`)
/// against the new facts and moves them to the evidence.
fn fire(ctx: &Ctx, t: &AnswerTuple, group: &[Literal]) -> Vec<AnswerTuple> {
    let pos: Vec<&Atom> = group.iter().filter(|l| !l.negated).map(|l| &l.atom).collect();
    let mut out = Vec::new();
    for s in ctx.history.match_all(&pos, &Substitution::new()) {
        let Some(mut next) = t.apply(&s, ctx.vars) else {
            continue;
        };
        let Ok(matched) = s.apply_all(group.iter().filter(|l| !l.negated)) else {
            continue;
        };
        next.hypotheses.retain(|h| !matched.contains(h));
        next.evidence.extend(matched);
        next.normalize();
        out.push(next);
    }
    out
}

/// Step 1: instances of the precondition entries whose minimal group
/// matches the facts stamped `tick`.
pub(crate) fn seed(ctx: &Ctx, entries: &[PreconditionEntry]) -> Vec<AnswerTuple> {
    let mut out = Vec::new();
    for e in entries {
        let base = AnswerTuple {
            query: ctx.id.clone(),
            theta: e.theta.clone(),
            evidence: Vec::new(),
            hypotheses: e.premises().cloned().collect(),
            born_at: ctx.tick,
            floors: e.floors.clone(),
        };
        for (key, group) in &e.m_groups {
            let s = match (key, group.first().and_then(|l| l.atom.time())) {
                (GroupKey::Var(v), Some(Term::TimeVar(_, k))) => anchor(v, *k, ctx.tick),
                (GroupKey::Ground, Some(Term::Time(n))) if *n == ctx.tick => Some(Substitution::new()),
                _ => None,
            };
            let Some(s) = s else { continue };
            let (Some(anchored), Ok(group)) = (base.apply(&s, ctx.vars), s.apply_all(group)) else {
                continue;
            };
            out.extend(fire(ctx, &anchored, &group));
        }
    }
    out
}

/// Step 2: matches the positive hypotheses stamped at or before `tick`
/// against the history. An empty result means a premise failed at a closed
/// timestamp.
pub(crate) fn settle(ctx: &Ctx, t: &AnswerTuple) -> Vec<AnswerTuple> {
    let due: Vec<Literal> = t
        .hypotheses
        .iter()
        .filter(|l| !l.negated && l.atom.timestamp().is_some_and(|n| n <= ctx.tick))
        .cloned()
        .collect();
    if due.is_empty() {
        return vec![t.clone()];
    }
    let atoms: Vec<&Atom> = due.iter().map(|l| &l.atom).collect();
    let mut out = Vec::new();
    for s in ctx.history.match_all(&atoms, &Substitution::new()) {
        let Some(mut next) = t.apply(&s, ctx.vars) else {
            continue;
        };
        let Ok(matched) = s.apply_all(&due) else { continue };
        next.hypotheses.retain(|h| !matched.contains(h));
        next.evidence.extend(matched);
        next.normalize();
        out.push(next);
    }
    out
}

/// Step 2 for unconnected answers: instantiates every free time variable
/// whose minimal literals match the new facts, keeping the originals.
pub(crate) fn multivar_fixpoint(ctx: &Ctx, tuples: Vec<AnswerTuple>) -> Vec<AnswerTuple> {
    let mut seen: HashSet<Content> = tuples.iter().map(|t| t.content()).collect();
    let mut work = tuples.clone();
    let mut out = tuples;
    while let Some(t) = work.pop() {
        for v in t.free_time_vars() {
            let on_v: Vec<(&Literal, i64)> = t
                .hypotheses
                .iter()
                .filter_map(|l| match l.atom.time() {
                    Some(Term::TimeVar(w, k)) if *w == v => Some((l, *k)),
                    _ => None,
                })
                .collect();
            let k = on_v.iter().map(|(_, k)| *k).min().unwrap();
            let Some(s) = anchor(&v, k, ctx.tick) else { continue };
            let group: Vec<Literal> = on_v.iter().filter(|(_, j)| *j == k).map(|(l, _)| (*l).clone()).collect();
            let (Some(anchored), Ok(group)) = (t.apply(&s, ctx.vars), s.apply_all(&group)) else {
                continue;
            };
            for next in fire(ctx, &anchored, &group) {
                for settled in settle(ctx, &next) {
                    if seen.insert(settled.content()) {
                        work.push(settled.clone());
                        out.push(settled);
                    }
                }
            }
        }
    }
    out
}
