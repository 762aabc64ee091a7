use std::collections::BTreeSet;

use super::steps::Ctx;
use super::tuple::AnswerTuple;
use crate::kernel::{Atom, Literal, Substitution, Sym, Term};

/// Status of a ground atom at the current tick.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    /// Not decided by the history seen so far.
    Open,
}

fn decidable(l: &Literal, tick: u64) -> bool {
    l.negated
        && match l.atom.time() {
            None => true,
            Some(Term::Time(n)) => *n <= tick,
            Some(_) => false,
        }
}

/// All ground instances of the object variables of `a` over `universe`.
pub(crate) fn groundings(a: &Atom, universe: &[Sym]) -> Vec<Substitution> {
    let vars: BTreeSet<Sym> = a
        .args
        .iter()
        .filter_map(|t| match t {
            Term::Var(v) => Some(v.clone()),
            _ => None,
        })
        .collect();
    let mut out = vec![Substitution::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|s| {
                universe
                    .iter()
                    .filter_map(|c| {
                        s.compose(&Substitution::from_pairs([(v.clone(), Term::Const(c.clone()))]))
                            .ok()
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

/// Step 3: decides the negated hypotheses stamped at or before the tick.
/// Literals that hold defeat the instance; failing ones become evidence;
/// open ones stay pending.
pub(crate) fn resolve_negations(
    ctx: &Ctx,
    t: AnswerTuple,
    universe: &[Sym],
    judge: &mut dyn FnMut(&Atom) -> Verdict,
) -> Vec<AnswerTuple> {
    let mut out = Vec::new();
    let mut work = vec![(t, BTreeSet::<Literal>::new())];
    while let Some((t, pending)) = work.pop() {
        let next = t
            .hypotheses
            .iter()
            .find(|l| decidable(l, ctx.tick) && !pending.contains(*l))
            .cloned();
        let Some(h) = next else {
            out.push(t);
            continue;
        };
        for s in groundings(&h.atom, universe) {
            let (Some(mut inst), Ok(hs)) = (t.apply(&s, ctx.vars), s.apply_literal(&h)) else {
                continue;
            };
            match judge(&hs.atom) {
                Verdict::Holds => {}
                Verdict::Fails => {
                    inst.hypotheses.retain(|x| *x != hs);
                    inst.evidence.push(hs);
                    inst.normalize();
                    work.push((inst, pending.clone()));
                }
                Verdict::Open => {
                    let mut p = pending.clone();
                    p.insert(hs);
                    work.push((inst, p));
                }
            }
        }
    }
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::sym;
    use crate::online::history::History;
    use crate::preprocess::QueryId;

    #[test]
    fn split_over_universe() {
        let h = History::new();
        let vars: BTreeSet<Sym> = [sym("X")].into_iter().collect();
        let ctx = Ctx {
            id: &QueryId::Root,
            vars: &vars,
            history: &h,
            tick: 1,
        };
        let cool = |x: Term| Atom::new("Cool", vec![x, Term::Time(1)]);
        let t = AnswerTuple {
            query: QueryId::Root,
            theta: Substitution::new(),
            evidence: vec![],
            hypotheses: vec![Literal::neg(cool(Term::var("X")))],
            born_at: 1,
            floors: Default::default(),
        };
        let universe = [sym("wt25"), sym("wt42")];
        let mut judge = |a: &Atom| {
            if a.args[0] == Term::constant("wt25") {
                Verdict::Holds
            } else {
                Verdict::Fails
            }
        };
        let out = resolve_negations(&ctx, t, &universe, &mut judge);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].theta.to_string(), "{X:=wt42}");
        assert_eq!(out[0].evidence, vec![Literal::neg(cool(Term::constant("wt42")))]);
        assert!(out[0].hypotheses.is_empty());
    }
}
