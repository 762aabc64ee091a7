//! Sort inference: decides which predicates are temporal and which
//! variables range over time points.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::grammar::{RawAtom, RawProgram, RawTermKind};
use super::{ParseError, SourceSpan};
use crate::kernel::{sym, Atom, Literal, PredInfo, Program, Rule, Term};

pub(crate) struct Resolved {
    pub program: Program,
    pub queries: Vec<Atom>,
}

#[derive(Default)]
struct State {
    arity: HashMap<String, usize>,
    temporal: HashMap<String, bool>,
    /// `true` for time variables, keyed by (scope, name).
    var_time: HashMap<(usize, String), bool>,
    changed: bool,
}

fn sort_error(atom: &RawAtom, span: SourceSpan, detail: String) -> ParseError {
    ParseError::Sort {
        span,
        pred: atom.pred.clone(),
        detail,
    }
}

impl State {
    fn set_temporal(&mut self, atom: &RawAtom, span: SourceSpan, value: bool) -> Result<(), ParseError> {
        match self.temporal.get(&atom.pred) {
            Some(&v) if v != value => Err(sort_error(
                atom,
                span,
                if value {
                    "rigid predicate used with a time argument".into()
                } else {
                    "temporal predicate used with an object in last position".into()
                },
            )),
            Some(_) => Ok(()),
            None => {
                self.temporal.insert(atom.pred.clone(), value);
                self.changed = true;
                Ok(())
            }
        }
    }

    fn set_var(
        &mut self,
        atom: &RawAtom,
        span: SourceSpan,
        key: (usize, String),
        time: bool,
    ) -> Result<(), ParseError> {
        match self.var_time.get(&key) {
            Some(&v) if v != time => Err(sort_error(
                atom,
                span,
                format!("variable {} used both as an object and as a time", key.1),
            )),
            Some(_) => Ok(()),
            None => {
                self.var_time.insert(key, time);
                self.changed = true;
                Ok(())
            }
        }
    }

    fn visit(&mut self, scope: usize, atom: &RawAtom) -> Result<(), ParseError> {
        let n = atom.args.len();
        for (i, arg) in atom.args.iter().enumerate() {
            let last = i + 1 == n;
            match &arg.kind {
                RawTermKind::Int(_) if !last => {
                    return Err(sort_error(atom, arg.span, "time point outside the last position".into()))
                }
                RawTermKind::Int(_) => self.set_temporal(atom, arg.span, true)?,
                RawTermKind::Const(_) if last => self.set_temporal(atom, arg.span, false)?,
                RawTermKind::Const(_) => {}
                RawTermKind::Var(_, Some(_)) if !last => {
                    return Err(sort_error(atom, arg.span, "time expression outside the last position".into()))
                }
                RawTermKind::Var(v, Some(_)) => {
                    self.set_var(atom, arg.span, (scope, v.clone()), true)?;
                    self.set_temporal(atom, arg.span, true)?;
                }
                RawTermKind::Var(v, None) if !last => {
                    self.set_var(atom, arg.span, (scope, v.clone()), false)?
                }
                RawTermKind::Var(v, None) => {
                    let key = (scope, v.clone());
                    match (self.temporal.get(&atom.pred).copied(), self.var_time.get(&key).copied()) {
                        (Some(t), _) => self.set_var(atom, arg.span, key, t)?,
                        (None, Some(t)) => self.set_temporal(atom, arg.span, t)?,
                        (None, None) => {}
                    }
                }
            }
        }
        Ok(())
    }
}

fn occurrences(raw: &RawProgram) -> Vec<(usize, &RawAtom)> {
    let mut out = Vec::new();
    for (i, r) in raw.rules.iter().enumerate() {
        out.push((i, &r.head));
        for l in &r.body {
            out.push((i, &l.atom));
        }
    }
    for (j, q) in raw.queries.iter().enumerate() {
        out.push((raw.rules.len() + j, q));
    }
    out
}

pub(crate) fn resolve(raw: &RawProgram) -> Result<Resolved, ParseError> {
    let occ = occurrences(raw);
    let mut st = State::default();
    for &(_, a) in &occ {
        match st.arity.get(&a.pred) {
            Some(&n) if n != a.args.len() => {
                return Err(sort_error(
                    a,
                    a.span,
                    format!("used with arity {} and {}", n, a.args.len()),
                ))
            }
            Some(_) => {}
            None => {
                st.arity.insert(a.pred.clone(), a.args.len());
                if a.args.is_empty() {
                    st.temporal.insert(a.pred.clone(), false);
                }
            }
        }
    }
    let mut rigid = BTreeSet::new();
    for (pred, arity, span) in &raw.rigid {
        if st.arity.get(pred).is_some_and(|n| n != arity) {
            return Err(ParseError::Sort {
                span: *span,
                pred: pred.clone(),
                detail: format!("declared with arity {arity}, used with {}", st.arity[pred]),
            });
        }
        st.arity.entry(pred.clone()).or_insert(*arity);
        st.temporal.insert(pred.clone(), false);
        rigid.insert(sym(pred));
    }
    loop {
        st.changed = false;
        for &(scope, a) in &occ {
            st.visit(scope, a)?;
        }
        if st.changed {
            continue;
        }
        // Predicates whose sort is still open default to temporal.
        let open: Vec<String> = st
            .arity
            .keys()
            .filter(|p| !st.temporal.contains_key(*p))
            .cloned()
            .collect();
        if open.is_empty() {
            break;
        }
        for p in open {
            st.temporal.insert(p, true);
        }
    }

    let term = |scope: usize, kind: &RawTermKind| -> Term {
        match kind {
            RawTermKind::Int(n) => Term::Time(*n),
            RawTermKind::Const(c) => Term::Const(sym(c)),
            RawTermKind::Var(v, Some(k)) => Term::TimeVar(sym(v), *k),
            RawTermKind::Var(v, None) => {
                if st.var_time.get(&(scope, v.clone())).copied().unwrap_or(false) {
                    Term::TimeVar(sym(v), 0)
                } else {
                    Term::Var(sym(v))
                }
            }
        }
    };
    let atom = |scope: usize, a: &RawAtom| Atom {
        pred: sym(&a.pred),
        args: a.args.iter().map(|t| term(scope, &t.kind)).collect(),
    };
    let rules = raw
        .rules
        .iter()
        .enumerate()
        .map(|(i, r)| Rule {
            head: atom(i, &r.head),
            body: r
                .body
                .iter()
                .map(|l| Literal {
                    negated: l.negated,
                    atom: atom(i, &l.atom),
                })
                .collect(),
        })
        .collect();
    let queries = raw
        .queries
        .iter()
        .enumerate()
        .map(|(j, q)| atom(raw.rules.len() + j, q))
        .collect();
    let signature: BTreeMap<_, _> = st
        .arity
        .iter()
        .map(|(p, &arity)| {
            (
                sym(p),
                PredInfo {
                    arity,
                    temporal: st.temporal[p],
                    edb: true,
                },
            )
        })
        .collect();
    let mut program = Program {
        rules,
        signature,
        rigid,
    };
    program.refresh_edb();
    Ok(Resolved { program, queries })
}
