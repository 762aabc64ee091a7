use std::collections::BTreeSet;
use std::fmt;

use crate::kernel::{Literal, Substitution, Sym, Term};
use crate::preprocess::QueryId;
use crate::resolution::TimeFloors;

/// A schematic supported answer `⟨θ, E, H⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnswerTuple {
    pub query: QueryId,
    pub theta: Substitution,
    /// Ground literals already established by the stream.
    pub evidence: Vec<Literal>,
    /// Literals still to be decided.
    pub hypotheses: Vec<Literal>,
    pub born_at: u64,
    pub floors: TimeFloors,
}

/// The part of a tuple that identifies it up to its creation tick.
pub(crate) type Content = (Substitution, Vec<Literal>, Vec<Literal>, TimeFloors);

impl AnswerTuple {
    pub fn is_definite(&self) -> bool {
        self.hypotheses.is_empty()
    }

    pub(crate) fn content(&self) -> Content {
        (
            self.theta.clone(),
            self.evidence.clone(),
            self.hypotheses.clone(),
            self.floors.clone(),
        )
    }

    pub(crate) fn normalize(&mut self) {
        self.evidence.sort();
        self.evidence.dedup();
        self.hypotheses.sort();
        self.hypotheses.dedup();
        self.hypotheses.retain(|h| !self.evidence.contains(h));
        let mut live = BTreeSet::new();
        for (_, t) in self.theta.iter() {
            if let Some(v) = t.variable() {
                live.insert(v.clone());
            }
        }
        for l in &self.hypotheses {
            l.atom.collect_vars(&mut live);
        }
        self.floors.retain(|v| live.contains(v));
    }

    /// Applies `s` to every part; `None` when a time bound is violated.
    pub(crate) fn apply(&self, s: &Substitution, query_vars: &BTreeSet<Sym>) -> Option<AnswerTuple> {
        let floors = self.floors.apply(s)?;
        let theta = self.theta.compose(s).ok()?.restrict(query_vars);
        let mut t = AnswerTuple {
            query: self.query.clone(),
            theta,
            evidence: s.apply_all(&self.evidence).ok()?,
            hypotheses: s.apply_all(&self.hypotheses).ok()?,
            born_at: self.born_at,
            floors,
        };
        t.normalize();
        Some(t)
    }

    /// Time variables occurring in the hypotheses.
    pub fn free_time_vars(&self) -> BTreeSet<Sym> {
        self.hypotheses
            .iter()
            .filter_map(|l| match l.atom.time() {
                Some(Term::TimeVar(v, _)) => Some(v.clone()),
                _ => None,
            })
            .collect()
    }
}

impl fmt::Display for AnswerTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |ls: &[Literal]| ls.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ");
        write!(
            f,
            "<{}, {{{}}}, {{{}}}>",
            self.theta,
            list(&self.evidence),
            list(&self.hypotheses)
        )
    }
}
