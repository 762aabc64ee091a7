//! Offline compilation of queries into precondition sets.

mod family;
mod minimize;
mod serial;
mod stratify;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::kernel::{validate_program, Classification, KernelError, Literal, Query, Substitution, Sym, Term};
use crate::resolution::{
    refute_with_future_premises, ComputedAnswer, Guard, Limits, ResolutionError, SearchConfig, TimeFloors,
};

pub use family::{auxiliary_query, build_query_family, QueryFamily, QueryId};
pub use minimize::subsumption_minimize;
pub use serial::{DocumentError, EntryDocument, FamilyDocument, FORMAT_VERSION};
pub use stratify::{check_t_stratification, ClosureNode, ShiftEdge, StratificationReport};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    /// Requires a nonrecursive, connected query.
    Strict,
    /// Loop checks and finite instantiation; reports limits instead of
    /// diverging.
    Guarded,
    /// Strict search when the query is nonrecursive, guarded otherwise.
    #[default]
    Auto,
}

#[derive(Clone, Debug, Default)]
pub struct PreprocessConfig {
    pub mode: Mode,
    pub limits: Limits,
    /// Extra object constants for guarded mode, added to the program's.
    pub universe: Vec<Sym>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PreprocessError {
    #[error("query is not eligible for strict preprocessing: {reason}")]
    NotEligible {
        reason: String,
        classification: Classification,
    },
    #[error("preprocessing of {query} exceeded its limits: {diagnosis}")]
    LimitExceeded {
        query: String,
        diagnosis: String,
        partial: Vec<ComputedAnswer>,
    },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Key of a minimal-timestamp group: a time variable, or the ground time
/// points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupKey {
    Var(Sym),
    Ground,
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKey::Var(v) => write!(f, "{v}"),
            GroupKey::Ground => write!(f, "@"),
        }
    }
}

/// One schema `⟨θ, {M_T}, F⟩` of a precondition set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PreconditionEntry {
    pub theta: Substitution,
    pub m_groups: BTreeMap<GroupKey, Vec<Literal>>,
    pub f_rest: Vec<Literal>,
    pub floors: TimeFloors,
}

impl PreconditionEntry {
    /// Splits the premises of a computed answer into minimal-timestamp
    /// groups and the remaining literals.
    pub fn from_answer(a: &ComputedAnswer) -> PreconditionEntry {
        let mut by_key: BTreeMap<GroupKey, Vec<(i64, &Literal)>> = BTreeMap::new();
        let mut f_rest = Vec::new();
        for l in &a.premises {
            match l.atom.time() {
                Some(Term::TimeVar(v, k)) => by_key.entry(GroupKey::Var(v.clone())).or_default().push((*k, l)),
                Some(Term::Time(n)) => by_key.entry(GroupKey::Ground).or_default().push((*n as i64, l)),
                _ => f_rest.push(l.clone()),
            }
        }
        let mut m_groups = BTreeMap::new();
        for (key, lits) in by_key {
            let min = lits.iter().map(|(k, _)| *k).min().unwrap();
            let mut m = Vec::new();
            for (k, l) in lits {
                if k == min {
                    m.push(l.clone());
                } else {
                    f_rest.push(l.clone());
                }
            }
            m.sort();
            m.dedup();
            m_groups.insert(key, m);
        }
        f_rest.sort();
        f_rest.dedup();
        PreconditionEntry {
            theta: a.theta.clone(),
            m_groups,
            f_rest,
            floors: a.floors.clone(),
        }
    }

    /// All premises, group literals first.
    pub fn premises(&self) -> impl Iterator<Item = &Literal> {
        self.m_groups.values().flatten().chain(&self.f_rest)
    }

    pub fn is_connected(&self) -> bool {
        self.m_groups.keys().filter(|k| matches!(k, GroupKey::Var(_))).count() <= 1
    }
}

impl fmt::Display for PreconditionEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |ls: &[Literal]| ls.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ");
        let groups: Vec<String> = self
            .m_groups
            .iter()
            .map(|(k, ls)| format!("{k}: {{{}}}", list(ls)))
            .collect();
        write!(f, "<{}, {{{}}}, {{{}}}>", self.theta, groups.join(", "), list(&self.f_rest))
    }
}

/// Object constants used for guarded instantiation.
pub fn guard_universe(q: &Query, extra: &[Sym]) -> Vec<Sym> {
    let mut u: BTreeSet<Sym> = q.program.constants();
    for t in &q.goal.args {
        if let Term::Const(c) = t {
            u.insert(c.clone());
        }
    }
    u.extend(extra.iter().cloned());
    u.into_iter().collect()
}

/// Compiles `q` into its subsumption-minimal precondition set over the empty
/// history.
pub fn precompute_preconditions(q: &Query, cfg: &PreprocessConfig) -> Result<Vec<PreconditionEntry>, PreprocessError> {
    let class = validate_program(&q.program, Some(q))?;
    let guarded = match cfg.mode {
        Mode::Strict => {
            if !(class.nonrecursive && class.connected) {
                let reason = match (class.nonrecursive, class.connected) {
                    (false, false) => "recursive and not connected",
                    (false, true) => "recursive",
                    _ => "not connected",
                };
                return Err(PreprocessError::NotEligible {
                    reason: reason.into(),
                    classification: class,
                });
            }
            false
        }
        Mode::Guarded => true,
        Mode::Auto => !class.nonrecursive,
    };
    let mut search = SearchConfig::preprocessing(cfg.limits);
    if guarded {
        search.guard = Some(Guard {
            universe: guard_universe(q, &cfg.universe),
        });
    }
    let answers = refute_with_future_premises(q, &search).map_err(|e| match e {
        ResolutionError::LimitExceeded { partial, diagnosis } => PreprocessError::LimitExceeded {
            query: q.goal.to_string(),
            diagnosis,
            partial,
        },
    })?;
    let minimal = subsumption_minimize(&q.goal, answers);
    Ok(minimal.iter().map(PreconditionEntry::from_answer).collect())
}
