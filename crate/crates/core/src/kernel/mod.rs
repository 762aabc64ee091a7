//! Syntax, substitutions, unification and static classification.

mod classify;
mod subst;
mod syntax;
mod unify;

pub(crate) use classify::check_safety;
pub use classify::{dependency_graph, validate_program, Classification};
pub use subst::Substitution;
pub use syntax::{sym, Atom, Literal, PredInfo, Program, Query, Rule, Sym, Term};
pub use unify::{is_future_atom, mgu, Matcher};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("time term {term} evaluates to {value}, outside the temporal sort")]
    NegativeTime { term: String, value: i64 },
    #[error("variable {var} cannot be bound to {term}: sort mismatch")]
    SortMismatch { var: String, term: String },
    #[error("{left} and {right} do not unify")]
    NoUnifier { left: String, right: String },
    #[error("unsafe rule `{rule}`: variable {var} {reason}")]
    UnsafeRule {
        rule: String,
        var: String,
        reason: &'static str,
    },
    #[error("inconsistent signature for predicate {pred}: {detail}")]
    InconsistentSignature { pred: String, detail: String },
}
