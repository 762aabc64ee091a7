//! Continuous query answering over timestamped fact streams for Temporal
//! Datalog, with hypothetical and supported answers.

pub mod kernel;
pub mod online;
pub mod oracle;
pub mod parser;
pub mod preprocess;
pub mod resolution;

pub use kernel::{
    mgu, validate_program, Atom, Classification, KernelError, Literal, Program, Query, Rule,
    Substitution, Sym, Term,
};
pub use parser::{parse_program, parse_stream, ParseError, ParsedProgram, TickBlock};
pub use online::{
    AnswerTuple, DiscardReason, EvalState, GroundAnswer, OnlineConfig, OnlineError, Retention, TickDelta,
};
pub use preprocess::{
    build_query_family, precompute_preconditions, Mode, PreconditionEntry, PreprocessConfig, PreprocessError,
    QueryFamily, QueryId,
};
