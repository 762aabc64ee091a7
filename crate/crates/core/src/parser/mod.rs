//! Concrete syntax for programs, queries and fact streams.
//!
//! Programs are sequences of rules `Body -> Head.` and facts `Head.`, with
//! `%` line comments and the directives `#query Atom.` and `#rigid p/n.`.
//! Streams are blocks headed by `@n` lines, each followed by the ground facts
//! stamped `n`.

mod grammar;
mod lexer;
mod sorts;
mod stream;

use std::fmt;

use serde::Serialize;

use crate::kernel::KernelError;

pub use grammar::{parse_literal, parse_program, parse_term, ParsedProgram};
pub use stream::{parse_stream, parse_stream_tick, StreamParser, TickBlock};

/// 1-based source position range; `end` is exclusive.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub line: usize,
    pub col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

impl SourceSpan {
    pub fn new(start: (usize, usize), end: (usize, usize)) -> SourceSpan {
        SourceSpan {
            line: start.0,
            col: start.1,
            end_line: end.0,
            end_col: end.1,
        }
    }

    pub fn to(self, other: SourceSpan) -> SourceSpan {
        SourceSpan {
            end_line: other.end_line,
            end_col: other.end_col,
            ..self
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{span}: syntax error: {message}")]
    Syntax { span: SourceSpan, message: String },
    #[error("{span}: sort error in {pred}: {detail}")]
    Sort {
        span: SourceSpan,
        pred: String,
        detail: String,
    },
    #[error("{span}: {source}")]
    Unsafe {
        span: SourceSpan,
        source: KernelError,
    },
    #[error("{span}: invalid query: {message}")]
    InvalidQuery { span: SourceSpan, message: String },
    #[error("{span}: fact {fact} is not ground")]
    NonGroundFact { span: SourceSpan, fact: String },
    #[error("{span}: fact {fact} does not carry timestamp {tick}")]
    TimestampMismatch {
        span: SourceSpan,
        fact: String,
        tick: u64,
    },
    #[error("{span}: predicate {pred} is intensional and cannot appear in the stream")]
    NotEdb { span: SourceSpan, pred: String },
    #[error("{span}: expected tick {expected}, found {found}")]
    OutOfOrderTick {
        span: SourceSpan,
        expected: u64,
        found: u64,
    },
}

impl ParseError {
    pub(crate) fn syntax(span: SourceSpan, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            span,
            message: message.into(),
        }
    }

    pub fn span(&self) -> SourceSpan {
        match self {
            ParseError::Syntax { span, .. }
            | ParseError::Sort { span, .. }
            | ParseError::Unsafe { span, .. }
            | ParseError::InvalidQuery { span, .. }
            | ParseError::NonGroundFact { span, .. }
            | ParseError::TimestampMismatch { span, .. }
            | ParseError::NotEdb { span, .. }
            | ParseError::OutOfOrderTick { span, .. } => *span,
        }
    }
}
