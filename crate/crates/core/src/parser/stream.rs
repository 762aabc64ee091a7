use std::sync::Arc;

use super::grammar::{RawAtom, RawTermKind, TokenStream};
use super::lexer::{tokenize, Tok};
use super::{ParseError, SourceSpan};
use crate::kernel::{sym, Atom, Program, Term};

/// The facts stamped with one tick.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TickBlock {
    pub tick: u64,
    pub facts: Vec<Atom>,
}

fn ground_fact(raw: &RawAtom, tick: u64, program: Option<&Program>) -> Result<Atom, ParseError> {
    let n = raw.args.len();
    let mut args = Vec::with_capacity(n);
    for (i, t) in raw.args.iter().enumerate() {
        args.push(match &t.kind {
            RawTermKind::Var(..) => {
                return Err(ParseError::NonGroundFact {
                    span: raw.span,
                    fact: display_raw(raw),
                })
            }
            RawTermKind::Const(c) => Term::Const(sym(c)),
            RawTermKind::Int(k) if i + 1 == n => Term::Time(*k),
            RawTermKind::Int(_) => {
                return Err(ParseError::Sort {
                    span: t.span,
                    pred: raw.pred.clone(),
                    detail: "time point outside the last position".into(),
                })
            }
        });
    }
    let atom = Atom {
        pred: sym(&raw.pred),
        args,
    };
    if let Some(p) = program {
        if p.is_idb(&atom.pred) {
            return Err(ParseError::NotEdb {
                span: raw.span,
                pred: raw.pred.clone(),
            });
        }
        if let Some(info) = p.info(&atom.pred) {
            if info.arity != n || !info.temporal {
                return Err(ParseError::Sort {
                    span: raw.span,
                    pred: raw.pred.clone(),
                    detail: format!(
                        "stream facts need a temporal predicate of arity {}",
                        info.arity
                    ),
                });
            }
        }
    }
    if atom.timestamp() != Some(tick) {
        return Err(ParseError::TimestampMismatch {
            span: raw.span,
            fact: atom.to_string(),
            tick,
        });
    }
    Ok(atom)
}

fn display_raw(raw: &RawAtom) -> String {
    let args: Vec<String> = raw
        .args
        .iter()
        .map(|t| match &t.kind {
            RawTermKind::Int(n) => n.to_string(),
            RawTermKind::Const(c) => Term::Const(sym(c)).to_string(),
            RawTermKind::Var(v, None) => v.clone(),
            RawTermKind::Var(v, Some(k)) => Term::TimeVar(sym(v), *k).to_string(),
        })
        .collect();
    format!("{}({})", raw.pred, args.join(", "))
}

fn parse_block(
    text: &str,
    first_line: usize,
    program: Option<&Program>,
) -> Result<(TickBlock, SourceSpan), ParseError> {
    let mut ts = TokenStream::new(tokenize(text, first_line)?);
    let header = ts.expect(Tok::At)?;
    let (tick, span) = match ts.peek() {
        Some(Tok::Int(n)) => {
            let n = *n;
            let s = ts.span();
            ts.expect(Tok::Int(n))?;
            (n, header.to(s))
        }
        _ => {
            return Err(ParseError::syntax(ts.span(), "expected a tick number after `@`"));
        }
    };
    let mut facts = Vec::new();
    while !ts.at_end() {
        if ts.peek() == Some(&Tok::At) {
            return Err(ParseError::syntax(ts.span(), "one tick header per block"));
        }
        let raw = ts.atom()?;
        ts.expect(Tok::Dot)?;
        facts.push(ground_fact(&raw, tick, program)?);
    }
    Ok((TickBlock { tick, facts }, span))
}

/// Parses a single `@n` block. The program, when given, is used to reject
/// intensional predicates.
pub fn parse_stream_tick(text: &str, program: Option<&Program>) -> Result<TickBlock, ParseError> {
    parse_block(text, 1, program).map(|(b, _)| b)
}

/// Incremental stream reader enforcing consecutive ticks starting at 0.
#[derive(Clone, Debug)]
pub struct StreamParser {
    next_tick: u64,
    program: Option<Arc<Program>>,
    line: usize,
    pending: String,
    pending_line: usize,
    in_block: bool,
}

impl StreamParser {
    pub fn new(program: Option<Arc<Program>>) -> StreamParser {
        StreamParser {
            next_tick: 0,
            program,
            line: 0,
            pending: String::new(),
            pending_line: 1,
            in_block: false,
        }
    }

    /// Expects the first block to be stamped `tick`.
    pub fn starting_at(mut self, tick: u64) -> StreamParser {
        self.next_tick = tick;
        self
    }

    pub fn next_tick(&self) -> u64 {
        self.next_tick
    }

    fn finish_block(&mut self) -> Result<Option<TickBlock>, ParseError> {
        if !self.in_block {
            return Ok(None);
        }
        self.in_block = false;
        let text = std::mem::take(&mut self.pending);
        let (block, span) = parse_block(&text, self.pending_line, self.program.as_deref())?;
        if block.tick != self.next_tick {
            return Err(ParseError::OutOfOrderTick {
                span,
                expected: self.next_tick,
                found: block.tick,
            });
        }
        self.next_tick += 1;
        Ok(Some(block))
    }

    /// Feeds one line; returns the previous block once a new header starts.
    pub fn push_line(&mut self, line: &str) -> Result<Option<TickBlock>, ParseError> {
        self.line += 1;
        let starts_block = line.trim_start().starts_with('@');
        let mut done = None;
        if starts_block {
            done = self.finish_block()?;
            self.pending_line = self.line;
            self.in_block = true;
        } else if !self.in_block {
            let content = line.split('%').next().unwrap_or("").trim();
            if !content.is_empty() {
                return Err(ParseError::syntax(
                    SourceSpan::new((self.line, 1), (self.line, line.len() + 1)),
                    "facts before the first `@tick` header",
                ));
            }
            return Ok(None);
        }
        self.pending.push_str(line);
        self.pending.push('\n');
        Ok(done)
    }

    /// Flushes the last block at end of input.
    pub fn finish(&mut self) -> Result<Option<TickBlock>, ParseError> {
        self.finish_block()
    }
}

/// Parses a whole stream text into consecutive tick blocks.
pub fn parse_stream(text: &str, program: Option<Arc<Program>>) -> Result<Vec<TickBlock>, ParseError> {
    let mut p = StreamParser::new(program);
    let mut out = Vec::new();
    for line in text.lines() {
        out.extend(p.push_line(line)?);
    }
    out.extend(p.finish()?);
    Ok(out)
}
