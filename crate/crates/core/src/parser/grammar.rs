use std::sync::Arc;

use super::lexer::{tokenize, Tok, Token};
use super::sorts;
use super::{ParseError, SourceSpan};
use crate::kernel::{check_safety, sym, Atom, Literal, Program, Query, Term};

#[derive(Clone, Debug)]
pub(crate) enum RawTermKind {
    Int(u64),
    Const(String),
    Var(String, Option<i64>),
}

#[derive(Clone, Debug)]
pub(crate) struct RawTerm {
    pub kind: RawTermKind,
    pub span: SourceSpan,
}

#[derive(Clone, Debug)]
pub(crate) struct RawAtom {
    pub pred: String,
    pub args: Vec<RawTerm>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug)]
pub(crate) struct RawLiteral {
    pub negated: bool,
    pub atom: RawAtom,
}

#[derive(Clone, Debug)]
pub(crate) struct RawRule {
    pub head: RawAtom,
    pub body: Vec<RawLiteral>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct RawProgram {
    pub rules: Vec<RawRule>,
    pub queries: Vec<RawAtom>,
    pub rigid: Vec<(String, usize, SourceSpan)>,
}

pub(crate) struct TokenStream {
    toks: Vec<Token>,
    pos: usize,
    eof: SourceSpan,
}

impl TokenStream {
    pub fn new(toks: Vec<Token>) -> TokenStream {
        let eof = toks
            .last()
            .map(|t| SourceSpan::new((t.span.end_line, t.span.end_col), (t.span.end_line, t.span.end_col)))
            .unwrap_or(SourceSpan::new((1, 1), (1, 1)));
        TokenStream { toks, pos: 0, eof }
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|t| &t.tok)
    }

    pub fn span(&self) -> SourceSpan {
        self.toks.get(self.pos).map_or(self.eof, |t| t.span)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    pub fn unexpected(&self, wanted: &str) -> ParseError {
        let found = match self.peek() {
            Some(t) => t.describe(),
            None => "end of input".into(),
        };
        ParseError::syntax(self.span(), format!("expected {wanted}, found {found}"))
    }

    pub fn expect(&mut self, tok: Tok) -> Result<SourceSpan, ParseError> {
        if self.peek() == Some(&tok) {
            Ok(self.next().unwrap().span)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self, wanted: &str) -> Result<(String, SourceSpan), ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let t = self.next().unwrap();
                let Tok::Ident(s) = t.tok else { unreachable!() };
                Ok((s, t.span))
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn int(&mut self) -> Result<(u64, SourceSpan), ParseError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                Ok((n, self.next().unwrap().span))
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    pub fn term(&mut self) -> Result<RawTerm, ParseError> {
        let span = self.span();
        match self.peek() {
            Some(Tok::Int(_)) => {
                let (n, span) = self.int()?;
                Ok(RawTerm {
                    kind: RawTermKind::Int(n),
                    span,
                })
            }
            Some(Tok::Quoted(s)) => {
                let kind = RawTermKind::Const(s.clone());
                self.next();
                Ok(RawTerm { kind, span })
            }
            Some(Tok::Ident(_)) => {
                let (name, span) = self.ident("a term")?;
                let first = name.chars().next().unwrap();
                if first.is_ascii_lowercase() {
                    return Ok(RawTerm {
                        kind: RawTermKind::Const(name),
                        span,
                    });
                }
                if !first.is_ascii_uppercase() {
                    return Err(ParseError::syntax(
                        span,
                        format!("`{name}` is neither a variable nor a constant"),
                    ));
                }
                let sign = match self.peek() {
                    Some(Tok::Plus) => 1,
                    Some(Tok::Minus) => -1,
                    _ => {
                        return Ok(RawTerm {
                            kind: RawTermKind::Var(name, None),
                            span,
                        })
                    }
                };
                self.next();
                let (k, end) = self.int()?;
                let k = i64::try_from(k)
                    .map_err(|_| ParseError::syntax(end, "time offset too large"))?;
                Ok(RawTerm {
                    kind: RawTermKind::Var(name, Some(sign * k)),
                    span: span.to(end),
                })
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    pub fn atom(&mut self) -> Result<RawAtom, ParseError> {
        let (pred, span) = self.ident("a predicate")?;
        let mut args = Vec::new();
        let mut end = span;
        if self.peek() == Some(&Tok::LParen) {
            self.next();
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Some(Tok::Comma) => {
                        self.next();
                    }
                    Some(Tok::RParen) => {
                        end = self.next().unwrap().span;
                        break;
                    }
                    _ => return Err(self.unexpected("`,` or `)`")),
                }
            }
        }
        Ok(RawAtom {
            pred,
            args,
            span: span.to(end),
        })
    }

    pub fn literal(&mut self) -> Result<RawLiteral, ParseError> {
        let negated = matches!(self.peek(), Some(Tok::Ident(s)) if s == "not")
            && matches!(self.peek2(), Some(Tok::Ident(_)));
        if negated {
            self.next();
        }
        Ok(RawLiteral {
            negated,
            atom: self.atom()?,
        })
    }

    fn directive(&mut self, out: &mut RawProgram) -> Result<(), ParseError> {
        let start = self.expect(Tok::Hash)?;
        let (name, span) = self.ident("a directive name")?;
        match name.as_str() {
            "query" => {
                let atom = self.atom()?;
                self.expect(Tok::Dot)?;
                out.queries.push(atom);
            }
            "rigid" => {
                let (pred, _) = self.ident("a predicate")?;
                self.expect(Tok::Slash)?;
                let (arity, _) = self.int()?;
                let end = self.expect(Tok::Dot)?;
                out.rigid.push((pred, arity as usize, start.to(end)));
            }
            _ => {
                return Err(ParseError::syntax(
                    span,
                    format!("unknown directive #{name}"),
                ))
            }
        }
        Ok(())
    }

    fn clause(&mut self) -> Result<RawRule, ParseError> {
        let start = self.span();
        let mut lits = vec![self.literal()?];
        while self.peek() == Some(&Tok::Comma) {
            self.next();
            lits.push(self.literal()?);
        }
        let (head, body) = match self.peek() {
            Some(Tok::Arrow) => {
                self.next();
                (self.atom()?, lits)
            }
            Some(Tok::Dot) if lits.len() == 1 && !lits[0].negated => {
                (lits.pop().unwrap().atom, vec![])
            }
            Some(Tok::Dot) => {
                return Err(ParseError::syntax(
                    start,
                    "a clause without `->` must be a single positive fact",
                ))
            }
            _ => return Err(self.unexpected("`,`, `->` or `.`")),
        };
        let end = self.expect(Tok::Dot)?;
        Ok(RawRule {
            head,
            body,
            span: start.to(end),
        })
    }
}

pub(crate) fn parse_raw(text: &str) -> Result<RawProgram, ParseError> {
    let mut ts = TokenStream::new(tokenize(text, 1)?);
    let mut out = RawProgram::default();
    while !ts.at_end() {
        if ts.peek() == Some(&Tok::Hash) {
            ts.directive(&mut out)?;
        } else {
            out.rules.push(ts.clause()?);
        }
    }
    Ok(out)
}

/// A parsed program together with the queries named by `#query`.
#[derive(Clone, Debug)]
pub struct ParsedProgram {
    pub program: Arc<Program>,
    pub queries: Vec<Query>,
}

impl ParsedProgram {
    /// The first declared query.
    pub fn query(&self) -> Option<&Query> {
        self.queries.first()
    }
}

/// Parses, sort-checks and safety-checks a program text.
pub fn parse_program(text: &str) -> Result<ParsedProgram, ParseError> {
    let raw = parse_raw(text)?;
    let resolved = sorts::resolve(&raw)?;
    for (r, raw_rule) in resolved.program.rules.iter().zip(&raw.rules) {
        check_safety(r).map_err(|source| ParseError::Unsafe {
            span: raw_rule.span,
            source,
        })?;
    }
    let program = Arc::new(resolved.program);
    let mut queries = Vec::new();
    for (goal, raw_goal) in resolved.queries.into_iter().zip(&raw.queries) {
        if !program.is_idb(&goal.pred) {
            return Err(ParseError::InvalidQuery {
                span: raw_goal.span,
                message: format!("{} is not defined by any rule", goal.pred),
            });
        }
        queries.push(Query::new(goal, program.clone()));
    }
    Ok(ParsedProgram { program, queries })
}

fn lower_term(kind: &RawTermKind, temporal: bool) -> Term {
    match kind {
        RawTermKind::Int(n) => Term::Time(*n),
        RawTermKind::Const(c) => Term::Const(sym(c)),
        RawTermKind::Var(v, Some(k)) => Term::TimeVar(sym(v), *k),
        RawTermKind::Var(v, None) if temporal => Term::TimeVar(sym(v), 0),
        RawTermKind::Var(v, None) => Term::Var(sym(v)),
    }
}

fn single<T>(text: &str, f: impl FnOnce(&mut TokenStream) -> Result<T, ParseError>) -> Result<T, ParseError> {
    let mut ts = TokenStream::new(tokenize(text, 1)?);
    let out = f(&mut ts)?;
    if ts.peek() == Some(&Tok::Dot) {
        ts.next();
    }
    if !ts.at_end() {
        return Err(ts.unexpected("end of input"));
    }
    Ok(out)
}

/// Parses one literal, using `program`'s signature to sort its variables.
pub fn parse_literal(text: &str, program: &Program) -> Result<Literal, ParseError> {
    let raw = single(text, |ts| ts.literal())?;
    let temporal = program.info(&raw.atom.pred).is_some_and(|i| i.temporal);
    let n = raw.atom.args.len();
    let atom = Atom {
        pred: sym(&raw.atom.pred),
        args: raw
            .atom
            .args
            .iter()
            .enumerate()
            .map(|(i, t)| lower_term(&t.kind, temporal && i + 1 == n))
            .collect(),
    };
    Ok(Literal {
        negated: raw.negated,
        atom,
    })
}

/// Parses one term; a bare variable is temporal when `temporal` is set.
pub fn parse_term(text: &str, temporal: bool) -> Result<Term, ParseError> {
    let raw = single(text, |ts| ts.term())?;
    Ok(lower_term(&raw.kind, temporal))
}
