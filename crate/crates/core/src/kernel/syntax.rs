//! Abstract syntax of Temporal Datalog.
//!
//! Terms come in two sorts. Object terms are constants and object variables;
//! time terms are natural-number time points or `T+k` expressions over a time
//! variable. A temporal predicate carries exactly one time term, in last
//! position; a rigid predicate carries none.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Interned-ish symbol used for predicate, constant and variable names.
pub type Sym = Arc<str>;

pub fn sym(s: &str) -> Sym {
    Arc::from(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// Object constant.
    Const(Sym),
    /// Object variable.
    Var(Sym),
    /// Time point; always `>= 0`.
    Time(u64),
    /// `var + offset`; offset 0 is the bare time variable.
    TimeVar(Sym, i64),
}

impl Term {
    pub fn constant(name: &str) -> Term {
        Term::Const(sym(name))
    }

    pub fn var(name: &str) -> Term {
        Term::Var(sym(name))
    }

    pub fn time_var(name: &str, offset: i64) -> Term {
        Term::TimeVar(sym(name), offset)
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, Term::Const(_) | Term::Time(_))
    }

    pub fn is_time(&self) -> bool {
        matches!(self, Term::Time(_) | Term::TimeVar(..))
    }

    /// The variable occurring in this term, if any.
    pub fn variable(&self) -> Option<&Sym> {
        match self {
            Term::Var(v) | Term::TimeVar(v, _) => Some(v),
            _ => None,
        }
    }
}

/// Constants that need quoting in the concrete syntax.
fn needs_quotes(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return true,
    }
    !chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) if needs_quotes(c) => write!(f, "'{}'", c.replace('\'', "\\'")),
            Term::Const(c) => write!(f, "{c}"),
            Term::Var(v) => write!(f, "{v}"),
            Term::Time(n) => write!(f, "{n}"),
            Term::TimeVar(v, 0) => write!(f, "{v}"),
            Term::TimeVar(v, k) if *k > 0 => write!(f, "{v}+{k}"),
            Term::TimeVar(v, k) => write!(f, "{v}-{}", k.unsigned_abs()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: Sym,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Atom {
        Atom {
            pred: sym(pred),
            args,
        }
    }

    /// The time term, present iff the predicate is temporal.
    pub fn time(&self) -> Option<&Term> {
        self.args.last().filter(|t| t.is_time())
    }

    /// Ground time stamp, if the time term is a time point.
    pub fn timestamp(&self) -> Option<u64> {
        match self.time() {
            Some(Term::Time(n)) => Some(*n),
            _ => None,
        }
    }

    /// Time variable and offset, if the time term is `T+k`.
    pub fn time_var(&self) -> Option<(&Sym, i64)> {
        match self.time() {
            Some(Term::TimeVar(v, k)) => Some((v, *k)),
            _ => None,
        }
    }

    pub fn is_temporal(&self) -> bool {
        self.time().is_some()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn vars(&self) -> impl Iterator<Item = &Sym> {
        self.args.iter().filter_map(Term::variable)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Sym>) {
        out.extend(self.vars().cloned());
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{t}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub negated: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn pos(atom: Atom) -> Literal {
        Literal {
            negated: false,
            atom,
        }
    }

    pub fn neg(atom: Atom) -> Literal {
        Literal {
            negated: true,
            atom,
        }
    }
}

impl From<Atom> for Literal {
    fn from(atom: Atom) -> Literal {
        Literal::pos(atom)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "not ")?;
        }
        write!(f, "{}", self.atom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Literal>,
}

impl Rule {
    pub fn fact(head: Atom) -> Rule {
        Rule { head, body: vec![] }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn vars(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.head.collect_vars(&mut out);
        for l in &self.body {
            l.atom.collect_vars(&mut out);
        }
        out
    }

    /// Distinct time variables of the rule.
    pub fn time_vars(&self) -> BTreeSet<Sym> {
        std::iter::once(&self.head)
            .chain(self.body.iter().map(|l| &l.atom))
            .filter_map(|a| a.time_var().map(|(v, _)| v.clone()))
            .collect()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.body.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        if !self.body.is_empty() {
            write!(f, " -> ")?;
        }
        write!(f, "{}.", self.head)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct PredInfo {
    pub arity: usize,
    pub temporal: bool,
    pub edb: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
    pub signature: BTreeMap<Sym, PredInfo>,
    /// Predicates declared rigid with `#rigid p/n.`
    pub rigid: BTreeSet<Sym>,
}

impl Program {
    pub fn info(&self, pred: &str) -> Option<&PredInfo> {
        self.signature.get(pred)
    }

    pub fn is_edb(&self, pred: &str) -> bool {
        self.info(pred).is_none_or(|i| i.edb)
    }

    pub fn is_idb(&self, pred: &str) -> bool {
        !self.is_edb(pred)
    }

    /// Rules with a non-empty body defining `pred`, and empty-body rules for it.
    pub fn rules_for<'a>(&'a self, pred: &'a str) -> impl Iterator<Item = &'a Rule> + 'a {
        self.rules.iter().filter(move |r| &*r.head.pred == pred)
    }

    pub fn static_facts(&self) -> impl Iterator<Item = &Atom> {
        self.rules.iter().filter(|r| r.is_fact()).map(|r| &r.head)
    }

    pub fn has_negation(&self) -> bool {
        self.rules.iter().any(|r| r.body.iter().any(|l| l.negated))
    }

    /// Object constants mentioned anywhere in the program.
    pub fn constants(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            for a in std::iter::once(&r.head).chain(r.body.iter().map(|l| &l.atom)) {
                for t in &a.args {
                    if let Term::Const(c) = t {
                        out.insert(c.clone());
                    }
                }
            }
        }
        out
    }

    /// Recomputes EDB/IDB flags from the rules.
    pub fn refresh_edb(&mut self) {
        let idb: BTreeSet<Sym> = self
            .rules
            .iter()
            .filter(|r| !r.is_fact())
            .map(|r| r.head.pred.clone())
            .collect();
        for (p, info) in self.signature.iter_mut() {
            info.edb = !idb.contains(p);
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.rigid {
            let arity = self.signature.get(p).map_or(0, |i| i.arity);
            writeln!(f, "#rigid {p}/{arity}.")?;
        }
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// A continuous query: an IDB goal atom over a program.
#[derive(Clone, Debug)]
pub struct Query {
    pub goal: Atom,
    pub program: Arc<Program>,
}

impl Query {
    pub fn new(goal: Atom, program: Arc<Program>) -> Query {
        Query { goal, program }
    }

    /// The goal's time variable, when the goal is `P(..., T+k)`.
    pub fn main_time_var(&self) -> Option<&Sym> {
        self.goal.time_var().map(|(v, _)| v)
    }

    pub fn vars(&self) -> BTreeSet<Sym> {
        self.goal.vars().cloned().collect()
    }
}
