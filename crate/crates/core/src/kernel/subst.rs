use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::syntax::{Atom, Literal, Sym, Term};
use super::KernelError;

/// Finite-support map from variables to terms.
///
/// Identity bindings are never stored. Object variables map to object terms
/// and time variables to time terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution {
    bindings: BTreeMap<Sym, Term>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (Sym, Term)>>(pairs: I) -> Substitution {
        let mut s = Substitution::new();
        for (v, t) in pairs {
            s.bind(v, t);
        }
        s
    }

    /// Inserts a binding, dropping it if it is the identity.
    pub fn bind(&mut self, var: Sym, term: Term) {
        let identity = match &term {
            Term::Var(v) | Term::TimeVar(v, 0) => *v == var,
            _ => false,
        };
        if identity {
            self.bindings.remove(&var);
        } else {
            self.bindings.insert(var, term);
        }
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.bindings.contains_key(var)
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Sym, &Term)> {
        self.bindings.iter()
    }

    pub fn support(&self) -> BTreeSet<Sym> {
        self.bindings.keys().cloned().collect()
    }

    pub fn is_ground(&self) -> bool {
        self.bindings.values().all(Term::is_ground)
    }

    /// Keeps only bindings for the given variables.
    pub fn restrict(&self, vars: &BTreeSet<Sym>) -> Substitution {
        Substitution {
            bindings: self
                .bindings
                .iter()
                .filter(|(v, _)| vars.contains(*v))
                .map(|(v, t)| (v.clone(), t.clone()))
                .collect(),
        }
    }

    pub fn apply_term(&self, t: &Term) -> Result<Term, KernelError> {
        Ok(match t {
            Term::Var(v) => self.bindings.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::TimeVar(v, k) => match self.bindings.get(v) {
                None => t.clone(),
                Some(Term::Time(n)) => {
                    let value = *n as i64 + k;
                    if value < 0 {
                        return Err(KernelError::NegativeTime {
                            term: t.to_string(),
                            value,
                        });
                    }
                    Term::Time(value as u64)
                }
                Some(Term::TimeVar(w, j)) => Term::TimeVar(w.clone(), j + k),
                Some(other) => {
                    return Err(KernelError::SortMismatch {
                        var: v.to_string(),
                        term: other.to_string(),
                    })
                }
            },
            Term::Const(_) | Term::Time(_) => t.clone(),
        })
    }

    /// Instance of an atom, folding temporal arithmetic.
    pub fn apply(&self, a: &Atom) -> Result<Atom, KernelError> {
        if self.is_empty() {
            return Ok(a.clone());
        }
        let args = a
            .args
            .iter()
            .map(|t| self.apply_term(t))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Atom {
            pred: a.pred.clone(),
            args,
        })
    }

    pub fn apply_literal(&self, l: &Literal) -> Result<Literal, KernelError> {
        Ok(Literal {
            negated: l.negated,
            atom: self.apply(&l.atom)?,
        })
    }

    pub fn apply_all<'a, I>(&self, lits: I) -> Result<Vec<Literal>, KernelError>
    where
        I: IntoIterator<Item = &'a Literal>,
    {
        lits.into_iter().map(|l| self.apply_literal(l)).collect()
    }

    /// Composition `self` then `other`, so that `a·(θσ) = (a·θ)·σ`.
    ///
    /// Fails only when a time binding of `self` folds below zero under `other`.
    pub fn compose(&self, other: &Substitution) -> Result<Substitution, KernelError> {
        let mut out = Substitution::new();
        for (x, t) in &self.bindings {
            out.bind(x.clone(), other.apply_term(t)?);
        }
        for (y, u) in &other.bindings {
            if !self.bindings.contains_key(y) {
                out.bind(y.clone(), u.clone());
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}:={t}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<(Sym, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Sym, Term)>>(iter: I) -> Self {
        Substitution::from_pairs(iter)
    }
}
