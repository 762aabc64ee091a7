//! Unification with temporal arithmetic, and one-way matching.

use std::collections::{BTreeMap, BTreeSet};

use super::subst::Substitution;
use super::syntax::{Atom, Sym, Term};
use super::KernelError;

fn no_unifier(a: &Atom, b: &Atom) -> KernelError {
    KernelError::NoUnifier {
        left: a.to_string(),
        right: b.to_string(),
    }
}

/// Most general unifier of `goal` and `other`.
///
/// Variables of `other` are preferentially bound to terms over the variables
/// of `goal`, so every right-hand side of the result only mentions variables
/// that occur in `goal`. The result is idempotent.
pub fn mgu(goal: &Atom, other: &Atom) -> Result<Substitution, KernelError> {
    if goal.pred != other.pred || goal.args.len() != other.args.len() {
        return Err(no_unifier(goal, other));
    }
    let goal_vars: BTreeSet<Sym> = goal.vars().cloned().collect();
    let mut s = Substitution::new();
    for (x, y) in goal.args.iter().zip(&other.args) {
        let x = s.apply_term(x).map_err(|_| no_unifier(goal, other))?;
        let y = s.apply_term(y).map_err(|_| no_unifier(goal, other))?;
        let (var, term) = match unify_terms(&x, &y, &goal_vars) {
            Step::Same => continue,
            Step::Clash => return Err(no_unifier(goal, other)),
            Step::Bind(v, t) => (v, t),
        };
        let single = Substitution::from_pairs([(var, term)]);
        s = s.compose(&single).map_err(|_| no_unifier(goal, other))?;
    }
    Ok(s)
}

enum Step {
    Same,
    Clash,
    Bind(Sym, Term),
}

fn unify_terms(x: &Term, y: &Term, goal_vars: &BTreeSet<Sym>) -> Step {
    use Term::*;
    if x == y {
        return Step::Same;
    }
    match (x, y) {
        (Var(a), Var(b)) => {
            if !goal_vars.contains(b) || goal_vars.contains(a) {
                Step::Bind(b.clone(), x.clone())
            } else {
                Step::Bind(a.clone(), y.clone())
            }
        }
        (Var(a), Const(_)) => Step::Bind(a.clone(), y.clone()),
        (Const(_), Var(b)) => Step::Bind(b.clone(), x.clone()),
        (TimeVar(v, k), Time(n)) | (Time(n), TimeVar(v, k)) => {
            let value = *n as i64 - k;
            if value < 0 {
                Step::Clash
            } else {
                Step::Bind(v.clone(), Time(value as u64))
            }
        }
        (TimeVar(v, j), TimeVar(w, k)) => {
            if v == w {
                // same variable, different offsets
                Step::Clash
            } else if !goal_vars.contains(w) || goal_vars.contains(v) {
                // v + j = w + k  =>  w := v + (j - k)
                Step::Bind(w.clone(), TimeVar(v.clone(), j - k))
            } else {
                Step::Bind(v.clone(), TimeVar(w.clone(), k - j))
            }
        }
        _ => Step::Clash,
    }
}

/// One-way matching state: pattern variables bound to target terms, where
/// target variables are treated as opaque symbols.
///
/// Unlike [`Substitution`], identity bindings are kept so that a pattern
/// variable which happens to share its name with a target variable stays
/// bound.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Matcher {
    map: BTreeMap<Sym, Term>,
}

impl Matcher {
    pub fn new() -> Matcher {
        Matcher::default()
    }

    pub fn from_substitution(s: &Substitution) -> Matcher {
        Matcher {
            map: s.iter().map(|(v, t)| (v.clone(), t.clone())).collect(),
        }
    }

    pub fn get(&self, v: &str) -> Option<&Term> {
        self.map.get(v)
    }

    pub fn into_substitution(self) -> Substitution {
        Substitution::from_pairs(self.map)
    }

    pub fn to_substitution(&self) -> Substitution {
        Substitution::from_pairs(self.map.clone())
    }

    fn match_term(&mut self, p: &Term, t: &Term) -> bool {
        use Term::*;
        match p {
            Const(_) | Time(_) => p == t,
            Var(v) => match self.map.get(v) {
                Some(b) => b == t,
                None => match t {
                    Const(_) | Var(_) => {
                        self.map.insert(v.clone(), t.clone());
                        true
                    }
                    _ => false,
                },
            },
            TimeVar(v, k) => match self.map.get(v) {
                Some(Time(m)) => {
                    let value = *m as i64 + k;
                    value >= 0 && *t == Time(value as u64)
                }
                Some(TimeVar(w, j)) => matches!(t, TimeVar(w2, j2) if w2 == w && *j2 == j + k),
                Some(_) => false,
                None => match t {
                    Time(n) => {
                        let value = *n as i64 - k;
                        if value < 0 {
                            return false;
                        }
                        self.map.insert(v.clone(), Time(value as u64));
                        true
                    }
                    TimeVar(w, j) => {
                        self.map.insert(v.clone(), TimeVar(w.clone(), j - k));
                        true
                    }
                    _ => false,
                },
            },
        }
    }

    /// Extends the matcher so that `pattern` maps onto `target`; on failure
    /// the matcher is left unchanged.
    pub fn match_atom(&mut self, pattern: &Atom, target: &Atom) -> bool {
        if pattern.pred != target.pred || pattern.args.len() != target.args.len() {
            return false;
        }
        let saved = self.map.clone();
        for (p, t) in pattern.args.iter().zip(&target.args) {
            if !self.match_term(p, t) {
                self.map = saved;
                return false;
            }
        }
        true
    }
}

/// Whether `a` is a future atom with respect to `tau`: temporal, and its time
/// term mentions a variable or is a time point after `tau`.
pub fn is_future_atom(a: &Atom, tau: i64) -> bool {
    match a.time() {
        Some(Term::TimeVar(..)) => true,
        Some(Term::Time(n)) => *n as i64 > tau,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::syntax::sym;

    fn atom(p: &str, args: Vec<Term>) -> Atom {
        Atom::new(p, args)
    }

    #[test]
    fn mgu_binds_other_side_to_goal_terms() {
        let a = atom("Malf", vec![Term::var("X"), Term::time_var("T", 0)]);
        let b = atom("Malf", vec![Term::var("Y"), Term::time_var("T'", -2)]);
        let s = mgu(&a, &b).unwrap();
        let expected = Substitution::from_pairs([
            (sym("Y"), Term::var("X")),
            (sym("T'"), Term::time_var("T", 2)),
        ]);
        assert_eq!(s, expected);
        assert_eq!(s.apply(&a).unwrap(), s.apply(&b).unwrap());
        assert_eq!(s.apply(&b).unwrap(), a);
    }

    #[test]
    fn mgu_subtracts_offsets() {
        let a = atom("Flag", vec![Term::constant("wt25"), Term::Time(2)]);
        let b = atom("Flag", vec![Term::var("X"), Term::time_var("T", 1)]);
        let s = mgu(&a, &b).unwrap();
        assert_eq!(
            s,
            Substitution::from_pairs([
                (sym("X"), Term::constant("wt25")),
                (sym("T"), Term::Time(1)),
            ])
        );
    }

    #[test]
    fn mgu_rejects_negative_time() {
        let a = atom("Flag", vec![Term::constant("wt25"), Term::Time(0)]);
        let b = atom("Flag", vec![Term::var("X"), Term::time_var("T", 1)]);
        assert!(matches!(mgu(&a, &b), Err(KernelError::NoUnifier { .. })));
    }

    #[test]
    fn mgu_rejects_clashes() {
        let a = atom("P", vec![Term::constant("a")]);
        let b = atom("P", vec![Term::constant("b")]);
        assert!(mgu(&a, &b).is_err());
        let c = atom("Q", vec![Term::constant("a")]);
        assert!(mgu(&a, &c).is_err());
        let d = atom("P", vec![Term::time_var("T", 0), Term::time_var("T", 1)]);
        let e = atom("P", vec![Term::time_var("S", 0), Term::time_var("S", 0)]);
        assert!(mgu(&d, &e).is_err());
    }

    #[test]
    fn mgu_is_idempotent_with_repeated_vars() {
        let a = atom("P", vec![Term::var("X"), Term::var("X")]);
        let b = atom("P", vec![Term::var("Y"), Term::constant("c")]);
        let s = mgu(&a, &b).unwrap();
        assert_eq!(s.apply(&a).unwrap(), s.apply(&b).unwrap());
        assert_eq!(s.compose(&s).unwrap(), s);
    }

    #[test]
    fn matcher_keeps_shared_names() {
        let p = atom("P", vec![Term::var("X"), Term::time_var("T", 1)]);
        let t = atom("P", vec![Term::var("X"), Term::time_var("T", 1)]);
        let mut m = Matcher::new();
        assert!(m.match_atom(&p, &t));
        let q = atom("Q", vec![Term::var("X")]);
        let r = atom("Q", vec![Term::var("Z")]);
        assert!(!m.match_atom(&q, &r));
    }

    #[test]
    fn future_atoms() {
        let ground = atom("Temp", vec![Term::constant("wt25"), Term::constant("high"), Term::Time(2)]);
        assert!(is_future_atom(&ground, 1));
        assert!(!is_future_atom(&ground, 2));
        let schematic = atom(
            "Temp",
            vec![Term::var("X"), Term::constant("high"), Term::time_var("T", 2)],
        );
        assert!(is_future_atom(&schematic, 100));
        let rigid = atom("Owner", vec![Term::constant("a")]);
        assert!(!is_future_atom(&rigid, -1));
    }
}
