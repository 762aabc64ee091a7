use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::kernel::{Atom, Literal, Substitution, Sym, Term};

/// Lower bounds on time variables.
///
/// Every time term met along a derivation must denote a natural number, so a
/// term `T-2` constrains `T >= 2`. The bounds travel with schematic answers
/// and are enforced when time variables get bound.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TimeFloors(BTreeMap<Sym, u64>);

impl TimeFloors {
    pub fn new() -> TimeFloors {
        TimeFloors::default()
    }

    pub fn get(&self, var: &str) -> u64 {
        self.0.get(var).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Sym, &u64)> {
        self.0.iter()
    }

    pub fn raise(&mut self, var: &Sym, floor: u64) {
        if floor > self.get(var) {
            self.0.insert(var.clone(), floor);
        }
    }

    pub fn note_term(&mut self, t: &Term) {
        if let Term::TimeVar(v, k) = t {
            if *k < 0 {
                self.raise(v, k.unsigned_abs());
            }
        }
    }

    pub fn note_atom(&mut self, a: &Atom) {
        if let Some(t) = a.time() {
            self.note_term(t);
        }
    }

    pub fn note_literals<'a>(&mut self, lits: impl IntoIterator<Item = &'a Literal>) {
        for l in lits {
            self.note_atom(&l.atom);
        }
    }

    /// Transports the bounds along `s`; `None` when a bound is violated.
    pub fn apply(&self, s: &Substitution) -> Option<TimeFloors> {
        let mut out = TimeFloors::new();
        for (v, &f) in &self.0 {
            match s.apply_term(&Term::TimeVar(v.clone(), -(f as i64))).ok()? {
                Term::TimeVar(w, j) => {
                    if j < 0 {
                        out.raise(&w, j.unsigned_abs());
                    }
                }
                Term::Time(_) => {}
                _ => return None,
            }
        }
        Some(out)
    }

    /// Whether `s` satisfies every bound on the variables it binds.
    pub fn admits(&self, s: &Substitution) -> bool {
        self.apply(s).is_some()
    }

    /// Drops bounds on variables outside `keep`.
    pub fn retain(&mut self, keep: impl Fn(&Sym) -> bool) {
        self.0.retain(|v, _| keep(v));
    }

    pub fn rename(&self, f: impl Fn(&Sym) -> Sym) -> TimeFloors {
        TimeFloors(self.0.iter().map(|(v, k)| (f(v), *k)).collect())
    }

    /// Whether every bound of `self` is implied by `other`.
    pub fn weaker_than(&self, other: &TimeFloors) -> bool {
        self.0.iter().all(|(v, &f)| other.get(v) >= f)
    }
}

impl fmt::Display for TimeFloors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(v, k)| format!("{v}>={k}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::sym;

    #[test]
    fn bounds_follow_bindings() {
        let mut fl = TimeFloors::new();
        fl.note_term(&Term::time_var("T", -2));
        assert_eq!(fl.get("T"), 2);
        let shift = Substitution::from_pairs([(sym("T"), Term::time_var("S", 1))]);
        assert_eq!(fl.apply(&shift).unwrap().get("S"), 1);
        let low = Substitution::from_pairs([(sym("T"), Term::Time(1))]);
        assert!(!fl.admits(&low));
        let ok = Substitution::from_pairs([(sym("T"), Term::Time(2))]);
        assert!(fl.admits(&ok));
    }
}
