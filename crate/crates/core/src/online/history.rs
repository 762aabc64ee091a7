use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::kernel::{Atom, Literal, Matcher, Substitution, Sym, Term};

/// The facts seen so far, indexed by timestamp.
#[derive(Clone, Debug, Default)]
pub struct History {
    by_time: BTreeMap<u64, Vec<Atom>>,
    index: HashSet<Atom>,
    constants: BTreeSet<Sym>,
}

impl History {
    pub fn new() -> History {
        History::default()
    }

    pub fn insert(&mut self, a: Atom) {
        if self.index.insert(a.clone()) {
            for t in &a.args {
                if let Term::Const(c) = t {
                    self.constants.insert(c.clone());
                }
            }
            let n = a.timestamp().unwrap_or(0);
            self.by_time.entry(n).or_default().push(a);
        }
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.index.contains(a)
    }

    pub fn at(&self, time: u64) -> &[Atom] {
        self.by_time.get(&time).map_or(&[], |v| v.as_slice())
    }

    pub fn constants(&self) -> &BTreeSet<Sym> {
        &self.constants
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.by_time.values().flatten()
    }

    /// Forgets facts stamped before `time`.
    pub fn prune_before(&mut self, time: u64) {
        let keep = self.by_time.split_off(&time);
        for a in self.by_time.values().flatten() {
            self.index.remove(a);
        }
        self.by_time = keep;
    }

    /// Every substitution mapping the ground-time atoms `m` onto stored facts,
    /// extending `base`.
    pub fn match_all(&self, m: &[&Atom], base: &Substitution) -> Vec<Substitution> {
        let mut out = Vec::new();
        let mut stack = vec![(0usize, Matcher::from_substitution(base))];
        while let Some((i, matcher)) = stack.pop() {
            if i == m.len() {
                out.push(matcher.into_substitution());
                continue;
            }
            let Some(time) = m[i].timestamp() else {
                continue;
            };
            for f in self.at(time).iter().filter(|f| f.pred == m[i].pred) {
                let mut next = matcher.clone();
                if next.match_atom(m[i], f) {
                    stack.push((i + 1, next));
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Whether `lits` holds a literal together with its complement.
pub fn contradictory<'a>(lits: impl IntoIterator<Item = &'a Literal>) -> bool {
    let mut pos = HashSet::new();
    let mut neg = HashSet::new();
    for l in lits {
        if !l.atom.is_ground() {
            continue;
        }
        if l.negated {
            neg.insert(&l.atom);
        } else {
            pos.insert(&l.atom);
        }
    }
    pos.iter().any(|a| neg.contains(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::sym;

    fn temp(x: Term, t: Term) -> Atom {
        Atom::new("Temp", vec![x, Term::constant("high"), t])
    }

    #[test]
    fn matches_by_timestamp() {
        let mut h = History::new();
        h.insert(temp(Term::constant("a"), Term::Time(1)));
        h.insert(temp(Term::constant("b"), Term::Time(1)));
        h.insert(temp(Term::constant("a"), Term::Time(2)));
        let pat = temp(Term::var("X"), Term::Time(1));
        let got = h.match_all(&[&pat], &Substitution::new());
        assert_eq!(got.len(), 2);
        let both = [&pat, &temp(Term::var("X"), Term::Time(2))];
        let got = h.match_all(&both, &Substitution::new());
        assert_eq!(got, vec![Substitution::from_pairs([(sym("X"), Term::constant("a"))])]);
        h.prune_before(2);
        assert_eq!(h.len(), 1);
        assert!(h.at(1).is_empty());
    }
}
