use crate::kernel::{Atom, Literal, Matcher, Term};
use crate::resolution::ComputedAnswer;

/// The tuple of answer terms as a pseudo-atom, so that answer substitutions
/// can be compared with one-way matching.
fn answer_atom(vars: &[Term], a: &ComputedAnswer) -> Atom {
    Atom {
        pred: "answer".into(),
        args: vars
            .iter()
            .map(|v| match v.variable().and_then(|x| a.theta.get(x)) {
                Some(t) => t.clone(),
                None => v.clone(),
            })
            .collect(),
    }
}

/// The variables of a query goal, as terms of their sort.
fn goal_vars(goal: &Atom) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    for t in &goal.args {
        let v = match t {
            Term::Var(v) => Term::Var(v.clone()),
            Term::TimeVar(v, _) => Term::TimeVar(v.clone(), 0),
            _ => continue,
        };
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn match_premises(m: &Matcher, pattern: &[Literal], target: &[Literal]) -> Option<Matcher> {
    let Some((first, rest)) = pattern.split_first() else {
        return Some(m.clone());
    };
    for t in target.iter().filter(|t| t.negated == first.negated) {
        let mut next = m.clone();
        if next.match_atom(&first.atom, &t.atom) {
            if let Some(done) = match_premises(&next, rest, target) {
                return Some(done);
            }
        }
    }
    None
}

/// Whether `general` subsumes `specific`: some γ maps the answer of
/// `general` onto that of `specific` and its premises into those of
/// `specific`, with its time bounds implied.
pub(crate) fn subsumes(vars: &[Term], general: &ComputedAnswer, specific: &ComputedAnswer) -> bool {
    let mut m = Matcher::new();
    if !m.match_atom(&answer_atom(vars, general), &answer_atom(vars, specific)) {
        return false;
    }
    // Query variables left free by `general` are bound by the answer atom
    // already; the remaining pattern variables are its residual ones.
    let Some(m) = match_premises(&m, &general.premises, &specific.premises) else {
        return false;
    };
    match general.floors.apply(&m.to_substitution()) {
        Some(f) => f.weaker_than(&specific.floors),
        None => false,
    }
}

/// Removes every answer subsumed by another one; among equivalent answers
/// the first is kept. The result is an antichain.
pub fn subsumption_minimize(goal: &Atom, entries: Vec<ComputedAnswer>) -> Vec<ComputedAnswer> {
    let vars = goal_vars(goal);
    let n = entries.len();
    let mut keep = vec![true; n];
    for i in 0..n {
        for j in 0..n {
            if i == j || !keep[j] {
                continue;
            }
            if subsumes(&vars, &entries[j], &entries[i])
                && !(j > i && subsumes(&vars, &entries[i], &entries[j]))
            {
                keep[i] = false;
                break;
            }
        }
    }
    entries
        .into_iter()
        .zip(keep)
        .filter_map(|(e, k)| k.then_some(e))
        .collect()
}
