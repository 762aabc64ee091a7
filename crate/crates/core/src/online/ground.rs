use std::collections::{BTreeMap, BTreeSet};

use super::history::contradictory;
use super::negation::Verdict;
use super::{AnswerTuple, EvalState};
use crate::kernel::{Literal, Matcher, Substitution, Sym, Term};
use crate::preprocess::{PreconditionEntry, QueryId};

/// A ground supported answer `⟨θ, H, E⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAnswer {
    pub theta: Substitution,
    pub hypotheses: BTreeSet<Literal>,
    pub evidence: BTreeSet<Literal>,
}

impl std::fmt::Display for GroundAnswer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let list = |ls: &BTreeSet<Literal>| ls.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ");
        write!(f, "<{}, H={{{}}}, E={{{}}}>", self.theta, list(&self.hypotheses), list(&self.evidence))
    }
}

/// Ground instances of the root query's answers up to a time horizon.
pub struct GroundView<'a> {
    state: &'a EvalState,
    tau: i64,
    horizon: u64,
    universe: Vec<Sym>,
    vars: BTreeSet<Sym>,
}

fn collect_vars(t: &AnswerTuple) -> (BTreeSet<Sym>, BTreeSet<Sym>) {
    let mut objects = BTreeSet::new();
    let mut times = BTreeSet::new();
    let terms = t
        .theta
        .iter()
        .map(|(_, t)| t)
        .chain(t.hypotheses.iter().flat_map(|l| l.atom.args.iter()));
    for term in terms {
        match term {
            Term::Var(v) => {
                objects.insert(v.clone());
            }
            Term::TimeVar(v, _) => {
                times.insert(v.clone());
            }
            _ => {}
        }
    }
    (objects, times)
}

fn in_range(l: &Literal, lo: i64, hi: u64) -> bool {
    match l.atom.time() {
        Some(Term::Time(n)) => (*n as i64) > lo && *n <= hi,
        Some(_) => false,
        None => true,
    }
}

impl<'a> GroundView<'a> {
    pub fn new(state: &'a EvalState, horizon: u64) -> GroundView<'a> {
        let vars = state.family().root.vars();
        GroundView {
            state,
            tau: state.tick(),
            horizon,
            universe: state.universe(),
            vars,
        }
    }

    fn answer_in_horizon(&self, theta: &Substitution) -> bool {
        theta.iter().all(|(_, t)| !matches!(t, Term::Time(n) if *n > self.horizon))
    }

    fn groundings(&self, objects: &BTreeSet<Sym>, times: &BTreeSet<Sym>, max_time: u64) -> Vec<Substitution> {
        let mut out = vec![Substitution::new()];
        for v in objects {
            let vals: Vec<Term> = self.universe.iter().map(|c| Term::Const(c.clone())).collect();
            out = extend(out, v, &vals);
        }
        for v in times {
            let vals: Vec<Term> = (0..=max_time).map(Term::Time).collect();
            out = extend(out, v, &vals);
        }
        out
    }

    /// Decides the hypotheses of a ground instance stamped at or before the
    /// tick; `None` when the instance is not valid.
    fn close(&self, t: &mut AnswerTuple) -> Option<()> {
        let tick = u64::try_from(self.tau).ok();
        let mut keep = Vec::new();
        for h in std::mem::take(&mut t.hypotheses) {
            let past = match (h.atom.time(), tick) {
                (Some(Term::Time(n)), Some(k)) => *n <= k,
                _ => false,
            };
            if !past {
                keep.push(h);
                continue;
            }
            match (h.negated, self.state.judge(&h.atom, tick.unwrap())) {
                (false, Verdict::Holds) | (true, Verdict::Fails) => t.evidence.push(h),
                (_, Verdict::Open) if h.negated => keep.push(h),
                _ => return None,
            }
        }
        t.hypotheses = keep;
        t.normalize();
        Some(())
    }

    fn instances(&self, t: &AnswerTuple) -> Vec<GroundAnswer> {
        let (objects, times) = collect_vars(t);
        let mut out = Vec::new();
        for s in self.groundings(&objects, &times, self.horizon) {
            let Some(mut g) = t.apply(&s, &self.vars) else { continue };
            if self.close(&mut g).is_none() {
                continue;
            }
            if !g.theta.is_ground() || !g.hypotheses.iter().all(|h| h.atom.is_ground()) {
                continue;
            }
            if !self.answer_in_horizon(&g.theta) {
                continue;
            }
            if !g.hypotheses.iter().all(|h| h.negated || in_range(h, self.tau, self.horizon)) {
                continue;
            }
            if !g.hypotheses.iter().all(|h| in_range(h, -1, self.horizon)) {
                continue;
            }
            if contradictory(g.evidence.iter().chain(&g.hypotheses)) {
                continue;
            }
            out.push(GroundAnswer {
                theta: g.theta,
                hypotheses: g.hypotheses.into_iter().collect(),
                evidence: g.evidence.into_iter().collect(),
            });
        }
        out
    }

    fn candidates(&self) -> BTreeSet<GroundAnswer> {
        let root = QueryId::Root;
        self.state
            .live(&root)
            .iter()
            .chain(self.state.definite(&root))
            .flat_map(|t| self.instances(t))
            .collect()
    }

    fn entries(&self) -> &[PreconditionEntry] {
        self.state
            .family()
            .preconditions
            .get(&QueryId::Root)
            .map_or(&[], |v| v.as_slice())
    }

    /// Whether some precondition entry has an instance for `theta` whose
    /// premises are all future and included in `hyps`.
    fn future_instance_within(&self, theta: &Substitution, hyps: &BTreeSet<Literal>) -> bool {
        let goal = &self.state.family().root.goal;
        let Ok(target) = theta.apply(goal) else { return false };
        let future: Vec<&Literal> = hyps.iter().filter(|h| in_range(h, self.tau, self.horizon)).collect();
        self.entries().iter().any(|e| {
            let Ok(pattern) = e.theta.apply(goal) else { return false };
            let mut m = Matcher::new();
            if !m.match_atom(&pattern, &target) {
                return false;
            }
            let premises: Vec<&Literal> = e.premises().collect();
            embed(&m, &premises, &future).is_some_and(|m| e.floors.admits(&m.to_substitution()))
        })
    }

    /// The ground supported answers at the current tick.
    pub fn supported(&self) -> BTreeSet<GroundAnswer> {
        let cands = self.candidates();
        let mut by_theta: BTreeMap<&Substitution, Vec<&GroundAnswer>> = BTreeMap::new();
        for c in &cands {
            by_theta.entry(&c.theta).or_default().push(c);
        }
        let mut out = BTreeSet::new();
        for (theta, group) in by_theta {
            for c in group.iter().filter(|c| !c.evidence.is_empty()) {
                let beaten = group.iter().any(|o| {
                    (o.hypotheses.len() < c.hypotheses.len() && o.hypotheses.is_subset(&c.hypotheses))
                        || (o.hypotheses == c.hypotheses
                            && (o.evidence.is_empty()
                                || (o.evidence.len() < c.evidence.len() && o.evidence.is_subset(&c.evidence))))
                });
                if !beaten && !self.future_instance_within(theta, &c.hypotheses) {
                    out.insert((*c).clone());
                }
            }
        }
        out
    }

    /// Ground instances of the precondition entries lying entirely in the
    /// future.
    fn future_instances(&self) -> Vec<(Substitution, BTreeSet<Literal>)> {
        let root = &self.state.family().root;
        let mut out = Vec::new();
        for e in self.entries() {
            let base = AnswerTuple {
                query: QueryId::Root,
                theta: e.theta.clone(),
                evidence: Vec::new(),
                hypotheses: e.premises().cloned().collect(),
                born_at: 0,
                floors: e.floors.clone(),
            };
            let (mut objects, mut times) = collect_vars(&base);
            for t in &root.goal.args {
                match t {
                    Term::Var(v) if e.theta.get(v).is_none() => {
                        objects.insert(v.clone());
                    }
                    Term::TimeVar(v, _) if e.theta.get(v).is_none() => {
                        times.insert(v.clone());
                    }
                    _ => {}
                }
            }
            let reach = e
                .premises()
                .filter_map(|l| l.atom.time_var().map(|(_, k)| k.unsigned_abs()))
                .max()
                .unwrap_or(0);
            for s in self.groundings(&objects, &times, self.horizon + reach) {
                let Some(g) = base.apply(&s, &self.vars) else { continue };
                if g.theta.is_ground()
                    && g.hypotheses.iter().all(|h| in_range(h, self.tau, self.horizon))
                    && !contradictory(&g.hypotheses)
                    && self.answer_in_horizon(&g.theta)
                {
                    out.push((g.theta, g.hypotheses.into_iter().collect()));
                }
            }
        }
        out
    }

    /// The answers that are still possible: those of every live or definite
    /// instance and of every precondition instance lying entirely in the
    /// future.
    pub fn hypothetical_thetas(&self) -> BTreeSet<Substitution> {
        let mut out: BTreeSet<Substitution> = self.candidates().into_iter().map(|c| c.theta).collect();
        out.extend(self.future_instances().into_iter().map(|(t, _)| t));
        out
    }

    /// Ground hypothetical answers: for each answer, the inclusion-minimal
    /// hypothesis sets among all instances.
    pub fn hypothetical(&self) -> BTreeSet<(Substitution, BTreeSet<Literal>)> {
        let all: BTreeSet<(Substitution, BTreeSet<Literal>)> = self
            .candidates()
            .into_iter()
            .map(|c| (c.theta, c.hypotheses))
            .chain(self.future_instances())
            .collect();
        all.iter()
            .filter(|(t, h)| {
                !all.iter()
                    .any(|(u, g)| u == t && g.len() < h.len() && g.is_subset(h))
            })
            .cloned()
            .collect()
    }
}

fn extend(subs: Vec<Substitution>, v: &Sym, vals: &[Term]) -> Vec<Substitution> {
    subs.into_iter()
        .flat_map(|s| {
            vals.iter()
                .filter_map(move |t| s.compose(&Substitution::from_pairs([(v.clone(), t.clone())])).ok())
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Maps every pattern literal onto one of `target`, extending `m`.
fn embed(m: &Matcher, pattern: &[&Literal], target: &[&Literal]) -> Option<Matcher> {
    let Some((first, rest)) = pattern.split_first() else {
        return Some(m.clone());
    };
    for t in target.iter().filter(|t| t.negated == first.negated) {
        let mut next = m.clone();
        if next.match_atom(&first.atom, &t.atom) {
            if let Some(done) = embed(&next, rest, target) {
                return Some(done);
            }
        }
    }
    None
}

impl EvalState {
    pub fn ground_view(&self, horizon: u64) -> GroundView<'_> {
        GroundView::new(self, horizon)
    }
}
