//! Tick-by-tick maintenance of schematic supported answers.

mod ground;
mod history;
mod negation;
mod steps;
mod tuple;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::kernel::{Atom, Matcher, Substitution, Sym, Term};
use crate::parser::TickBlock;
use crate::preprocess::{QueryFamily, QueryId};

pub use ground::{GroundAnswer, GroundView};
pub use history::{contradictory, History};
pub use negation::Verdict;
pub use tuple::AnswerTuple;

use negation::resolve_negations;
use steps::{multivar_fixpoint, seed, settle, Ctx};
use tuple::Content;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Retention {
    #[default]
    KeepAll,
    KeepLast(usize),
}

#[derive(Clone, Debug, Default)]
pub struct OnlineConfig {
    /// Object constants over which negated literals with free variables are
    /// split; extended with the program's and the stream's constants.
    pub universe: Vec<Sym>,
    pub retention: Retention,
    /// Pending answers whose time is this far behind the tick are dropped.
    pub delay: Option<u64>,
    /// Facts older than this many ticks are forgotten.
    pub window: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscardReason {
    UnmatchedPremise,
    DefeatedByNegation,
    DelayExceeded,
}

impl fmt::Display for DiscardReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiscardReason::UnmatchedPremise => "unmatched premise at closed timestamp",
            DiscardReason::DefeatedByNegation => "defeated by negation",
            DiscardReason::DelayExceeded => "delay exceeded",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discarded {
    pub tuple: AnswerTuple,
    pub reason: DiscardReason,
}

/// Changes to the root query's answers made by one tick.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TickDelta {
    pub tick: u64,
    pub definite: Vec<AnswerTuple>,
    pub supported: Vec<AnswerTuple>,
    pub updated: Vec<AnswerTuple>,
    pub discarded: Vec<Discarded>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OnlineError {
    #[error("expected tick {expected}, got tick {found}")]
    OutOfOrderTick { expected: u64, found: u64 },
    #[error("fact {fact} is not stamped {tick}")]
    Timestamp { fact: String, tick: u64 },
}

type Key = (Substitution, u64);

fn key(t: &AnswerTuple) -> Key {
    (t.theta.clone(), t.born_at)
}

#[derive(Clone, Debug)]
pub struct EvalState {
    family: Arc<QueryFamily>,
    config: OnlineConfig,
    next: u64,
    history: History,
    static_facts: HashSet<Atom>,
    universe: BTreeSet<Sym>,
    vars: BTreeMap<QueryId, BTreeSet<Sym>>,
    order: Vec<QueryId>,
    live: BTreeMap<QueryId, Vec<AnswerTuple>>,
    definite: BTreeMap<QueryId, Vec<AnswerTuple>>,
    archived: BTreeMap<QueryId, HashSet<Content>>,
}

impl EvalState {
    pub fn new(family: Arc<QueryFamily>, config: OnlineConfig) -> EvalState {
        let program = family.program();
        let mut universe: BTreeSet<Sym> = program.constants();
        universe.extend(config.universe.iter().cloned());
        let static_facts = program.static_facts().cloned().collect();
        let mut order: Vec<QueryId> = family.aux_order().into_iter().map(QueryId::Aux).collect();
        order.push(QueryId::Root);
        let vars = family
            .ids()
            .map(|id| {
                let v = family.query(&id).map(|q| q.vars()).unwrap_or_default();
                (id, v)
            })
            .collect();
        EvalState {
            family,
            config,
            next: 0,
            history: History::new(),
            static_facts,
            universe,
            vars,
            order,
            live: BTreeMap::new(),
            definite: BTreeMap::new(),
            archived: BTreeMap::new(),
        }
    }

    /// The last closed tick; `-1` before the first one.
    pub fn tick(&self) -> i64 {
        self.next as i64 - 1
    }

    pub fn family(&self) -> &QueryFamily {
        &self.family
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn universe(&self) -> Vec<Sym> {
        self.universe.iter().cloned().collect()
    }

    pub fn live(&self, id: &QueryId) -> &[AnswerTuple] {
        self.live.get(id).map_or(&[], |v| v.as_slice())
    }

    pub fn definite(&self, id: &QueryId) -> &[AnswerTuple] {
        self.definite.get(id).map_or(&[], |v| v.as_slice())
    }

    /// `S_τ` for a query: pending and definite tuples.
    pub fn snapshot(&self, id: &QueryId) -> Vec<AnswerTuple> {
        let mut out: Vec<AnswerTuple> = self.live(id).iter().chain(self.definite(id)).cloned().collect();
        out.sort();
        out
    }

    /// Number of pending tuples over all queries.
    pub fn live_len(&self) -> usize {
        self.live.values().map(Vec::len).sum()
    }

    /// Closes the next tick with the facts of `block`.
    pub fn tick_with(&mut self, block: &TickBlock) -> Result<TickDelta, OnlineError> {
        if block.tick != self.next {
            return Err(OnlineError::OutOfOrderTick {
                expected: self.next,
                found: block.tick,
            });
        }
        for f in &block.facts {
            if f.timestamp() != Some(block.tick) {
                return Err(OnlineError::Timestamp {
                    fact: f.to_string(),
                    tick: block.tick,
                });
            }
        }
        for f in &block.facts {
            for t in &f.args {
                if let Term::Const(c) = t {
                    self.universe.insert(c.clone());
                }
            }
            self.history.insert(f.clone());
        }
        let tick = block.tick;
        let mut delta = TickDelta {
            tick,
            ..TickDelta::default()
        };
        for id in self.order.clone() {
            let prev = self.live.remove(&id).unwrap_or_default();
            let (live, definite, reasons) = self.process(&id, &prev, tick);
            if id == QueryId::Root {
                delta = diff(tick, &prev, &live, &definite, &reasons);
            }
            self.live.insert(id.clone(), live);
            self.definite.entry(id).or_default().extend(definite);
        }
        if let Retention::KeepLast(n) = self.config.retention {
            let archive = self.definite.entry(QueryId::Root).or_default();
            if archive.len() > n {
                archive.drain(..archive.len() - n);
            }
        }
        if let Some(w) = self.config.window {
            if tick > w {
                self.history.prune_before(tick - w);
            }
        }
        self.next += 1;
        Ok(delta)
    }

    fn process(
        &mut self,
        id: &QueryId,
        prev: &[AnswerTuple],
        tick: u64,
    ) -> (Vec<AnswerTuple>, Vec<AnswerTuple>, HashMap<Key, DiscardReason>) {
        let vars = self.vars[id].clone();
        let ctx = Ctx {
            id,
            vars: &vars,
            history: &self.history,
            tick,
        };
        let entries = self.family.preconditions.get(id).map_or(&[][..], |v| v.as_slice());
        let mut reasons = HashMap::new();
        let mut cands = seed(&ctx, entries);
        for t in prev {
            let s = settle(&ctx, t);
            if s.is_empty() {
                reasons.insert(key(t), DiscardReason::UnmatchedPremise);
            }
            cands.extend(s);
        }
        if cands.iter().any(|t| !t.free_time_vars().is_empty()) {
            cands = multivar_fixpoint(&ctx, cands);
        }
        if self.family.program().has_negation() {
            let universe = self.universe();
            let mut resolved = Vec::new();
            for t in cands {
                let k = key(&t);
                let mut judge = |a: &Atom| self.judge(a, tick);
                let r = resolve_negations(&ctx, t, &universe, &mut judge);
                if r.is_empty() {
                    reasons.entry(k).or_insert(DiscardReason::DefeatedByNegation);
                }
                resolved.extend(r);
            }
            cands = resolved;
        }
        cands.retain(|t| {
            let bad = contradictory(t.evidence.iter().chain(&t.hypotheses));
            if bad {
                reasons.entry(key(t)).or_insert(DiscardReason::DefeatedByNegation);
            }
            !bad
        });
        if let Some(d) = self.config.delay {
            let main = self.family.query(id).and_then(|q| q.main_time_var().cloned());
            cands.retain(|t| {
                let late = match main.as_ref().and_then(|m| t.theta.get(m)) {
                    Some(Term::Time(n)) => !t.is_definite() && n + d < tick,
                    _ => false,
                };
                if late {
                    reasons.insert(key(t), DiscardReason::DelayExceeded);
                }
                !late
            });
        }
        let mut best: BTreeMap<Content, AnswerTuple> = BTreeMap::new();
        for t in cands {
            match best.get(&t.content()) {
                Some(b) if b.born_at <= t.born_at => {}
                _ => {
                    best.insert(t.content(), t);
                }
            }
        }
        let archived = self.archived.entry(id.clone()).or_default();
        let mut live = Vec::new();
        let mut definite = Vec::new();
        for (c, t) in best {
            if !t.is_definite() {
                live.push(t);
            } else if archived.insert(c) {
                definite.push(t);
            }
        }
        (live, definite, reasons)
    }

    /// Whether the ground atom `a` holds at `tick`, as far as the history
    /// and the auxiliary queries tell.
    pub fn judge(&self, a: &Atom, tick: u64) -> Verdict {
        let program = self.family.program();
        if program.is_edb(&a.pred) {
            return if self.history.contains(a) || self.static_facts.contains(a) {
                Verdict::Holds
            } else {
                Verdict::Fails
            };
        }
        let Some(aux) = self.family.auxiliaries.get(&a.pred) else {
            return Verdict::Open;
        };
        let id = QueryId::Aux(a.pred.clone());
        let instance = |t: &AnswerTuple| -> bool {
            let Ok(pattern) = t.theta.apply(&aux.goal) else {
                return false;
            };
            let mut m = Matcher::new();
            m.match_atom(&pattern, a) && t.floors.admits(&m.to_substitution())
        };
        if self.definite(&id).iter().any(instance) {
            return Verdict::Holds;
        }
        let entries = self.family.preconditions.get(&id).map_or(&[][..], |v| v.as_slice());
        for e in entries {
            let Ok(pattern) = e.theta.apply(&aux.goal) else { continue };
            let mut m = Matcher::new();
            if !m.match_atom(&pattern, a) {
                continue;
            }
            let s = m.to_substitution();
            if !e.floors.admits(&s) {
                continue;
            }
            let mut premises = e.premises().peekable();
            if premises.peek().is_none() {
                return Verdict::Holds;
            }
            let future = premises.all(|l| match s.apply(&l.atom).ok().and_then(|x| x.time().cloned()) {
                Some(Term::Time(n)) => n > tick,
                Some(_) => true,
                None => false,
            });
            if future {
                return Verdict::Open;
            }
        }
        if self.live(&id).iter().any(instance) {
            return Verdict::Open;
        }
        Verdict::Fails
    }
}

fn diff(
    tick: u64,
    prev: &[AnswerTuple],
    live: &[AnswerTuple],
    definite: &[AnswerTuple],
    reasons: &HashMap<Key, DiscardReason>,
) -> TickDelta {
    let prev_keys: HashMap<Key, Vec<Content>> = prev.iter().fold(HashMap::new(), |mut m, t| {
        m.entry(key(t)).or_default().push(t.content());
        m
    });
    let kept: HashSet<Key> = live.iter().chain(definite).map(key).collect();
    let mut delta = TickDelta {
        tick,
        definite: definite.to_vec(),
        ..TickDelta::default()
    };
    for t in live {
        match prev_keys.get(&key(t)) {
            None if !t.evidence.is_empty() => delta.supported.push(t.clone()),
            None => {}
            Some(cs) if !cs.contains(&t.content()) => delta.updated.push(t.clone()),
            Some(_) => {}
        }
    }
    for t in prev {
        if !kept.contains(&key(t)) {
            let reason = reasons.get(&key(t)).copied().unwrap_or(DiscardReason::UnmatchedPremise);
            delta.discarded.push(Discarded {
                tuple: t.clone(),
                reason,
            });
        }
    }
    delta.discarded.dedup_by(|a, b| key(&a.tuple) == key(&b.tuple));
    delta
}
