use std::collections::{BTreeMap, BTreeSet, VecDeque};

use hypo_core::kernel::{Program, Substitution, Sym, Term};
use hypo_core::oracle::{enumerate_hans, enumerate_sans, ground_consequences, HypotheticalAnswer};
use hypo_core::parse_program;
use hypo_core::preprocess::check_t_stratification;

use super::*;

/// Compares the engine's ground answers with the oracle at every tick.
pub fn compare(seed: u64, negations: usize) -> Result<(), String> {
    let inst = random_instance(seed, negations);
    let l = load(&inst);
    let mut st = engine(&l.query);
    for b in &l.blocks {
        st.tick_with(b).map_err(|e| e.to_string())?;
        let tau = b.tick as i64;
        let view = st.ground_view(HORIZON);
        let got = strings(view.supported());
        let want = strings(enumerate_sans(&l.query, &l.world, tau).map_err(|e| e.to_string())?);
        let got_h: BTreeSet<String> = view
            .hypothetical()
            .into_iter()
            .map(|(t, h)| HypotheticalAnswer { theta: t, hypotheses: h }.to_string())
            .collect();
        let want_h = strings(enumerate_hans(&l.query, &l.world, tau).map_err(|e| e.to_string())?);
        if got != want || got_h != want_h {
            return Err(format!(
                "seed {seed} tick {tau}\n{}{}\nsupported engine-only: {:?}\nsupported oracle-only: {:?}\nhans engine-only: {:?}\nhans oracle-only: {:?}",
                inst.program,
                inst.stream,
                got.difference(&want).collect::<Vec<_>>(),
                want.difference(&got).collect::<Vec<_>>(),
                got_h.difference(&want_h).collect::<Vec<_>>(),
                want_h.difference(&got_h).collect::<Vec<_>>(),
            ));
        }
    }
    Ok(())
}

/// Every ground hypothetical answer entails the query and loses it when any
/// single hypothesis is dropped; the set of possible answers only shrinks.
pub fn minimality(seed: u64) -> Result<(), String> {
    let inst = random_instance(seed, 0);
    let l = load(&inst);
    let mut st = engine(&l.query);
    let mut prev: Option<BTreeSet<Substitution>> = None;
    for b in &l.blocks {
        st.tick_with(b).map_err(|e| e.to_string())?;
        let history = l.world.history(b.tick as i64);
        let view = st.ground_view(HORIZON);
        for (theta, hyps) in view.hypothetical() {
            let goal = theta.apply(&l.query.goal).map_err(|e| e.to_string())?;
            let entails = |hs: &BTreeSet<_>| -> Result<bool, String> {
                let mut facts = history.clone();
                facts.extend(hs.iter().map(|h: &hypo_core::Literal| h.atom.clone()));
                let model = ground_consequences(&l.query.program, &facts, &l.world).map_err(|e| e.to_string())?;
                Ok(model.contains(&goal))
            };
            if !entails(&hyps)? {
                return Err(format!("seed {seed}: {theta} with {hyps:?} does not entail the query"));
            }
            for h in &hyps {
                let mut smaller = hyps.clone();
                smaller.remove(h);
                if entails(&smaller)? {
                    return Err(format!("seed {seed}: {theta} with {hyps:?} is not minimal"));
                }
            }
        }
        let thetas = view.hypothetical_thetas();
        if let Some(p) = &prev {
            if let Some(new) = thetas.difference(p).next() {
                return Err(format!("seed {seed} tick {}: {new} became possible", b.tick));
            }
        }
        prev = Some(thetas);
    }
    Ok(())
}

type Node = (Sym, Option<u64>);

/// Exceeds every lower bound a rule with offsets within ±2 puts on its time
/// variables.
const FLOOR: u64 = 8;

/// Dependency edges of the temporal closure restricted to `[lo, hi]`, read
/// off the ground rule instances.
fn truncated_closure(p: &Program, lo: u64, hi: u64) -> BTreeSet<(Node, Node, bool)> {
    let reach = hi + 8;
    let mut edges = BTreeSet::new();
    for r in p.rules.iter().filter(|r| !r.is_fact()) {
        let vars: Vec<Sym> = r.time_vars().into_iter().collect();
        let mut subs: Vec<Vec<(Sym, Term)>> = vec![Vec::new()];
        for v in &vars {
            subs = subs
                .into_iter()
                .flat_map(|s| {
                    (0..=reach).map(move |n| {
                        let mut s = s.clone();
                        s.push((v.clone(), Term::Time(n)));
                        s
                    })
                })
                .collect();
        }
        for s in subs {
            let s = Substitution::from_pairs(s);
            let (Ok(head), Ok(body)) = (s.apply(&r.head), s.apply_all(&r.body)) else {
                continue;
            };
            let h = (head.pred.clone(), head.timestamp());
            let outside = |t: Option<u64>| t.is_some_and(|t| t < lo || t > hi);
            if outside(h.1) {
                continue;
            }
            for l in body {
                let b = (l.atom.pred.clone(), l.atom.timestamp());
                if outside(b.1) || p.is_edb(&b.0) {
                    continue;
                }
                edges.insert((h.clone(), b, l.negated));
            }
        }
    }
    edges
}

/// Whether some node reaches a copy of itself at the same or a later time
/// through a negative edge. The closure is invariant under time shifts, so
/// such a path repeats forever.
fn unstratified(edges: &BTreeSet<(Node, Node, bool)>) -> bool {
    let mut adj: BTreeMap<&Node, Vec<(&Node, bool)>> = BTreeMap::new();
    for (h, b, n) in edges {
        adj.entry(h).or_default().push((b, *n));
    }
    for start in adj.keys() {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([(*start, false)]);
        while let Some((n, neg)) = queue.pop_front() {
            for &(m, e) in adj.get(n).into_iter().flatten() {
                let state = (m, neg || e);
                if state.1 && m.0 == start.0 && m.1 >= start.1 {
                    return true;
                }
                if seen.insert(state) {
                    queue.push_back(state);
                }
            }
        }
    }
    false
}

pub fn agreement(seed: u64, width: u64) -> Result<(), String> {
    let text = random_negation_program(seed);
    let parsed = parse_program(&text).map_err(|e| format!("{e}\n{text}"))?;
    let report = check_t_stratification(&parsed.program);
    // Away from time 0 no instance is cut off by a negative time point.
    let window = truncated_closure(&parsed.program, FLOOR, FLOOR + width);
    if report.stratified == unstratified(&window) {
        return Err(format!("verdict {} disagrees\n{text}", report.stratified));
    }
    if let Some(strata) = report.strata(6) {
        for (h, b, neg) in &truncated_closure(&parsed.program, 0, 6) {
            let (Some(lh), Some(lb)) = (strata.get(h), strata.get(b)) else {
                return Err(format!("missing stratum for {h:?} or {b:?}\n{text}"));
            };
            if lh < lb || (*neg && lh == lb) {
                return Err(format!("invalid strata on {h:?} -> {b:?}\n{text}"));
            }
        }
    } else if report.stratified {
        return Err(format!("stratified without strata\n{text}"));
    }
    Ok(())
}
