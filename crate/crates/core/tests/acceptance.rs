mod common;

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::checks::{agreement, compare, minimality};
use hypo_core::kernel::{sym, Atom, Query, Term};
use hypo_core::parser::StreamParser;
use hypo_core::preprocess::{check_t_stratification, GroupKey};
use hypo_core::resolution::Limits;
use hypo_core::{
    build_query_family, parse_program, precompute_preconditions, EvalState, Mode, OnlineConfig,
    PreprocessConfig, PreprocessError, QueryId, TickBlock, TickDelta,
};

const PI_E: &str = "
    Temp(X, high, T) -> Flag(X, T).
    Flag(X, T), Flag(X, T+1) -> Cool(X, T+1).
    Cool(X, T), Flag(X, T+1) -> Shdn(X, T+1).
    Shdn(X, T) -> Malf(X, T-2).
";

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn query(text: &str) -> Result<Query, String> {
    let parsed = parse_program(text).map_err(|e| e.to_string())?;
    parsed.query().cloned().ok_or_else(|| "no query".to_string())
}

fn state(text: &str) -> Result<EvalState, String> {
    let q = query(text)?;
    let family = build_query_family(&q, &PreprocessConfig::default()).map_err(|e| e.to_string())?;
    Ok(EvalState::new(Arc::new(family), OnlineConfig::default()))
}

fn run(st: &mut EvalState, stream: &str) -> Result<Vec<TickDelta>, String> {
    let start = (st.tick() + 1) as u64;
    let mut p = StreamParser::new(Some(st.family().root.program.clone())).starting_at(start);
    let mut blocks = Vec::new();
    for line in stream.lines() {
        blocks.extend(p.push_line(line).map_err(|e| e.to_string())?);
    }
    blocks.extend(p.finish().map_err(|e| e.to_string())?);
    blocks
        .iter()
        .map(|b| st.tick_with(b).map_err(|e| e.to_string()))
        .collect()
}

fn shown(st: &EvalState) -> BTreeSet<String> {
    st.snapshot(&QueryId::Root).iter().map(|t| t.to_string()).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn expect_state(st: &EvalState, tick: u64, want: &[&str]) -> Result<(), String> {
    let got = shown(st);
    ensure(got == set(want), || format!("S_{tick} = {got:?}"))
}

fn running_example_trace() -> Outcome {
    let start = Instant::now();
    let mut st = state(&format!("{PI_E}\n#query Malf(X, T)."))?;
    run(&mut st, "@0\nTemp(wt25, high, 0).\n")?;
    expect_state(
        &st,
        0,
        &["<{T:=0, X:=wt25}, {Temp(wt25, high, 0)}, {Temp(wt25, high, 1), Temp(wt25, high, 2)}>"],
    )?;
    run(&mut st, "@1\nTemp(wt25, high, 1).\n")?;
    expect_state(
        &st,
        1,
        &[
            "<{T:=0, X:=wt25}, {Temp(wt25, high, 0), Temp(wt25, high, 1)}, {Temp(wt25, high, 2)}>",
            "<{T:=1, X:=wt25}, {Temp(wt25, high, 1)}, {Temp(wt25, high, 2), Temp(wt25, high, 3)}>",
        ],
    )?;
    let d = run(&mut st, "@2\nTemp(wt25, high, 2).\n")?;
    expect_state(
        &st,
        2,
        &[
            "<{T:=0, X:=wt25}, {Temp(wt25, high, 0), Temp(wt25, high, 1), Temp(wt25, high, 2)}, {}>",
            "<{T:=1, X:=wt25}, {Temp(wt25, high, 1), Temp(wt25, high, 2)}, {Temp(wt25, high, 3)}>",
            "<{T:=2, X:=wt25}, {Temp(wt25, high, 2)}, {Temp(wt25, high, 3), Temp(wt25, high, 4)}>",
        ],
    )?;
    let definite: Vec<String> = d[0].definite.iter().map(|t| t.theta.to_string()).collect();
    ensure(definite == ["{T:=0, X:=wt25}"], || format!("definite at tick 2: {definite:?}"))?;
    run(&mut st, "@3\n")?;
    expect_state(
        &st,
        3,
        &["<{T:=0, X:=wt25}, {Temp(wt25, high, 0), Temp(wt25, high, 1), Temp(wt25, high, 2)}, {}>"],
    )?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("S_0..S_3 exact, definite θ0 at tick 2, {elapsed:?}"))
}

fn preconditions_golden() -> Outcome {
    let q = query(&format!("{PI_E}\n#query Malf(X, T)."))?;
    let cfg = PreprocessConfig {
        mode: Mode::Strict,
        ..Default::default()
    };
    let p = precompute_preconditions(&q, &cfg).map_err(|e| e.to_string())?;
    ensure(p.len() == 1, || format!("{} entries", p.len()))?;
    let e = &p[0];
    let strings = |ls: &[hypo_core::Literal]| ls.iter().map(|l| l.to_string()).collect::<Vec<_>>();
    ensure(e.theta.is_empty(), || format!("theta {}", e.theta))?;
    ensure(e.m_groups.len() == 1, || format!("{} groups", e.m_groups.len()))?;
    let m = e.m_groups.get(&GroupKey::Var(sym("T"))).map(|g| strings(g));
    ensure(m.as_deref() == Some(&["Temp(X, high, T)".to_string()][..]), || format!("M_T {m:?}"))?;
    let f = strings(&e.f_rest);
    ensure(f == ["Temp(X, high, T+1)", "Temp(X, high, T+2)"], || format!("F {f:?}"))?;
    Ok("one entry ⟨∅, {Temp(X, high, T)}, {Temp(X, high, T+1), Temp(X, high, T+2)}⟩".into())
}

fn early_answer() -> Outcome {
    let mut st = state(&format!("{PI_E}\nTemp(X, 'n/a', T) -> Malf(X, T).\n#query Malf(X, T)."))?;
    run(&mut st, "@0\nTemp(wt25, high, 0).\n")?;
    let d = run(&mut st, "@1\nTemp(wt25, high, 1).\nTemp(wt42, 'n/a', 1).\n")?;
    let definite: Vec<String> = d[0].definite.iter().map(|t| t.to_string()).collect();
    ensure(definite == ["<{T:=1, X:=wt42}, {Temp(wt42, 'n/a', 1)}, {}>"], || {
        format!("definite at tick 1: {definite:?}")
    })?;
    let pending = "<{T:=0, X:=wt25}, {Temp(wt25, high, 0), Temp(wt25, high, 1)}, {Temp(wt25, high, 2)}>";
    ensure(shown(&st).contains(pending), || format!("missing {pending}"))?;
    Ok("wt42 definite at tick 1, wt25 still pending".into())
}

fn unbound_time_variables() -> Outcome {
    let text = format!("{PI_E}\nTemp(X, high, T1), Temp(X, 'n/a', T2) -> Defective(X, 0).\n#query Defective(X, T).");
    let p = precompute_preconditions(&query(&text)?, &PreprocessConfig::default()).map_err(|e| e.to_string())?;
    ensure(p.len() == 1, || format!("{} entries", p.len()))?;
    ensure(p[0].theta.to_string() == "{T:=0}", || format!("theta {}", p[0].theta))?;
    ensure(p[0].m_groups.len() == 2, || format!("{} groups", p[0].m_groups.len()))?;
    let mut st = state(&text)?;
    run(&mut st, "@0\nTemp(wt25, high, 0).\n")?;
    let want = "<{T:=0, X:=wt25}, {Temp(wt25, high, 0)}, {Temp(wt25, 'n/a', V1)}>";
    let got = shown(&st);
    ensure(got.contains(want), || format!("S_0 = {got:?}"))?;
    Ok(format!("two groups, θ {{T:=0}}, S_0 holds {want}"))
}

fn recursion_limits() -> Outcome {
    let q = query("S(X, T) -> S(X, T+1).\nR(X, T) -> S(X, T).\n#query S(X, T).")?;
    let strict = PreprocessConfig {
        mode: Mode::Strict,
        ..Default::default()
    };
    match precompute_preconditions(&q, &strict) {
        Err(PreprocessError::NotEligible { reason, .. }) if reason == "recursive" => {}
        other => return Err(format!("strict: {other:?}")),
    }
    let guarded = PreprocessConfig {
        mode: Mode::Guarded,
        limits: Limits {
            max_depth: 50,
            ..Limits::default()
        },
        universe: vec![],
    };
    let start = Instant::now();
    let result = precompute_preconditions(&q, &guarded);
    let elapsed = start.elapsed();
    match result {
        Err(PreprocessError::LimitExceeded { diagnosis, .. }) if diagnosis.contains("possible infinite recursion") => {}
        other => return Err(format!("guarded: {other:?}")),
    }
    ensure(elapsed < Duration::from_secs(1), || format!("guarded took {elapsed:?}"))?;
    Ok(format!("strict rejects as recursive, guarded stops in {elapsed:?}"))
}

fn sweep(seeds: std::ops::Range<u64>, check: impl Fn(u64) -> Result<(), String>) -> Result<usize, String> {
    let failures: Vec<String> = seeds.clone().filter_map(|s| check(s).err()).collect();
    match failures.first() {
        None => Ok(seeds.count()),
        Some(first) => Err(format!("{} failures, first: {first}", failures.len())),
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let n = sweep(0..200, |s| compare(s, 0))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{n} programs agree with the oracle at every tick, {elapsed:?}"))
}

fn minimality_and_shrinking() -> Outcome {
    let n = sweep(0..200, minimality)?;
    Ok(format!("{n} programs: hypotheses minimal, possible answers never grow"))
}

fn stratification_agreement() -> Outcome {
    let n = sweep(0..100, |s| agreement(s, 6))?;
    Ok(format!("{n} programs agree with the truncated closure, strata valid"))
}

fn negation_equivalence() -> Outcome {
    let n = sweep(1000..1050, |s| {
        let inst = common::random_instance(s, 1);
        let p = parse_program(&inst.program).map_err(|e| e.to_string())?;
        ensure(check_t_stratification(&p.program).stratified, || format!("seed {s} not stratified"))?;
        compare(s, 1)
    })?;
    Ok(format!("{n} stratified programs with negation agree with the oracle"))
}

fn median(xs: &[Duration]) -> Duration {
    let mut xs = xs.to_vec();
    xs.sort();
    xs[xs.len() / 2]
}

fn long_stream() -> Outcome {
    let mut st = state(&format!("{PI_E}\nTemp(X, 'n/a', T) -> Malf(X, T).\n#query Malf(X, T)."))?;
    run(&mut st, "@0\nTemp(wt25, high, 0).\n@1\nTemp(wt25, high, 1).\n@2\nTemp(wt25, high, 2).\n")?;
    let temp = |id: u64, value: &str, t: u64| {
        Atom::new("Temp", vec![Term::constant(&format!("wt{id}")), Term::constant(value), Term::Time(t)])
    };
    const TICKS: u64 = 10_000;
    let mut latency = Vec::new();
    let mut live = Vec::new();
    for t in 3..3 + TICKS {
        let mut facts = vec![temp(t % 7, "high", t), temp((t + 1) % 7, "high", t)];
        if t % 13 == 0 {
            facts.push(temp(t % 5 + 100, "n/a", t));
        }
        let block = TickBlock { tick: t, facts };
        let start = Instant::now();
        st.tick_with(&block).map_err(|e| e.to_string())?;
        latency.push(start.elapsed());
        live.push(st.live_len());
    }
    let n = latency.len();
    let (first, last) = (median(&latency[..1000]), median(&latency[n - 1000..]));
    ensure(last <= first * 3, || format!("median latency {first:?} -> {last:?}"))?;
    let half = live.len() / 2;
    let (early, late) = (live[..half].iter().max(), live[half..].iter().max());
    ensure(late <= early, || format!("live tuples grew from {early:?} to {late:?}"))?;
    Ok(format!(
        "median latency {first:?} -> {last:?}, max live tuples {} -> {}",
        early.unwrap_or(&0),
        late.unwrap_or(&0)
    ))
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("running example trace", running_example_trace),
        ("precondition golden", preconditions_golden),
        ("early answer", early_answer),
        ("unbound time variables", unbound_time_variables),
        ("recursion handling", recursion_limits),
        ("oracle equivalence", oracle_equivalence),
        ("minimality and anti-monotonicity", minimality_and_shrinking),
        ("stratification", stratification_agreement),
        ("negation", negation_equivalence),
        ("long stream", long_stream),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {e}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
