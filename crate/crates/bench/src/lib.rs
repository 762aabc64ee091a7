//! Benchmark fixtures.

use std::sync::Arc;

use hypo_core::kernel::{Atom, Term};
use hypo_core::{build_query_family, parse_program, EvalState, OnlineConfig, PreprocessConfig, Query, TickBlock};

pub const TURBINES: &str = "
    Temp(X, high, T) -> Flag(X, T).
    Flag(X, T), Flag(X, T+1) -> Cool(X, T+1).
    Cool(X, T), Flag(X, T+1) -> Shdn(X, T+1).
    Shdn(X, T) -> Malf(X, T-2).
    Temp(X, 'n/a', T) -> Malf(X, T).
    #query Malf(X, T).
";

pub fn query(text: &str) -> Query {
    parse_program(text).unwrap().query().unwrap().clone()
}

pub fn state(text: &str) -> EvalState {
    let family = build_query_family(&query(text), &PreprocessConfig::default()).unwrap();
    EvalState::new(Arc::new(family), OnlineConfig::default())
}

/// `ticks` blocks of high readings for a rotating set of `ids` turbines,
/// with an occasional unavailable sensor.
pub fn turbine_stream(ticks: u64, ids: u64) -> Vec<TickBlock> {
    (0..ticks)
        .map(|t| {
            let mut facts = Vec::new();
            for k in 0..3 {
                let id = (t + k) % ids;
                let value = if (t + k) % 17 == 0 { "n/a" } else { "high" };
                facts.push(Atom::new(
                    "Temp",
                    vec![Term::constant(&format!("wt{id}")), Term::constant(value), Term::Time(t)],
                ));
            }
            TickBlock { tick: t, facts }
        })
        .collect()
}
