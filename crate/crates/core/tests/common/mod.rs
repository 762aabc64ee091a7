#![allow(dead_code)]

pub mod checks;

use std::collections::BTreeSet;
use std::sync::Arc;

use hypo_core::kernel::{sym, Query, Sym};
use hypo_core::oracle::GroundWorld;
use hypo_core::parser::parse_stream;
use hypo_core::{
    build_query_family, parse_program, EvalState, OnlineConfig, PreprocessConfig, TickBlock,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const CONSTANTS: [&str; 2] = ["a", "b"];
pub const HORIZON: u64 = 6;

#[derive(Clone, Debug)]
pub struct Instance {
    pub program: String,
    pub stream: String,
}

fn offset(k: i64) -> String {
    match k {
        0 => "T".into(),
        k if k > 0 => format!("T+{k}"),
        k => format!("T{k}"),
    }
}

fn object(rng: &mut StdRng) -> String {
    if rng.gen_bool(0.8) {
        "X".into()
    } else {
        CONSTANTS[rng.gen_range(0..CONSTANTS.len())].into()
    }
}

fn literal(pred: &str, x: &str, k: i64) -> String {
    if pred == "C" {
        format!("C({})", offset(k))
    } else {
        format!("{pred}({x}, {})", offset(k))
    }
}

/// A nonrecursive connected program over EDB predicates A/2, B/2, C/1 with
/// at most `negations` negated literals per rule, and its query.
pub fn random_program(rng: &mut StdRng, negations: usize) -> String {
    let n = rng.gen_range(1..=4);
    let mut level = 1;
    let mut text = String::new();
    for i in 0..n {
        if i > 0 && rng.gen_bool(0.5) {
            level += 1;
        }
        let mut preds: Vec<String> = vec!["A".into(), "B".into(), "C".into()];
        preds.extend((1..level).map(|j| format!("P{j}")));
        let objects: Vec<&String> = preds.iter().filter(|p| *p != "C").collect();
        let first = objects[rng.gen_range(0..objects.len())].clone();
        let mut body = vec![literal(&first, "X", rng.gen_range(-2..=2))];
        for _ in 0..rng.gen_range(0..=2) {
            let p = preds[rng.gen_range(0..preds.len())].clone();
            let x = object(rng);
            body.push(literal(&p, &x, rng.gen_range(-2..=2)));
        }
        if negations > 0 && rng.gen_bool(0.6) {
            let p = preds[rng.gen_range(0..preds.len())].clone();
            let x = object(rng);
            body.push(format!("not {}", literal(&p, &x, rng.gen_range(-2..=2))));
        }
        let head = format!("P{level}(X, {})", offset(rng.gen_range(-2..=2)));
        text.push_str(&format!("{} -> {head}.\n", body.join(", ")));
    }
    text.push_str(&format!("#query P{level}(X, T).\n"));
    text
}

/// Up to four ticks of up to three facts each.
pub fn random_stream(rng: &mut StdRng) -> String {
    let mut text = String::new();
    for t in 0..rng.gen_range(1..=4) {
        text.push_str(&format!("@{t}\n"));
        for _ in 0..rng.gen_range(0..=3) {
            let c = CONSTANTS[rng.gen_range(0..CONSTANTS.len())];
            let fact = match rng.gen_range(0..3) {
                0 => format!("A({c}, {t})"),
                1 => format!("B({c}, {t})"),
                _ => format!("C({t})"),
            };
            text.push_str(&format!("{fact}.\n"));
        }
    }
    text
}

pub fn random_instance(seed: u64, negations: usize) -> Instance {
    let mut rng = StdRng::seed_from_u64(seed);
    Instance {
        program: random_program(&mut rng, negations),
        stream: random_stream(&mut rng),
    }
}

pub fn universe() -> Vec<Sym> {
    CONSTANTS.iter().map(|c| sym(c)).collect()
}

pub struct Loaded {
    pub query: Query,
    pub blocks: Vec<TickBlock>,
    pub world: GroundWorld,
}

pub fn load(inst: &Instance) -> Loaded {
    let parsed = parse_program(&inst.program).unwrap_or_else(|e| panic!("{e}\n{}", inst.program));
    let query = parsed.query().unwrap().clone();
    let blocks = parse_stream(&inst.stream, Some(query.program.clone())).unwrap();
    let mut world = GroundWorld::new(universe(), HORIZON);
    for b in &blocks {
        world.facts.extend(b.facts.iter().cloned());
    }
    Loaded { query, blocks, world }
}

pub fn engine(query: &Query) -> EvalState {
    let family = build_query_family(query, &PreprocessConfig::default()).unwrap();
    let cfg = OnlineConfig {
        universe: universe(),
        ..OnlineConfig::default()
    };
    EvalState::new(Arc::new(family), cfg)
}

pub fn strings<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> BTreeSet<String> {
    items.into_iter().map(|x| x.to_string()).collect()
}

/// A possibly recursive program with negation over at most five predicates
/// (EDB `A/2`, IDB `P1..P4`), time offsets within ±2.
pub fn random_negation_program(seed: u64) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    let idb = rng.gen_range(1..=4);
    let preds: Vec<String> = std::iter::once("A".to_string())
        .chain((1..=idb).map(|j| format!("P{j}")))
        .collect();
    let mut text = String::new();
    for _ in 0..rng.gen_range(1..=6) {
        let head = format!("P{}", rng.gen_range(1..=idb));
        let first = &preds[rng.gen_range(0..preds.len())];
        let mut body = vec![literal(first, "X", rng.gen_range(-2..=2))];
        let unbound = rng.gen_bool(0.15);
        if unbound {
            let p = &preds[rng.gen_range(0..preds.len())];
            body.push(format!("{p}(X, T2)"));
        }
        for _ in 0..rng.gen_range(0..=2) {
            let p = &preds[rng.gen_range(0..preds.len())];
            let negated = rng.gen_bool(0.5);
            let time = if unbound && rng.gen_bool(0.3) {
                "T2".to_string()
            } else {
                offset(rng.gen_range(-2..=2))
            };
            body.push(format!("{}{p}(X, {time})", if negated { "not " } else { "" }));
        }
        text.push_str(&format!(
            "{} -> {head}(X, {}).\n",
            body.join(", "),
            offset(rng.gen_range(-2..=2))
        ));
    }
    text
}
