use std::collections::BTreeSet;

use hypo_core::oracle::HypotheticalAnswer;
use hypo_core::{AnswerTuple, GroundAnswer, Literal, Substitution, Term, TickDelta};
use serde_json::{json, Map, Value};

pub fn term(t: &Term) -> Value {
    match t {
        Term::Const(c) => Value::String(c.to_string()),
        Term::Time(n) => json!(n),
        other => Value::String(other.to_string()),
    }
}

pub fn theta(s: &Substitution) -> Value {
    let map: Map<String, Value> = s.iter().map(|(v, t)| (v.to_string(), term(t))).collect();
    Value::Object(map)
}

fn literals<'a>(ls: impl IntoIterator<Item = &'a Literal>) -> Value {
    let mut out: Vec<String> = ls.into_iter().map(|l| l.to_string()).collect();
    out.sort();
    json!(out)
}

pub fn tuple(t: &AnswerTuple) -> Value {
    json!({
        "theta": theta(&t.theta),
        "evidence": literals(&t.evidence),
        "hypotheses": literals(&t.hypotheses),
    })
}

fn tuples(ts: &[AnswerTuple]) -> Value {
    let mut ts: Vec<&AnswerTuple> = ts.iter().collect();
    ts.sort();
    Value::Array(ts.into_iter().map(tuple).collect())
}

pub fn delta(d: &TickDelta, state: Option<&[AnswerTuple]>) -> Value {
    let mut discarded: Vec<_> = d.discarded.iter().collect();
    discarded.sort_by(|a, b| a.tuple.cmp(&b.tuple));
    let mut line = json!({
        "tick": d.tick,
        "definite": tuples(&d.definite),
        "supported": tuples(&d.supported),
        "updated": tuples(&d.updated),
        "discarded": discarded
            .into_iter()
            .map(|x| json!({"theta": theta(&x.tuple.theta), "reason": x.reason}))
            .collect::<Vec<_>>(),
    });
    if let Some(s) = state {
        line["state"] = tuples(s);
    }
    line
}

pub fn human(d: &TickDelta, state: Option<&[AnswerTuple]>) -> String {
    let mut out = format!("tick {}\n", d.tick);
    for (label, ts) in [("definite", &d.definite), ("supported", &d.supported), ("updated", &d.updated)] {
        for t in ts {
            out.push_str(&format!("  {label} {t}\n"));
        }
    }
    for x in &d.discarded {
        out.push_str(&format!("  discarded {} ({})\n", x.tuple, x.reason));
    }
    for t in state.into_iter().flatten() {
        out.push_str(&format!("  state {t}\n"));
    }
    out
}

pub fn hans(items: &BTreeSet<HypotheticalAnswer>) -> Value {
    Value::Array(
        items
            .iter()
            .map(|h| json!({"theta": theta(&h.theta), "hypotheses": literals(&h.hypotheses)}))
            .collect(),
    )
}

pub fn sans(items: &BTreeSet<GroundAnswer>) -> Value {
    Value::Array(
        items
            .iter()
            .map(|a| {
                json!({
                    "theta": theta(&a.theta),
                    "hypotheses": literals(&a.hypotheses),
                    "evidence": literals(&a.evidence),
                })
            })
            .collect(),
    )
}
