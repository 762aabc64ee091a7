use criterion::{criterion_group, criterion_main, Criterion};
use hypo_bench::{query, TURBINES};
use hypo_core::preprocess::check_t_stratification;
use hypo_core::{build_query_family, PreprocessConfig};

const NEGATION: &str = "
    Temp(X, high, T) -> Flag(X, T).
    Flag(X, T), not Off(X, T+1) -> Cool(X, T+1).
    Temp(X, off, T) -> Off(X, T).
    Cool(X, T), not Cool(X, T+1) -> Alarm(X, T).
    #query Alarm(X, T).
";

fn preprocess(c: &mut Criterion) {
    let cfg = PreprocessConfig::default();
    for (name, text) in [("turbines", TURBINES), ("negation", NEGATION)] {
        let q = query(text);
        c.bench_function(&format!("family_{name}"), |b| b.iter(|| build_query_family(&q, &cfg).unwrap()));
        c.bench_function(&format!("stratification_{name}"), |b| b.iter(|| check_t_stratification(&q.program)));
    }
}

criterion_group!(benches, preprocess);
criterion_main!(benches);
