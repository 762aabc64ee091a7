use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use hypo_bench::{state, turbine_stream, TURBINES};

fn ticks(c: &mut Criterion) {
    let stream = turbine_stream(200, 12);
    c.bench_function("turbines_200_ticks", |b| {
        b.iter_batched(
            || state(TURBINES),
            |mut st| {
                for block in &stream {
                    st.tick_with(block).unwrap();
                }
                st
            },
            BatchSize::SmallInput,
        )
    });
    let mut warm = state(TURBINES);
    let long = turbine_stream(2_000, 12);
    for block in &long[..1_000] {
        warm.tick_with(block).unwrap();
    }
    c.bench_function("turbines_single_tick_after_1000", |b| {
        b.iter_batched(
            || warm.clone(),
            |mut st| st.tick_with(&long[1_000]).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, ticks);
criterion_main!(benches);
