mod common;

use std::collections::BTreeSet;

use common::*;
use hypo_core::oracle::{enumerate_hans, enumerate_sans, ground_consequences};
use hypo_core::preprocess::subsumption_minimize;
use hypo_core::resolution::{refute_with_future_premises, Limits, SearchConfig};
use proptest::prelude::*;

fn raw_answers(inst: &Instance) -> (hypo_core::Query, Vec<hypo_core::resolution::ComputedAnswer>) {
    let l = load(inst);
    let cfg = SearchConfig {
        limits: Limits::default(),
        tau: -1,
        facts: &[],
        guard: None,
    };
    let answers = refute_with_future_premises(&l.query, &cfg).unwrap();
    (l.query, answers)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn minimization_is_idempotent_and_selective(seed in any::<u64>()) {
        let (q, answers) = raw_answers(&random_instance(seed, 0));
        let once = subsumption_minimize(&q.goal, answers.clone());
        let twice = subsumption_minimize(&q.goal, once.clone());
        prop_assert_eq!(&once, &twice);
        prop_assert!(once.iter().all(|a| answers.contains(a)));
        prop_assert_eq!(once.is_empty(), answers.is_empty());
    }

    #[test]
    fn consequences_are_monotone_and_idempotent(seed in any::<u64>()) {
        let l = load(&random_instance(seed, 0));
        let all = l.world.facts.clone();
        let some: BTreeSet<_> = all.iter().step_by(2).cloned().collect();
        let small = ground_consequences(&l.query.program, &some, &l.world).unwrap();
        let large = ground_consequences(&l.query.program, &all, &l.world).unwrap();
        prop_assert!(small.is_subset(&large));
        prop_assert!(all.is_subset(&large));
        let again = ground_consequences(&l.query.program, &large, &l.world).unwrap();
        prop_assert_eq!(again, large);
    }

    #[test]
    fn empty_hypotheses_are_exactly_the_consequences(seed in any::<u64>()) {
        let l = load(&random_instance(seed, 0));
        for b in &l.blocks {
            let tau = b.tick as i64;
            let model = ground_consequences(&l.query.program, &l.world.history(tau), &l.world).unwrap();
            let hans = enumerate_hans(&l.query, &l.world, tau).unwrap();
            for h in &hans {
                let goal = h.theta.apply(&l.query.goal).unwrap();
                prop_assert_eq!(h.hypotheses.is_empty(), model.contains(&goal), "{}", h);
            }
        }
    }

    #[test]
    fn hypotheses_shrink_by_the_history(seed in any::<u64>()) {
        let l = load(&random_instance(seed, 0));
        let initial = enumerate_hans(&l.query, &l.world, -1).unwrap();
        for b in &l.blocks {
            let tau = b.tick as i64;
            let history = l.world.history(tau);
            for h in enumerate_hans(&l.query, &l.world, tau).unwrap() {
                let found = initial.iter().any(|h0| {
                    h0.theta == h.theta
                        && h0.hypotheses.iter().filter(|x| !history.contains(&x.atom)).eq(h.hypotheses.iter())
                });
                prop_assert!(found, "{} has no origin", h);
            }
        }
    }

    #[test]
    fn engine_agrees_with_oracle(seed in any::<u64>(), negation in any::<bool>()) {
        let inst = random_instance(seed, usize::from(negation));
        let l = load(&inst);
        let mut st = engine(&l.query);
        for b in &l.blocks {
            st.tick_with(b).unwrap();
            let got = st.ground_view(HORIZON).supported();
            let want = enumerate_sans(&l.query, &l.world, b.tick as i64).unwrap();
            prop_assert_eq!(strings(got), strings(want), "{}{}", inst.program, inst.stream);
        }
    }
}
