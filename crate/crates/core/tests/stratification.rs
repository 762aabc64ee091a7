mod common;

use common::checks::agreement;
use proptest::prelude::*;

#[test]
fn verdicts_match_truncated_closure() {
    let failures: Vec<String> = (0..100).filter_map(|s| agreement(s, 6).err()).collect();
    assert!(failures.is_empty(), "{} failures\n{}", failures.len(), failures.join("\n"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn random_seeds_agree(seed in any::<u64>()) {
        prop_assert_eq!(agreement(seed, 24), Ok(()));
    }
}
