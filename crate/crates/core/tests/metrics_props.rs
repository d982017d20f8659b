// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

mod common;

use proptest::prelude::*;
use smipe::metrics::{score_task, ScoreOptions};
use smipe::smiles::{parse, write_random};

#[test]
fn synthetic_set_composition() {
    for seed in [0, 1, 7] {
        let records = common::synthetic_eval(seed);
        let (score, per) = score_task(&records, &ScoreOptions::default()).unwrap();
        assert_eq!(score.n_samples, 100);
        assert_eq!(score.n_exact_match, 60);
        assert_eq!(score.n_invalid, 15);
        for r in &per[..60] {
            assert!(r.exact);
            assert_eq!(r.fps, 1.0);
        }
        assert!(per[60..85]
            .iter()
            .all(|r| !r.exact && r.validity.valid && r.fps < 1.0 + 1e-12));
        assert!((0.0..=1.0).contains(&score.mean_fps));
    }
}

#[test]
fn exact_match_agrees_with_isomorphism() {
    let records = common::synthetic_eval(3);
    let (_, per) = score_task(&records, &ScoreOptions::default()).unwrap();
    for r in per.iter().filter(|r| r.validity.valid) {
        let pred = r.extracted.as_deref().unwrap();
        assert_eq!(
            r.exact,
            common::isomorphic(&parse(pred).unwrap(), &parse(&r.gold).unwrap()),
            "{pred} vs {}",
            r.gold
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn permutation_invariant(seed in any::<u64>(), shuffle in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let records = common::synthetic_eval(seed % 50);
        let (a, _) = score_task(&records, &ScoreOptions::default()).unwrap();
        let mut shuffled = records.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(shuffle));
        let (b, _) = score_task(&shuffled, &ScoreOptions::default()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn respelling_keeps_exact_count(seed in 0u64..50, k in any::<u64>()) {
        let records = common::synthetic_eval(seed);
        let (a, per) = score_task(&records, &ScoreOptions::default()).unwrap();
        let respelled: Vec<(String, String)> = per
            .iter()
            .map(|r| match (&r.extracted, r.validity.valid) {
                (Some(p), true) => {
                    let v = write_random(&parse(p).unwrap(), k);
                    (format!("<SMILES>{v}</SMILES>"), r.gold.clone())
                }
                _ => (r.raw_output.clone(), r.gold.clone()),
            })
            .collect();
        let (b, _) = score_task(&respelled, &ScoreOptions::default()).unwrap();
        prop_assert_eq!(a.n_exact_match, b.n_exact_match);
    }
}
