// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

mod common;

use proptest::prelude::*;
use smipe::fingerprint::{morgan_fingerprint, tanimoto, Fingerprint};
use smipe::smiles::{parse, write_random};

fn fp(s: &str) -> Fingerprint {
    morgan_fingerprint(&parse(s).unwrap(), 2, 2048).unwrap()
}

#[test]
fn same_bits_for_every_spelling() {
    let corpus = common::corpus();
    for s in corpus.iter().step_by(6).take(200) {
        let m = parse(s).unwrap();
        let reference = morgan_fingerprint(&m, 2, 2048).unwrap();
        for seed in 0..16 {
            let variant = write_random(&m, seed);
            assert_eq!(fp(&variant), reference, "{s} via {variant}");
        }
    }
}

proptest! {
    #[test]
    fn tanimoto_symmetric_and_bounded(i in 0..1200usize, j in 0..1200usize) {
        let corpus = common::corpus();
        let (a, b) = (fp(corpus[i]), fp(corpus[j]));
        let ab = tanimoto(&a, &b).unwrap();
        prop_assert_eq!(ab, tanimoto(&b, &a).unwrap());
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(tanimoto(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn tanimoto_matches_set_arithmetic(a in prop::collection::btree_set(0usize..256, 0..40),
                                       b in prop::collection::btree_set(0usize..256, 0..40)) {
        let fa = Fingerprint::from_bits(256, &a.iter().copied().collect::<Vec<_>>()).unwrap();
        let fb = Fingerprint::from_bits(256, &b.iter().copied().collect::<Vec<_>>()).unwrap();
        let inter = a.intersection(&b).count() as f64;
        let union = a.union(&b).count() as f64;
        let want = if union == 0.0 { 1.0 } else { inter / union };
        prop_assert_eq!(tanimoto(&fa, &fb).unwrap(), want);
    }
}
