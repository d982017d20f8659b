// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

use proptest::prelude::*;
use smipe::extension::{
    build_extension_plan, extend_embeddings, EmbeddingMatrix, ExtensionPlan, PlanEntry,
    PlanOptions, TokenSource,
};
use smipe::tokenizer::{Vocabulary, DEFAULT_SPECIALS};

fn plan_of(base: usize, added: usize) -> ExtensionPlan {
    ExtensionPlan {
        base_vocab_size: base,
        entries: (0..added)
            .map(|i| PlanEntry {
                token: format!("t{i}"),
                source: TokenSource::Smiles,
                freq: 0,
            })
            .collect(),
        collisions_dropped: vec![],
    }
}

/// Column means by a different route: per column, pairwise summation.
fn column_means(m: &EmbeddingMatrix) -> Vec<f64> {
    fn pairwise(v: &[f64]) -> f64 {
        match v.len() {
            0 => 0.0,
            1 => v[0],
            n => pairwise(&v[..n / 2]) + pairwise(&v[n / 2..]),
        }
    }
    (0..m.cols())
        .map(|c| {
            let col: Vec<f64> = (0..m.rows()).map(|r| f64::from(m.row(r)[c])).collect();
            pairwise(&col) / m.rows() as f64
        })
        .collect()
}

fn matrix() -> impl Strategy<Value = EmbeddingMatrix> {
    (1usize..=1024, 1usize..=64).prop_flat_map(|(rows, cols)| {
        prop::collection::vec(-4.0f32..4.0, rows * cols)
            .prop_map(move |v| EmbeddingMatrix::new(rows, cols, v).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn new_rows_are_column_means(m in matrix(), added in 0usize..5) {
        let out = extend_embeddings(&m, &plan_of(m.rows(), added)).unwrap();
        prop_assert_eq!(out.rows(), m.rows() + added);
        for r in 0..m.rows() {
            let same = out.row(r).iter().zip(m.row(r)).all(|(a, b)| a.to_bits() == b.to_bits());
            prop_assert!(same, "row {} changed", r);
        }
        let means = column_means(&m);
        for r in m.rows()..out.rows() {
            for (c, (&got, &want)) in out.row(r).iter().zip(&means).enumerate() {
                let err = (f64::from(got) - want).abs();
                prop_assert!(err <= 1e-6 * want.abs().max(1e-6), "row {} col {}: {} vs {}", r, c, got, want);
            }
        }
    }

    #[test]
    fn file_round_trip(m in matrix()) {
        prop_assert_eq!(EmbeddingMatrix::from_bytes(&m.to_bytes()).unwrap(), m);
    }
}

#[test]
fn small_matrix_by_hand() {
    let m = EmbeddingMatrix::new(
        4,
        3,
        vec![
            1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0,
        ],
    )
    .unwrap();
    let out = extend_embeddings(&m, &plan_of(4, 2)).unwrap();
    assert_eq!(out.row(4), [5.5, 6.5, 7.5]);
    assert_eq!(out.row(5), [5.5, 6.5, 7.5]);
}

#[test]
fn plan_is_deterministic() {
    let base = Vocabulary::new(vec!["a".into(), "CC".into()], Vec::<String>::new()).unwrap();
    let smiles: Vec<(String, u64)> = (0..50)
        .map(|i| (format!("C{}", "C".repeat(i)), 100 - i as u64))
        .collect();
    let text = vec![("mmol".to_string(), 3), ("invention".to_string(), 2)];
    let specials: Vec<String> = DEFAULT_SPECIALS.iter().map(|s| s.to_string()).collect();
    let a = build_extension_plan(&smiles, &text, &specials, &base, PlanOptions::default());
    let b = build_extension_plan(&smiles, &text, &specials, &base, PlanOptions::default());
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.collisions_dropped, ["CC"]);
    let mut seen = std::collections::HashSet::new();
    for e in &a.entries {
        assert!(!base.contains(&e.token));
        assert!(seen.insert(&e.token));
    }
}

#[test]
fn large_plan_arithmetic() {
    // 16,795 SMILES tokens plus 1,000 text tokens, specials counted apart.
    let base = Vocabulary::new(
        (0..1000).map(|i| format!("w{i}")).collect(),
        Vec::<String>::new(),
    )
    .unwrap();
    let smiles: Vec<(String, u64)> = (0..16_795).map(|i| (format!("S{i}"), 1)).collect();
    let text: Vec<(String, u64)> = (0..1_000).map(|i| (format!("T{i}"), 1)).collect();
    let specials: Vec<String> = DEFAULT_SPECIALS.iter().map(|s| s.to_string()).collect();
    let plan = build_extension_plan(&smiles, &text, &specials, &base, PlanOptions::default());
    assert_eq!(
        plan.count(TokenSource::Smiles) + plan.count(TokenSource::Text),
        17_795
    );
    assert_eq!(plan.entries.len(), 17_800);
    assert_eq!(plan.extended_size(), 18_800);
}
