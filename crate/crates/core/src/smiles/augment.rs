// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::validate::ValenceTable;
use super::{parse, validate_with, write_random};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentStats {
    pub inputs: usize,
    pub invalid: usize,
    pub outputs: usize,
}

/// Per-record seed derived from a run seed and the record's position, so
/// records can be processed in any order or in parallel.
pub fn record_seed(seed: u64, index: u64) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix(seed ^ splitmix(index))
}

/// One round of randomized-SMILES augmentation.
///
/// Invalid records are dropped and counted. Every valid record is emitted
/// unchanged followed by one random spelling of the same molecule, even if
/// that spelling happens to equal the original.
pub fn augment_corpus<S: AsRef<str> + Sync>(
    corpus: &[S],
    seed: u64,
    strict: bool,
) -> (Vec<String>, AugmentStats) {
    let table = strict.then(ValenceTable::default);
    let pairs: Vec<Option<[String; 2]>> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let s = s.as_ref();
            if !validate_with(s, table.as_ref()).valid {
                return None;
            }
            let m = parse(s).ok()?;
            Some([s.to_string(), write_random(&m, record_seed(seed, i as u64))])
        })
        .collect();
    let invalid = pairs.iter().filter(|p| p.is_none()).count();
    let out: Vec<String> = pairs.into_iter().flatten().flatten().collect();
    let stats = AugmentStats {
        inputs: corpus.len(),
        invalid,
        outputs: out.len(),
    };
    (out, stats)
}
