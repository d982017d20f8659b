// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

//! Corpus preparation: tagging SMILES spans, joining records, weighted
//! blending of datasets, and tokens-per-string statistics.
//!
//! ```
//! use smipe::corpus::{concat_records, wrap_smiles};
//!
//! assert_eq!(wrap_smiles("mix CCO now", &[(4, 3)]).unwrap(), "mix <SMILES>CCO</SMILES> now");
//! assert_eq!(concat_records(&["a", "b"]), "a<EOS>b");
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::smiles::record_seed;
use crate::tokenizer::{EOS, SMILES_CLOSE, SMILES_OPEN};

#[derive(Debug, Error, PartialEq)]
pub enum CorpusError {
    #[error("span {index} ({offset}, {length}) lies outside the {len}-byte text")]
    SpanOutOfRange {
        index: usize,
        offset: usize,
        length: usize,
        len: usize,
    },
    #[error("span {index} overlaps or precedes the span before it")]
    SpanOverlap { index: usize },
    #[error("span {index} does not start and end on character boundaries")]
    SpanNotCharBoundary { index: usize },
    #[error("dataset {0:?} has no records")]
    EmptyDataset(String),
    #[error("dataset {name:?} weight {weight} is outside (0, 1]")]
    WeightOutOfRange { name: String, weight: f64 },
    #[error("weights sum to {0}, expected 1")]
    WeightSum(f64),
    #[error("dataset name {0:?} appears twice")]
    DuplicateName(String),
    #[error("no datasets to blend")]
    NoDatasets,
    #[error("line {line}: {message}")]
    Record { line: usize, message: String },
    #[error("corpus is empty")]
    EmptyCorpus,
}

/// Wraps each `(offset, length)` byte span in `<SMILES>` tags. Spans must be
/// sorted and must not overlap; touching spans are fine.
pub fn wrap_smiles(text: &str, spans: &[(usize, usize)]) -> Result<String, CorpusError> {
    let mut out =
        String::with_capacity(text.len() + spans.len() * (SMILES_OPEN.len() + SMILES_CLOSE.len()));
    let mut at = 0;
    for (index, &(offset, length)) in spans.iter().enumerate() {
        let end = offset
            .checked_add(length)
            .filter(|&e| e <= text.len())
            .ok_or(CorpusError::SpanOutOfRange {
                index,
                offset,
                length,
                len: text.len(),
            })?;
        if offset < at {
            return Err(CorpusError::SpanOverlap { index });
        }
        if !text.is_char_boundary(offset) || !text.is_char_boundary(end) {
            return Err(CorpusError::SpanNotCharBoundary { index });
        }
        out.push_str(&text[at..offset]);
        out.push_str(SMILES_OPEN);
        out.push_str(&text[offset..end]);
        out.push_str(SMILES_CLOSE);
        at = end;
    }
    out.push_str(&text[at..]);
    Ok(out)
}

pub fn concat_records<S: AsRef<str>>(samples: &[S]) -> String {
    samples
        .iter()
        .map(AsRef::as_ref)
        .collect::<Vec<_>>()
        .join(EOS)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordFormat {
    /// One record per non-empty line.
    #[default]
    Lines,
    /// One JSON object per line; the record is one string field.
    Jsonl,
}

/// Splits file contents into records. For JSONL, `field` names the string
/// field to take.
pub fn parse_records(
    content: &str,
    format: RecordFormat,
    field: &str,
) -> Result<Vec<String>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in content.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        match format {
            RecordFormat::Lines => out.push(line.to_string()),
            RecordFormat::Jsonl => {
                let err = |message: String| CorpusError::Record {
                    line: i + 1,
                    message,
                };
                let value: serde_json::Value =
                    serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
                let s = value
                    .get(field)
                    .and_then(|v| v.as_str())
                    .ok_or_else(|| err(format!("missing string field {field:?}")))?;
                out.push(s.to_string());
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub name: String,
    pub path: String,
    pub weight: f64,
    #[serde(default)]
    pub format: RecordFormat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlendRecord {
    pub dataset: usize,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blend {
    pub records: Vec<BlendRecord>,
    /// Realized record count per dataset name.
    pub manifest: BTreeMap<String, usize>,
}

/// Per-dataset record counts: `floor(weight * total)` plus one extra for the
/// largest fractional parts (ties to the earlier dataset) until the counts
/// add up to `total`.
pub fn largest_remainder(weights: &[f64], total: usize) -> Vec<usize> {
    let exact: Vec<f64> = weights.iter().map(|w| w * total as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let (fa, fb) = (exact[a] - exact[a].floor(), exact[b] - exact[b].floor());
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

fn check_specs(specs: &[DatasetSpec]) -> Result<(), CorpusError> {
    if specs.is_empty() {
        return Err(CorpusError::NoDatasets);
    }
    let mut names = std::collections::HashSet::new();
    for s in specs {
        if !(s.weight > 0.0 && s.weight <= 1.0) {
            return Err(CorpusError::WeightOutOfRange {
                name: s.name.clone(),
                weight: s.weight,
            });
        }
        if !names.insert(&s.name) {
            return Err(CorpusError::DuplicateName(s.name.clone()));
        }
    }
    let sum: f64 = specs.iter().map(|s| s.weight).sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(CorpusError::WeightSum(sum));
    }
    Ok(())
}

/// Draws `total` records across datasets in proportion to their weights.
///
/// Each dataset is read in a seeded shuffled order, reshuffled every time it
/// runs out; the per-dataset draws are then interleaved in a seeded random
/// order. `data[i]` holds the records of `specs[i]`.
pub fn blend<S: AsRef<str>>(
    specs: &[DatasetSpec],
    data: &[Vec<S>],
    total: usize,
    seed: u64,
) -> Result<Blend, CorpusError> {
    check_specs(specs)?;
    assert_eq!(specs.len(), data.len(), "one record list per dataset");
    if let Some(i) = data.iter().position(Vec::is_empty) {
        return Err(CorpusError::EmptyDataset(specs[i].name.clone()));
    }
    let quotas = largest_remainder(&specs.iter().map(|s| s.weight).collect::<Vec<_>>(), total);

    let mut drawn: Vec<std::vec::IntoIter<String>> = Vec::with_capacity(specs.len());
    for (i, (records, &quota)) in data.iter().zip(&quotas).enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(record_seed(seed, i as u64 + 1));
        let mut order: Vec<usize> = (0..records.len()).collect();
        let mut picks = Vec::with_capacity(quota);
        while picks.len() < quota {
            order.shuffle(&mut rng);
            let take = (quota - picks.len()).min(order.len());
            picks.extend(
                order[..take]
                    .iter()
                    .map(|&k| records[k].as_ref().to_string()),
            );
        }
        drawn.push(picks.into_iter());
    }

    let mut slots: Vec<usize> = quotas
        .iter()
        .enumerate()
        .flat_map(|(i, &q)| std::iter::repeat_n(i, q))
        .collect();
    slots.shuffle(&mut ChaCha8Rng::seed_from_u64(record_seed(seed, 0)));
    let records = slots
        .into_iter()
        .map(|i| BlendRecord {
            dataset: i,
            text: drawn[i].next().expect("quota-sized draw"),
        })
        .collect();
    let manifest = specs
        .iter()
        .zip(&quotas)
        .map(|(s, &q)| (s.name.clone(), q))
        .collect();
    Ok(Blend { records, manifest })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBucket {
    /// Inclusive bounds on tokens per string.
    pub lo: usize,
    pub hi: usize,
    pub count_a: usize,
    pub count_b: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FertilityReport {
    pub n_strings: usize,
    pub counts_a: Vec<usize>,
    pub counts_b: Vec<usize>,
    pub median_a: usize,
    pub median_b: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub single_token_fraction_b: f64,
    pub histogram: Vec<HistogramBucket>,
}

/// `[0,0], [1,1], …, [64,64]`, then `[65,128], [129,256], …`.
pub fn bucket_bounds(count: usize) -> (usize, usize) {
    if count <= 64 {
        (count, count)
    } else {
        let hi = count.next_power_of_two();
        (hi / 2 + 1, hi)
    }
}

fn lower_median(counts: &[usize]) -> usize {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    sorted[(sorted.len() - 1) / 2]
}

fn mean(counts: &[usize]) -> f64 {
    counts.iter().map(|&c| c as f64).sum::<f64>() / counts.len() as f64
}

/// Tokens per string under two tokenizers over the same corpus.
pub fn fertility_report<S, A, B>(
    corpus: &[S],
    tok_a: A,
    tok_b: B,
) -> Result<FertilityReport, CorpusError>
where
    S: AsRef<str> + Sync,
    A: Fn(&str) -> usize + Sync,
    B: Fn(&str) -> usize + Sync,
{
    if corpus.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let (counts_a, counts_b): (Vec<usize>, Vec<usize>) = corpus
        .par_iter()
        .map(|s| (tok_a(s.as_ref()), tok_b(s.as_ref())))
        .unzip();
    let max = counts_a.iter().chain(&counts_b).copied().max().unwrap_or(0);
    let mut histogram: Vec<HistogramBucket> = Vec::new();
    let mut lo = 0;
    while lo <= max.max(64) {
        let (l, hi) = bucket_bounds(lo);
        histogram.push(HistogramBucket {
            lo: l,
            hi,
            count_a: 0,
            count_b: 0,
        });
        lo = hi + 1;
    }
    let index = |c: usize| match c {
        0..=64 => c,
        _ => 65 + c.next_power_of_two().trailing_zeros() as usize - 7,
    };
    for &c in &counts_a {
        let i = index(c);
        histogram[i].count_a += 1;
    }
    for &c in &counts_b {
        let i = index(c);
        histogram[i].count_b += 1;
    }
    let singles = counts_b.iter().filter(|&&c| c == 1).count();
    Ok(FertilityReport {
        n_strings: corpus.len(),
        median_a: lower_median(&counts_a),
        median_b: lower_median(&counts_b),
        mean_a: mean(&counts_a),
        mean_b: mean(&counts_b),
        single_token_fraction_b: singles as f64 / corpus.len() as f64,
        counts_a,
        counts_b,
        histogram,
    })
}

impl FertilityReport {
    /// Histogram as tab-separated `lo hi count_a count_b` rows with a header.
    pub fn histogram_tsv(&self) -> String {
        let mut out = String::from("lo\thi\tcount_a\tcount_b\n");
        for b in &self.histogram {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", b.lo, b.hi, b.count_a, b.count_b);
        }
        out
    }
}
