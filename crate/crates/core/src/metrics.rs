// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

//! Scoring molecule-generation outputs: invalid count, exact matches and
//! mean fingerprint similarity.
//!
//! ```
//! use smipe::metrics::{score_task, ScoreOptions};
//!
//! let records = [
//!     ("A possible product can be <SMILES>OCC</SMILES>", "CCO"),
//!     ("<SMILES>C(</SMILES>", "CCO"),
//! ];
//! let (score, _) = score_task(&records, &ScoreOptions::default()).unwrap();
//! assert_eq!(score.n_exact_match, 1);
//! assert_eq!(score.n_invalid, 1);
//! assert_eq!(score.mean_fps, 0.5);
//! ```

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fingerprint::{
    morgan_fingerprint, tanimoto, FingerprintError, DEFAULT_NBITS, DEFAULT_RADIUS,
};
use crate::smiles::{parse, validate_with, write_canonical, ValenceTable, ValidityReport};
use crate::tokenizer::{SMILES_CLOSE, SMILES_OPEN};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtractMode {
    /// Content of the first open/close pair.
    #[default]
    Paired,
    /// The prompt already ended with the open tag: take what precedes the
    /// first close tag.
    OpenTagInPrompt,
}

/// Trimmed content of the first well-formed `open`…`close` pair.
pub fn extract_tagged(output: &str, open: &str, close: &str, mode: ExtractMode) -> Option<String> {
    let body = match mode {
        ExtractMode::Paired => {
            let start = output.find(open)? + open.len();
            let end = output[start..].find(close)? + start;
            &output[start..end]
        }
        ExtractMode::OpenTagInPrompt => {
            let head = &output[..output.find(close)?];
            // A model that re-opens the tag anyway: keep what follows it.
            head.rfind(open).map_or(head, |i| &head[i + open.len()..])
        }
    };
    Some(body.trim().to_string())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    /// Same canonical SMILES.
    #[default]
    Canonical,
    /// Byte-identical extracted text.
    Raw,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InvalidPolicy {
    /// Invalid records count 0 towards the mean over all records.
    #[default]
    Zero,
    /// The mean is taken over valid records only.
    Exclude,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoreOptions {
    pub extract: ExtractMode,
    pub matching: MatchMode,
    pub invalid: InvalidPolicy,
    pub strict: bool,
    pub radius: usize,
    pub nbits: usize,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            extract: ExtractMode::Paired,
            matching: MatchMode::Canonical,
            invalid: InvalidPolicy::Zero,
            strict: true,
            radius: DEFAULT_RADIUS,
            nbits: DEFAULT_NBITS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub raw_output: String,
    pub gold: String,
    pub extracted: Option<String>,
    pub validity: ValidityReport,
    pub exact: bool,
    pub fps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskScore {
    pub n_samples: usize,
    /// Records with no tag pair or whose extracted text fails validation.
    pub n_invalid: usize,
    /// The part of `n_invalid` that had no tag pair at all.
    pub n_missing_tags: usize,
    pub n_exact_match: usize,
    pub mean_fps: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum ScoreError {
    #[error("gold SMILES of record {index} is invalid: {smiles:?}")]
    InvalidGold { index: usize, smiles: String },
    #[error(transparent)]
    Fingerprint(#[from] FingerprintError),
}

/// Scores `(raw_output, gold)` pairs. Returns the aggregate and one
/// [`EvalRecord`] per input, in input order.
pub fn score_task<O, G>(
    records: &[(O, G)],
    options: &ScoreOptions,
) -> Result<(TaskScore, Vec<EvalRecord>), ScoreError>
where
    O: AsRef<str> + Sync,
    G: AsRef<str> + Sync,
{
    // Reject bad sizes before doing any work.
    crate::fingerprint::Fingerprint::empty(options.nbits, options.radius)?;
    let table = options.strict.then(ValenceTable::default);
    let scored: Vec<Result<EvalRecord, ScoreError>> = records
        .par_iter()
        .enumerate()
        .map(|(index, (output, gold))| {
            let (output, gold) = (output.as_ref(), gold.as_ref());
            let gold_mol = match validate_with(gold, table.as_ref()).valid {
                true => parse(gold).ok(),
                false => None,
            }
            .ok_or_else(|| ScoreError::InvalidGold {
                index,
                smiles: gold.to_string(),
            })?;
            let extracted = extract_tagged(output, SMILES_OPEN, SMILES_CLOSE, options.extract);
            let validity = match &extracted {
                Some(pred) => validate_with(pred, table.as_ref()),
                None => ValidityReport {
                    valid: false,
                    error_kind: None,
                    error_position: None,
                },
            };
            let (mut exact, mut fps) = (false, 0.0);
            if validity.valid {
                let pred = extracted.as_deref().expect("valid implies extracted");
                let pred_mol = parse(pred).expect("validated");
                exact = match options.matching {
                    MatchMode::Canonical => {
                        write_canonical(&pred_mol) == write_canonical(&gold_mol)
                    }
                    MatchMode::Raw => pred == gold,
                };
                let a = morgan_fingerprint(&pred_mol, options.radius, options.nbits)?;
                let b = morgan_fingerprint(&gold_mol, options.radius, options.nbits)?;
                fps = tanimoto(&a, &b)?;
            }
            Ok(EvalRecord {
                raw_output: output.to_string(),
                gold: gold.to_string(),
                extracted,
                validity,
                exact,
                fps,
            })
        })
        .collect();
    let scored: Vec<EvalRecord> = scored.into_iter().collect::<Result<_, _>>()?;

    let n_samples = scored.len();
    let n_invalid = scored.iter().filter(|r| !r.validity.valid).count();
    let n_missing_tags = scored.iter().filter(|r| r.extracted.is_none()).count();
    let n_exact_match = scored.iter().filter(|r| r.exact).count();
    // Summing in sorted order makes the result independent of record order.
    let mut contributions: Vec<f64> = scored
        .iter()
        .filter(|r| r.validity.valid || options.invalid == InvalidPolicy::Zero)
        .map(|r| r.fps)
        .collect();
    contributions.sort_by(f64::total_cmp);
    let denominator = contributions.len();
    let mean_fps = if denominator == 0 {
        0.0
    } else {
        contributions.iter().sum::<f64>() / denominator as f64
    };
    Ok((
        TaskScore {
            n_samples,
            n_invalid,
            n_missing_tags,
            n_exact_match,
            mean_fps,
        },
        scored,
    ))
}

/// Tab-separated per-record table with a header row.
pub fn per_record_tsv(records: &[EvalRecord]) -> String {
    let mut out = String::from("index\tvalid\terror\texact\tfps\textracted\tgold\n");
    for (i, r) in records.iter().enumerate() {
        let error = match (&r.extracted, r.validity.error_kind) {
            (None, _) => "missing_tags".to_string(),
            (_, Some(kind)) => kind.to_string(),
            _ => String::new(),
        };
        let clean = |s: &str| s.replace(['\t', '\n', '\r'], " ");
        let _ = writeln!(
            out,
            "{i}\t{}\t{error}\t{}\t{:.6}\t{}\t{}",
            r.validity.valid,
            r.exact,
            r.fps,
            clean(r.extracted.as_deref().unwrap_or("")),
            clean(&r.gold)
        );
    }
    out
}
