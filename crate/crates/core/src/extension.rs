// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

//! Growing a base vocabulary and its embedding matrix.
//!
//! ```
//! use smipe::extension::{build_extension_plan, extend_embeddings, EmbeddingMatrix, PlanOptions};
//! use smipe::tokenizer::Vocabulary;
//!
//! let base = Vocabulary::new(vec!["CC".to_string(), "x".to_string()], Vec::<String>::new()).unwrap();
//! let smiles = [("CC".to_string(), 9), ("CCO".to_string(), 5)];
//! let text = [("mmol".to_string(), 3)];
//! let plan = build_extension_plan(&smiles, &text, &["<SMILES>".to_string()], &base, PlanOptions::default());
//! let tokens: Vec<&str> = plan.entries.iter().map(|e| e.token.as_str()).collect();
//! assert_eq!(tokens, ["CCO", "mmol", "<SMILES>"]);
//! assert_eq!(plan.collisions_dropped, ["CC"]);
//!
//! let m = EmbeddingMatrix::new(2, 2, vec![1.0, 3.0, 3.0, 1.0]).unwrap();
//! let grown = extend_embeddings(&m, &plan).unwrap();
//! assert_eq!(grown.row(2), [2.0, 2.0]);
//! ```

use std::collections::{HashMap, HashSet};
use std::io::{self, Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pretokenize::atom_units;
use crate::tokenizer::{BaseTokenizer, Vocabulary, SMILES_CLOSE, SMILES_OPEN};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenSource {
    Smiles,
    Text,
    Special,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub token: String,
    pub source: TokenSource,
    pub freq: u64,
}

/// New tokens to append to a base vocabulary; entry `i` gets id
/// `base_vocab_size + i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionPlan {
    pub base_vocab_size: usize,
    pub entries: Vec<PlanEntry>,
    pub collisions_dropped: Vec<String>,
}

impl ExtensionPlan {
    pub fn new_id(&self, entry: usize) -> usize {
        self.base_vocab_size + entry
    }

    pub fn extended_size(&self) -> usize {
        self.base_vocab_size + self.entries.len()
    }

    pub fn count(&self, source: TokenSource) -> usize {
        self.entries.iter().filter(|e| e.source == source).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlanOptions {
    /// Keep SMILES tokens that are a single atom-level unit (`C`, `[nH]`).
    pub include_atom_units: bool,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            include_atom_units: true,
        }
    }
}

fn is_single_unit(token: &str) -> bool {
    atom_units(token).is_ok_and(|u| u.len() == 1)
}

/// SMILES tokens in the given order, then text tokens, then specials.
///
/// Tokens the base vocabulary already has are left out and listed in
/// `collisions_dropped`; a token repeated across the lists keeps its first
/// slot.
pub fn build_extension_plan(
    smiles: &[(String, u64)],
    text: &[(String, u64)],
    specials: &[String],
    base: &Vocabulary,
    options: PlanOptions,
) -> ExtensionPlan {
    let mut entries = Vec::new();
    let mut collisions = Vec::new();
    let mut seen = HashSet::new();
    let specials: Vec<(String, u64)> = specials.iter().map(|s| (s.clone(), 0)).collect();
    let groups = [
        (TokenSource::Smiles, smiles),
        (TokenSource::Text, text),
        (TokenSource::Special, &specials[..]),
    ];
    for (source, list) in groups {
        for (token, freq) in list {
            if source == TokenSource::Smiles && !options.include_atom_units && is_single_unit(token)
            {
                continue;
            }
            if !seen.insert(token.clone()) {
                continue;
            }
            if base.contains(token) {
                collisions.push(token.clone());
                continue;
            }
            entries.push(PlanEntry {
                token: token.clone(),
                source,
                freq: *freq,
            });
        }
    }
    ExtensionPlan {
        base_vocab_size: base.len(),
        entries,
        collisions_dropped: collisions,
    }
}

/// Document text with tags and `<SMILES>` span contents removed. Unlike
/// document encoding this never fails: an unclosed span runs to the end.
fn prose(doc: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut rest = doc;
    while let Some(open) = rest.find(SMILES_OPEN) {
        out.push(&rest[..open]);
        let after = &rest[open + SMILES_OPEN.len()..];
        match after.find(SMILES_CLOSE) {
            Some(close) => rest = &after[close + SMILES_CLOSE.len()..],
            None => return out,
        }
    }
    out.push(rest);
    out
}

/// Maximal runs of alphabetic characters, case kept.
pub fn words(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|w| !w.is_empty())
}

// `<EOS>` would otherwise count as the word "EOS".
fn strip_tags(text: &str) -> String {
    let mut s = text.to_string();
    for tag in crate::tokenizer::DEFAULT_SPECIALS {
        s = s.replace(tag, " ");
    }
    s
}

/// Most frequent words that `base` splits into two or more tokens, ties in
/// lexicographic order.
pub fn extract_text_oov<S, B>(docs: &[S], base: &B, k: usize) -> Vec<(String, u64)>
where
    S: AsRef<str> + Sync,
    B: BaseTokenizer + ?Sized,
{
    let counts: HashMap<String, u64> = docs
        .par_iter()
        .fold(HashMap::new, |mut acc: HashMap<String, u64>, doc| {
            for part in prose(doc.as_ref()) {
                for w in words(&strip_tags(part)) {
                    *acc.entry(w.to_string()).or_insert(0) += 1;
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (w, c) in b {
                *a.entry(w).or_insert(0) += c;
            }
            a
        });
    let mut oov: Vec<(String, u64)> = counts
        .into_par_iter()
        .filter(|(w, _)| base.encode(w).len() >= 2)
        .collect();
    oov.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    oov.truncate(k);
    oov
}

pub const EMB_MAGIC: &[u8; 4] = b"EMB1";

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("{rows}x{cols} matrix needs {expected} values, got {found}")]
    Shape {
        rows: usize,
        cols: usize,
        expected: usize,
        found: usize,
    },
    #[error("matrix has {matrix} rows but the plan expects a base vocabulary of {plan}")]
    RowMismatch { matrix: usize, plan: usize },
    #[error("cannot take the mean of a matrix with no rows")]
    EmptyBase,
    #[error("not an EMB1 file")]
    BadMagic,
    #[error("EMB1 data ends early")]
    Truncated,
    #[error("EMB1 data has bytes after the last value")]
    TrailingBytes,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Row-major `f32` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f32>,
}

impl EmbeddingMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        values: Vec<f32>,
    ) -> Result<EmbeddingMatrix, EmbeddingError> {
        let expected = rows.checked_mul(cols).ok_or(EmbeddingError::Shape {
            rows,
            cols,
            expected: usize::MAX,
            found: values.len(),
        })?;
        if expected != values.len() {
            return Err(EmbeddingError::Shape {
                rows,
                cols,
                expected,
                found: values.len(),
            });
        }
        Ok(EmbeddingMatrix { rows, cols, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(EMB_MAGIC)?;
        w.write_all(&(self.rows as u64).to_le_bytes())?;
        w.write_all(&(self.cols as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.values.len() * 4);
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(20 + self.values.len() * 4);
        self.write_to(&mut out).expect("writing to a Vec");
        out
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<EmbeddingMatrix, EmbeddingError> {
        let mut data = Vec::new();
        r.read_to_end(&mut data)?;
        Self::from_bytes(&data)
    }

    pub fn from_bytes(data: &[u8]) -> Result<EmbeddingMatrix, EmbeddingError> {
        if data.len() < 4 {
            return Err(EmbeddingError::Truncated);
        }
        if &data[..4] != EMB_MAGIC {
            return Err(EmbeddingError::BadMagic);
        }
        if data.len() < 20 {
            return Err(EmbeddingError::Truncated);
        }
        let dim = |at: usize| u64::from_le_bytes(data[at..at + 8].try_into().unwrap());
        let (rows, cols) = (dim(4), dim(12));
        let body = &data[20..];
        let n = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(4))
            .ok_or(EmbeddingError::Truncated)?;
        if (body.len() as u64) < n {
            return Err(EmbeddingError::Truncated);
        }
        if body.len() as u64 > n {
            return Err(EmbeddingError::TrailingBytes);
        }
        let values = body
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::new(rows as usize, cols as usize, values)
    }
}

/// Appends one row per plan entry, each the column mean of all base rows
/// (summed in `f64`, stored as `f32`). Base rows are copied unchanged.
pub fn extend_embeddings(
    matrix: &EmbeddingMatrix,
    plan: &ExtensionPlan,
) -> Result<EmbeddingMatrix, EmbeddingError> {
    if matrix.rows != plan.base_vocab_size {
        return Err(EmbeddingError::RowMismatch {
            matrix: matrix.rows,
            plan: plan.base_vocab_size,
        });
    }
    let added = plan.entries.len();
    if added == 0 {
        return Ok(matrix.clone());
    }
    if matrix.rows == 0 {
        return Err(EmbeddingError::EmptyBase);
    }
    let mut sums = vec![0f64; matrix.cols];
    for r in 0..matrix.rows {
        for (s, &v) in sums.iter_mut().zip(matrix.row(r)) {
            *s += f64::from(v);
        }
    }
    let mean: Vec<f32> = sums
        .iter()
        .map(|s| (s / matrix.rows as f64) as f32)
        .collect();
    let mut values = Vec::with_capacity(matrix.values.len() + added * matrix.cols);
    values.extend_from_slice(&matrix.values);
    for _ in 0..added {
        values.extend_from_slice(&mean);
    }
    EmbeddingMatrix::new(matrix.rows + added, matrix.cols, values)
}
