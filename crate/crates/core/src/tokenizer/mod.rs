// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

//! Applying a trained merge list to SMILES, and routing mixed documents.
//!
//! A [`TokenizerModel`] owns a [`Vocabulary`] laid out as special tokens,
//! single printable ASCII characters, atom-level units, then merge tokens.
//! Encoding splits a SMILES string into atom-level units, applies the merges
//! in rank order and spells any unit the vocabulary lacks one character at a
//! time.
//!
//! ```
//! use smipe::tokenizer::TokenizerModel;
//!
//! let model = TokenizerModel::from_pairs(&[("[1*]", "N")], ["C", "N", "O", "(", ")", "="]).unwrap();
//! let ids = model.encode_smiles("[1*]NC(=O)N[2*]").unwrap();
//! let pieces: Vec<&str> = ids.iter().map(|&i| model.vocab().token(i).unwrap()).collect();
//! assert_eq!(pieces, ["[1*]N", "C", "(", "=", "O", ")", "N", "[", "2", "*", "]"]);
//! assert_eq!(model.decode(&ids).unwrap(), "[1*]NC(=O)N[2*]");
//! ```

mod base;
mod document;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pretokenize::{atom_units, PRETOKENIZER_ID};
use crate::smiles::SmilesError;
use crate::spe::MergeRule;

pub use base::{BaseTokenizer, GreedyBpe};
pub use document::{decode_document, encode_document, split_document, DocumentPiece, TagErrorKind};

pub const EOS: &str = "<EOS>";
pub const SMILES_OPEN: &str = "<SMILES>";
pub const SMILES_CLOSE: &str = "</SMILES>";
pub const FORMULA_OPEN: &str = "<MOLFORMULA>";
pub const FORMULA_CLOSE: &str = "</MOLFORMULA>";

/// The special tokens every model carries, in id order.
pub const DEFAULT_SPECIALS: [&str; 5] =
    [EOS, SMILES_OPEN, SMILES_CLOSE, FORMULA_OPEN, FORMULA_CLOSE];

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("unsupported format_version {0} (expected {FORMAT_VERSION})")]
    FormatVersion(u32),
    #[error("model was built for pretokenizer {found:?}, this build provides {PRETOKENIZER_ID:?}")]
    Pretokenizer { found: String },
    #[error("duplicate vocabulary token {0:?}")]
    DuplicateToken(String),
    #[error("special token {0:?} is not in the vocabulary")]
    SpecialNotInVocab(String),
    #[error("required special token {0:?} is missing")]
    MissingSpecial(String),
    #[error(
        "merge {rank} ({left:?}, {right:?}) refers to a token outside the vocabulary: {token:?}"
    )]
    MergeOutsideVocab {
        rank: usize,
        left: String,
        right: String,
        token: String,
    },
    #[error("merge {rank} produces special token {token:?}")]
    MergeMakesSpecial { rank: usize, token: String },
    #[error("invalid model JSON: {0}")]
    Json(String),
    #[error("invalid base tokenizer file, line {line}: {message}")]
    BaseFile { line: usize, message: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TokenizerError {
    #[error(transparent)]
    Smiles(#[from] SmilesError),
    #[error("no token for character {ch:?} at byte {position}")]
    NoFallback { ch: char, position: usize },
    #[error("token id {id} out of range (vocabulary size {size})")]
    IdOutOfRange { id: u32, size: usize },
    #[error("{kind} tag {tag} at character {offset}")]
    Tag {
        kind: TagErrorKind,
        tag: String,
        offset: usize,
    },
    #[error("SMILES span at character {offset}: {source}")]
    Span {
        offset: usize,
        #[source]
        source: Box<TokenizerError>,
    },
    #[error("base tokenizer output is not valid UTF-8")]
    BaseUtf8,
}

/// Dense, ordered token list with reverse lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
    specials: BTreeSet<String>,
}

impl Vocabulary {
    pub fn new<I, S>(tokens: Vec<String>, specials: I) -> Result<Vocabulary, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i as u32).is_some() {
                return Err(ModelError::DuplicateToken(t.clone()));
            }
        }
        let specials: BTreeSet<String> = specials.into_iter().map(Into::into).collect();
        if let Some(s) = specials.iter().find(|s| !index.contains_key(*s)) {
            return Err(ModelError::SpecialNotInVocab(s.clone()));
        }
        Ok(Vocabulary {
            tokens,
            index,
            specials,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn specials(&self) -> &BTreeSet<String> {
        &self.specials
    }

    pub fn is_special(&self, token: &str) -> bool {
        self.specials.contains(token)
    }
}

/// On-disk layout of a model; ids are positions in `vocab`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub pretokenizer: String,
    pub special_tokens: Vec<String>,
    pub vocab: Vec<String>,
    pub merges: Vec<(String, String)>,
}

/// A loaded SMILES tokenizer. Immutable; share freely across threads.
#[derive(Clone, Debug)]
pub struct TokenizerModel {
    vocab: Vocabulary,
    merges: Vec<(String, String)>,
    // (left id, right id) -> (rank, merged id)
    ranks: HashMap<(u32, u32), (usize, u32)>,
    special_order: Vec<String>,
    special_re: regex::Regex,
}

/// Characters every model can fall back to.
pub fn fallback_chars() -> impl Iterator<Item = char> {
    (0x20u8..=0x7e).map(char::from)
}

impl TokenizerModel {
    /// Builds a model from learned rules and the atom-level units seen in
    /// training.
    pub fn from_trained(
        merges: &[MergeRule],
        base_units: &BTreeSet<String>,
    ) -> Result<TokenizerModel, ModelError> {
        let mut sorted: Vec<&MergeRule> = merges.iter().collect();
        sorted.sort_by_key(|r| r.rank);
        let pairs: Vec<(String, String)> = sorted
            .iter()
            .map(|r| (r.left.clone(), r.right.clone()))
            .collect();
        Self::build(pairs, base_units.iter().cloned())
    }

    /// Builds a model from an explicit merge list (rank = position) plus
    /// extra units to include. Merge operands are added automatically.
    pub fn from_pairs<'a, I>(pairs: &[(&str, &str)], units: I) -> Result<TokenizerModel, ModelError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let pairs = pairs
            .iter()
            .map(|(l, r)| (l.to_string(), r.to_string()))
            .collect();
        Self::build(pairs, units.into_iter().map(str::to_string))
    }

    fn build<I: Iterator<Item = String>>(
        pairs: Vec<(String, String)>,
        units: I,
    ) -> Result<TokenizerModel, ModelError> {
        let mut vocab: Vec<String> = DEFAULT_SPECIALS.iter().map(|s| s.to_string()).collect();
        vocab.extend(fallback_chars().map(String::from));
        let mut seen: std::collections::HashSet<String> = vocab.iter().cloned().collect();
        let mut units: BTreeSet<String> = units.collect();
        // Operands of a merge must be reachable as tokens on their own.
        let produced: std::collections::HashSet<String> =
            pairs.iter().map(|(l, r)| format!("{l}{r}")).collect();
        for (l, r) in &pairs {
            for side in [l, r] {
                if !produced.contains(side) {
                    units.insert(side.clone());
                }
            }
        }
        for u in units {
            if seen.insert(u.clone()) {
                vocab.push(u);
            }
        }
        for (l, r) in &pairs {
            let t = format!("{l}{r}");
            if seen.insert(t.clone()) {
                vocab.push(t);
            }
        }
        Self::from_file(ModelFile {
            format_version: FORMAT_VERSION,
            pretokenizer: PRETOKENIZER_ID.to_string(),
            special_tokens: DEFAULT_SPECIALS.iter().map(|s| s.to_string()).collect(),
            vocab,
            merges: pairs,
        })
    }

    pub fn from_file(file: ModelFile) -> Result<TokenizerModel, ModelError> {
        if file.format_version != FORMAT_VERSION {
            return Err(ModelError::FormatVersion(file.format_version));
        }
        if file.pretokenizer != PRETOKENIZER_ID {
            return Err(ModelError::Pretokenizer {
                found: file.pretokenizer,
            });
        }
        for s in DEFAULT_SPECIALS {
            if !file.special_tokens.iter().any(|t| t == s) {
                return Err(ModelError::MissingSpecial(s.to_string()));
            }
        }
        let vocab = Vocabulary::new(file.vocab, file.special_tokens.iter().cloned())?;
        let mut ranks = HashMap::with_capacity(file.merges.len());
        for (rank, (l, r)) in file.merges.iter().enumerate() {
            let token = format!("{l}{r}");
            let lookup = |t: &str| {
                vocab.id(t).ok_or_else(|| ModelError::MergeOutsideVocab {
                    rank,
                    left: l.clone(),
                    right: r.clone(),
                    token: t.to_string(),
                })
            };
            let (li, ri, out) = (lookup(l)?, lookup(r)?, lookup(&token)?);
            if vocab.is_special(&token) {
                return Err(ModelError::MergeMakesSpecial { rank, token });
            }
            // A repeated pair keeps its first (lowest) rank.
            ranks.entry((li, ri)).or_insert((rank, out));
        }
        Ok(TokenizerModel {
            vocab,
            merges: file.merges,
            ranks,
            special_re: document::specials_regex(&file.special_tokens),
            special_order: file.special_tokens,
        })
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile {
            format_version: FORMAT_VERSION,
            pretokenizer: PRETOKENIZER_ID.to_string(),
            special_tokens: self.special_order.clone(),
            vocab: self.vocab.tokens().to_vec(),
            merges: self.merges.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<TokenizerModel, ModelError> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("model serializes")
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn special_id(&self, token: &str) -> Option<u32> {
        self.vocab
            .is_special(token)
            .then(|| self.vocab.id(token))
            .flatten()
    }

    /// Token ids for one SMILES string.
    pub fn encode_smiles(&self, smiles: &str) -> Result<Vec<u32>, TokenizerError> {
        Ok(self
            .encode_pieces(smiles)?
            .into_iter()
            .map(|(id, _)| id)
            .collect())
    }

    /// Like [`encode_smiles`](Self::encode_smiles) but also returns the
    /// byte offset where each token starts.
    pub fn encode_pieces(&self, smiles: &str) -> Result<Vec<(u32, usize)>, TokenizerError> {
        #[derive(Clone, Copy)]
        enum Slot {
            Known(u32),
            // Unit text not in the vocabulary; never takes part in a merge.
            Unknown,
        }
        let units = atom_units(smiles)?;
        let mut seq: Vec<(Slot, usize, usize)> = Vec::with_capacity(units.len());
        let mut at = 0;
        for u in &units {
            let slot = self.vocab.id(u).map_or(Slot::Unknown, Slot::Known);
            seq.push((slot, at, u.len()));
            at += u.len();
        }

        // Rules apply in rank order: after applying rank r the next rule is
        // the lowest rank above r that has an occurrence.
        let mut floor: Option<usize> = None;
        loop {
            let mut best: Option<(usize, u32, u32, u32)> = None;
            for w in seq.windows(2) {
                if let (Slot::Known(a), Slot::Known(b)) = (w[0].0, w[1].0) {
                    if let Some(&(rank, out)) = self.ranks.get(&(a, b)) {
                        if floor.is_none_or(|f| rank > f) && best.is_none_or(|x| rank < x.0) {
                            best = Some((rank, a, b, out));
                        }
                    }
                }
            }
            let Some((rank, a, b, out)) = best else { break };
            let mut merged = Vec::with_capacity(seq.len());
            let mut i = 0;
            while i < seq.len() {
                if i + 1 < seq.len() {
                    if let (Slot::Known(x), Slot::Known(y)) = (seq[i].0, seq[i + 1].0) {
                        if x == a && y == b {
                            merged.push((Slot::Known(out), seq[i].1, seq[i].2 + seq[i + 1].2));
                            i += 2;
                            continue;
                        }
                    }
                }
                merged.push(seq[i]);
                i += 1;
            }
            seq = merged;
            floor = Some(rank);
        }

        let mut out = Vec::with_capacity(seq.len());
        for (slot, start, len) in seq {
            match slot {
                Slot::Known(id) => out.push((id, start)),
                Slot::Unknown => {
                    for (k, ch) in smiles[start..start + len].char_indices() {
                        let mut buf = [0u8; 4];
                        let id = self.vocab.id(ch.encode_utf8(&mut buf)).ok_or(
                            TokenizerError::NoFallback {
                                ch,
                                position: start + k,
                            },
                        )?;
                        out.push((id, start + k));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Concatenated token texts.
    pub fn decode(&self, ids: &[u32]) -> Result<String, TokenizerError> {
        let mut out = String::new();
        for &id in ids {
            let t = self.vocab.token(id).ok_or(TokenizerError::IdOutOfRange {
                id,
                size: self.vocab.len(),
            })?;
            out.push_str(t);
        }
        Ok(out)
    }
}
