// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

//! Mixed text/SMILES documents.
//!
//! Text between `<SMILES>` and `</SMILES>` goes through the SMILES model,
//! every special token string becomes its own id, and everything else goes
//! through the base tokenizer. Ids live in one joint space: base ids first,
//! then the model's ids shifted up by the base vocabulary size.

use std::fmt;
use std::sync::OnceLock;

use regex::Regex;

use super::{
    BaseTokenizer, TokenizerError, TokenizerModel, DEFAULT_SPECIALS, FORMULA_CLOSE, FORMULA_OPEN,
    SMILES_CLOSE, SMILES_OPEN,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TagErrorKind {
    Unpaired,
    Nested,
}

impl fmt::Display for TagErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TagErrorKind::Unpaired => "unpaired",
            TagErrorKind::Nested => "nested",
        })
    }
}

/// One routed stretch of a document; `offset` is a byte offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DocumentPiece<'a> {
    Text { text: &'a str, offset: usize },
    Smiles { text: &'a str, offset: usize },
    Special { token: &'a str, offset: usize },
}

pub(crate) fn specials_regex<S: AsRef<str>>(specials: &[S]) -> Regex {
    let mut sorted: Vec<&str> = specials.iter().map(AsRef::as_ref).collect();
    // Longest first so a special that prefixes another never wins.
    sorted.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    let pattern = sorted
        .iter()
        .map(|s| regex::escape(s))
        .collect::<Vec<_>>()
        .join("|");
    Regex::new(&pattern).expect("escaped alternation")
}

fn default_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| specials_regex(&DEFAULT_SPECIALS))
}

fn char_offset(doc: &str, byte: usize) -> usize {
    doc[..byte].chars().count()
}

/// Splits `doc` on the default special tokens and checks tag pairing.
pub fn split_document(doc: &str) -> Result<Vec<DocumentPiece<'_>>, TokenizerError> {
    split_with(doc, default_regex())
}

pub(crate) fn split_with<'a>(
    doc: &'a str,
    specials: &Regex,
) -> Result<Vec<DocumentPiece<'a>>, TokenizerError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Open {
        Nothing,
        Smiles(usize),
        Formula(usize),
    }
    let tag_error = |kind, tag: &str, byte: usize| TokenizerError::Tag {
        kind,
        tag: tag.to_string(),
        offset: char_offset(doc, byte),
    };
    let mut pieces = Vec::new();
    let mut open = Open::Nothing;
    let mut at = 0;
    let push_text = |pieces: &mut Vec<DocumentPiece<'a>>, open: Open, from: usize, to: usize| {
        if from < to {
            let text = &doc[from..to];
            pieces.push(match open {
                Open::Smiles(_) => DocumentPiece::Smiles { text, offset: from },
                _ => DocumentPiece::Text { text, offset: from },
            });
        }
    };
    for m in specials.find_iter(doc) {
        push_text(&mut pieces, open, at, m.start());
        let tag = m.as_str();
        open = match (tag, open) {
            (SMILES_OPEN, Open::Nothing) => Open::Smiles(m.start()),
            (FORMULA_OPEN, Open::Nothing) => Open::Formula(m.start()),
            (SMILES_OPEN | FORMULA_OPEN, _) => {
                return Err(tag_error(TagErrorKind::Nested, tag, m.start()))
            }
            (SMILES_CLOSE, Open::Smiles(_)) | (FORMULA_CLOSE, Open::Formula(_)) => Open::Nothing,
            (SMILES_CLOSE | FORMULA_CLOSE, _) => {
                return Err(tag_error(TagErrorKind::Unpaired, tag, m.start()))
            }
            _ => open,
        };
        pieces.push(DocumentPiece::Special {
            token: tag,
            offset: m.start(),
        });
        at = m.end();
    }
    push_text(&mut pieces, open, at, doc.len());
    match open {
        Open::Nothing => Ok(pieces),
        Open::Smiles(start) => Err(tag_error(TagErrorKind::Unpaired, SMILES_OPEN, start)),
        Open::Formula(start) => Err(tag_error(TagErrorKind::Unpaired, FORMULA_OPEN, start)),
    }
}

/// Joint-space ids for a mixed document.
pub fn encode_document<B: BaseTokenizer + ?Sized>(
    model: &TokenizerModel,
    base: &B,
    doc: &str,
) -> Result<Vec<u32>, TokenizerError> {
    let shift = base.vocab().len() as u32;
    let mut ids = Vec::new();
    for piece in model.split_document(doc)? {
        match piece {
            DocumentPiece::Text { text, .. } => ids.extend(base.encode(text)),
            DocumentPiece::Smiles { text, offset } => {
                let encoded = model
                    .encode_smiles(text)
                    .map_err(|e| TokenizerError::Span {
                        offset: char_offset(doc, offset),
                        source: Box::new(e),
                    })?;
                ids.extend(encoded.into_iter().map(|i| i + shift));
            }
            DocumentPiece::Special { token, .. } => {
                let id = model
                    .special_id(token)
                    .expect("split only yields model specials");
                ids.push(id + shift);
            }
        }
    }
    Ok(ids)
}

/// Inverse of [`encode_document`].
pub fn decode_document<B: BaseTokenizer + ?Sized>(
    model: &TokenizerModel,
    base: &B,
    ids: &[u32],
) -> Result<String, TokenizerError> {
    let shift = base.vocab().len() as u32;
    let mut out = String::new();
    let mut run: Vec<u32> = Vec::new();
    for &id in ids {
        if id < shift {
            run.push(id);
            continue;
        }
        if !run.is_empty() {
            out.push_str(&base.decode(&run)?);
            run.clear();
        }
        out.push_str(
            &model
                .decode(&[id - shift])
                .map_err(|_| TokenizerError::IdOutOfRange {
                    id,
                    size: shift as usize + model.vocab().len(),
                })?,
        );
    }
    if !run.is_empty() {
        out.push_str(&base.decode(&run)?);
    }
    Ok(out)
}

impl TokenizerModel {
    /// Splits `doc` on this model's special tokens and checks tag pairing.
    pub fn split_document<'a>(
        &self,
        doc: &'a str,
    ) -> Result<Vec<DocumentPiece<'a>>, TokenizerError> {
        split_with(doc, &self.special_re)
    }
}
