// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

use std::collections::HashMap;
use std::sync::OnceLock;

use regex::Regex;

use super::{ModelError, TokenizerError, Vocabulary};

/// The general-text tokenizer that a document's non-SMILES text goes
/// through.
pub trait BaseTokenizer: Send + Sync {
    fn vocab(&self) -> &Vocabulary;
    fn encode(&self, text: &str) -> Vec<u32>;
    fn decode(&self, ids: &[u32]) -> Result<String, TokenizerError>;
}

/// Byte-level BPE read from a vocabulary file and a merge file.
///
/// Ids 0..=255 are the single bytes. ASCII bytes are named by their
/// character, the rest `<0xNN>`. The vocabulary file lists further tokens,
/// one JSON string per line, taking ids from 256 on. The merge file holds one
/// `["left", "right"]` JSON pair per line in rank order; both sides and their
/// concatenation must be tokens.
///
/// Text is first cut into letter runs, digit runs, punctuation runs and
/// whitespace runs (each optionally led by one space), then within a piece
/// the lowest-ranked adjacent pair is merged until none applies.
#[derive(Clone, Debug)]
pub struct GreedyBpe {
    vocab: Vocabulary,
    bytes: Vec<Vec<u8>>,
    ranks: HashMap<(u32, u32), (usize, u32)>,
}

fn byte_name(b: u8) -> String {
    if b.is_ascii() {
        char::from(b).to_string()
    } else {
        format!("<0x{b:02X}>")
    }
}

fn pieces_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r" ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+").expect("valid regex"))
}

impl GreedyBpe {
    pub fn new<S: AsRef<str>>(tokens: &[S], merges: &[(S, S)]) -> Result<GreedyBpe, ModelError> {
        let mut names: Vec<String> = (0..=255u8).map(byte_name).collect();
        let mut bytes: Vec<Vec<u8>> = (0..=255u8).map(|b| vec![b]).collect();
        for t in tokens {
            names.push(t.as_ref().to_string());
            bytes.push(t.as_ref().as_bytes().to_vec());
        }
        let vocab = Vocabulary::new(names, std::iter::empty::<String>())?;
        let by_bytes: HashMap<&[u8], u32> = bytes
            .iter()
            .enumerate()
            .map(|(i, b)| (b.as_slice(), i as u32))
            .collect();
        let mut ranks = HashMap::with_capacity(merges.len());
        for (rank, (l, r)) in merges.iter().enumerate() {
            let (l, r) = (l.as_ref(), r.as_ref());
            let outside = |token: String| ModelError::MergeOutsideVocab {
                rank,
                left: l.to_string(),
                right: r.to_string(),
                token,
            };
            let li = vocab.id(l).ok_or_else(|| outside(l.to_string()))?;
            let ri = vocab.id(r).ok_or_else(|| outside(r.to_string()))?;
            let joined = [bytes[li as usize].as_slice(), bytes[ri as usize].as_slice()].concat();
            let out = *by_bytes
                .get(joined.as_slice())
                .ok_or_else(|| outside(String::from_utf8_lossy(&joined).into_owned()))?;
            ranks.entry((li, ri)).or_insert((rank, out));
        }
        Ok(GreedyBpe {
            vocab,
            bytes,
            ranks,
        })
    }

    /// Parses the two-file format from already-read file contents.
    pub fn from_strs(vocab_text: &str, merges_text: &str) -> Result<GreedyBpe, ModelError> {
        let tokens = parse_lines::<String>(vocab_text)?;
        let merges = parse_lines::<(String, String)>(merges_text)?;
        Self::new(&tokens, &merges)
    }

    /// Encodes to `(vocab file, merge file)` contents.
    pub fn to_strs(&self) -> (String, String) {
        let mut vocab = String::new();
        for t in &self.vocab.tokens()[256..] {
            vocab.push_str(&serde_json::to_string(t).expect("string serializes"));
            vocab.push('\n');
        }
        let mut ranked: Vec<(usize, u32, u32)> = self
            .ranks
            .iter()
            .map(|(&(l, r), &(rank, _))| (rank, l, r))
            .collect();
        ranked.sort_unstable();
        let mut merges = String::new();
        for (_, l, r) in &ranked {
            let pair = (self.vocab.token(*l).unwrap(), self.vocab.token(*r).unwrap());
            merges.push_str(&serde_json::to_string(&pair).expect("pair serializes"));
            merges.push('\n');
        }
        (vocab, merges)
    }

    fn encode_piece(&self, piece: &str, out: &mut Vec<u32>) {
        let mut ids: Vec<u32> = piece.bytes().map(u32::from).collect();
        loop {
            let best = ids
                .windows(2)
                .enumerate()
                .filter_map(|(i, w)| {
                    self.ranks
                        .get(&(w[0], w[1]))
                        .map(|&(rank, id)| (rank, i, id))
                })
                .min();
            let Some((_, at, merged)) = best else { break };
            let (a, b) = (ids[at], ids[at + 1]);
            let mut next = Vec::with_capacity(ids.len());
            let mut i = 0;
            while i < ids.len() {
                if i + 1 < ids.len() && ids[i] == a && ids[i + 1] == b {
                    next.push(merged);
                    i += 2;
                } else {
                    next.push(ids[i]);
                    i += 1;
                }
            }
            ids = next;
        }
        out.extend(ids);
    }
}

fn parse_lines<T: serde::de::DeserializeOwned>(text: &str) -> Result<Vec<T>, ModelError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| ModelError::BaseFile {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

impl BaseTokenizer for GreedyBpe {
    fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    fn encode(&self, text: &str) -> Vec<u32> {
        let mut out = Vec::with_capacity(text.len());
        for m in pieces_regex().find_iter(text) {
            self.encode_piece(m.as_str(), &mut out);
        }
        out
    }

    fn decode(&self, ids: &[u32]) -> Result<String, TokenizerError> {
        let mut buf = Vec::new();
        for &id in ids {
            let b = self
                .bytes
                .get(id as usize)
                .ok_or(TokenizerError::IdOutOfRange {
                    id,
                    size: self.bytes.len(),
                })?;
            buf.extend_from_slice(b);
        }
        String::from_utf8(buf).map_err(|_| TokenizerError::BaseUtf8)
    }
}
