// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

//! SMILES pair encoding: learning merge rules over atom-level units.
//!
//! Training filters invalid SMILES, optionally adds one randomized spelling
//! per molecule, splits everything into atom-level units and then merges the
//! most frequent adjacent pair until no pair occurs more often than the
//! threshold. Pair counts are kept up to date incrementally: only words that
//! contain the merged pair are re-scanned after each merge.
//!
//! ```
//! use smipe::spe::{train, TrainerConfig};
//!
//! let corpus = vec!["CCO"; 5];
//! let config = TrainerConfig { augment: false, ..TrainerConfig::default() };
//! let trained = train(&corpus, &config).unwrap();
//! let tokens: Vec<String> = trained.merges.iter().map(|r| r.token()).collect();
//! assert_eq!(tokens, ["CC", "CCO"]);
//! ```

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pretokenize::atom_units;
use crate::smiles::{augment_corpus, validate_with, ValenceTable};

/// A learned merge: wherever `left` is directly followed by `right`, the two
/// become one token.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MergeRule {
    pub left: String,
    pub right: String,
    /// Learning order, 0-based and contiguous.
    pub rank: usize,
    /// Pair count at the moment the rule was learned.
    pub learned_frequency: u64,
}

impl std::fmt::Display for MergeRule {
    /// `merge <rank> <left>+<right> freq=<count>`
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "merge {} {}+{} freq={}",
            self.rank, self.left, self.right, self.learned_frequency
        )
    }
}

impl MergeRule {
    pub fn token(&self) -> String {
        format!("{}{}", self.left, self.right)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainerConfig {
    /// Training stops once the most frequent pair occurs at most this often.
    pub threshold: u64,
    pub max_merges: Option<usize>,
    /// Add one randomized spelling of every valid input.
    pub augment: bool,
    pub seed: u64,
    /// Filter with the valence table as well as the grammar.
    pub strict: bool,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            threshold: 3,
            max_merges: None,
            augment: true,
            seed: 0,
            strict: true,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrainError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("all {0} input SMILES are invalid")]
    AllInvalid(usize),
    #[error("threshold must be at least 1")]
    ZeroThreshold,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainStats {
    pub inputs: usize,
    pub invalid: usize,
    /// Unit sequences trained on, after augmentation.
    pub sequences: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trained {
    pub merges: Vec<MergeRule>,
    /// Every atom-level unit seen in the training sequences.
    pub base_units: BTreeSet<String>,
    pub stats: TrainStats,
}

impl Trained {
    pub fn vocabulary(&self) -> Vec<String> {
        vocab_from_merges(&self.merges, &self.base_units)
    }
}

/// Counts every adjacent ordered pair occurrence; overlapping pairs
/// (`C C C` has two `(C, C)`) count separately.
pub fn count_pairs<S: AsRef<str>>(corpus: &[Vec<S>]) -> HashMap<(String, String), u64> {
    let mut counts = HashMap::new();
    for seq in corpus {
        for w in seq.windows(2) {
            let key = (w[0].as_ref().to_string(), w[1].as_ref().to_string());
            *counts.entry(key).or_insert(0) += 1;
        }
    }
    counts
}

/// Full pipeline: filter, augment, pre-tokenize, learn merges.
pub fn train<S: AsRef<str> + Sync>(
    corpus: &[S],
    config: &TrainerConfig,
) -> Result<Trained, TrainError> {
    train_with_progress(corpus, config, |_| {})
}

/// [`train`] with a callback invoked once per learned rule.
pub fn train_with_progress<S, F>(
    corpus: &[S],
    config: &TrainerConfig,
    progress: F,
) -> Result<Trained, TrainError>
where
    S: AsRef<str> + Sync,
    F: FnMut(&MergeRule),
{
    if config.threshold == 0 {
        return Err(TrainError::ZeroThreshold);
    }
    if corpus.is_empty() {
        return Err(TrainError::EmptyCorpus);
    }
    let (smiles, invalid) = if config.augment {
        let (out, stats) = augment_corpus(corpus, config.seed, config.strict);
        (out, stats.invalid)
    } else {
        let table = config.strict.then(ValenceTable::default);
        let kept: Vec<String> = corpus
            .par_iter()
            .map(|s| s.as_ref())
            .filter(|s| validate_with(s, table.as_ref()).valid)
            .map(str::to_string)
            .collect();
        let invalid = corpus.len() - kept.len();
        (kept, invalid)
    };
    if smiles.is_empty() {
        return Err(TrainError::AllInvalid(invalid));
    }
    let sequences: Vec<Vec<String>> = smiles
        .par_iter()
        .map(|s| atom_units(s).expect("validated SMILES pre-tokenize"))
        .collect();
    let base_units = sequences.iter().flatten().cloned().collect();
    let merges = learn_merges(&sequences, config.threshold, config.max_merges, progress);
    Ok(Trained {
        merges,
        base_units,
        stats: TrainStats {
            inputs: corpus.len(),
            invalid,
            sequences: sequences.len(),
        },
    })
}

/// Heap entry; the greatest entry is the highest count, then the
/// lexicographically smallest `(left, right)`.
#[derive(Debug, PartialEq, Eq)]
struct Candidate {
    count: u64,
    left: Arc<str>,
    right: Arc<str>,
    pair: (u32, u32),
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.count
            .cmp(&other.count)
            .then_with(|| (&other.left, &other.right).cmp(&(&self.left, &self.right)))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Default)]
struct Interner {
    ids: HashMap<Arc<str>, u32>,
    text: Vec<Arc<str>>,
}

impl Interner {
    fn intern(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let id = self.text.len() as u32;
        let arc: Arc<str> = Arc::from(s);
        self.text.push(arc.clone());
        self.ids.insert(arc, id);
        id
    }
}

fn pair_tally(word: &[u32]) -> HashMap<(u32, u32), i64> {
    let mut tally = HashMap::new();
    for w in word.windows(2) {
        *tally.entry((w[0], w[1])).or_insert(0) += 1;
    }
    tally
}

fn merge_word(word: &[u32], pair: (u32, u32), merged: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(word.len());
    let mut i = 0;
    while i < word.len() {
        if i + 1 < word.len() && (word[i], word[i + 1]) == pair {
            out.push(merged);
            i += 2;
        } else {
            out.push(word[i]);
            i += 1;
        }
    }
    out
}

/// Learns merges over unit sequences.
///
/// Picks the most frequent pair (ties: smallest `(left, right)`), replaces
/// its occurrences left to right without overlap, and repeats while the top
/// count exceeds `threshold` and fewer than `max_merges` rules exist.
pub fn learn_merges<F>(
    sequences: &[Vec<String>],
    threshold: u64,
    max_merges: Option<usize>,
    mut progress: F,
) -> Vec<MergeRule>
where
    F: FnMut(&MergeRule),
{
    let limit = max_merges.unwrap_or(usize::MAX);
    if limit == 0 {
        return Vec::new();
    }

    // Identical sequences collapse into one weighted word.
    let mut interner = Interner::default();
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut words: Vec<Vec<u32>> = Vec::new();
    let mut weights: Vec<i64> = Vec::new();
    for seq in sequences {
        let ids: Vec<u32> = seq.iter().map(|u| interner.intern(u)).collect();
        match index.get(&ids) {
            Some(&w) => weights[w] += 1,
            None => {
                index.insert(ids.clone(), words.len());
                words.push(ids);
                weights.push(1);
            }
        }
    }
    drop(index);

    let (mut counts, mut locations) = words
        .par_iter()
        .enumerate()
        .fold(
            || {
                (
                    HashMap::<(u32, u32), i64>::new(),
                    HashMap::<(u32, u32), HashSet<usize>>::new(),
                )
            },
            |(mut counts, mut locations), (w, word)| {
                for pair in word.windows(2).map(|p| (p[0], p[1])) {
                    *counts.entry(pair).or_insert(0) += weights[w];
                    locations.entry(pair).or_default().insert(w);
                }
                (counts, locations)
            },
        )
        .reduce(
            || (HashMap::new(), HashMap::new()),
            |(mut c1, mut l1), (c2, l2)| {
                for (k, v) in c2 {
                    *c1.entry(k).or_insert(0) += v;
                }
                for (k, v) in l2 {
                    l1.entry(k).or_default().extend(v);
                }
                (c1, l1)
            },
        );

    let candidate = |interner: &Interner, pair: (u32, u32), count: i64| Candidate {
        count: count as u64,
        left: interner.text[pair.0 as usize].clone(),
        right: interner.text[pair.1 as usize].clone(),
        pair,
    };
    let mut heap: BinaryHeap<Candidate> = counts
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|(&p, &c)| candidate(&interner, p, c))
        .collect();

    let mut rules = Vec::new();
    while rules.len() < limit {
        let Some(top) = heap.pop() else { break };
        let current = counts.get(&top.pair).copied().unwrap_or(0);
        if current as u64 != top.count || current <= 0 {
            continue;
        }
        if top.count <= threshold {
            break;
        }
        let rule = MergeRule {
            left: top.left.to_string(),
            right: top.right.to_string(),
            rank: rules.len(),
            learned_frequency: top.count,
        };
        let merged = interner.intern(&rule.token());
        progress(&rule);
        rules.push(rule);

        let mut touched: Vec<usize> = locations
            .remove(&top.pair)
            .map(|s| s.into_iter().collect())
            .unwrap_or_default();
        touched.sort_unstable();
        let mut changed: HashMap<(u32, u32), ()> = HashMap::new();
        for w in touched {
            let old = &words[w];
            if !old.windows(2).any(|p| (p[0], p[1]) == top.pair) {
                continue;
            }
            let new = merge_word(old, top.pair, merged);
            let mut delta = pair_tally(&new);
            for (pair, c) in pair_tally(old) {
                *delta.entry(pair).or_insert(0) -= c;
            }
            for (pair, d) in delta {
                if d == 0 {
                    continue;
                }
                *counts.entry(pair).or_insert(0) += d * weights[w];
                if d > 0 {
                    locations.entry(pair).or_default().insert(w);
                }
                changed.insert(pair, ());
            }
            words[w] = new;
        }
        for pair in changed.into_keys() {
            let c = counts[&pair];
            if c > 0 {
                heap.push(candidate(&interner, pair, c));
            } else {
                counts.remove(&pair);
            }
        }
    }
    rules
}

/// Base units (sorted) followed by one token per rule in rank order,
/// without duplicates.
pub fn vocab_from_merges(rules: &[MergeRule], base_units: &BTreeSet<String>) -> Vec<String> {
    let mut seen: HashSet<String> = base_units.iter().cloned().collect();
    let mut vocab: Vec<String> = base_units.iter().cloned().collect();
    for rule in rules {
        let token = rule.token();
        if seen.insert(token.clone()) {
            vocab.push(token);
        }
    }
    vocab
}

/// The `k` most frequently learned tokens, ties broken by rank.
pub fn report_top_tokens(rules: &[MergeRule], k: usize) -> Vec<(String, u64)> {
    let mut sorted: Vec<&MergeRule> = rules.iter().collect();
    sorted.sort_by(|a, b| {
        b.learned_frequency
            .cmp(&a.learned_frequency)
            .then(a.rank.cmp(&b.rank))
    });
    let mut seen = HashSet::new();
    sorted
        .into_iter()
        .map(|r| (r.token(), r.learned_frequency))
        .filter(|(t, _)| seen.insert(t.clone()))
        .take(k)
        .collect()
}
