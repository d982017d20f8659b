// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use smipe::corpus::{parse_records, RecordFormat};
use smipe::extension::{
    build_extension_plan, extend_embeddings, extract_text_oov, EmbeddingMatrix, ExtensionPlan,
    PlanOptions,
};
use smipe::pretokenize::atom_units;
use smipe::spe::{train_with_progress, MergeRule, TrainerConfig};
use smipe::tokenizer::{decode_document, encode_document, BaseTokenizer, TokenizerModel};

use crate::io::{
    load_base, load_model, map_lines, output, read_file, read_string, require_base, write_json,
};
use crate::{BaseFiles, Format, Global, InOut};

pub struct TrainArgs {
    pub threshold: u64,
    pub max_merges: Option<usize>,
    pub augment: bool,
    pub strict: bool,
    pub format: Format,
    pub field: String,
    pub merge_stats: Option<PathBuf>,
}

pub fn record_format(f: Format) -> RecordFormat {
    match f {
        Format::Lines => RecordFormat::Lines,
        Format::Jsonl => RecordFormat::Jsonl,
    }
}

pub fn train(io: &InOut, args: TrainArgs, g: Global) -> Result<()> {
    let text = read_string(io.input.as_deref())?;
    let corpus = parse_records(&text, record_format(args.format), &args.field)?;
    let config = TrainerConfig {
        threshold: args.threshold,
        max_merges: args.max_merges,
        augment: args.augment,
        seed: g.seed,
        strict: args.strict,
    };
    let trained = train_with_progress(&corpus, &config, |rule| {
        if !g.quiet {
            eprintln!("{rule}");
        }
    })?;
    let model = TokenizerModel::from_trained(&trained.merges, &trained.base_units)?;
    let mut out = output(io.out.as_deref())?;
    writeln!(out, "{}", model.to_json())?;
    out.flush()?;
    if let Some(path) = &args.merge_stats {
        write_json(Some(path), &trained.merges)?;
    }
    if !g.quiet {
        let s = trained.stats;
        eprintln!(
            "inputs {} invalid {} sequences {}; atom units {} merges {} vocabulary {}",
            s.inputs,
            s.invalid,
            s.sequences,
            trained.base_units.len(),
            trained.merges.len(),
            model.vocab().len()
        );
    }
    Ok(())
}

fn parse_ids(line: &str) -> Result<Vec<u32>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<u32>()
                .with_context(|| format!("not a token id: {t:?}"))
        })
        .collect()
}

pub fn encode(io: &InOut, model: &Path, base: &BaseFiles, tokens: bool) -> Result<()> {
    let model = load_model(model)?;
    let base = load_base(base)?;
    map_lines(io, |_, line| {
        let ids = match &base {
            Some(b) => encode_document(&model, b, line)?,
            None => model.encode_smiles(line)?,
        };
        if tokens {
            let texts: Vec<String> = match &base {
                Some(b) => ids
                    .iter()
                    .map(|&i| {
                        decode_document(&model, b, &[i]).unwrap_or_else(|_| format!("<id {i}>"))
                    })
                    .collect(),
                None => ids
                    .iter()
                    .map(|&i| model.vocab().token(i).unwrap_or_default().to_string())
                    .collect(),
            };
            return Ok(vec![serde_json::to_string(&texts)?]);
        }
        Ok(vec![ids
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(" ")])
    })
}

pub fn decode(io: &InOut, model: &Path, base: &BaseFiles) -> Result<()> {
    let model = load_model(model)?;
    let base = load_base(base)?;
    map_lines(io, |_, line| {
        let ids = parse_ids(line)?;
        let text = match &base {
            Some(b) => decode_document(&model, b, &ids)?,
            None => model.decode(&ids)?,
        };
        Ok(vec![text])
    })
}

#[derive(Serialize, Deserialize)]
struct WordCount {
    word: String,
    freq: u64,
}

pub fn extract_oov(
    io: &InOut,
    base: &BaseFiles,
    k: usize,
    format: Format,
    field: &str,
) -> Result<()> {
    let base = require_base(base)?;
    let text = read_string(io.input.as_deref())?;
    let docs = parse_records(&text, record_format(format), field)?;
    let words: Vec<WordCount> = extract_text_oov(&docs, &base, k)
        .into_iter()
        .map(|(word, freq)| WordCount { word, freq })
        .collect();
    write_json(io.out.as_deref(), &words)
}

pub fn plan(
    model: &Path,
    base: &BaseFiles,
    text_oov: Option<&Path>,
    merge_stats: Option<&Path>,
    include_atom_units: bool,
    out: Option<&Path>,
) -> Result<()> {
    let model = load_model(model)?;
    let base = require_base(base)?;
    let mut freq: HashMap<String, u64> = HashMap::new();
    if let Some(path) = merge_stats {
        let rules: Vec<MergeRule> = serde_json::from_str(&read_file(path)?)
            .with_context(|| format!("invalid merge stats {}", path.display()))?;
        for r in rules {
            freq.entry(r.token()).or_insert(r.learned_frequency);
        }
    }
    // SMILES tokens: everything that is not a special and splits into atom
    // units. Fallback characters such as "a" or "?" do not.
    let smiles: Vec<(String, u64)> = model
        .vocab()
        .tokens()
        .iter()
        .filter(|t| !model.vocab().is_special(t) && atom_units(t).is_ok())
        .map(|t| (t.clone(), freq.get(t).copied().unwrap_or(0)))
        .collect();
    let text: Vec<(String, u64)> = match text_oov {
        Some(path) => {
            let words: Vec<WordCount> = serde_json::from_str(&read_file(path)?)
                .with_context(|| format!("invalid word list {}", path.display()))?;
            words.into_iter().map(|w| (w.word, w.freq)).collect()
        }
        None => Vec::new(),
    };
    let specials: Vec<String> = model.to_file().special_tokens;
    let plan = build_extension_plan(
        &smiles,
        &text,
        &specials,
        base.vocab(),
        PlanOptions { include_atom_units },
    );
    write_json(out, &plan)
}

pub fn extend_emb(emb: &Path, plan: &Path, out: &Path) -> Result<()> {
    let bytes = std::fs::read(emb).with_context(|| format!("cannot read {}", emb.display()))?;
    let matrix = EmbeddingMatrix::from_bytes(&bytes)
        .with_context(|| format!("invalid EMB1 file {}", emb.display()))?;
    let plan: ExtensionPlan = serde_json::from_str(&read_file(plan)?)
        .with_context(|| format!("invalid plan {}", plan.display()))?;
    let grown = extend_embeddings(&matrix, &plan)?;
    std::fs::write(out, grown.to_bytes())
        .with_context(|| format!("cannot write {}", out.display()))?;
    Ok(())
}
