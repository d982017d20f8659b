// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smipe::corpus::{
    blend as blend_records, concat_records, fertility_report, parse_records, wrap_smiles,
    DatasetSpec, RecordFormat,
};
use smipe::metrics::{
    per_record_tsv, score_task, ExtractMode, InvalidPolicy, MatchMode, ScoreOptions,
};
use smipe::pretokenize::atom_units;
use smipe::tokenizer::BaseTokenizer;

use crate::io::{load_model, output, read_file, read_string, require_base, write_json};
use crate::{BaseFiles, Baseline, FpArgs, Global, InOut};

#[derive(Clone, Copy, ValueEnum)]
pub enum Matching {
    Canonical,
    Raw,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Invalid {
    Zero,
    Exclude,
}

pub struct ScoreArgs {
    pub matching: Matching,
    pub invalid: Invalid,
    pub open_tag_in_prompt: bool,
    pub strict: bool,
    pub per_record: Option<PathBuf>,
    pub fp: FpArgs,
}

#[derive(Deserialize)]
struct Prediction {
    output: String,
    gold: String,
}

pub fn score(io: &InOut, args: ScoreArgs) -> Result<()> {
    let text = read_string(io.input.as_deref())?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let p: Prediction =
            serde_json::from_str(line).with_context(|| format!("line {}", i + 1))?;
        records.push((p.output, p.gold));
    }
    let options = ScoreOptions {
        extract: if args.open_tag_in_prompt {
            ExtractMode::OpenTagInPrompt
        } else {
            ExtractMode::Paired
        },
        matching: match args.matching {
            Matching::Canonical => MatchMode::Canonical,
            Matching::Raw => MatchMode::Raw,
        },
        invalid: match args.invalid {
            Invalid::Zero => InvalidPolicy::Zero,
            Invalid::Exclude => InvalidPolicy::Exclude,
        },
        strict: args.strict,
        radius: args.fp.radius,
        nbits: args.fp.nbits,
    };
    let (score, per) = score_task(&records, &options)?;
    if let Some(path) = &args.per_record {
        std::fs::write(path, per_record_tsv(&per))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    write_json(io.out.as_deref(), &score)
}

#[derive(Serialize)]
struct TextRecord<'a> {
    text: &'a str,
}

pub fn blend(
    config: &Path,
    total: usize,
    out: Option<&Path>,
    manifest: Option<&Path>,
    g: Global,
) -> Result<()> {
    let specs: Vec<DatasetSpec> = serde_json::from_str(&read_file(config)?)
        .with_context(|| format!("invalid blend config {}", config.display()))?;
    let dir = config.parent().unwrap_or(Path::new("."));
    let data: Vec<Vec<String>> = specs
        .par_iter()
        .map(|s| {
            let path = dir.join(&s.path);
            let text = read_file(&path)?;
            parse_records(&text, s.format, "text")
                .with_context(|| format!("dataset {:?} ({})", s.name, path.display()))
        })
        .collect::<Result<_>>()?;
    let b = blend_records(&specs, &data, total, g.seed)?;
    let mut w = output(out)?;
    for r in &b.records {
        serde_json::to_writer(&mut w, &TextRecord { text: &r.text })?;
        writeln!(w)?;
    }
    w.flush()?;
    if let Some(path) = manifest {
        write_json(Some(path), &b.manifest)?;
    }
    if !g.quiet {
        for (name, n) in &b.manifest {
            eprintln!("{name}: {n}");
        }
    }
    Ok(())
}

#[derive(Deserialize)]
struct SpanRecord {
    text: String,
    #[serde(default)]
    spans: Vec<(usize, usize)>,
}

pub fn wrap(io: &InOut, concat: bool) -> Result<()> {
    let text = read_string(io.input.as_deref())?;
    let mut wrapped = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let r: SpanRecord =
            serde_json::from_str(line).with_context(|| format!("line {}", i + 1))?;
        wrapped.push(wrap_smiles(&r.text, &r.spans).with_context(|| format!("line {}", i + 1))?);
    }
    let mut w = output(io.out.as_deref())?;
    if concat {
        serde_json::to_writer(
            &mut w,
            &TextRecord {
                text: &concat_records(&wrapped),
            },
        )?;
        writeln!(w)?;
    } else {
        for t in &wrapped {
            serde_json::to_writer(&mut w, &TextRecord { text: t })?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn fertility(
    io: &InOut,
    model: &Path,
    baseline: Baseline,
    base: &BaseFiles,
    tsv: Option<&Path>,
    g: Global,
) -> Result<()> {
    let model = load_model(model)?;
    let base = match baseline {
        Baseline::Atom => None,
        Baseline::Base => Some(require_base(base)?),
    };
    let text = read_string(io.input.as_deref())?;
    let lines = parse_records(&text, RecordFormat::Lines, "")?;
    let (kept, skipped): (Vec<&String>, Vec<&String>) =
        lines.iter().partition(|s| atom_units(s).is_ok());
    if kept.is_empty() {
        bail!("no SMILES in the input pre-tokenize");
    }
    if !skipped.is_empty() && !g.quiet {
        eprintln!("skipped {} lines that do not pre-tokenize", skipped.len());
    }
    let report = fertility_report(
        &kept,
        |s| match &base {
            Some(b) => b.encode(s).len(),
            None => atom_units(s).map_or(0, |u| u.len()),
        },
        |s| model.encode_smiles(s).map_or(0, |ids| ids.len()),
    )?;
    if let Some(path) = tsv {
        std::fs::write(path, report.histogram_tsv())
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    write_json(io.out.as_deref(), &report)
}
