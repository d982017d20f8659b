// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use smipe::tokenizer::{GreedyBpe, TokenizerModel};

use crate::{BaseFiles, InOut};

const CHUNK: usize = 4096;

fn is_stdio(path: Option<&Path>) -> bool {
    path.is_none_or(|p| p.as_os_str() == "-")
}

pub fn input(path: Option<&Path>) -> Result<Box<dyn BufRead>> {
    if is_stdio(path) {
        return Ok(Box::new(BufReader::new(io::stdin().lock())));
    }
    let path = path.unwrap();
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(Box::new(BufReader::new(f)))
}

pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    if is_stdio(path) {
        return Ok(Box::new(BufWriter::new(io::stdout().lock())));
    }
    let path = path.unwrap();
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(Box::new(BufWriter::new(f)))
}

pub fn read_string(path: Option<&Path>) -> Result<String> {
    let mut s = String::new();
    let name = path.map_or("standard input".to_string(), |p| p.display().to_string());
    input(path)?
        .read_to_string(&mut s)
        .with_context(|| format!("cannot read {name}"))?;
    Ok(s)
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut out = output(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Runs `f` over every input line (1-based line numbers) in parallel chunks
/// and writes the returned lines in input order.
pub fn map_lines<F>(io: &InOut, f: F) -> Result<()>
where
    F: Fn(usize, &str) -> Result<Vec<String>> + Sync,
{
    let mut lines = input(io.input.as_deref())?.lines();
    let mut out = output(io.out.as_deref())?;
    let mut first = 1;
    loop {
        let chunk: Vec<String> = lines.by_ref().take(CHUNK).collect::<io::Result<_>>()?;
        if chunk.is_empty() {
            break;
        }
        let results: Vec<Result<Vec<String>>> = chunk
            .par_iter()
            .enumerate()
            .map(|(k, line)| {
                let n = first + k;
                f(n, line.trim_end_matches('\r')).with_context(|| format!("line {n}"))
            })
            .collect();
        for r in results {
            for line in r? {
                writeln!(out, "{line}")?;
            }
        }
        first += chunk.len();
    }
    out.flush()?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<TokenizerModel> {
    let text = read_file(path)?;
    TokenizerModel::from_json(&text)
        .with_context(|| format!("invalid model file {}", path.display()))
}

pub fn load_base(files: &BaseFiles) -> Result<Option<GreedyBpe>> {
    let Some(vocab) = &files.base_vocab else {
        return Ok(None);
    };
    let vocab_text = read_file(vocab)?;
    let merges_text = match &files.base_merges {
        Some(p) => read_file(p)?,
        None => String::new(),
    };
    let base =
        GreedyBpe::from_strs(&vocab_text, &merges_text).context("invalid base tokenizer files")?;
    Ok(Some(base))
}

pub fn require_base(files: &BaseFiles) -> Result<GreedyBpe> {
    match load_base(files)? {
        Some(b) => Ok(b),
        None => bail!("--base-vocab is required"),
    }
}

pub fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<io::Error>())
        .any(|e| e.kind() == io::ErrorKind::BrokenPipe)
}
