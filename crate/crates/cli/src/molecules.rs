// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

use std::io::{BufRead, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use smipe::fingerprint::{morgan_fingerprint, tanimoto, Fingerprint};
use smipe::pretokenize::atom_units;
use smipe::smiles::{
    self, parse, record_seed, write_canonical, write_random, Molecule, ValidityReport,
};

use crate::io::{input, map_lines, output};
use crate::{FpArgs, InOut};

fn molecule(s: &str) -> Result<Molecule> {
    parse(s).with_context(|| format!("invalid SMILES {s:?}"))
}

#[derive(Serialize)]
struct Validity<'a> {
    smiles: &'a str,
    #[serde(flatten)]
    report: ValidityReport,
}

pub fn validate(io: &InOut, strict: bool) -> Result<()> {
    map_lines(io, |_, s| {
        let report = smiles::validate(s, strict);
        Ok(vec![serde_json::to_string(&Validity {
            smiles: s,
            report,
        })?])
    })
}

pub fn canon(io: &InOut) -> Result<()> {
    map_lines(io, |_, s| Ok(vec![write_canonical(&molecule(s)?)]))
}

pub fn randomize(io: &InOut, n: usize, seed: u64) -> Result<()> {
    map_lines(io, |line, s| {
        let m = molecule(s)?;
        Ok((0..n)
            .map(|k| write_random(&m, record_seed(seed, ((line - 1) * n + k) as u64)))
            .collect())
    })
}

pub fn pretokenize(io: &InOut, sep: &str) -> Result<()> {
    map_lines(io, |_, s| Ok(vec![atom_units(s)?.join(sep)]))
}

fn fingerprint(s: &str, fp: FpArgs) -> Result<Fingerprint> {
    Ok(morgan_fingerprint(&molecule(s)?, fp.radius, fp.nbits)?)
}

pub fn fps(io: &InOut, fp: FpArgs) -> Result<()> {
    // Fail on a bad size before reading any input.
    Fingerprint::empty(fp.nbits, fp.radius)?;
    map_lines(io, |_, s| Ok(vec![fingerprint(s, fp)?.to_hex()]))
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    input(Some(path))?
        .lines()
        .collect::<std::io::Result<_>>()
        .with_context(|| format!("cannot read {}", path.display()))
}

pub fn sim(a: &Path, b: &Path, out: Option<&Path>, fp: FpArgs) -> Result<()> {
    Fingerprint::empty(fp.nbits, fp.radius)?;
    let (la, lb) = (read_lines(a)?, read_lines(b)?);
    if la.len() != lb.len() {
        bail!(
            "{} has {} lines but {} has {}",
            a.display(),
            la.len(),
            b.display(),
            lb.len()
        );
    }
    let sims: Vec<Result<f64>> = la
        .par_iter()
        .zip(&lb)
        .enumerate()
        .map(|(i, (x, y))| {
            let (fx, fy) = (fingerprint(x, fp), fingerprint(y, fp));
            let (fx, fy) = (
                fx.with_context(|| format!("line {}", i + 1))?,
                fy.with_context(|| format!("line {}", i + 1))?,
            );
            Ok(tanimoto(&fx, &fy)?)
        })
        .collect();
    let mut w = output(out)?;
    for s in sims {
        writeln!(w, "{:.6}", s?)?;
    }
    w.flush()?;
    Ok(())
}
