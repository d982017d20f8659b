// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

//! Acceptance criteria, one line of output each.
//!
//! Runs without the libtest harness so the report is always printed. Exits
//! non-zero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smipe::corpus::fertility_report;
use smipe::extension::{extend_embeddings, EmbeddingMatrix, ExtensionPlan, PlanEntry, TokenSource};
use smipe::fingerprint::{
    morgan_fingerprint, tanimoto, Fingerprint, DEFAULT_NBITS, DEFAULT_RADIUS,
};
use smipe::metrics::{score_task, ScoreOptions};
use smipe::pretokenize::atom_units;
use smipe::smiles::{parse, write_canonical, write_random};
use smipe::spe::{learn_merges, train, TrainerConfig};
use smipe::tokenizer::TokenizerModel;

const ROUND_TRIP_LIMIT: Duration = Duration::from_secs(10);
const INVARIANCE_LIMIT: Duration = Duration::from_secs(30);
const EMBEDDING_REL_TOL: f64 = 1e-6;
const BLEND_SLACK: i64 = 1;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn round_trip() -> Outcome {
    let corpus = common::corpus();
    check(
        corpus.len() >= 1000,
        format!("corpus has only {} records", corpus.len()),
    )?;
    let start = Instant::now();
    let mut iso = 0;
    let mut joined = 0;
    for s in &corpus {
        let m = parse(s).map_err(|e| format!("{s}: {e}"))?;
        let again = parse(&write_canonical(&m)).map_err(|e| format!("{s}: {e}"))?;
        iso += usize::from(common::isomorphic(&m, &again));
        let units = atom_units(s).map_err(|e| format!("{s}: {e}"))?;
        joined += usize::from(units.concat() == *s);
    }
    let elapsed = start.elapsed();
    let n = corpus.len();
    check(
        iso == n,
        format!("{iso}/{n} isomorphic after canonical round trip"),
    )?;
    check(
        joined == n,
        format!("{joined}/{n} atom tokenizations rejoin"),
    )?;
    check(elapsed < ROUND_TRIP_LIMIT, format!("took {elapsed:.2?}"))?;
    Ok(format!("{n}/{n} isomorphic, {n}/{n} rejoin, {elapsed:.2?}"))
}

fn randomization_invariance() -> Outcome {
    let corpus = common::corpus();
    let start = Instant::now();
    let mut same_canon = 0;
    let mut same_fp = 0;
    for s in corpus.iter().take(200) {
        let m = parse(s).unwrap();
        let canon = write_canonical(&m);
        let fp = morgan_fingerprint(&m, DEFAULT_RADIUS, DEFAULT_NBITS).unwrap();
        for k in 0..16 {
            let v = parse(&write_random(&m, k)).map_err(|e| format!("{s} seed {k}: {e}"))?;
            same_canon += usize::from(write_canonical(&v) == canon);
            same_fp +=
                usize::from(morgan_fingerprint(&v, DEFAULT_RADIUS, DEFAULT_NBITS).unwrap() == fp);
        }
    }
    let elapsed = start.elapsed();
    check(
        same_canon == 3200,
        format!("{same_canon}/3200 canonical matches"),
    )?;
    check(
        same_fp == 3200,
        format!("{same_fp}/3200 fingerprint matches"),
    )?;
    check(elapsed < INVARIANCE_LIMIT, format!("took {elapsed:.2?}"))?;
    Ok(format!(
        "3200/3200 canonical, 3200/3200 fingerprints, {elapsed:.2?}"
    ))
}

fn trainer_oracle() -> Outcome {
    for seed in 0..25u64 {
        let corpus = common::random_corpus(seed, 1 + (seed as usize * 13) % 50);
        let seqs: Vec<Vec<String>> = corpus.iter().map(|s| atom_units(s).unwrap()).collect();
        let fast: Vec<(String, String, u64)> = learn_merges(&seqs, 3, None, |_| {})
            .into_iter()
            .map(|r| (r.left, r.right, r.learned_frequency))
            .collect();
        let slow = common::naive_merges(seqs, 3, None);
        check(
            fast == slow,
            format!("corpus {seed} diverges from the recount oracle"),
        )?;
    }
    let three: Vec<Vec<String>> = ["CO", "CO", "CO"]
        .iter()
        .map(|s| atom_units(s).unwrap())
        .collect();
    let at_three = learn_merges(&three, 3, None, |_| {}).len();
    check(
        at_three == 0,
        format!("max pair count 3 gave {at_three} merges"),
    )?;
    let four: Vec<Vec<String>> = ["CO"; 4].iter().map(|s| atom_units(s).unwrap()).collect();
    let at_four = learn_merges(&four, 3, None, |_| {}).len();
    check(
        at_four == 1,
        format!("max pair count 4 gave {at_four} merges"),
    )?;
    Ok("25/25 corpora match the oracle; count 3 gives 0 merges".into())
}

fn fertility() -> Outcome {
    let corpus = common::corpus();
    let config = TrainerConfig {
        threshold: 3,
        ..TrainerConfig::default()
    };
    let trained = train(&corpus, &config).map_err(|e| e.to_string())?;
    let model = TokenizerModel::from_trained(&trained.merges, &trained.base_units)
        .map_err(|e| e.to_string())?;
    let report = fertility_report(
        &corpus,
        |s| atom_units(s).unwrap().len(),
        |s| model.encode_smiles(s).unwrap().len(),
    )
    .map_err(|e| e.to_string())?;
    let summary = format!(
        "median {} -> {}, single-token fraction {:.4}",
        report.median_a, report.median_b, report.single_token_fraction_b
    );
    check(report.median_b < report.median_a, summary.clone())?;
    check(report.single_token_fraction_b > 0.0, summary.clone())?;
    Ok(summary)
}

fn fallback() -> Outcome {
    let model =
        TokenizerModel::from_pairs(&[("[1*]", "N")], ["[1*]", "N", "C", "(", "=", "O", ")"])
            .map_err(|e| e.to_string())?;
    check(!model.vocab().contains("[2*]"), "vocabulary contains [2*]")?;
    let ids = model
        .encode_smiles("[1*]NC(=O)N[2*]")
        .map_err(|e| e.to_string())?;
    let tokens: Vec<&str> = ids
        .iter()
        .map(|&i| model.vocab().token(i).unwrap())
        .collect();
    let want = ["[1*]N", "C", "(", "=", "O", ")", "N", "[", "2", "*", "]"];
    check(tokens == want, format!("got {tokens:?}"))?;
    Ok(tokens.join(" "))
}

fn embedding_extension() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut shapes: Vec<(usize, usize)> = vec![(1024, 64), (1, 1), (1024, 1), (1, 64)];
    shapes.extend((0..16).map(|_| (rng.gen_range(1..=1024), rng.gen_range(1..=64))));
    let mut worst = 0f64;
    for &(rows, cols) in &shapes {
        let values: Vec<f32> = (0..rows * cols)
            .map(|_| rng.gen_range(-3.0f32..3.0))
            .collect();
        let base = EmbeddingMatrix::new(rows, cols, values).unwrap();
        let plan = ExtensionPlan {
            base_vocab_size: rows,
            entries: (0..3)
                .map(|i| PlanEntry {
                    token: format!("new{i}"),
                    source: TokenSource::Smiles,
                    freq: 0,
                })
                .collect(),
            collisions_dropped: vec![],
        };
        let out = extend_embeddings(&base, &plan).map_err(|e| e.to_string())?;
        check(
            out.rows() == rows + 3,
            format!("{rows}x{cols}: wrong row count"),
        )?;
        let kept = (0..rows).all(|r| {
            out.row(r)
                .iter()
                .zip(base.row(r))
                .all(|(a, b)| a.to_bits() == b.to_bits())
        });
        check(kept, format!("{rows}x{cols}: base rows changed"))?;
        // Column means in a different order: Kahan summation from the last row.
        for c in 0..cols {
            let (mut sum, mut comp) = (0f64, 0f64);
            for r in (0..rows).rev() {
                let y = f64::from(base.row(r)[c]) - comp;
                let t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
            let want = sum / rows as f64;
            for r in rows..rows + 3 {
                let got = f64::from(out.row(r)[c]);
                let rel = if got == want {
                    0.0
                } else {
                    (got - want).abs() / want.abs()
                };
                worst = worst.max(rel);
                check(
                    rel <= EMBEDDING_REL_TOL,
                    format!("{rows}x{cols} col {c}: {got} vs {want}"),
                )?;
            }
        }
    }
    Ok(format!(
        "{} matrices, worst relative error {worst:.2e}",
        shapes.len()
    ))
}

fn metric_correctness() -> Outcome {
    let records = common::synthetic_eval(42);
    check(records.len() == 100, "synthetic set is not 100 records")?;
    let (score, per) = score_task(&records, &ScoreOptions::default()).map_err(|e| e.to_string())?;
    check(
        score.n_exact_match == 60,
        format!("n_exact_match {}", score.n_exact_match),
    )?;
    check(
        score.n_invalid == 15,
        format!("n_invalid {}", score.n_invalid),
    )?;
    let exact_ok = per.iter().enumerate().all(|(i, r)| r.exact == (i < 60));
    check(exact_ok, "exact flags do not follow the construction")?;
    let fps_ok = per.iter().filter(|r| r.exact).all(|r| r.fps == 1.0);
    check(fps_ok, "an exact record has fps below 1.0")?;
    Ok(format!(
        "n_exact_match 60, n_invalid 15, mean_fps {:.4}",
        score.mean_fps
    ))
}

fn run_blend(dir: &std::path::Path, threads: &str, seed: &str) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_smipe"))
        .args([
            "--quiet",
            "--threads",
            threads,
            "--seed",
            seed,
            "blend",
            "--total",
            "10000",
            "--config",
        ])
        .arg(dir.join("blend.json"))
        .output()
        .map_err(|e| e.to_string())?;
    check(
        out.status.success(),
        String::from_utf8_lossy(&out.stderr).to_string(),
    )?;
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn blend_fidelity() -> Outcome {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let weights: [(&str, f64, usize); 4] = [
        ("a", 0.50, 7000),
        ("b", 0.35, 900),
        ("c", 0.10, 1500),
        ("d", 0.05, 40),
    ];
    let mut specs = Vec::new();
    for (name, w, n) in weights {
        let body: String = (0..n).map(|k| format!("{name}-{k}\n")).collect();
        std::fs::write(dir.path().join(format!("{name}.txt")), body).unwrap();
        specs.push(serde_json::json!({"name": name, "path": format!("{name}.txt"), "weight": w}));
    }
    std::fs::write(
        dir.path().join("blend.json"),
        serde_json::to_string(&specs).unwrap(),
    )
    .unwrap();
    let one = run_blend(dir.path(), "1", "11")?;
    let again = run_blend(dir.path(), "1", "11")?;
    let eight = run_blend(dir.path(), "8", "11")?;
    let mut counts: BTreeMap<String, i64> = BTreeMap::new();
    for line in one.lines() {
        let v: serde_json::Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
        let text = v["text"].as_str().ok_or("record without text")?;
        *counts
            .entry(text.split('-').next().unwrap().to_string())
            .or_default() += 1;
    }
    for (name, w, _) in weights {
        let want = (w * 10_000.0).round() as i64;
        let got = counts.get(name).copied().unwrap_or(0);
        check(
            (got - want).abs() <= BLEND_SLACK,
            format!("{name}: {got} records, want {want}"),
        )?;
    }
    check(one == again, "two runs with the same seed differ")?;
    check(one == eight, "--threads 1 and --threads 8 differ")?;
    let shown: Vec<String> = counts.values().map(i64::to_string).collect();
    Ok(format!(
        "counts {}, deterministic, threads 1 == 8",
        shown.join("/")
    ))
}

fn tanimoto_arithmetic() -> Outcome {
    let x = morgan_fingerprint(&parse("CC(=O)Oc1ccccc1C(=O)O").unwrap(), 2, 2048).unwrap();
    let same = tanimoto(&x, &x).unwrap();
    let a = Fingerprint::from_bits(64, &[1, 2, 3]).unwrap();
    let b = Fingerprint::from_bits(64, &[2, 3, 4]).unwrap();
    let disjoint = Fingerprint::from_bits(64, &[10, 20]).unwrap();
    let zero = tanimoto(&a, &disjoint).unwrap();
    let half = tanimoto(&a, &b).unwrap();
    check(
        same == 1.0 && zero == 0.0 && half == 0.5,
        format!("{same}, {zero}, {half}"),
    )?;
    Ok(format!("{same}, {zero}, {half}"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 round trip", round_trip),
        ("2 randomization invariance", randomization_invariance),
        ("3 trainer oracle", trainer_oracle),
        ("4 fertility", fertility),
        ("5 character fallback", fallback),
        ("6 embedding extension", embedding_extension),
        ("7 metric correctness", metric_correctness),
        ("8 blend fidelity", blend_fidelity),
        ("9 tanimoto arithmetic", tanimoto_arithmetic),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                println!("FAIL  {name}: {detail}");
                failed.push(name);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed: {failed:?}");
        std::process::exit(1);
    }
}
