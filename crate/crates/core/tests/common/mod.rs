// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

#![allow(dead_code)]

use petgraph::algo::is_isomorphic_matching;
use petgraph::graph::UnGraph;
use smipe::smiles::{Atom, BondOrder, Molecule};

pub const CORPUS: &str = include_str!("../../data/nci_1200.smi");

pub fn corpus() -> Vec<&'static str> {
    CORPUS.lines().filter(|l| !l.is_empty()).collect()
}

fn to_graph(m: &Molecule) -> UnGraph<Atom, BondOrder> {
    let mut g = UnGraph::new_undirected();
    let nodes: Vec<_> = m.atoms().iter().map(|a| g.add_node(a.clone())).collect();
    for b in m.bonds() {
        g.add_edge(nodes[b.begin], nodes[b.end], b.order);
    }
    g
}

/// Attribute-matching graph isomorphism, independent of the canonicalizer.
/// Bond directions are ignored here since they are orientation-relative.
pub fn isomorphic(a: &Molecule, b: &Molecule) -> bool {
    a.atom_count() == b.atom_count()
        && a.bonds().len() == b.bonds().len()
        && is_isomorphic_matching(&to_graph(a), &to_graph(b), |x, y| x == y, |x, y| x == y)
}

/// Recount-everything BPE: one full pass over all sequences per merge.
/// Returns `(left, right, count)` per learned rule.
pub fn naive_merges(
    mut seqs: Vec<Vec<String>>,
    threshold: u64,
    max: Option<usize>,
) -> Vec<(String, String, u64)> {
    let mut rules = Vec::new();
    loop {
        if max.is_some_and(|m| rules.len() >= m) {
            return rules;
        }
        let mut counts: std::collections::BTreeMap<(String, String), u64> = Default::default();
        for s in &seqs {
            for i in 0..s.len().saturating_sub(1) {
                *counts.entry((s[i].clone(), s[i + 1].clone())).or_insert(0) += 1;
            }
        }
        // BTreeMap iterates in (left, right) order, so the first maximum wins ties.
        let mut best: Option<(&(String, String), u64)> = None;
        for (k, &c) in &counts {
            if best.is_none_or(|(_, bc)| c > bc) {
                best = Some((k, c));
            }
        }
        let Some(((l, r), c)) = best.map(|(k, c)| (k.clone(), c)) else {
            return rules;
        };
        if c <= threshold {
            return rules;
        }
        for s in seqs.iter_mut() {
            let mut out = Vec::with_capacity(s.len());
            let mut i = 0;
            while i < s.len() {
                if i + 1 < s.len() && s[i] == l && s[i + 1] == r {
                    out.push(format!("{l}{r}"));
                    i += 2;
                } else {
                    out.push(s[i].clone());
                    i += 1;
                }
            }
            *s = out;
        }
        rules.push((l, r, c));
    }
}

/// Small deterministic generator for SMILES-like corpora: substituent
/// chains, rings and branches stitched from a fixed fragment list.
pub fn random_corpus(seed: u64, size: usize) -> Vec<String> {
    const FRAGMENTS: [&str; 16] = [
        "C",
        "CC",
        "O",
        "N",
        "c1ccccc1",
        "C(=O)O",
        "C(=O)N",
        "Cl",
        "F",
        "C1CCCCC1",
        "CO",
        "c1ccncc1",
        "S(=O)(=O)",
        "C#N",
        "C(C)C",
        "OC",
    ];
    let mut state = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let mut next = |n: usize| {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 33) as usize) % n
    };
    let corpus = corpus();
    (0..size)
        .map(|_| {
            if next(3) == 0 {
                return corpus[next(corpus.len())].to_string();
            }
            let parts = 1 + next(5);
            let mut s = String::new();
            for _ in 0..parts {
                s.push_str(FRAGMENTS[next(FRAGMENTS.len())]);
            }
            s
        })
        .collect()
}

/// 100 `(output, gold)` records: 60 are random spellings of the gold
/// molecule, 25 are a different molecule (checked non-isomorphic), 15 are
/// unusable (no tags, broken syntax or over-valent atoms).
pub fn synthetic_eval(seed: u64) -> Vec<(String, String)> {
    use smipe::smiles::{parse, write_random};
    let corpus = corpus();
    let pick = |i: u64| corpus[((seed.wrapping_mul(31) + i * 97) % corpus.len() as u64) as usize];
    let mut out = Vec::new();
    for i in 0..60 {
        let gold = pick(i);
        let spelled = write_random(&parse(gold).unwrap(), seed ^ i);
        out.push((
            format!("A possible product can be <SMILES>{spelled}</SMILES>"),
            gold.to_string(),
        ));
    }
    let mut j = 0;
    for i in 60..85 {
        let gold = pick(i);
        let other = loop {
            j += 1;
            let cand = pick(j + 500);
            if !isomorphic(&parse(cand).unwrap(), &parse(gold).unwrap()) {
                break cand;
            }
        };
        out.push((format!("<SMILES>{other}</SMILES>"), gold.to_string()));
    }
    let broken = ["C1CC", "CC(C", "C(C)(C)(C)(C)C", "C[", "CC))"];
    for i in 85..100u64 {
        let gold = pick(i);
        let output = match i % 3 {
            0 => format!("I am not sure. {gold}"),
            1 => format!("<SMILES>{}</SMILES>", broken[(i % 5) as usize]),
            _ => format!("<SMILES>{gold}{}", "</SMILE>"),
        };
        out.push((output, gold.to_string()));
    }
    out
}
