// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

//! Canonical atom ranking.
//!
//! Atoms start in classes of equal invariant tuples and are refined by their
//! neighbors' classes until the partition stops splitting. Remaining ties are
//! broken by individualizing one member of the first non-trivial class and
//! refining again. While the number of explored branches stays within
//! [`BRANCH_BUDGET`] every member of the class is tried and the
//! lexicographically smallest output wins, so the result does not depend on
//! input atom order. Past the budget the lowest-index member is taken.

use super::write::write_traversal;
use super::Molecule;

pub const BRANCH_BUDGET: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct AtomInvariant {
    atomic_number: u8,
    charge: i8,
    isotope: u16,
    aromatic: bool,
    degree: usize,
    hydrogens: u32,
    bracket: bool,
    chirality: u8,
    atom_class: u32,
}

fn initial_classes(m: &Molecule) -> Vec<u32> {
    let keys: Vec<AtomInvariant> = m
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| AtomInvariant {
            atomic_number: a.element.atomic_number(),
            charge: a.charge,
            isotope: a.isotope.unwrap_or(0),
            aromatic: a.aromatic,
            degree: m.degree(i),
            hydrogens: m.hydrogen_count(i),
            bracket: a.explicit_h.is_some(),
            chirality: a.chirality.map_or(0, |c| c as u8 + 1),
            atom_class: a.atom_class.map_or(0, |c| c + 1),
        })
        .collect();
    dense_rank(&keys)
}

/// Dense class ids (0..k) in ascending key order.
fn dense_rank<K: Ord>(keys: &[K]) -> Vec<u32> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut ranks = vec![0u32; keys.len()];
    let mut class = 0u32;
    for w in 0..idx.len() {
        if w > 0 && keys[idx[w]] != keys[idx[w - 1]] {
            class += 1;
        }
        ranks[idx[w]] = class;
    }
    ranks
}

fn class_count(ranks: &[u32]) -> usize {
    ranks.iter().max().map_or(0, |&m| m as usize + 1)
}

fn refine(m: &Molecule, ranks: &mut Vec<u32>) {
    let mut count = class_count(ranks);
    loop {
        let keys: Vec<(u32, Vec<(u32, u8)>)> = (0..m.atom_count())
            .map(|i| {
                let mut env: Vec<(u32, u8)> = m
                    .neighbors(i)
                    .iter()
                    .map(|&(v, b)| {
                        let bond = &m.bonds()[b];
                        (
                            ranks[v],
                            bond.order.code() * 2 + u8::from(bond.direction.is_some()),
                        )
                    })
                    .collect();
                env.sort_unstable();
                (ranks[i], env)
            })
            .collect();
        *ranks = dense_rank(&keys);
        let next = class_count(ranks);
        if next == count {
            return;
        }
        count = next;
    }
}

fn individualize(ranks: &mut [u32], chosen: usize) {
    let class = ranks[chosen];
    for (i, r) in ranks.iter_mut().enumerate() {
        if *r > class || (*r == class && i != chosen) {
            *r += 1;
        }
    }
}

fn emit(m: &Molecule, ranks: &[u32]) -> String {
    let labels = m.component_labels();
    let mut starts: Vec<usize> = vec![usize::MAX; m.components()];
    for (atom, &c) in labels.iter().enumerate() {
        if starts[c] == usize::MAX || ranks[atom] < ranks[starts[c]] {
            starts[c] = atom;
        }
    }
    starts.sort_by_key(|&a| ranks[a]);
    write_traversal(m, &starts, |_, nbrs| nbrs.sort_by_key(|&(v, _)| ranks[v]))
}

struct Best {
    text: String,
    ranks: Vec<u32>,
}

fn search(m: &Molecule, mut ranks: Vec<u32>, path: usize, best: &mut Option<Best>) {
    refine(m, &mut ranks);
    let n = m.atom_count();
    if class_count(&ranks) == n {
        let text = emit(m, &ranks);
        if best.as_ref().is_none_or(|b| text < b.text) {
            *best = Some(Best { text, ranks });
        }
        return;
    }
    let mut sizes = vec![0usize; n];
    for &r in &ranks {
        sizes[r as usize] += 1;
    }
    let target = sizes.iter().position(|&s| s > 1).expect("a tied class") as u32;
    let cell: Vec<usize> = (0..n).filter(|&i| ranks[i] == target).collect();
    let (choices, next_path) = if path.saturating_mul(cell.len()) <= BRANCH_BUDGET {
        (&cell[..], path * cell.len())
    } else {
        (&cell[..1], path)
    };
    for &atom in choices {
        let mut r = ranks.clone();
        individualize(&mut r, atom);
        search(m, r, next_path, best);
    }
}

fn best_leaf(m: &Molecule) -> Option<Best> {
    if m.atom_count() == 0 {
        return None;
    }
    let mut best = None;
    search(m, initial_classes(m), 1, &mut best);
    best
}

/// Canonical rank of every atom (a permutation of `0..n`).
pub fn canonical_ranks(m: &Molecule) -> Vec<usize> {
    best_leaf(m).map_or_else(Vec::new, |b| {
        b.ranks.into_iter().map(|r| r as usize).collect()
    })
}

/// Writes the canonical SMILES of `m`.
///
/// Isomorphic molecules with equal atom and bond attributes give
/// byte-identical output. Stereo marks are carried through as written, and
/// aromaticity is taken as given.
pub fn write_canonical(m: &Molecule) -> String {
    best_leaf(m).map_or_else(String::new, |b| b.text)
}
