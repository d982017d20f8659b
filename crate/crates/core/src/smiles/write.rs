// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::atom::{Atom, BondOrder};
use super::Molecule;

/// Writes a random SMILES spelling of `m`, reproducible from `seed`.
///
/// Component order and each component's start atom are drawn uniformly; at
/// every DFS step the neighbor list is Fisher–Yates shuffled.
pub fn write_random(m: &Molecule, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = m.component_labels();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); m.components()];
    for (atom, &c) in labels.iter().enumerate() {
        members[c].push(atom);
    }
    members.shuffle(&mut rng);
    let starts: Vec<usize> = members
        .iter()
        .map(|atoms| atoms[rng.gen_range(0..atoms.len())])
        .collect();
    write_traversal(m, &starts, |_, nbrs| nbrs.shuffle(&mut rng))
}

/// Depth-first SMILES emission.
///
/// One traversal per entry of `starts` (one start atom per component, in
/// output order). `order` arranges the unvisited-neighbor candidates of an
/// atom when the traversal first reaches it; the same order fixes branch
/// order and ring-closure order.
pub(crate) fn write_traversal<F>(m: &Molecule, starts: &[usize], mut order: F) -> String
where
    F: FnMut(usize, &mut Vec<(usize, usize)>),
{
    let n = m.atom_count();
    let mut visited = vec![false; n];
    let mut bond_seen = vec![false; m.bonds().len()];
    let mut children: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut openings: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut closings: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];

    // Pass 1: spanning forest, ring-closure bonds, and per-atom visit order.
    for &start in starts {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        // (atom, ordered candidates, next candidate)
        type Frame = (usize, Vec<(usize, usize)>, usize);
        let mut stack: Vec<Frame> = vec![(start, candidates(m, start, usize::MAX, &mut order), 0)];
        while let Some(top) = stack.last_mut() {
            let u = top.0;
            let Some(&(v, b)) = top.1.get(top.2) else {
                stack.pop();
                continue;
            };
            top.2 += 1;
            if bond_seen[b] {
                continue;
            }
            bond_seen[b] = true;
            if visited[v] {
                // v is an ancestor still on the stack: it opens, u closes.
                openings[v].push((u, b));
                closings[u].push((v, b));
            } else {
                visited[v] = true;
                children[u].push((v, b));
                let next = candidates(m, v, b, &mut order);
                stack.push((v, next, 0));
            }
        }
    }

    // Pass 2: text emission in traversal order.
    enum Step {
        Enter {
            atom: usize,
            from: Option<(usize, usize)>,
        },
        Text(&'static str),
    }
    let mut out = String::with_capacity(n * 2);
    let mut label_of_bond = vec![0u8; m.bonds().len()];
    let mut in_use = [false; 100];
    for (k, &start) in starts.iter().enumerate() {
        if k > 0 {
            out.push('.');
        }
        let mut steps = vec![Step::Enter {
            atom: start,
            from: None,
        }];
        while let Some(step) = steps.pop() {
            let (u, from) = match step {
                Step::Text(t) => {
                    out.push_str(t);
                    continue;
                }
                Step::Enter { atom, from } => (atom, from),
            };
            if let Some((parent, b)) = from {
                out.push_str(bond_text(m, b, parent));
            }
            push_atom(&mut out, &m.atoms()[u]);
            for &(_, b) in &closings[u] {
                push_label(&mut out, label_of_bond[b]);
            }
            for &(_, b) in &openings[u] {
                let label = (1..100u8)
                    .find(|&d| !in_use[d as usize])
                    .expect("more than 99 simultaneously open rings");
                in_use[label as usize] = true;
                label_of_bond[b] = label;
                out.push_str(bond_text(m, b, u));
                push_label(&mut out, label);
            }
            for &(_, b) in &closings[u] {
                in_use[label_of_bond[b] as usize] = false;
            }
            let kids = &children[u];
            for (i, &(c, b)) in kids.iter().enumerate().rev() {
                let last = i + 1 == kids.len();
                if !last {
                    steps.push(Step::Text(")"));
                }
                steps.push(Step::Enter {
                    atom: c,
                    from: Some((u, b)),
                });
                if !last {
                    steps.push(Step::Text("("));
                }
            }
        }
    }
    out
}

fn candidates<F>(m: &Molecule, atom: usize, via: usize, order: &mut F) -> Vec<(usize, usize)>
where
    F: FnMut(usize, &mut Vec<(usize, usize)>),
{
    let mut nbrs: Vec<(usize, usize)> = m
        .neighbors(atom)
        .iter()
        .copied()
        .filter(|&(_, b)| b != via)
        .collect();
    order(atom, &mut nbrs);
    nbrs
}

/// Bond symbol written when walking bond `b` away from `from`.
fn bond_text(m: &Molecule, b: usize, from: usize) -> &'static str {
    let bond = &m.bonds()[b];
    let both_aromatic = m.atoms()[bond.begin].aromatic && m.atoms()[bond.end].aromatic;
    match bond.order {
        BondOrder::Single => match bond.direction_from(from) {
            Some(d) if d.as_char() == '/' => "/",
            Some(_) => "\\",
            None if both_aromatic => "-",
            None => "",
        },
        BondOrder::Double => "=",
        BondOrder::Triple => "#",
        BondOrder::Quadruple => "$",
        BondOrder::Aromatic if both_aromatic => "",
        BondOrder::Aromatic => ":",
    }
}

fn push_label(out: &mut String, label: u8) {
    if label < 10 {
        out.push((b'0' + label) as char);
    } else {
        let _ = write!(out, "%{label}");
    }
}

pub(crate) fn push_atom(out: &mut String, atom: &Atom) {
    if !atom.needs_brackets() {
        if atom.is_wildcard() {
            out.push('*');
        } else {
            out.push_str(&atom.symbol_text());
        }
        return;
    }
    out.push('[');
    if let Some(iso) = atom.isotope {
        let _ = write!(out, "{iso}");
    }
    out.push_str(&atom.symbol_text());
    if let Some(ch) = atom.chirality {
        out.push_str(ch.as_str());
    }
    match atom.explicit_h.unwrap_or(0) {
        0 => {}
        1 => out.push('H'),
        h => {
            let _ = write!(out, "H{h}");
        }
    }
    match atom.charge {
        0 => {}
        1 => out.push('+'),
        -1 => out.push('-'),
        c if c > 0 => {
            let _ = write!(out, "+{c}");
        }
        c => {
            let _ = write!(out, "-{}", -c);
        }
    }
    if let Some(class) = atom.atom_class {
        let _ = write!(out, ":{class}");
    }
    out.push(']');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smiles::parse;

    #[test]
    fn single_atom() {
        for seed in 0..8 {
            assert_eq!(write_random(&parse("C").unwrap(), seed), "C");
        }
    }

    #[test]
    fn seeded_and_reproducible() {
        let m = parse("CC(=O)Oc1ccccc1C(=O)O").unwrap();
        assert_eq!(write_random(&m, 7), write_random(&m, 7));
    }

    #[test]
    fn ethanol_spellings() {
        // Every DFS spelling of the 3-atom path: start at either end gives
        // CCO / OCC; start in the middle gives C(C)O or C(O)C.
        let all = ["CCO", "OCC", "C(C)O", "C(O)C"];
        let m = parse("CCO").unwrap();
        let seen: std::collections::BTreeSet<String> =
            (0..16).map(|s| write_random(&m, s)).collect();
        assert!(seen.len() >= 2, "{seen:?}");
        assert!(seen.iter().all(|s| all.contains(&s.as_str())), "{seen:?}");
    }

    #[test]
    fn bracket_atom_text() {
        for s in [
            "[13CH3-:7]",
            "[nH]",
            "[Fe+2]",
            "[C@@H]",
            "[1*]",
            "[se]",
            "[O-2]",
            "[H]",
        ] {
            let m = parse(s).unwrap();
            let mut out = String::new();
            push_atom(&mut out, &m.atoms()[0]);
            assert_eq!(out, s);
        }
    }

    #[test]
    fn explicit_bonds_survive() {
        let m = parse("c1ccccc1-c1ccccc1").unwrap();
        let out = write_random(&m, 3);
        assert!(out.contains('-'), "{out}");
        let m = parse("C:C").unwrap();
        assert_eq!(write_random(&m, 0), "C:C");
    }

    #[test]
    fn traversal_with_rings() {
        let m = parse("C1CC2CCC1C2").unwrap();
        let out = write_traversal(&m, &[0], |_, _| {});
        assert_eq!(parse(&out).unwrap().bonds().len(), m.bonds().len());
    }
}
