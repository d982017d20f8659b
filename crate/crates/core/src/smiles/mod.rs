// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

//! SMILES parsing, validation and writing.
//!
//! [`parse`] turns a SMILES string into a [`Molecule`] graph,
//! [`validate`] reports the first problem in a string,
//! [`write_canonical`] produces one fixed spelling per molecule and
//! [`write_random`] produces a seeded random spelling of it.
//!
//! ```
//! use smipe::smiles::{parse, write_canonical};
//!
//! let a = write_canonical(&parse("OCC").unwrap());
//! let b = write_canonical(&parse("CCO").unwrap());
//! assert_eq!(a, b);
//! ```

mod atom;
mod augment;
mod canon;
mod parse;
mod validate;
mod write;

use std::fmt;

use thiserror::Error;

pub use atom::{default_valences, Atom, Bond, BondDirection, BondOrder, Chirality, Element};
pub use augment::{augment_corpus, record_seed, AugmentStats};
pub use canon::{canonical_ranks, write_canonical};
pub use parse::parse;
pub use validate::{validate, validate_with, ValenceTable, ValidityReport};
pub use write::write_random;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmilesErrorKind {
    Syntax,
    UnclosedRing,
    UnbalancedParens,
    BadBracketAtom,
    Valence,
}

impl fmt::Display for SmilesErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SmilesErrorKind::Syntax => "syntax",
            SmilesErrorKind::UnclosedRing => "unclosed_ring",
            SmilesErrorKind::UnbalancedParens => "unbalanced_parens",
            SmilesErrorKind::BadBracketAtom => "bad_bracket_atom",
            SmilesErrorKind::Valence => "valence",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind} error at offset {position}: {message}")]
pub struct SmilesError {
    pub kind: SmilesErrorKind,
    /// Byte offset of the first failure.
    pub position: usize,
    pub message: String,
}

impl SmilesError {
    pub(crate) fn new(kind: SmilesErrorKind, position: usize, message: impl Into<String>) -> Self {
        SmilesError {
            kind,
            position,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("bond {0} references an atom out of range")]
    AtomOutOfRange(usize),
    #[error("bond {0} is a self-loop")]
    SelfLoop(usize),
    #[error("bond {0} duplicates an earlier bond between the same atoms")]
    DuplicateBond(usize),
}

/// A molecular graph: atoms, bonds and an adjacency index.
///
/// Immutable once built; `components` counts connected fragments, which is
/// the number of dot-separated parts in any written form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Molecule {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    adjacency: Vec<Vec<(usize, usize)>>,
    components: usize,
}

impl Molecule {
    pub fn new(atoms: Vec<Atom>, bonds: Vec<Bond>) -> Result<Molecule, GraphError> {
        let n = atoms.len();
        let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (i, b) in bonds.iter().enumerate() {
            if b.begin >= n || b.end >= n {
                return Err(GraphError::AtomOutOfRange(i));
            }
            if b.begin == b.end {
                return Err(GraphError::SelfLoop(i));
            }
            if adjacency[b.begin].iter().any(|&(nbr, _)| nbr == b.end) {
                return Err(GraphError::DuplicateBond(i));
            }
            adjacency[b.begin].push((b.end, i));
            adjacency[b.end].push((b.begin, i));
        }
        let mut mol = Molecule {
            atoms,
            bonds,
            adjacency,
            components: 0,
        };
        mol.components = mol.component_roots().len();
        Ok(mol)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// `(neighbor, bond index)` pairs of `atom`, in bond insertion order.
    pub fn neighbors(&self, atom: usize) -> &[(usize, usize)] {
        &self.adjacency[atom]
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    pub fn bond_order_sum(&self, atom: usize) -> u32 {
        self.adjacency[atom]
            .iter()
            .map(|&(_, b)| self.bonds[b].order.valence())
            .sum()
    }

    pub fn hydrogen_count(&self, atom: usize) -> u32 {
        self.atoms[atom].hydrogen_count(self.bond_order_sum(atom))
    }

    /// Component label per atom, numbered by first atom index.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.atoms.len()];
        let mut next = 0;
        let mut stack = Vec::new();
        for root in 0..self.atoms.len() {
            if label[root] != usize::MAX {
                continue;
            }
            label[root] = next;
            stack.push(root);
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.adjacency[u] {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    fn component_roots(&self) -> Vec<usize> {
        let labels = self.component_labels();
        let mut roots = Vec::new();
        for (i, &l) in labels.iter().enumerate() {
            if l == roots.len() {
                roots.push(i);
            }
        }
        roots
    }

    /// Atoms that lie on at least one cycle (incident to a non-bridge bond).
    pub fn ring_atoms(&self) -> Vec<bool> {
        let n = self.atoms.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut bridge = vec![false; self.bonds.len()];
        let mut time = 0;
        // Iterative Tarjan: (atom, bond used to reach it, next neighbor slot).
        let mut stack: Vec<(usize, usize, usize)> = Vec::new();
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            disc[root] = time;
            low[root] = time;
            time += 1;
            stack.push((root, usize::MAX, 0));
            while let Some(top) = stack.last_mut() {
                let (u, via) = (top.0, top.1);
                let next = self.adjacency[u].get(top.2).copied();
                top.2 += 1;
                if let Some((v, b)) = next {
                    if b == via {
                        continue;
                    }
                    if disc[v] == usize::MAX {
                        disc[v] = time;
                        low[v] = time;
                        time += 1;
                        stack.push((v, b, 0));
                    } else {
                        low[u] = low[u].min(disc[v]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(parent, _, _)) = stack.last() {
                        low[parent] = low[parent].min(low[u]);
                        if low[u] > disc[parent] {
                            bridge[via] = true;
                        }
                    }
                }
            }
        }
        let mut in_ring = vec![false; n];
        for (i, b) in self.bonds.iter().enumerate() {
            if !bridge[i] {
                in_ring[b.begin] = true;
                in_ring[b.end] = true;
            }
        }
        in_ring
    }
}

impl fmt::Display for Molecule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_canonical(self))
    }
}
