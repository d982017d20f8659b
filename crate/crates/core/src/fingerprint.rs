// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

//! Circular (Morgan-style) fingerprints and Tanimoto similarity.
//!
//! Round 0 gives each atom a code from (atomic number, charge, heavy-atom
//! degree, hydrogen count, aromatic, in ring). Round `r` rehashes
//! (r, own code, sorted (bond code, neighbor code) list). Every code of
//! every round sets bit `code mod nbits`.
//!
//! Codes come from [`stable_hash`], FNV-1a over a fixed little-endian byte
//! encoding followed by the splitmix64 finalizer, so bit positions are the
//! same on every platform. They do not match RDKit's.
//!
//! ```
//! use smipe::fingerprint::{morgan_fingerprint, tanimoto};
//! use smipe::smiles::parse;
//!
//! let a = morgan_fingerprint(&parse("OCC").unwrap(), 2, 2048).unwrap();
//! let b = morgan_fingerprint(&parse("CCO").unwrap(), 2, 2048).unwrap();
//! assert_eq!(a, b);
//! assert_eq!(tanimoto(&a, &b).unwrap(), 1.0);
//! ```

use thiserror::Error;

use crate::smiles::Molecule;

pub const DEFAULT_RADIUS: usize = 2;
pub const DEFAULT_NBITS: usize = 2048;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FingerprintError {
    #[error("fingerprint size must be a power of two and at least 64, got {0}")]
    BadSize(usize),
    #[error("fingerprint sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("bit {bit} out of range for {nbits}-bit fingerprint")]
    BitOutOfRange { bit: usize, nbits: usize },
}

/// Fixed-size bitset; bit `i` lives in word `i / 64` at position `i % 64`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    words: Vec<u64>,
    nbits: usize,
    radius: usize,
}

fn check_size(nbits: usize) -> Result<(), FingerprintError> {
    if nbits < 64 || !nbits.is_power_of_two() {
        return Err(FingerprintError::BadSize(nbits));
    }
    Ok(())
}

impl Fingerprint {
    pub fn empty(nbits: usize, radius: usize) -> Result<Fingerprint, FingerprintError> {
        check_size(nbits)?;
        Ok(Fingerprint {
            words: vec![0; nbits / 64],
            nbits,
            radius,
        })
    }

    pub fn from_bits(nbits: usize, bits: &[usize]) -> Result<Fingerprint, FingerprintError> {
        let mut fp = Self::empty(nbits, 0)?;
        for &bit in bits {
            if bit >= nbits {
                return Err(FingerprintError::BitOutOfRange { bit, nbits });
            }
            fp.set(bit);
        }
        Ok(fp)
    }

    fn set(&mut self, bit: usize) {
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    pub fn get(&self, bit: usize) -> bool {
        bit < self.nbits && self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn nbits(&self) -> usize {
        self.nbits
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nbits).filter(|&b| self.get(b))
    }

    /// Hex of the little-endian byte image: byte `k` holds bits `8k..8k+8`.
    pub fn to_hex(&self) -> String {
        let bytes: Vec<u8> = self.words.iter().flat_map(|w| w.to_le_bytes()).collect();
        hex::encode(bytes)
    }
}

/// FNV-1a over `bytes`, then splitmix64 mixing.
pub fn stable_hash(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h = (h ^ (h >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    h ^ (h >> 31)
}

/// The round-0 tuple for each atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomInvariant {
    pub atomic_number: u8,
    pub charge: i8,
    pub degree: u32,
    pub hydrogens: u32,
    pub aromatic: bool,
    pub in_ring: bool,
}

impl AtomInvariant {
    pub fn code(&self) -> u64 {
        let mut b = Vec::with_capacity(12);
        b.push(self.atomic_number);
        b.push(self.charge as u8);
        b.extend_from_slice(&self.degree.to_le_bytes());
        b.extend_from_slice(&self.hydrogens.to_le_bytes());
        b.push(u8::from(self.aromatic));
        b.push(u8::from(self.in_ring));
        stable_hash(&b)
    }
}

pub fn atom_invariants(m: &Molecule) -> Vec<AtomInvariant> {
    let rings = m.ring_atoms();
    m.atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| AtomInvariant {
            atomic_number: a.element.atomic_number(),
            charge: a.charge,
            degree: m.degree(i) as u32,
            hydrogens: m.hydrogen_count(i),
            aromatic: a.aromatic,
            in_ring: rings[i],
        })
        .collect()
}

/// Environment codes per round: `out[r][atom]` for `r` in `0..=radius`.
pub fn environment_codes(m: &Molecule, radius: usize) -> Vec<Vec<u64>> {
    let mut rounds = vec![atom_invariants(m)
        .iter()
        .map(AtomInvariant::code)
        .collect::<Vec<u64>>()];
    for r in 1..=radius {
        let prev = &rounds[r - 1];
        let next = (0..m.atom_count())
            .map(|i| {
                let mut env: Vec<(u8, u64)> = m
                    .neighbors(i)
                    .iter()
                    .map(|&(v, b)| (m.bonds()[b].order.code(), prev[v]))
                    .collect();
                env.sort_unstable();
                let mut bytes = Vec::with_capacity(16 + env.len() * 9);
                bytes.extend_from_slice(&(r as u32).to_le_bytes());
                bytes.extend_from_slice(&prev[i].to_le_bytes());
                for (bond, code) in env {
                    bytes.push(bond);
                    bytes.extend_from_slice(&code.to_le_bytes());
                }
                stable_hash(&bytes)
            })
            .collect();
        rounds.push(next);
    }
    rounds
}

pub fn morgan_fingerprint(
    m: &Molecule,
    radius: usize,
    nbits: usize,
) -> Result<Fingerprint, FingerprintError> {
    let mut fp = Fingerprint::empty(nbits, radius)?;
    for round in environment_codes(m, radius) {
        for code in round {
            fp.set((code & (nbits as u64 - 1)) as usize);
        }
    }
    Ok(fp)
}

/// `|a ∧ b| / |a ∨ b|`, and 1.0 when both are empty.
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64, FingerprintError> {
    if a.nbits != b.nbits {
        return Err(FingerprintError::SizeMismatch(a.nbits, b.nbits));
    }
    let (mut both, mut either) = (0u32, 0u32);
    for (x, y) in a.words.iter().zip(&b.words) {
        both += (x & y).count_ones();
        either += (x | y).count_ones();
    }
    Ok(if either == 0 {
        1.0
    } else {
        f64::from(both) / f64::from(either)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smiles::parse;

    fn fp(s: &str) -> Fingerprint {
        morgan_fingerprint(&parse(s).unwrap(), DEFAULT_RADIUS, DEFAULT_NBITS).unwrap()
    }

    #[test]
    fn tanimoto_arithmetic() {
        let a = Fingerprint::from_bits(64, &[1, 2, 3]).unwrap();
        let b = Fingerprint::from_bits(64, &[2, 3, 4]).unwrap();
        let c = Fingerprint::from_bits(64, &[10, 11]).unwrap();
        assert_eq!(tanimoto(&a, &b).unwrap(), 0.5);
        assert_eq!(tanimoto(&a, &a).unwrap(), 1.0);
        assert_eq!(tanimoto(&a, &c).unwrap(), 0.0);
        let z = Fingerprint::empty(64, 0).unwrap();
        assert_eq!(tanimoto(&z, &z).unwrap(), 1.0);
        let big = Fingerprint::empty(128, 0).unwrap();
        assert_eq!(
            tanimoto(&a, &big),
            Err(FingerprintError::SizeMismatch(64, 128))
        );
    }

    #[test]
    fn sizes() {
        let m = parse("C").unwrap();
        for bad in [0, 32, 100, 2047] {
            assert_eq!(
                morgan_fingerprint(&m, 2, bad),
                Err(FingerprintError::BadSize(bad))
            );
        }
        assert!(morgan_fingerprint(&m, 0, 64).is_ok());
        assert!(Fingerprint::from_bits(64, &[64]).is_err());
    }

    #[test]
    fn methane_and_ethane_share_nothing() {
        // Methane's carbon: degree 0, four hydrogens. Ethane's: degree 1,
        // three hydrogens. The round-0 tuples differ, so every later code
        // (which hashes the atom's own earlier code) differs as well.
        let methane = environment_codes(&parse("C").unwrap(), 1);
        let ethane = environment_codes(&parse("CC").unwrap(), 1);
        let inv = |s: &str| atom_invariants(&parse(s).unwrap())[0];
        assert_eq!(
            inv("C"),
            AtomInvariant {
                atomic_number: 6,
                charge: 0,
                degree: 0,
                hydrogens: 4,
                aromatic: false,
                in_ring: false
            }
        );
        assert_eq!(inv("CC").degree, 1);
        assert_eq!(inv("CC").hydrogens, 3);
        let set = |rounds: &Vec<Vec<u64>>| {
            rounds
                .iter()
                .flatten()
                .copied()
                .collect::<std::collections::HashSet<_>>()
        };
        assert!(set(&methane).is_disjoint(&set(&ethane)));
        // Both ethane carbons are equivalent: one code per round.
        assert_eq!(set(&ethane).len(), 2);
        assert_ne!(fp("C"), fp("CC"));
    }

    #[test]
    fn order_invariance_and_nonempty() {
        assert_eq!(fp("OCC"), fp("CCO"));
        assert_eq!(fp("c1ccccc1O"), fp("Oc1ccccc1"));
        for s in ["C", "[Na+].[Cl-]", "c1ccccc1"] {
            assert!(fp(s).count_ones() >= 1);
        }
    }

    #[test]
    fn disconnected_atom_keeps_radius0_bits() {
        for s in ["CCO", "c1ccccc1N", "CC(=O)O"] {
            let before = morgan_fingerprint(&parse(s).unwrap(), 0, 2048).unwrap();
            let after =
                morgan_fingerprint(&parse(&format!("{s}.[Na+]")).unwrap(), 0, 2048).unwrap();
            assert!(before.ones().all(|b| after.get(b)), "{s}");
        }
    }

    #[test]
    fn hex_layout() {
        let f = Fingerprint::from_bits(64, &[0, 9]).unwrap();
        assert_eq!(f.to_hex(), "0102000000000000");
        assert_eq!(fp("CCO").to_hex().len(), 512);
    }

    #[test]
    fn stable_hash_is_pinned() {
        // Pinned so a change to the mixing function shows up as a failure.
        assert_ne!(stable_hash(b"a"), stable_hash(b"b"));
        let fnv_a: u64 = (0xcbf2_9ce4_8422_2325u64 ^ 0x61).wrapping_mul(0x0000_0100_0000_01b3);
        assert_eq!(fnv_a, 0xaf63_dc4c_8601_ec8c);
        assert_eq!(stable_hash(b"a"), 0x02c0_bdbf_4814_20f8);
    }
}
