// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

use std::collections::BTreeMap;

use super::atom::{Atom, Bond, BondDirection, BondOrder, Chirality, Element};
use super::{Molecule, SmilesError, SmilesErrorKind};
use crate::pretokenize::{atom_spans, UnitKind};

/// Parses a SMILES string into a [`Molecule`].
///
/// Ring-closure labels (`1`..`9`, `%10`..`%99`) become bonds and may be
/// reused after they close. Dots separate components.
pub fn parse(smiles: &str) -> Result<Molecule, SmilesError> {
    parse_with_positions(smiles).map(|(m, _)| m)
}

#[derive(Clone, Copy)]
struct PendingBond {
    order: BondOrder,
    direction: Option<BondDirection>,
    position: usize,
}

struct OpenRing {
    atom: usize,
    bond: Option<PendingBond>,
    position: usize,
}

/// Parses and also returns the byte offset of every atom.
pub(crate) fn parse_with_positions(smiles: &str) -> Result<(Molecule, Vec<usize>), SmilesError> {
    use SmilesErrorKind::*;

    if smiles.is_empty() {
        return Err(SmilesError::new(Syntax, 0, "empty SMILES"));
    }
    let units = atom_spans(smiles)?;

    let mut atoms: Vec<Atom> = Vec::new();
    let mut positions: Vec<usize> = Vec::new();
    let mut bonds: Vec<Bond> = Vec::new();
    let mut prev: Option<usize> = None;
    let mut pending: Option<PendingBond> = None;
    // (branch point, offset of '(', atom count when opened)
    let mut branches: Vec<(usize, usize, usize)> = Vec::new();
    let mut rings: BTreeMap<u8, OpenRing> = BTreeMap::new();

    let has_bond = |bonds: &[Bond], a: usize, b: usize| {
        bonds
            .iter()
            .any(|x| (x.begin == a && x.end == b) || (x.begin == b && x.end == a))
    };

    for &(pos, text, kind) in &units {
        match kind {
            UnitKind::Atom | UnitKind::Wildcard | UnitKind::BracketAtom => {
                let atom = match kind {
                    UnitKind::BracketAtom => parse_bracket(text, pos)?,
                    UnitKind::Wildcard => Atom::organic(Element::WILDCARD, false),
                    _ => {
                        let aromatic = text.as_bytes()[0].is_ascii_lowercase();
                        let symbol = if aromatic {
                            text.to_ascii_uppercase()
                        } else {
                            text.to_string()
                        };
                        let element = Element::from_symbol(&symbol).expect("organic subset symbol");
                        Atom::organic(element, aromatic)
                    }
                };
                let idx = atoms.len();
                if let Some(p) = prev {
                    bonds.push(make_bond(p, idx, &atoms[p], &atom, pending.take()));
                } else if let Some(b) = pending {
                    return Err(SmilesError::new(
                        Syntax,
                        b.position,
                        "bond without a preceding atom",
                    ));
                }
                atoms.push(atom);
                positions.push(pos);
                prev = Some(idx);
            }
            UnitKind::Bond => {
                if prev.is_none() {
                    return Err(SmilesError::new(
                        Syntax,
                        pos,
                        "bond without a preceding atom",
                    ));
                }
                if pending.is_some() {
                    return Err(SmilesError::new(
                        Syntax,
                        pos,
                        "two consecutive bond symbols",
                    ));
                }
                let (order, direction) = match text {
                    "-" => (BondOrder::Single, None),
                    "=" => (BondOrder::Double, None),
                    "#" => (BondOrder::Triple, None),
                    "$" => (BondOrder::Quadruple, None),
                    ":" => (BondOrder::Aromatic, None),
                    "/" => (BondOrder::Single, Some(BondDirection::Up)),
                    _ => (BondOrder::Single, Some(BondDirection::Down)),
                };
                pending = Some(PendingBond {
                    order,
                    direction,
                    position: pos,
                });
            }
            UnitKind::RingDigit => {
                let Some(here) = prev else {
                    return Err(SmilesError::new(
                        Syntax,
                        pos,
                        "ring label without a preceding atom",
                    ));
                };
                let label: u8 = text.trim_start_matches('%').parse().expect("digits");
                let closing_bond = pending.take();
                if let Some(open) = rings.remove(&label) {
                    if open.atom == here {
                        return Err(SmilesError::new(
                            Syntax,
                            pos,
                            "ring closure onto the same atom",
                        ));
                    }
                    if has_bond(&bonds, open.atom, here) {
                        return Err(SmilesError::new(
                            Syntax,
                            pos,
                            "ring closure duplicates an existing bond",
                        ));
                    }
                    let written = match (open.bond, closing_bond) {
                        (None, None) => None,
                        (Some(a), None) => Some(a),
                        // Direction written at the closing end points back at the opener.
                        (None, Some(b)) => Some(PendingBond {
                            direction: b.direction.map(BondDirection::flipped),
                            ..b
                        }),
                        (Some(a), Some(b)) => {
                            let consistent = a.order == b.order
                                && a.direction == b.direction.map(BondDirection::flipped);
                            if !consistent {
                                return Err(SmilesError::new(
                                    Syntax,
                                    pos,
                                    "conflicting ring-closure bond symbols",
                                ));
                            }
                            Some(a)
                        }
                    };
                    bonds.push(make_bond(
                        open.atom,
                        here,
                        &atoms[open.atom],
                        &atoms[here],
                        written,
                    ));
                } else {
                    rings.insert(
                        label,
                        OpenRing {
                            atom: here,
                            bond: closing_bond,
                            position: pos,
                        },
                    );
                }
            }
            UnitKind::BranchOpen => {
                let Some(here) = prev else {
                    return Err(SmilesError::new(
                        Syntax,
                        pos,
                        "branch without a preceding atom",
                    ));
                };
                if pending.is_some() {
                    return Err(SmilesError::new(Syntax, pos, "bond symbol before '('"));
                }
                branches.push((here, pos, atoms.len()));
            }
            UnitKind::BranchClose => {
                let Some((point, open_pos, count)) = branches.pop() else {
                    return Err(SmilesError::new(
                        UnbalancedParens,
                        pos,
                        "')' without matching '('",
                    ));
                };
                if let Some(b) = pending {
                    return Err(SmilesError::new(
                        Syntax,
                        b.position,
                        "dangling bond before ')'",
                    ));
                }
                if atoms.len() == count {
                    return Err(SmilesError::new(Syntax, open_pos, "empty branch"));
                }
                prev = Some(point);
            }
            UnitKind::Dot => {
                if prev.is_none() || pending.is_some() {
                    return Err(SmilesError::new(Syntax, pos, "misplaced '.'"));
                }
                if let Some(&(_, open_pos, _)) = branches.last() {
                    return Err(SmilesError::new(
                        UnbalancedParens,
                        open_pos,
                        "'.' inside an open branch",
                    ));
                }
                prev = None;
            }
        }
    }

    if let Some(&(_, open_pos, _)) = branches.first() {
        return Err(SmilesError::new(UnbalancedParens, open_pos, "unclosed '('"));
    }
    if let Some(b) = pending {
        return Err(SmilesError::new(
            Syntax,
            b.position,
            "dangling bond at end of input",
        ));
    }
    if let Some(first) = rings.values().map(|r| r.position).min() {
        return Err(SmilesError::new(
            UnclosedRing,
            first,
            "ring label never closed",
        ));
    }
    if prev.is_none() {
        return Err(SmilesError::new(
            Syntax,
            smiles.len(),
            "expected an atom after '.'",
        ));
    }

    let molecule =
        Molecule::new(atoms, bonds).map_err(|e| SmilesError::new(Syntax, 0, e.to_string()))?;
    Ok((molecule, positions))
}

fn make_bond(begin: usize, end: usize, a: &Atom, b: &Atom, written: Option<PendingBond>) -> Bond {
    let (order, direction) = match written {
        Some(p) => (p.order, p.direction),
        None if a.aromatic && b.aromatic => (BondOrder::Aromatic, None),
        None => (BondOrder::Single, None),
    };
    Bond {
        begin,
        end,
        order,
        direction,
    }
}

/// `[` isotope? symbol chirality? hcount? charge? class? `]`
fn parse_bracket(text: &str, pos: usize) -> Result<Atom, SmilesError> {
    let bad = |msg: &str| {
        SmilesError::new(
            SmilesErrorKind::BadBracketAtom,
            pos,
            format!("{msg} in {text}"),
        )
    };
    let inner = &text.as_bytes()[1..text.len() - 1];
    let mut i = 0;

    let digits = |i: &mut usize| -> Option<u32> {
        let start = *i;
        while *i < inner.len() && inner[*i].is_ascii_digit() {
            *i += 1;
        }
        (start != *i).then(|| {
            std::str::from_utf8(&inner[start..*i])
                .unwrap()
                .parse::<u32>()
                .unwrap_or(u32::MAX)
        })
    };

    let isotope = match digits(&mut i) {
        Some(0) => return Err(bad("isotope must be positive")),
        Some(v) if v > u16::MAX as u32 => return Err(bad("isotope out of range")),
        Some(v) => Some(v as u16),
        None => None,
    };

    let (element, aromatic) = if i < inner.len() && inner[i] == b'*' {
        i += 1;
        (Element::WILDCARD, false)
    } else if i < inner.len() && inner[i].is_ascii_uppercase() {
        let two = (i + 1 < inner.len() && inner[i + 1].is_ascii_lowercase())
            .then(|| std::str::from_utf8(&inner[i..i + 2]).unwrap())
            .and_then(Element::from_symbol);
        if let Some(e) = two {
            i += 2;
            (e, false)
        } else {
            let one = std::str::from_utf8(&inner[i..i + 1]).unwrap();
            let e = Element::from_symbol(one).ok_or_else(|| bad("unknown element"))?;
            i += 1;
            (e, false)
        }
    } else if i < inner.len() && inner[i].is_ascii_lowercase() {
        let rest = &inner[i..];
        if rest.starts_with(b"se") {
            i += 2;
            (Element::SE, true)
        } else if rest.starts_with(b"as") {
            i += 2;
            (Element::AS, true)
        } else {
            let e = match rest[0] {
                b'b' => Element::B,
                b'c' => Element::C,
                b'n' => Element::N,
                b'o' => Element::O,
                b'p' => Element::P,
                b's' => Element::S,
                _ => return Err(bad("unknown aromatic element")),
            };
            i += 1;
            (e, true)
        }
    } else {
        return Err(bad("missing element symbol"));
    };

    let chirality = if inner[i..].starts_with(b"@@") {
        i += 2;
        Some(Chirality::Clockwise)
    } else if inner[i..].starts_with(b"@") {
        i += 1;
        Some(Chirality::AntiClockwise)
    } else {
        None
    };

    let mut explicit_h = 0u8;
    if i < inner.len() && inner[i] == b'H' {
        i += 1;
        explicit_h = match digits(&mut i) {
            Some(v) if v > 9 => return Err(bad("hydrogen count out of range")),
            Some(v) => v as u8,
            None => 1,
        };
    }

    let mut charge: i32 = 0;
    if i < inner.len() && (inner[i] == b'+' || inner[i] == b'-') {
        let sign = inner[i];
        let unit = if sign == b'+' { 1 } else { -1 };
        i += 1;
        if let Some(v) = digits(&mut i) {
            charge = unit * v.min(99) as i32;
        } else {
            charge = unit;
            while i < inner.len() && inner[i] == sign {
                charge += unit;
                i += 1;
            }
        }
        if !(-15..=15).contains(&charge) {
            return Err(bad("charge out of range"));
        }
    }

    let mut atom_class = None;
    if i < inner.len() && inner[i] == b':' {
        i += 1;
        atom_class = Some(digits(&mut i).ok_or_else(|| bad("atom class needs digits"))?);
    }

    if i != inner.len() {
        return Err(bad("unexpected trailing characters"));
    }

    Ok(Atom {
        element,
        aromatic,
        isotope,
        charge: charge as i8,
        explicit_h: Some(explicit_h),
        chirality,
        atom_class,
    })
}
