// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

//! Atoms, bonds and the element table.

use std::fmt;

const SYMBOLS: [&str; 119] = [
    "*", "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S",
    "Cl", "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge",
    "As", "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
    "In", "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd",
    "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg",
    "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm",
    "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn",
    "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
];

/// A chemical element identified by atomic number; `0` is the `*` wildcard.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(u8);

impl Element {
    pub const WILDCARD: Element = Element(0);
    pub const B: Element = Element(5);
    pub const C: Element = Element(6);
    pub const N: Element = Element(7);
    pub const O: Element = Element(8);
    pub const F: Element = Element(9);
    pub const P: Element = Element(15);
    pub const S: Element = Element(16);
    pub const CL: Element = Element(17);
    pub const AS: Element = Element(33);
    pub const SE: Element = Element(34);
    pub const BR: Element = Element(35);
    pub const I: Element = Element(53);

    pub fn from_atomic_number(z: u8) -> Option<Element> {
        ((z as usize) < SYMBOLS.len()).then_some(Element(z))
    }

    /// Looks up a capitalised element symbol (`"Cl"`, `"C"`, `"*"`).
    pub fn from_symbol(symbol: &str) -> Option<Element> {
        SYMBOLS
            .iter()
            .position(|s| *s == symbol)
            .map(|z| Element(z as u8))
    }

    pub fn atomic_number(self) -> u8 {
        self.0
    }

    pub fn symbol(self) -> &'static str {
        SYMBOLS[self.0 as usize]
    }

    /// Members of the organic subset may be written without brackets.
    pub fn is_organic_subset(self) -> bool {
        matches!(self.0, 5 | 6 | 7 | 8 | 9 | 15 | 16 | 17 | 35 | 53)
    }

    /// Elements allowed to carry the lowercase aromatic form.
    pub fn may_be_aromatic(self) -> bool {
        matches!(self.0, 0 | 5 | 6 | 7 | 8 | 15 | 16 | 33 | 34)
    }

    /// Aromatic elements that can appear outside brackets (`b c n o p s`).
    pub fn is_bare_aromatic(self) -> bool {
        matches!(self.0, 5 | 6 | 7 | 8 | 15 | 16)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Chirality {
    /// `@`
    AntiClockwise,
    /// `@@`
    Clockwise,
}

impl Chirality {
    pub fn as_str(self) -> &'static str {
        match self {
            Chirality::AntiClockwise => "@",
            Chirality::Clockwise => "@@",
        }
    }
}

/// One atom of a parsed molecule.
///
/// Bracket atoms always carry `explicit_h = Some(n)` (possibly zero); bare
/// organic-subset atoms carry `None` and get implicit hydrogens.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub element: Element,
    pub aromatic: bool,
    pub isotope: Option<u16>,
    pub charge: i8,
    pub explicit_h: Option<u8>,
    pub chirality: Option<Chirality>,
    pub atom_class: Option<u32>,
}

impl Atom {
    /// A bare organic-subset (or wildcard) atom.
    pub fn organic(element: Element, aromatic: bool) -> Atom {
        Atom {
            element,
            aromatic,
            isotope: None,
            charge: 0,
            explicit_h: None,
            chirality: None,
            atom_class: None,
        }
    }

    pub fn is_wildcard(&self) -> bool {
        self.element == Element::WILDCARD
    }

    /// Whether the atom has to be written in `[...]` form.
    pub fn needs_brackets(&self) -> bool {
        self.explicit_h.is_some()
            || self.isotope.is_some()
            || self.charge != 0
            || self.chirality.is_some()
            || self.atom_class.is_some()
            || !(self.element.is_organic_subset() || self.is_wildcard())
            || (self.aromatic && !(self.element.is_bare_aromatic() || self.is_wildcard()))
    }

    /// Written form of the atom symbol, lowercase when aromatic.
    pub fn symbol_text(&self) -> String {
        let s = self.element.symbol();
        if self.aromatic {
            s.to_ascii_lowercase()
        } else {
            s.to_string()
        }
    }

    /// Hydrogen count: the bracket count, or implicit hydrogens from the
    /// lowest default valence that accommodates `bond_order_sum`.
    pub fn hydrogen_count(&self, bond_order_sum: u32) -> u32 {
        if let Some(h) = self.explicit_h {
            return h as u32;
        }
        let used = bond_order_sum + u32::from(self.aromatic);
        default_valences(self.element)
            .iter()
            .map(|&v| v as u32)
            .find(|&v| v >= used)
            .map_or(0, |v| v - used)
    }
}

/// Default valences of the organic subset, ascending. Empty for anything else.
pub fn default_valences(element: Element) -> &'static [u8] {
    match element.atomic_number() {
        5 => &[3],
        6 => &[4],
        7 | 15 => &[3, 5],
        8 => &[2],
        16 => &[2, 4, 6],
        9 | 17 | 35 | 53 => &[1],
        _ => &[],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Quadruple,
    Aromatic,
}

impl BondOrder {
    /// Contribution to an atom's valence; aromatic bonds count as one.
    pub fn valence(self) -> u32 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Quadruple => 4,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Quadruple => 4,
            BondOrder::Aromatic => 5,
        }
    }
}

/// Cis/trans marker on a single bond, read from `begin` towards `end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BondDirection {
    /// `/`
    Up,
    /// `\`
    Down,
}

impl BondDirection {
    pub fn flipped(self) -> BondDirection {
        match self {
            BondDirection::Up => BondDirection::Down,
            BondDirection::Down => BondDirection::Up,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            BondDirection::Up => '/',
            BondDirection::Down => '\\',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bond {
    pub begin: usize,
    pub end: usize,
    pub order: BondOrder,
    pub direction: Option<BondDirection>,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if atom == self.begin {
            self.end
        } else {
            self.begin
        }
    }

    /// Direction as seen when walking from `from` to the other endpoint.
    pub fn direction_from(&self, from: usize) -> Option<BondDirection> {
        self.direction
            .map(|d| if from == self.begin { d } else { d.flipped() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbols_round_trip() {
        for z in 0..=118u8 {
            let e = Element::from_atomic_number(z).unwrap();
            assert_eq!(Element::from_symbol(e.symbol()), Some(e));
        }
        assert_eq!(Element::from_symbol("Cl"), Some(Element::CL));
        assert_eq!(Element::from_symbol("Cq"), None);
    }

    #[test]
    fn implicit_hydrogens() {
        let c = Atom::organic(Element::C, false);
        assert_eq!(c.hydrogen_count(0), 4);
        assert_eq!(c.hydrogen_count(2), 2);
        let arom = Atom::organic(Element::C, true);
        assert_eq!(arom.hydrogen_count(2), 1);
        let n = Atom::organic(Element::N, false);
        assert_eq!(n.hydrogen_count(4), 1);
        let s = Atom::organic(Element::S, false);
        assert_eq!(s.hydrogen_count(3), 1);
    }

    #[test]
    fn bracket_requirement() {
        assert!(!Atom::organic(Element::C, true).needs_brackets());
        assert!(Atom::organic(Element::SE, true).needs_brackets());
        let mut n = Atom::organic(Element::N, false);
        n.charge = 1;
        assert!(n.needs_brackets());
    }
}
