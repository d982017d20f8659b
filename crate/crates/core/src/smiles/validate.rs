// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::atom::Element;
use super::parse::parse_with_positions;
use super::{SmilesError, SmilesErrorKind};

/// Outcome of [`validate`]: `valid` is true exactly when `error_kind` is absent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub error_kind: Option<SmilesErrorKind>,
    pub error_position: Option<usize>,
}

impl ValidityReport {
    pub fn ok() -> Self {
        ValidityReport {
            valid: true,
            error_kind: None,
            error_position: None,
        }
    }

    pub fn from_error(err: &SmilesError) -> Self {
        ValidityReport {
            valid: false,
            error_kind: Some(err.kind),
            error_position: Some(err.position),
        }
    }
}

/// Permitted valences for bare (non-bracket) atoms in strict mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValenceTable {
    allowed: BTreeMap<Element, Vec<u32>>,
}

impl Default for ValenceTable {
    /// B:3, C:4, N:3/5, O:2, P:3/5, S:2/4/6, halogens:1.
    fn default() -> Self {
        let allowed = [
            (Element::B, vec![3]),
            (Element::C, vec![4]),
            (Element::N, vec![3, 5]),
            (Element::O, vec![2]),
            (Element::P, vec![3, 5]),
            (Element::S, vec![2, 4, 6]),
            (Element::F, vec![1]),
            (Element::CL, vec![1]),
            (Element::BR, vec![1]),
            (Element::I, vec![1]),
        ]
        .into_iter()
        .collect();
        ValenceTable { allowed }
    }
}

impl ValenceTable {
    pub fn set(&mut self, element: Element, valences: Vec<u32>) {
        self.allowed.insert(element, valences);
    }

    pub fn max_valence(&self, element: Element) -> Option<u32> {
        self.allowed
            .get(&element)
            .and_then(|v| v.iter().copied().max())
    }
}

/// Checks `smiles`; `strict` adds the default valence table on top of grammar.
pub fn validate(smiles: &str, strict: bool) -> ValidityReport {
    validate_with(smiles, strict.then(ValenceTable::default).as_ref())
}

/// Like [`validate`] with an explicit valence table (`None` = grammar only).
///
/// Bond orders count 1/2/3/4, aromatic bonds count 1. Bracket atoms and
/// wildcards are exempt.
pub fn validate_with(smiles: &str, valences: Option<&ValenceTable>) -> ValidityReport {
    let (molecule, positions) = match parse_with_positions(smiles) {
        Ok(parsed) => parsed,
        Err(e) => return ValidityReport::from_error(&e),
    };
    let Some(table) = valences else {
        return ValidityReport::ok();
    };
    for (i, atom) in molecule.atoms().iter().enumerate() {
        if atom.explicit_h.is_some() || atom.is_wildcard() {
            continue;
        }
        let Some(max) = table.max_valence(atom.element) else {
            continue;
        };
        if molecule.bond_order_sum(i) > max {
            return ValidityReport {
                valid: false,
                error_kind: Some(SmilesErrorKind::Valence),
                error_position: Some(positions[i]),
            };
        }
    }
    ValidityReport::ok()
}
