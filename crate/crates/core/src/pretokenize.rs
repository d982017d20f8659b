// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

//! Atom-level pre-tokenization of SMILES strings.
//!
//! A SMILES string is cut into the smallest chemically meaningful pieces:
//! bracket atoms, organic-subset atoms (with `Cl` and `Br` kept whole), ring
//! closure labels (`%nn` kept whole), bond symbols, branch parentheses, the
//! component separator and the `*` wildcard. Concatenating the units gives
//! back the input byte for byte.
//!
//! ```
//! use smipe::pretokenize::atom_tokenize;
//!
//! let units = atom_tokenize("ClC(Cl)Cl").unwrap();
//! let texts: Vec<&str> = units.iter().map(|u| u.text.as_str()).collect();
//! assert_eq!(texts, ["Cl", "C", "(", "Cl", ")", "Cl"]);
//! ```

use std::fmt;
use std::sync::OnceLock;

use regex::Regex;

use crate::smiles::{SmilesError, SmilesErrorKind};

/// Identifier written into model files for this pre-tokenizer.
pub const PRETOKENIZER_ID: &str = "smiles-atom-v1";

/// Alternatives in precedence order: bracket atom, `%nn`, two-letter
/// halogens, then single-character classes.
const ATOM_PATTERN: &str =
    r"\[[^\[\]]*\]|%[0-9]{2}|Br|Cl|[BCNOSPFI]|[bcnosp]|[0-9]|[-=#$:/\\]|\(|\)|\.|\*";

fn pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(ATOM_PATTERN).expect("atom pattern compiles"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnitKind {
    Atom,
    BracketAtom,
    Bond,
    RingDigit,
    BranchOpen,
    BranchClose,
    Dot,
    Wildcard,
}

impl UnitKind {
    /// Classifies a unit by its text alone.
    pub fn of(text: &str) -> Option<UnitKind> {
        let kind = match text {
            "(" => UnitKind::BranchOpen,
            ")" => UnitKind::BranchClose,
            "." => UnitKind::Dot,
            "*" => UnitKind::Wildcard,
            "-" | "=" | "#" | "$" | ":" | "/" | "\\" => UnitKind::Bond,
            "Cl" | "Br" | "B" | "C" | "N" | "O" | "S" | "P" | "F" | "I" | "b" | "c" | "n" | "o"
            | "s" | "p" => UnitKind::Atom,
            t if t.len() == 1 && t.as_bytes()[0].is_ascii_digit() => UnitKind::RingDigit,
            t if t.len() == 3
                && t.starts_with('%')
                && t.bytes().skip(1).all(|b| b.is_ascii_digit()) =>
            {
                UnitKind::RingDigit
            }
            t if t.len() >= 2 && t.starts_with('[') && t.ends_with(']') => UnitKind::BracketAtom,
            _ => return None,
        };
        Some(kind)
    }
}

/// One atom-level unit of a SMILES string.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SmilesUnit {
    pub text: String,
    pub kind: UnitKind,
}

impl fmt::Display for SmilesUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Splits `smiles` into atom-level units, each with its byte offset.
pub fn atom_spans(smiles: &str) -> Result<Vec<(usize, &str, UnitKind)>, SmilesError> {
    let mut out = Vec::with_capacity(smiles.len());
    let mut cursor = 0;
    for m in pattern().find_iter(smiles) {
        if m.start() != cursor {
            return Err(gap_error(smiles, cursor));
        }
        let text = m.as_str();
        let kind = UnitKind::of(text).expect("pattern only yields classifiable units");
        out.push((m.start(), text, kind));
        cursor = m.end();
    }
    if cursor != smiles.len() {
        return Err(gap_error(smiles, cursor));
    }
    Ok(out)
}

fn gap_error(smiles: &str, at: usize) -> SmilesError {
    let c = smiles[at..].chars().next().unwrap_or('?');
    let message = match c {
        '[' => "unterminated bracket atom".to_string(),
        '%' => "ring label '%' must be followed by two digits".to_string(),
        _ => format!("unexpected character {c:?}"),
    };
    SmilesError::new(SmilesErrorKind::Syntax, at, message)
}

/// Splits `smiles` into owned [`SmilesUnit`]s.
pub fn atom_tokenize(smiles: &str) -> Result<Vec<SmilesUnit>, SmilesError> {
    Ok(atom_spans(smiles)?
        .into_iter()
        .map(|(_, text, kind)| SmilesUnit {
            text: text.to_string(),
            kind,
        })
        .collect())
}

/// Unit texts only; the form the trainer and tokenizer work on.
pub fn atom_units(smiles: &str) -> Result<Vec<String>, SmilesError> {
    Ok(atom_spans(smiles)?
        .into_iter()
        .map(|(_, text, _)| text.to_string())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(s: &str) -> Vec<String> {
        atom_units(s).unwrap()
    }

    #[test]
    fn toluene() {
        assert_eq!(
            texts("Cc1ccccc1"),
            ["C", "c", "1", "c", "c", "c", "c", "c", "1"]
        );
    }

    #[test]
    fn glutamic_acid() {
        // Worked by hand from the unit rules.
        let expected = [
            "N", "[C@@H]", "(", "C", "C", "C", "(", "=", "O", ")", "O", ")", "C", "(", "=", "O",
            ")", "O",
        ];
        assert_eq!(texts("N[C@@H](CCC(=O)O)C(=O)O"), expected);
        assert_eq!(
            texts("N[C@@H](CCC(=O)O)C(=O)O").concat(),
            "N[C@@H](CCC(=O)O)C(=O)O"
        );
    }

    #[test]
    fn halogens_and_percent_rings() {
        assert_eq!(texts("ClC(Cl)Cl"), ["Cl", "C", "(", "Cl", ")", "Cl"]);
        assert_eq!(texts("BrC%12CC%12"), ["Br", "C", "%12", "C", "C", "%12"]);
        assert_eq!(texts("[2*]C1.*"), ["[2*]", "C", "1", ".", "*"]);
    }

    #[test]
    fn kinds() {
        let units = atom_tokenize("[nH]1c(=O)/C.*%10").unwrap();
        let kinds: Vec<UnitKind> = units.iter().map(|u| u.kind).collect();
        assert_eq!(
            kinds,
            [
                UnitKind::BracketAtom,
                UnitKind::RingDigit,
                UnitKind::Atom,
                UnitKind::BranchOpen,
                UnitKind::Bond,
                UnitKind::Atom,
                UnitKind::BranchClose,
                UnitKind::Bond,
                UnitKind::Atom,
                UnitKind::Dot,
                UnitKind::Wildcard,
                UnitKind::RingDigit,
            ]
        );
    }

    #[test]
    fn rejects_foreign_characters() {
        let err = atom_tokenize("CC X").unwrap_err();
        assert_eq!(err.kind, SmilesErrorKind::Syntax);
        assert_eq!(err.position, 2);
        let err = atom_tokenize("C[CH3").unwrap_err();
        assert_eq!(err.position, 1);
        assert!(atom_tokenize("C%1C").is_err());
        assert!(atom_tokenize("CC>>O").is_err());
    }

    #[test]
    fn empty_input() {
        assert!(atom_tokenize("").unwrap().is_empty());
    }
}
