// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

//! Guide chapters, compiled here so their examples run as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/smiles.md")]
pub mod smiles {}

#[doc = include_str!("../../../book/src/atom-units.md")]
pub mod atom_units {}

#[doc = include_str!("../../../book/src/training.md")]
pub mod training {}

#[doc = include_str!("../../../book/src/tokenizer.md")]
pub mod tokenizer {}

#[doc = include_str!("../../../book/src/extension.md")]
pub mod extension {}

#[doc = include_str!("../../../book/src/scoring.md")]
pub mod scoring {}

#[doc = include_str!("../../../book/src/corpus.md")]
pub mod corpus {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
