// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

#[cfg(doc)]
pub mod book;
pub mod corpus;
pub mod extension;
pub mod fingerprint;
pub mod metrics;
pub mod pretokenize;
pub mod smiles;
pub mod spe;
pub mod tokenizer;
