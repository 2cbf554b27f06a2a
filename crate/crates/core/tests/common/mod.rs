//! Oracles shared by the integration tests and the acceptance suite. None
//! of them call the library's own encoders.

#![allow(dead_code)]

pub mod apk;
pub mod axml_oracle;
pub mod corpus;
pub mod dex_oracle;
pub mod fixtures;
pub mod reference_nn;
