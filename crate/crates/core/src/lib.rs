//! Static feature extraction from Android APKs and small neural classifiers
//! over the resulting binary vectors.
//!
//! The pipeline is: [`apk`] (ZIP container) -> [`dex`] and [`axml`]
//! (API calls and manifest properties) -> [`vector`] (presence bits over a
//! [`dictionary`]) -> [`model`] or [`quant`] (verdict).

pub mod apk;
pub mod axml;
pub mod bench;
pub mod checksum;
pub mod dex;
pub mod dictionary;
mod error;
pub mod model;
pub mod pipeline;
pub mod quant;
pub mod reference;
pub mod synth;
pub mod vector;
pub mod zipwrite;

pub use error::Error;
pub use model::{Architecture, Inference, Model, ModelError, ModelSpec, Prediction};
pub use pipeline::{ScanResult, Scanner};
pub use quant::{AnyModel, QuantizedModel};
