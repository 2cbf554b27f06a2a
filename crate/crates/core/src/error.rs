use thiserror::Error;

use crate::apk::ApkError;
use crate::axml::{AxmlError, ManifestError};
use crate::dex::DexEntryError;
use crate::dictionary::DictError;
use crate::model::ModelError;
use crate::synth::SynthError;
use crate::vector::VectorError;

/// Any failure of the scan pipeline or its file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Apk(#[from] ApkError),
    #[error(transparent)]
    Dex(#[from] DexEntryError),
    #[error(transparent)]
    Axml(#[from] AxmlError),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Dict(#[from] DictError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Vector(#[from] VectorError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("report error: {0}")]
    Report(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Model(ModelError::DimensionMismatch { .. }) | Error::Vector(VectorError::DimensionMismatch { .. }) => {
                "DimensionMismatch"
            }
            Error::Apk(ApkError::Io(_)) | Error::Dict(DictError::Io(_)) | Error::Model(ModelError::Io(_)) => "Io",
            Error::Apk(_) => "ApkError",
            Error::Dex(_) => "DexError",
            Error::Axml(_) => "AxmlError",
            Error::Manifest(_) => "ManifestError",
            Error::Dict(_) => "DictError",
            Error::Model(_) => "ModelError",
            Error::Vector(_) => "VectorError",
            Error::Synth(_) => "SynthError",
            Error::Report(_) => "ReportError",
            Error::Io(_) => "Io",
        }
    }
}
