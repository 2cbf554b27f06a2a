//! APK -> features -> vector -> verdict, with per-phase wall-clock timing.
//!
//! Phases: *unzip* reads the file, indexes the central directory and
//! inflates the manifest and every dex entry; *extract* decodes the
//! manifest, parses the dex files and builds the vector; *predict* runs the
//! model.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::apk::{ApkArchive, RawPayload};
use crate::axml::{decode_axml, extract_manifest_properties, ManifestInfo};
use crate::dex::{extract_api_calls_multi, ApiCall, DexOptions};
use crate::dictionary::FeatureDictionary;
use crate::model::{Architecture, Inference, ModelError, Prediction};
use crate::vector::{vectorize, FeatureVector};
use crate::Error;

/// Raw static features of one APK.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Features {
    pub api_calls: BTreeSet<String>,
    #[serde(flatten)]
    pub manifest: ManifestInfo,
    pub dex_entries: usize,
}

impl Features {
    pub fn api_set(&self) -> BTreeSet<ApiCall> {
        self.api_calls.iter().filter_map(|c| ApiCall::parse(c)).collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PhaseTimings {
    #[serde(serialize_with = "secs")]
    pub unzip: Duration,
    #[serde(serialize_with = "secs")]
    pub extract: Duration,
    #[serde(serialize_with = "secs")]
    pub predict: Duration,
    #[serde(serialize_with = "secs")]
    pub total: Duration,
}

fn secs<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

/// File bytes in, decompressed payload out.
pub fn unzip_phase(path: &Path) -> Result<(u64, RawPayload), Error> {
    let bytes = std::fs::read(path)?;
    let size = bytes.len() as u64;
    let archive = ApkArchive::from_bytes(bytes)?;
    Ok((size, archive.extract_raw_payload()?))
}

pub fn extract_phase(payload: &RawPayload, dex: DexOptions) -> Result<Features, Error> {
    let tree = decode_axml(&payload.manifest_bytes)?;
    let manifest = extract_manifest_properties(&tree)?;
    let apis = extract_api_calls_multi(payload, dex)?;
    Ok(Features {
        api_calls: apis.into_iter().map(|c| c.canonical().to_owned()).collect(),
        manifest,
        dex_entries: payload.dex_payloads.len(),
    })
}

pub fn vectorize_features(features: &Features, dict: &FeatureDictionary) -> FeatureVector {
    vectorize(&features.api_set(), &features.manifest, dict)
}

/// Unzip and extract without a model.
pub fn extract_features(path: &Path, dex: DexOptions) -> Result<Features, Error> {
    let (_, payload) = unzip_phase(path)?;
    extract_phase(&payload, dex)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub apk: String,
    pub size_bytes: u64,
    pub verdict: String,
    pub class_index: usize,
    pub confidence: f64,
    pub probabilities: Vec<f64>,
    pub features_present: usize,
    pub dict_version: String,
    pub model_architecture: Architecture,
    pub quantized: bool,
    pub timings: PhaseTimings,
}

impl ScanResult {
    pub fn is_benign(&self) -> bool {
        self.verdict == "benign"
    }
}

/// Runs the full pipeline against one model and dictionary.
pub struct Scanner<'a, M: ?Sized> {
    model: &'a M,
    dict: &'a FeatureDictionary,
    dex: DexOptions,
}

impl<'a, M: Inference + ?Sized> Scanner<'a, M> {
    /// Fails with `DimensionMismatch` unless the model input width equals
    /// the dictionary size.
    pub fn new(model: &'a M, dict: &'a FeatureDictionary) -> Result<Self, Error> {
        let expected = model.spec().input_dim;
        if expected != dict.len() {
            return Err(ModelError::DimensionMismatch { expected, found: dict.len() }.into());
        }
        Ok(Self { model, dict, dex: DexOptions::default() })
    }

    pub fn with_dex_options(mut self, dex: DexOptions) -> Self {
        self.dex = dex;
        self
    }

    pub fn scan(&self, path: &Path) -> Result<ScanResult, Error> {
        let start = Instant::now();
        let (size_bytes, payload) = unzip_phase(path)?;
        let t_unzip = Instant::now();
        let features = extract_phase(&payload, self.dex)?;
        let vector = vectorize_features(&features, self.dict);
        let t_extract = Instant::now();
        let prediction = self.model.predict(&vector)?;
        let end = Instant::now();
        Ok(self.result(path, size_bytes, &vector, prediction, PhaseTimings {
            unzip: t_unzip - start,
            extract: t_extract - t_unzip,
            predict: end - t_extract,
            total: end - start,
        }))
    }

    fn result(
        &self,
        path: &Path,
        size_bytes: u64,
        vector: &FeatureVector,
        p: Prediction,
        timings: PhaseTimings,
    ) -> ScanResult {
        ScanResult {
            apk: path.display().to_string(),
            size_bytes,
            verdict: p.label,
            class_index: p.class_index,
            confidence: p.confidence,
            probabilities: p.probabilities,
            features_present: vector.popcount(),
            dict_version: self.dict.version().to_owned(),
            model_architecture: self.model.spec().architecture,
            quantized: self.model.is_quantized(),
            timings,
        }
    }
}
