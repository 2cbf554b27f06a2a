//! Seeded synthetic APKs with planted features, for end-to-end tests and
//! timing corpora.
//!
//! Layout: a deflated binary manifest, then a deflated `classes.dex` whose
//! method table holds exactly the planted calls and whose data section
//! carries incompressible filler. The filler lives inside the dex so both
//! inflate/CRC (unzip) and the dex checksum pass (extract) scale with the
//! file size. The EOCD comment absorbs the last few bytes so files hit
//! their target size exactly.

use std::collections::BTreeSet;
use std::path::Path;

use flate2::Compression;
use rand::seq::index::sample;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::apk::MANIFEST_ENTRY;
use crate::axml::{encode_axml, ManifestInfo};
use crate::dex::{ApiCall, DexBuilder};
use crate::dictionary::{FeatureDictionary, FeatureKind};
use crate::zipwrite::ZipBuilder;

pub const MB: u64 = 1 << 20;
const MAX_COMMENT: u64 = u16::MAX as u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthError {
    #[error("target size {requested} bytes is below the {minimum}-byte minimum for this content")]
    SizeTooSmall { requested: u64, minimum: u64 },
    #[error("asked for {requested} API calls but the catalogue holds {available}")]
    NotEnoughCalls { requested: usize, available: usize },
    #[error("{0:?} is not a manifest feature kind")]
    NotManifestKind(FeatureKind),
}

/// What a synthetic APK carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthContent {
    pub api_calls: BTreeSet<ApiCall>,
    pub manifest: ManifestInfo,
}

impl SynthContent {
    pub fn new(api_calls: impl IntoIterator<Item = ApiCall>, manifest: ManifestInfo) -> Self {
        Self { api_calls: api_calls.into_iter().collect(), manifest }
    }

    /// `n_api` calls sampled without replacement from `catalogue`.
    pub fn sampled(
        catalogue: &[ApiCall],
        n_api: usize,
        manifest_props: &[(FeatureKind, String)],
        seed: u64,
    ) -> Result<Self, SynthError> {
        if n_api > catalogue.len() {
            return Err(SynthError::NotEnoughCalls { requested: n_api, available: catalogue.len() });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let calls = sample(&mut rng, catalogue.len(), n_api).into_iter().map(|i| catalogue[i].clone());
        Ok(Self::new(calls, manifest_from_props(manifest_props, &format!("com.synth.app{seed}"))?))
    }
}

pub fn manifest_from_props(props: &[(FeatureKind, String)], package: &str) -> Result<ManifestInfo, SynthError> {
    let mut m = ManifestInfo { package_name: package.to_owned(), ..ManifestInfo::default() };
    for (kind, value) in props {
        let set = match kind {
            FeatureKind::Permission => &mut m.permissions,
            FeatureKind::IntentAction => &mut m.intent_actions,
            FeatureKind::HardwareFeature => &mut m.hardware_features,
            FeatureKind::ApiCall => return Err(SynthError::NotManifestKind(*kind)),
        };
        set.insert(value.clone());
    }
    Ok(m)
}

/// The dictionary's API calls, in dictionary order.
pub fn api_catalogue(dict: &FeatureDictionary) -> Vec<ApiCall> {
    dict.entries()
        .iter()
        .filter(|e| e.kind == FeatureKind::ApiCall)
        .filter_map(|e| ApiCall::parse(&e.canonical))
        .collect()
}

fn build(content: &SynthContent, manifest: &[u8], filler_len: u64, seed: u64, comment_len: u64) -> Vec<u8> {
    let mut filler = vec![0u8; filler_len as usize];
    ChaCha8Rng::seed_from_u64(seed ^ 0x5EED_F111).fill_bytes(&mut filler);
    let dex = DexBuilder::new()
        .methods(content.api_calls.iter().map(|c| (c.class_descriptor().to_owned(), c.method_name().to_owned())))
        .filler(filler)
        .build();
    let mut zip = ZipBuilder::with_capacity(dex.len() + manifest.len() + 4096, Compression::fast());
    zip.add_deflated(MANIFEST_ENTRY, manifest);
    zip.add_deflated("classes.dex", &dex);
    zip.finish_with_comment(&vec![0u8; comment_len as usize])
}

/// An APK of exactly `target_bytes` bytes carrying `content`.
pub fn synth_apk_bytes(target_bytes: u64, content: &SynthContent, seed: u64) -> Result<Vec<u8>, SynthError> {
    let manifest = encode_axml(&content.manifest.to_element());
    let minimum = build(content, &manifest, 0, seed, 0).len() as u64;
    if target_bytes < minimum {
        return Err(SynthError::SizeTooSmall { requested: target_bytes, minimum });
    }
    // Deflate output grows monotonically with incompressible input, so a
    // few corrections converge to a size just under the target.
    let mut filler = target_bytes - minimum;
    for _ in 0..8 {
        let size = build(content, &manifest, filler, seed, 0).len() as u64;
        if size <= target_bytes && target_bytes - size <= MAX_COMMENT {
            return Ok(build(content, &manifest, filler, seed, target_bytes - size));
        }
        if size > target_bytes {
            filler = filler.saturating_sub(size - target_bytes + 64);
        } else {
            filler += target_bytes - size - MAX_COMMENT / 2;
        }
    }
    unreachable!("filler size search did not converge")
}

/// `size_mb` mebibytes, `n_api` calls sampled from `catalogue`, and the
/// given manifest properties.
pub fn synth_apk(
    size_mb: f64,
    n_api: usize,
    manifest_props: &[(FeatureKind, String)],
    catalogue: &[ApiCall],
    seed: u64,
) -> Result<(Vec<u8>, SynthContent), SynthError> {
    let content = SynthContent::sampled(catalogue, n_api, manifest_props, seed)?;
    let target = (size_mb.max(0.0) * MB as f64).round() as u64;
    Ok((synth_apk_bytes(target, &content, seed)?, content))
}

pub fn write_synth_apk(path: &Path, target_bytes: u64, content: &SynthContent, seed: u64) -> Result<(), crate::Error> {
    std::fs::write(path, synth_apk_bytes(target_bytes, content, seed)?)?;
    Ok(())
}
