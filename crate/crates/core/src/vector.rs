//! Binary presence vectors over a feature dictionary.
//!
//! Text form:
//!
//! ```text
//! apkfeat-vec dict=<version> dim=<n> label=<int|none>
//! 0110...
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::axml::ManifestInfo;
use crate::dex::ApiCall;
use crate::dictionary::{FeatureDictionary, FeatureKind};

pub const VEC_MAGIC: &str = "apkfeat-vec";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VectorError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("malformed vector text: {0}")]
    FormatError(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector {
    pub dict_version: String,
    bits: Vec<bool>,
}

impl FeatureVector {
    pub fn new(dict_version: impl Into<String>, bits: Vec<bool>) -> Self {
        Self { dict_version: dict_version.into(), bits }
    }

    pub fn zeros(dict_version: impl Into<String>, dimension: usize) -> Self {
        Self::new(dict_version, vec![false; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn to_f32(&self) -> Vec<f32> {
        self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }
}

/// Sets bit `i` iff dictionary feature `i` occurs in the app. Features that
/// are not in the dictionary are ignored.
pub fn vectorize(
    apis: &BTreeSet<ApiCall>,
    manifest: &ManifestInfo,
    dict: &FeatureDictionary,
) -> FeatureVector {
    let mut bits = vec![false; dict.len()];
    for call in apis {
        if let Some(i) = dict.index_of_kind(FeatureKind::ApiCall, call.canonical()) {
            bits[i] = true;
        }
    }
    let manifest_sets = [
        (FeatureKind::Permission, &manifest.permissions),
        (FeatureKind::IntentAction, &manifest.intent_actions),
        (FeatureKind::HardwareFeature, &manifest.hardware_features),
    ];
    for (kind, names) in manifest_sets {
        for name in names {
            if let Some(i) = dict.index_of_kind(kind, name) {
                bits[i] = true;
            }
        }
    }
    FeatureVector::new(dict.version(), bits)
}

pub fn vector_to_text(vector: &FeatureVector, label: Option<u32>) -> String {
    let mut out = String::with_capacity(vector.dimension() + 64);
    let label = label.map_or_else(|| "none".to_owned(), |l| l.to_string());
    let _ = writeln!(out, "{VEC_MAGIC} dict={} dim={} label={label}", vector.dict_version, vector.dimension());
    out.extend(vector.bits.iter().map(|&b| if b { '1' } else { '0' }));
    out.push('\n');
    out
}

pub fn text_to_vector(text: &str) -> Result<(FeatureVector, Option<u32>), VectorError> {
    let bad = |m: &str| VectorError::FormatError(m.to_owned());
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty input"))?;
    let mut parts = header.split(' ');
    if parts.next() != Some(VEC_MAGIC) {
        return Err(bad("missing apkfeat-vec header"));
    }
    let dict = parts.next().and_then(|p| p.strip_prefix("dict=")).ok_or_else(|| bad("missing dict="))?;
    let dim: usize = parts
        .next()
        .and_then(|p| p.strip_prefix("dim="))
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| bad("missing dim="))?;
    let label = match parts.next().and_then(|p| p.strip_prefix("label=")) {
        Some("none") => None,
        Some(l) => Some(l.parse().map_err(|_| bad("label must be an integer or none"))?),
        None => return Err(bad("missing label=")),
    };
    let body = lines.next().unwrap_or("");
    if lines.any(|l| !l.is_empty()) {
        return Err(bad("trailing content after the bit line"));
    }
    let bits = body
        .bytes()
        .map(|b| match b {
            b'0' => Ok(false),
            b'1' => Ok(true),
            _ => Err(bad("bit line may contain only 0 and 1")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if bits.len() != dim {
        return Err(VectorError::DimensionMismatch { expected: dim, found: bits.len() });
    }
    Ok((FeatureVector::new(dict, bits), label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::{FeatureEntry, Origin};

    fn toy_dict() -> FeatureDictionary {
        FeatureDictionary::from_entries(
            "t1",
            vec![
                FeatureEntry::new(FeatureKind::ApiCall, "La/Aa;->a", Origin::Corpus),
                FeatureEntry::new(FeatureKind::ApiCall, "Lb/Bb;->b", Origin::Corpus),
                FeatureEntry::new(FeatureKind::Permission, "c.PERM", Origin::Documentation),
            ],
        )
        .unwrap()
    }

    #[test]
    fn hand_evaluated_toy() {
        let dict = toy_dict();
        let apis = [ApiCall::parse("Lb/Bb;->b").unwrap(), ApiCall::parse("Lz/Zz;->unknown").unwrap()].into();
        let manifest = ManifestInfo { permissions: ["c.PERM".to_owned()].into(), ..Default::default() };
        let v = vectorize(&apis, &manifest, &dict);
        assert_eq!(v.bits(), [false, true, true]);
        assert_eq!(v.dict_version, "t1");
    }

    #[test]
    fn empty_and_full() {
        let dict = toy_dict();
        let v = vectorize(&BTreeSet::new(), &ManifestInfo::default(), &dict);
        assert_eq!(v.popcount(), 0);
        let apis = [ApiCall::parse("La/Aa;->a").unwrap(), ApiCall::parse("Lb/Bb;->b").unwrap()].into();
        let manifest = ManifestInfo { permissions: ["c.PERM".to_owned()].into(), ..Default::default() };
        assert_eq!(vectorize(&apis, &manifest, &dict).popcount(), 3);
    }

    #[test]
    fn kind_must_match() {
        // A permission name reported as an intent action does not set the bit.
        let dict = toy_dict();
        let manifest = ManifestInfo { intent_actions: ["c.PERM".to_owned()].into(), ..Default::default() };
        assert_eq!(vectorize(&BTreeSet::new(), &manifest, &dict).popcount(), 0);
    }

    #[test]
    fn text_format() {
        let v = FeatureVector::zeros("v9", 4);
        let text = vector_to_text(&v, None);
        assert_eq!(text, "apkfeat-vec dict=v9 dim=4 label=none\n0000\n");
        assert_eq!(text_to_vector(&text).unwrap(), (v, None));
        assert_eq!(
            text_to_vector("apkfeat-vec dict=a dim=4 label=1\n01011\n"),
            Err(VectorError::DimensionMismatch { expected: 4, found: 5 })
        );
        assert!(text_to_vector("apkfeat-vec dict=a dim=2 label=x\n01\n").is_err());
        assert!(text_to_vector("apkfeat-vec dict=a dim=2 label=0\n0a\n").is_err());
    }
}
