//! Hand-built models committed under `tests/fixtures/`.
//!
//! The cluster detector is a GRU whose first hidden unit reads the features
//! added from behavior reports. With a zero initial state and an update
//! gate pinned open (`b_z = 12`), `h_0 = σ(12) · tanh(k)` where `k` counts
//! present behavior features. One such feature already flips the verdict:
//! the malware logit is `4 h_0 - 0.5` against `0.5 - 4 h_0` for benign.

use apkfeat::dictionary::{FeatureDictionary, Origin};
use apkfeat::model::{Architecture, ModelSpec, Tensor};
use apkfeat::Model;

pub const CLUSTER_HIDDEN: usize = 2;

/// Indices of the behavior-report features of `dict`.
pub fn behavior_indices(dict: &FeatureDictionary) -> Vec<usize> {
    dict.entries().iter().enumerate().filter(|(_, e)| e.origin == Origin::BehaviorReport).map(|(i, _)| i).collect()
}

/// A GRU over `input_dim` features flagging any index in `malicious`.
pub fn cluster_gru(input_dim: usize, malicious: &[usize]) -> Model {
    let spec = ModelSpec::new(Architecture::Gru, input_dim, CLUSTER_HIDDEN, 2);
    let tensors = spec
        .tensor_shapes()
        .into_iter()
        .map(|s| {
            let mut t = Tensor::zeros(s.rows, s.cols);
            match s.name.as_str() {
                "b_z" => t.data.fill(12.0),
                "W_h" => malicious.iter().for_each(|&i| t.data[i] = 1.0),
                "classifier_W" => t.data.copy_from_slice(&[-4.0, 0.0, 4.0, 0.0]),
                "classifier_b" => t.data.copy_from_slice(&[0.5, -0.5]),
                _ => {}
            }
            (s.name, t)
        })
        .collect();
    Model::from_tensors(spec, tensors).expect("cluster model is well-formed")
}

/// `(file name, bytes)` of every committed model fixture.
pub fn all() -> Vec<(&'static str, Vec<u8>)> {
    let full = apkfeat::reference::full();
    let base = apkfeat::reference::base();
    let gru = cluster_gru(full.len(), &behavior_indices(&full));
    // Sized for the base dictionary: a dimension mismatch against the full one.
    let stale = cluster_gru(base.len(), &[]);
    vec![
        ("cluster-gru.model", gru.to_bytes()),
        ("cluster-gru-int8.model", apkfeat::QuantizedModel::quantize(&gru).to_bytes()),
        ("cluster-gru-base.model", stale.to_bytes()),
    ]
}
