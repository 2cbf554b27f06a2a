//! Recurrent and convolutional classifiers over feature vectors.

mod format;
pub(crate) mod nn;
mod spec;

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::vector::FeatureVector;

pub use format::{format_header, parse_header, read_header, MODEL_FORMAT_VERSION, MODEL_MAGIC};
pub(crate) use format::{decode, encode, RawData, RawTensor};
pub use nn::{argmax, softmax, DenseMatrix, MatVec, QuantMatrix};
pub use spec::{
    default_labels, Architecture, CellKind, CnnParams, ModelSpec, TensorShape, CNN_ROWS, REFERENCE_CNN_WIDTH,
    REFERENCE_HIDDEN_UNITS, REFERENCE_INPUT_DIM,
};

use nn::{Body, Cell, Cnn, Dense, Gate, Network};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model format error: {0}")]
    Format(String),
    #[error("unknown architecture {0:?}")]
    UnknownArchitecture(String),
    #[error("invalid model spec: {0}")]
    InvalidSpec(String),
    #[error("tensor {tensor}: expected shape {expected:?}, found {found:?}")]
    ShapeMismatch { tensor: String, expected: Option<(usize, usize)>, found: Option<(usize, usize)> },
    #[error("tensor {tensor} has a non-finite value at index {index}")]
    NonFiniteWeight { tensor: String, index: usize },
    #[error("model checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    ChecksumMismatch { stored: u32, computed: u32 },
    #[error("input dimension mismatch: model expects {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operation needs a {expected} model, this one is {found}")]
    WrongArchitecture { expected: &'static str, found: Architecture },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Row-major f32 tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f32>,
}

impl Tensor {
    pub fn new(rows: usize, cols: usize, data: Vec<f32>) -> Self {
        assert_eq!(data.len(), rows * cols, "tensor data length");
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn at(&self, r: usize, c: usize) -> f32 {
        self.data[r * self.cols + c]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub class_index: usize,
    pub label: String,
    /// Probability of the predicted class.
    pub confidence: f64,
    pub probabilities: Vec<f64>,
}

impl Prediction {
    pub fn is_benign(&self) -> bool {
        self.label == "benign"
    }

    pub(crate) fn from_logits(spec: &ModelSpec, logits: &[f32]) -> Self {
        let probabilities = softmax(logits);
        let class_index = argmax(&probabilities);
        Self {
            class_index,
            label: spec.labels[class_index].clone(),
            confidence: probabilities[class_index],
            probabilities,
        }
    }
}

/// Shared prediction surface of float and int8 models.
pub trait Inference {
    fn spec(&self) -> &ModelSpec;

    fn is_quantized(&self) -> bool {
        false
    }

    /// Logits for an input of exactly `spec().input_dim` values.
    fn logits_unchecked(&self, x: &[f32]) -> Vec<f32>;

    fn logits(&self, x: &[f32]) -> Result<Vec<f32>, ModelError> {
        check_dim(self.spec(), x.len())?;
        Ok(self.logits_unchecked(x))
    }

    fn predict_dense(&self, x: &[f32]) -> Result<Prediction, ModelError> {
        let logits = self.logits(x)?;
        Ok(Prediction::from_logits(self.spec(), &logits))
    }

    fn predict(&self, v: &FeatureVector) -> Result<Prediction, ModelError> {
        check_dim(self.spec(), v.dimension())?;
        self.predict_dense(&v.to_f32())
    }
}

fn check_dim(spec: &ModelSpec, found: usize) -> Result<(), ModelError> {
    if found != spec.input_dim {
        return Err(ModelError::DimensionMismatch { expected: spec.input_dim, found });
    }
    Ok(())
}

/// Matches `tensors` against the spec's shape table and returns them in
/// table order.
pub(crate) fn order_tensors(spec: &ModelSpec, mut tensors: Vec<RawTensor>) -> Result<Vec<RawTensor>, ModelError> {
    let shapes = spec.tensor_shapes();
    for (i, t) in tensors.iter().enumerate() {
        if tensors[..i].iter().any(|u| u.name == t.name) {
            return Err(ModelError::Format(format!("tensor {} appears twice", t.name)));
        }
        if !shapes.iter().any(|s| s.name == t.name) {
            return Err(ModelError::ShapeMismatch {
                tensor: t.name.clone(),
                expected: None,
                found: Some((t.rows, t.cols)),
            });
        }
    }
    let mut ordered = Vec::with_capacity(shapes.len());
    for s in &shapes {
        let pos = tensors.iter().position(|t| t.name == s.name).ok_or_else(|| ModelError::ShapeMismatch {
            tensor: s.name.clone(),
            expected: Some((s.rows, s.cols)),
            found: None,
        })?;
        let t = tensors.swap_remove(pos);
        if (t.rows, t.cols) != (s.rows, s.cols) {
            return Err(ModelError::ShapeMismatch {
                tensor: s.name.clone(),
                expected: Some((s.rows, s.cols)),
                found: Some((t.rows, t.cols)),
            });
        }
        ordered.push(t);
    }
    Ok(ordered)
}

pub(crate) fn check_finite(name: &str, values: &[f32]) -> Result<(), ModelError> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(ModelError::NonFiniteWeight { tensor: name.to_owned(), index }),
        None => Ok(()),
    }
}

/// Assembles a network from per-name matrix and bias lookups.
pub(crate) fn build_network<M>(
    spec: &ModelSpec,
    matrix: &impl Fn(&str) -> M,
    bias: &impl Fn(&str) -> Vec<f32>,
) -> Network<M> {
    let cell = |prefix: &str, kind: CellKind| Cell {
        kind,
        gates: kind
            .gates()
            .iter()
            .map(|g| Gate {
                w: matrix(&format!("{prefix}W_{g}")),
                u: matrix(&format!("{prefix}U_{g}")),
                b: bias(&format!("{prefix}b_{g}")),
            })
            .collect(),
    };
    let dense = |w: &str, b: &str| Dense { w: matrix(w), b: bias(b) };
    let body = match spec.architecture {
        Architecture::Gru | Architecture::Lstm => Body::Single(cell("", spec.architecture.cell().unwrap())),
        Architecture::StackedGru | Architecture::StackedLstm => {
            let k = spec.architecture.cell().unwrap();
            Body::Stacked(cell("layer1.", k), cell("layer2.", k))
        }
        Architecture::BiGru | Architecture::BiLstm => {
            let k = spec.architecture.cell().unwrap();
            Body::Bidirectional(cell("fwd.", k), cell("bwd.", k))
        }
        Architecture::Cnn => {
            return Network {
                body: Body::Cnn(Cnn {
                    params: spec.cnn.expect("validated cnn spec"),
                    conv: dense("conv_W", "conv_b"),
                    dense1: dense("dense1_W", "dense1_b"),
                    dense2: dense("dense2_W", "dense2_b"),
                }),
                classifier: None,
            }
        }
    };
    Network { body, classifier: Some(dense("classifier_W", "classifier_b")) }
}

/// A float32 model.
#[derive(Debug, Clone)]
pub struct Model {
    spec: ModelSpec,
    /// In `spec.tensor_shapes()` order.
    tensors: Vec<(String, Tensor)>,
    net: Network<DenseMatrix>,
}

impl Model {
    /// Validates spec, shapes and finiteness, then builds the network.
    pub fn from_tensors(spec: ModelSpec, tensors: Vec<(String, Tensor)>) -> Result<Self, ModelError> {
        spec.validate()?;
        let raw = tensors
            .into_iter()
            .map(|(name, t)| RawTensor { name, rows: t.rows, cols: t.cols, data: RawData::F32(t.data) })
            .collect();
        Self::from_raw(spec, raw)
    }

    fn from_raw(spec: ModelSpec, raw: Vec<RawTensor>) -> Result<Self, ModelError> {
        let ordered = order_tensors(&spec, raw)?;
        let mut tensors = Vec::with_capacity(ordered.len());
        for t in ordered {
            let RawData::F32(data) = t.data else {
                return Err(ModelError::Format(format!("tensor {} is int8 in a float model", t.name)));
            };
            check_finite(&t.name, &data)?;
            tensors.push((t.name, Tensor::new(t.rows, t.cols, data)));
        }
        let lookup = |name: &str| &tensors.iter().find(|(n, _)| n == name).expect("ordered tensor").1;
        let net = build_network(
            &spec,
            &|n| {
                let t = lookup(n);
                DenseMatrix::from_row_major(t.rows, t.cols, &t.data)
            },
            &|n| lookup(n).data.clone(),
        );
        Ok(Self { spec, tensors, net })
    }

    pub fn zeros(spec: ModelSpec) -> Result<Self, ModelError> {
        spec.validate()?;
        let tensors = spec.tensor_shapes().into_iter().map(|s| (s.name, Tensor::zeros(s.rows, s.cols))).collect();
        Self::from_tensors(spec, tensors)
    }

    /// Glorot-uniform matrices and biases uniform in [-0.1, 0.1], drawn from
    /// a ChaCha8 stream seeded with `seed`.
    pub fn random(spec: ModelSpec, seed: u64) -> Result<Self, ModelError> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tensors = spec
            .tensor_shapes()
            .into_iter()
            .map(|s| {
                let limit = if s.bias { 0.1 } else { (6.0 / (s.rows + s.cols) as f32).sqrt() };
                let data = (0..s.rows * s.cols).map(|_| rng.gen_range(-limit..=limit)).collect();
                (s.name, Tensor::new(s.rows, s.cols, data))
            })
            .collect();
        Self::from_tensors(spec, tensors)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ModelError> {
        let c = decode(bytes)?;
        if c.quantized {
            return Err(ModelError::Format("file holds an int8 model".into()));
        }
        Self::from_raw(c.spec, c.tensors)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let raw: Vec<RawTensor> = self
            .tensors
            .iter()
            .map(|(name, t)| RawTensor {
                name: name.clone(),
                rows: t.rows,
                cols: t.cols,
                data: RawData::F32(t.data.clone()),
            })
            .collect();
        encode(&self.spec, false, &raw)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn tensors(&self) -> &[(String, Tensor)] {
        &self.tensors
    }

    pub fn tensor(&self, name: &str) -> Option<&Tensor> {
        self.tensors.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    fn require(&self, ok: bool, expected: &'static str, x: &[f32]) -> Result<(), ModelError> {
        if !ok {
            return Err(ModelError::WrongArchitecture { expected, found: self.spec.architecture });
        }
        check_dim(&self.spec, x.len())
    }

    /// Hidden state of a single-layer GRU after one step.
    pub fn forward_gru(&self, x: &[f32]) -> Result<Vec<f32>, ModelError> {
        self.require(self.spec.architecture == Architecture::Gru, "gru", x)?;
        Ok(self.net.hidden(x).unwrap())
    }

    /// Hidden state of a single-layer LSTM after one step.
    pub fn forward_lstm(&self, x: &[f32]) -> Result<Vec<f32>, ModelError> {
        self.require(self.spec.architecture == Architecture::Lstm, "lstm", x)?;
        Ok(self.net.hidden(x).unwrap())
    }

    /// Output of the second recurrent layer.
    pub fn forward_stacked(&self, x: &[f32]) -> Result<Vec<f32>, ModelError> {
        let ok = matches!(self.spec.architecture, Architecture::StackedGru | Architecture::StackedLstm);
        self.require(ok, "stacked", x)?;
        Ok(self.net.hidden(x).unwrap())
    }

    /// Forward and backward hidden states, concatenated.
    pub fn forward_bidirectional(&self, x: &[f32]) -> Result<Vec<f32>, ModelError> {
        let ok = matches!(self.spec.architecture, Architecture::BiGru | Architecture::BiLstm);
        self.require(ok, "bidirectional", x)?;
        Ok(self.net.hidden(x).unwrap())
    }

    /// Class logits of the CNN.
    pub fn forward_cnn(&self, x: &[f32]) -> Result<Vec<f32>, ModelError> {
        self.require(self.spec.architecture == Architecture::Cnn, "cnn", x)?;
        Ok(self.net.logits(x))
    }
}

impl Inference for Model {
    fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    fn logits_unchecked(&self, x: &[f32]) -> Vec<f32> {
        self.net.logits(x)
    }
}
