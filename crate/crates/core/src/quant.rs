//! Post-training int8 quantization.
//!
//! Every weight matrix gets one symmetric scale, `scale = max|w| / 127`
//! (1.0 for an all-zero matrix), and `q = round(w / scale)` clamped to
//! `[-127, 127]`. Biases stay f32. Activations stay f32; matrices are
//! dequantized on the fly inside the matrix-vector kernel.

use std::path::Path;

use serde::Serialize;

use crate::model::nn::Network;
use crate::model::{
    build_network, check_finite, decode, encode, order_tensors, Inference, Model, ModelError, ModelSpec,
    QuantMatrix, RawData, RawTensor, Tensor,
};

pub const QMAX: i32 = 127;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedTensor {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<i8>,
    pub scale: f32,
    pub zero_point: i32,
}

pub fn scale_for(values: &[f32]) -> f32 {
    let max = values.iter().fold(0.0f32, |m, v| m.max(v.abs()));
    if max == 0.0 {
        1.0
    } else {
        max / QMAX as f32
    }
}

/// The quotient is formed in f64 so that `|w - q * scale| <= scale / 2`
/// holds for the exact product.
pub fn quantize_value(w: f32, scale: f32) -> i8 {
    (f64::from(w) / f64::from(scale)).round().clamp(-f64::from(QMAX), f64::from(QMAX)) as i8
}

impl QuantizedTensor {
    pub fn quantize(t: &Tensor) -> Self {
        let scale = scale_for(&t.data);
        Self {
            rows: t.rows,
            cols: t.cols,
            values: t.data.iter().map(|&w| quantize_value(w, scale)).collect(),
            scale,
            zero_point: 0,
        }
    }

    pub fn dequantize(&self) -> Vec<f32> {
        let zp = self.zero_point as f32;
        self.values.iter().map(|&q| self.scale * (f32::from(q) - zp)).collect()
    }

    /// Largest `|w - dequantize(quantize(w))|` over the tensor.
    pub fn max_error(&self, original: &Tensor) -> f32 {
        self.dequantize().iter().zip(&original.data).map(|(a, b)| (a - b).abs()).fold(0.0, f32::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StoredTensor {
    Float(Tensor),
    Int8(QuantizedTensor),
}

/// A model whose matrices are int8.
#[derive(Debug, Clone)]
pub struct QuantizedModel {
    spec: ModelSpec,
    tensors: Vec<(String, StoredTensor)>,
    net: Network<QuantMatrix>,
}

impl QuantizedModel {
    pub fn quantize(model: &Model) -> Self {
        let spec = model.spec().clone();
        let shapes = spec.tensor_shapes();
        let raw = model
            .tensors()
            .iter()
            .zip(&shapes)
            .map(|((name, t), shape)| {
                let data = if shape.bias {
                    RawData::F32(t.data.clone())
                } else {
                    let q = QuantizedTensor::quantize(t);
                    RawData::I8 { values: q.values, scale: q.scale, zero_point: q.zero_point }
                };
                RawTensor { name: name.clone(), rows: t.rows, cols: t.cols, data }
            })
            .collect();
        Self::from_raw(spec, raw).expect("quantizing a valid model yields a valid model")
    }

    fn from_raw(spec: ModelSpec, raw: Vec<RawTensor>) -> Result<Self, ModelError> {
        let shapes = spec.tensor_shapes();
        let ordered = order_tensors(&spec, raw)?;
        let mut tensors = Vec::with_capacity(ordered.len());
        for (t, shape) in ordered.into_iter().zip(&shapes) {
            let stored = match (t.data, shape.bias) {
                (RawData::F32(data), true) => {
                    check_finite(&t.name, &data)?;
                    StoredTensor::Float(Tensor::new(t.rows, t.cols, data))
                }
                (RawData::I8 { values, scale, zero_point }, false) => {
                    StoredTensor::Int8(QuantizedTensor { rows: t.rows, cols: t.cols, values, scale, zero_point })
                }
                (_, true) => return Err(ModelError::Format(format!("bias {} must be f32", t.name))),
                (_, false) => return Err(ModelError::Format(format!("matrix {} must be int8", t.name))),
            };
            tensors.push((t.name, stored));
        }
        let lookup = |name: &str| &tensors.iter().find(|(n, _)| n == name).expect("ordered tensor").1;
        let net = build_network(
            &spec,
            &|n| match lookup(n) {
                StoredTensor::Int8(q) => QuantMatrix::from_row_major(q.rows, q.cols, &q.values, q.scale, q.zero_point),
                StoredTensor::Float(_) => unreachable!("matrices are int8"),
            },
            &|n| match lookup(n) {
                StoredTensor::Float(t) => t.data.clone(),
                StoredTensor::Int8(_) => unreachable!("biases are f32"),
            },
        );
        Ok(Self { spec, tensors, net })
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ModelError> {
        let c = decode(bytes)?;
        if !c.quantized {
            return Err(ModelError::Format("file holds a float model".into()));
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
            .map(|(name, t)| match t {
                StoredTensor::Float(t) => {
                    RawTensor { name: name.clone(), rows: t.rows, cols: t.cols, data: RawData::F32(t.data.clone()) }
                }
                StoredTensor::Int8(q) => RawTensor {
                    name: name.clone(),
                    rows: q.rows,
                    cols: q.cols,
                    data: RawData::I8 { values: q.values.clone(), scale: q.scale, zero_point: q.zero_point },
                },
            })
            .collect();
        encode(&self.spec, true, &raw)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn tensors(&self) -> &[(String, StoredTensor)] {
        &self.tensors
    }

    pub fn tensor(&self, name: &str) -> Option<&StoredTensor> {
        self.tensors.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }
}

impl Inference for QuantizedModel {
    fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    fn is_quantized(&self) -> bool {
        true
    }

    fn logits_unchecked(&self, x: &[f32]) -> Vec<f32> {
        self.net.logits(x)
    }
}

/// Either weight store, chosen by the file header.
#[derive(Debug, Clone)]
pub enum AnyModel {
    Float(Model),
    Int8(QuantizedModel),
}

impl AnyModel {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ModelError> {
        let c = decode(bytes)?;
        Ok(if c.quantized {
            Self::Int8(QuantizedModel::from_raw(c.spec, c.tensors)?)
        } else {
            Self::Float(Model::from_bytes(bytes)?)
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    /// Int8 form of this model; already-quantized models pass through.
    pub fn into_quantized(self) -> Self {
        match self {
            Self::Float(m) => Self::Int8(QuantizedModel::quantize(&m)),
            q => q,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            Self::Float(m) => m.to_bytes(),
            Self::Int8(m) => m.to_bytes(),
        }
    }
}

impl Inference for AnyModel {
    fn spec(&self) -> &ModelSpec {
        match self {
            Self::Float(m) => m.spec(),
            Self::Int8(m) => m.spec(),
        }
    }

    fn is_quantized(&self) -> bool {
        matches!(self, Self::Int8(_))
    }

    fn logits_unchecked(&self, x: &[f32]) -> Vec<f32> {
        match self {
            Self::Float(m) => m.logits_unchecked(x),
            Self::Int8(m) => m.logits_unchecked(x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizeReport {
    pub float_bytes: usize,
    pub quantized_bytes: usize,
    pub ratio: f64,
}

/// Serialized sizes of both forms.
pub fn model_size_report(float: &Model, quantized: &QuantizedModel) -> SizeReport {
    let float_bytes = float.to_bytes().len();
    let quantized_bytes = quantized.to_bytes().len();
    SizeReport { float_bytes, quantized_bytes, ratio: float_bytes as f64 / quantized_bytes as f64 }
}
