//! Weight container shared by float and int8 models.
//!
//! ```text
//! apkfeat-model v1 arch=<a> input=<n> hidden=<h> classes=<c> [key=value ...]\n
//! tensor <name> <rows> <cols>\n              <rows*cols little-endian f32>
//! tensor <name> <rows> <cols> scale=<s> zero_point=<z>\n   <rows*cols i8>
//! ...
//! <CRC-32 of every byte after the header line, little-endian u32>
//! ```
//!
//! Optional header keys: `quant=int8`, `labels=a,b,...`, and for the CNN
//! `filters=`, `kernel=`, `dense=`, `width=`.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use super::spec::{default_labels, Architecture, CnnParams, ModelSpec};
use super::ModelError;

pub const MODEL_MAGIC: &str = "apkfeat-model";
pub const MODEL_FORMAT_VERSION: &str = "v1";
const MAX_LINE: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum RawData {
    F32(Vec<f32>),
    I8 { values: Vec<i8>, scale: f32, zero_point: i32 },
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RawTensor {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub data: RawData,
}

#[derive(Debug, Clone)]
pub(crate) struct Container {
    pub spec: ModelSpec,
    pub quantized: bool,
    pub tensors: Vec<RawTensor>,
}

pub fn format_header(spec: &ModelSpec, quantized: bool) -> String {
    let mut h = format!(
        "{MODEL_MAGIC} {MODEL_FORMAT_VERSION} arch={} input={} hidden={} classes={}",
        spec.architecture, spec.input_dim, spec.hidden_units, spec.num_classes
    );
    if quantized {
        h.push_str(" quant=int8");
    }
    if let Some(p) = spec.cnn {
        h.push_str(&format!(" filters={} kernel={} dense={} width={}", p.filters, p.kernel, p.dense_units, p.width));
    }
    h.push_str(" labels=");
    h.push_str(&spec.labels.join(","));
    h
}

/// Parses a header line (without its newline). Returns the spec and whether
/// the file holds int8 weights.
pub fn parse_header(line: &str) -> Result<(ModelSpec, bool), ModelError> {
    let bad = |m: String| ModelError::Format(m);
    let mut parts = line.split(' ');
    if parts.next() != Some(MODEL_MAGIC) {
        return Err(bad("missing apkfeat-model header".into()));
    }
    match parts.next() {
        Some(MODEL_FORMAT_VERSION) => {}
        v => return Err(bad(format!("unsupported format version {v:?}"))),
    }
    let mut arch = None;
    let (mut input, mut hidden, mut classes) = (None, None, None);
    let (mut filters, mut kernel, mut dense, mut width) = (None, None, None, None);
    let mut labels = None;
    let mut quantized = false;
    for token in parts {
        let (key, value) = token.split_once('=').ok_or_else(|| bad(format!("bad header token {token:?}")))?;
        let num = || value.parse::<usize>().map_err(|_| bad(format!("{key} must be a non-negative integer")));
        let slot = match key {
            "arch" => {
                arch = Some(value.parse::<Architecture>()?);
                continue;
            }
            "quant" if value == "int8" => {
                quantized = true;
                continue;
            }
            "quant" => return Err(bad(format!("unsupported quantization {value:?}"))),
            "labels" => {
                labels = Some(value.split(',').map(str::to_owned).collect::<Vec<_>>());
                continue;
            }
            "input" => &mut input,
            "hidden" => &mut hidden,
            "classes" => &mut classes,
            "filters" => &mut filters,
            "kernel" => &mut kernel,
            "dense" => &mut dense,
            "width" => &mut width,
            _ => return Err(bad(format!("unknown header key {key:?}"))),
        };
        *slot = Some(num()?);
    }
    let need = |v: Option<usize>, k: &str| v.ok_or_else(|| bad(format!("header lacks {k}=")));
    let architecture = arch.ok_or_else(|| bad("header lacks arch=".into()))?;
    let input_dim = need(input, "input")?;
    let hidden_units = need(hidden, "hidden")?;
    let num_classes = need(classes, "classes")?;
    let cnn = (architecture == Architecture::Cnn).then(|| {
        let d = CnnParams::for_input(input_dim);
        CnnParams {
            filters: filters.unwrap_or(d.filters),
            kernel: kernel.unwrap_or(d.kernel),
            dense_units: dense.unwrap_or(d.dense_units),
            width: width.unwrap_or(d.width),
        }
    });
    let spec = ModelSpec {
        architecture,
        input_dim,
        hidden_units,
        num_classes,
        cnn,
        labels: labels.unwrap_or_else(|| default_labels(num_classes)),
    };
    spec.validate()?;
    Ok((spec, quantized))
}

/// Reads only the header line of a model file.
pub fn read_header(path: &Path) -> Result<(ModelSpec, bool), ModelError> {
    let mut line = Vec::new();
    BufReader::new(File::open(path)?).take(MAX_LINE as u64).read_until(b'\n', &mut line)?;
    if line.last() != Some(&b'\n') {
        return Err(ModelError::Format("header line is not terminated".into()));
    }
    line.pop();
    parse_header(std::str::from_utf8(&line).map_err(|_| ModelError::Format("header is not UTF-8".into()))?)
}

pub(crate) fn encode(spec: &ModelSpec, quantized: bool, tensors: &[RawTensor]) -> Vec<u8> {
    let header = format_header(spec, quantized);
    let mut body = Vec::new();
    for t in tensors {
        match &t.data {
            RawData::F32(v) => {
                body.extend_from_slice(format!("tensor {} {} {}\n", t.name, t.rows, t.cols).as_bytes());
                body.reserve(v.len() * 4);
                for x in v {
                    body.extend_from_slice(&x.to_le_bytes());
                }
            }
            RawData::I8 { values, scale, zero_point } => {
                body.extend_from_slice(
                    format!("tensor {} {} {} scale={scale} zero_point={zero_point}\n", t.name, t.rows, t.cols)
                        .as_bytes(),
                );
                body.extend(values.iter().map(|&q| q as u8));
            }
        }
    }
    let crc = crc32fast::hash(&body);
    let mut out = Vec::with_capacity(header.len() + 1 + body.len() + 4);
    out.extend_from_slice(header.as_bytes());
    out.push(b'\n');
    out.extend_from_slice(&body);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

fn split_line(bytes: &[u8], pos: usize) -> Result<(&str, usize), ModelError> {
    let window = &bytes[pos..bytes.len().min(pos + MAX_LINE)];
    let end = window
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| ModelError::Format(format!("unterminated line at byte {pos}")))?;
    let line = std::str::from_utf8(&window[..end])
        .map_err(|_| ModelError::Format(format!("non-UTF-8 line at byte {pos}")))?;
    Ok((line, pos + end + 1))
}

/// `(name, rows, cols, Some((scale, zero_point)) for int8)`.
type TensorLine = (String, usize, usize, Option<(f32, i32)>);

fn parse_tensor_line(line: &str) -> Result<TensorLine, ModelError> {
    let bad = || ModelError::Format(format!("bad tensor line {line:?}"));
    let parts: Vec<&str> = line.split(' ').collect();
    if parts.first() != Some(&"tensor") || !(parts.len() == 4 || parts.len() == 6) {
        return Err(bad());
    }
    let rows = parts[2].parse().map_err(|_| bad())?;
    let cols = parts[3].parse().map_err(|_| bad())?;
    let quant = if parts.len() == 6 {
        let scale: f32 = parts[4].strip_prefix("scale=").and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let zp: i32 = parts[5].strip_prefix("zero_point=").and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        if !scale.is_finite() || scale <= 0.0 || !(-128..=127).contains(&zp) {
            return Err(bad());
        }
        Some((scale, zp))
    } else {
        None
    };
    Ok((parts[1].to_owned(), rows, cols, quant))
}

/// Checks run in order: header, checksum, tensor framing.
pub(crate) fn decode(bytes: &[u8]) -> Result<Container, ModelError> {
    let (header, body_start) = split_line(bytes, 0)?;
    let (spec, quantized) = parse_header(header)?;
    if bytes.len() < body_start + 4 {
        return Err(ModelError::Format("file ends before the checksum".into()));
    }
    let body_end = bytes.len() - 4;
    let stored = u32::from_le_bytes(bytes[body_end..].try_into().unwrap());
    let computed = crc32fast::hash(&bytes[body_start..body_end]);
    if stored != computed {
        return Err(ModelError::ChecksumMismatch { stored, computed });
    }

    let body = &bytes[..body_end];
    let mut pos = body_start;
    let mut tensors = Vec::new();
    while pos < body_end {
        let (line, data_start) = split_line(body, pos)?;
        let (name, rows, cols, quant) = parse_tensor_line(line)?;
        let count = rows
            .checked_mul(cols)
            .ok_or_else(|| ModelError::Format(format!("tensor {name} is too large")))?;
        if quant.is_some() && !quantized {
            return Err(ModelError::Format(format!("int8 tensor {name} in a float model")));
        }
        let width = if quant.is_some() { 1 } else { 4 };
        let len = count
            .checked_mul(width)
            .filter(|&l| l <= body_end - data_start)
            .ok_or_else(|| ModelError::Format(format!("tensor {name} runs past the end of the file")))?;
        let raw = &body[data_start..data_start + len];
        let data = match quant {
            Some((scale, zero_point)) => {
                RawData::I8 { values: raw.iter().map(|&b| b as i8).collect(), scale, zero_point }
            }
            None => RawData::F32(
                raw.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect(),
            ),
        };
        tensors.push(RawTensor { name, rows, cols, data });
        pos = data_start + len;
    }
    Ok(Container { spec, quantized, tensors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ModelSpec {
        ModelSpec::new(Architecture::Gru, 3, 2, 2)
    }

    #[test]
    fn header_roundtrip() {
        let s = ModelSpec::reference_scale(Architecture::Cnn);
        let line = format_header(&s, true);
        assert_eq!(parse_header(&line).unwrap(), (s, true));
        let line = format_header(&spec(), false);
        assert_eq!(line, "apkfeat-model v1 arch=gru input=3 hidden=2 classes=2 labels=benign,malware");
    }

    #[test]
    fn header_errors() {
        assert!(matches!(parse_header("nope v1"), Err(ModelError::Format(_))));
        assert!(matches!(parse_header("apkfeat-model v2 arch=gru"), Err(ModelError::Format(_))));
        assert!(matches!(
            parse_header("apkfeat-model v1 arch=rnn input=1 hidden=1 classes=2"),
            Err(ModelError::UnknownArchitecture(_))
        ));
        assert!(matches!(parse_header("apkfeat-model v1 arch=gru input=1 hidden=1"), Err(ModelError::Format(_))));
        assert!(matches!(
            parse_header("apkfeat-model v1 arch=gru input=1 hidden=1 classes=2 color=red"),
            Err(ModelError::Format(_))
        ));
    }

    #[test]
    fn body_roundtrip_and_crc() {
        let tensors = vec![
            RawTensor { name: "a".into(), rows: 1, cols: 2, data: RawData::F32(vec![1.5, -2.0]) },
            RawTensor {
                name: "b".into(),
                rows: 2,
                cols: 1,
                data: RawData::I8 { values: vec![-127, 5], scale: 0.25, zero_point: 0 },
            },
        ];
        let bytes = encode(&spec(), true, &tensors);
        let c = decode(&bytes).unwrap();
        assert_eq!(c.tensors, tensors);
        assert!(c.quantized);

        let mut flipped = bytes.clone();
        let i = flipped.len() - 6;
        flipped[i] ^= 1;
        assert!(matches!(decode(&flipped), Err(ModelError::ChecksumMismatch { .. })));
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn int8_tensor_in_float_file_rejected() {
        let t = vec![RawTensor {
            name: "b".into(),
            rows: 1,
            cols: 1,
            data: RawData::I8 { values: vec![1], scale: 1.0, zero_point: 0 },
        }];
        let bytes = encode(&spec(), false, &t);
        assert!(matches!(decode(&bytes), Err(ModelError::Format(_))));
    }
}
