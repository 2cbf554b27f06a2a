use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::ModelError;

/// Input width of the reference dictionary.
pub const REFERENCE_INPUT_DIM: usize = 2915;
pub const REFERENCE_HIDDEN_UNITS: usize = 128;
/// The CNN folds its padded input into this many rows.
pub const CNN_ROWS: usize = 3;
/// Narrow CNN row width. Input past `CNN_ROWS` times this is dropped.
pub const REFERENCE_CNN_WIDTH: usize = 708;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    Gru,
    Lstm,
    StackedGru,
    StackedLstm,
    BiGru,
    BiLstm,
    Cnn,
}

impl Architecture {
    pub const ALL: [Architecture; 7] = [
        Self::Gru,
        Self::Lstm,
        Self::StackedGru,
        Self::StackedLstm,
        Self::BiGru,
        Self::BiLstm,
        Self::Cnn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Gru => "gru",
            Self::Lstm => "lstm",
            Self::StackedGru => "stacked_gru",
            Self::StackedLstm => "stacked_lstm",
            Self::BiGru => "bi_gru",
            Self::BiLstm => "bi_lstm",
            Self::Cnn => "cnn",
        }
    }

    pub fn cell(self) -> Option<CellKind> {
        match self {
            Self::Gru | Self::StackedGru | Self::BiGru => Some(CellKind::Gru),
            Self::Lstm | Self::StackedLstm | Self::BiLstm => Some(CellKind::Lstm),
            Self::Cnn => None,
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Architecture {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| ModelError::UnknownArchitecture(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Gru,
    Lstm,
}

impl CellKind {
    pub fn gates(self) -> &'static [&'static str] {
        match self {
            Self::Gru => &["z", "r", "h"],
            Self::Lstm => &["i", "f", "g", "o"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CnnParams {
    pub filters: usize,
    pub kernel: usize,
    pub dense_units: usize,
    /// Row width after folding the zero-padded input into `CNN_ROWS` rows.
    pub width: usize,
}

impl CnnParams {
    /// 64 filters of width 3, a 16-unit hidden dense layer, and rows of
    /// `ceil(input_dim / 3)` so that no input feature is dropped.
    pub fn for_input(input_dim: usize) -> Self {
        Self { filters: 64, kernel: 3, dense_units: 16, width: input_dim.div_ceil(CNN_ROWS) }
    }

    pub fn positions(&self) -> usize {
        self.width + 1 - self.kernel
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelSpec {
    pub architecture: Architecture,
    pub input_dim: usize,
    pub hidden_units: usize,
    pub num_classes: usize,
    pub cnn: Option<CnnParams>,
    /// One name per class. A verdict is benign iff its class is named `benign`.
    pub labels: Vec<String>,
}

/// Declared shape of one named tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorShape {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub bias: bool,
}

impl TensorShape {
    fn matrix(name: String, rows: usize, cols: usize) -> Self {
        Self { name, rows, cols, bias: false }
    }

    fn vector(name: String, rows: usize) -> Self {
        Self { name, rows, cols: 1, bias: true }
    }
}

pub fn default_labels(num_classes: usize) -> Vec<String> {
    if num_classes == 2 {
        vec!["benign".to_owned(), "malware".to_owned()]
    } else {
        (0..num_classes).map(|i| format!("class{i}")).collect()
    }
}

impl ModelSpec {
    pub fn new(architecture: Architecture, input_dim: usize, hidden_units: usize, num_classes: usize) -> Self {
        Self {
            architecture,
            input_dim,
            hidden_units,
            num_classes,
            cnn: (architecture == Architecture::Cnn).then(|| CnnParams::for_input(input_dim)),
            labels: default_labels(num_classes),
        }
    }

    /// 2,915 inputs, 128 hidden units, binary output.
    pub fn reference_scale(architecture: Architecture) -> Self {
        Self::new(architecture, REFERENCE_INPUT_DIM, REFERENCE_HIDDEN_UNITS, 2)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.labels = labels;
        self
    }

    pub fn with_cnn(mut self, params: CnnParams) -> Self {
        self.cnn = Some(params);
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let invalid = |m: String| Err(ModelError::InvalidSpec(m));
        if self.hidden_units == 0 {
            return invalid("hidden_units must be positive".into());
        }
        if self.num_classes < 2 {
            return invalid(format!("num_classes must be at least 2, got {}", self.num_classes));
        }
        if self.labels.len() != self.num_classes {
            return invalid(format!("{} labels for {} classes", self.labels.len(), self.num_classes));
        }
        for l in &self.labels {
            if l.is_empty() || l.contains([',', ' ', '\n', '\t']) {
                return invalid(format!("bad class label {l:?}"));
            }
        }
        match (self.architecture, &self.cnn) {
            (Architecture::Cnn, None) => return invalid("cnn model without cnn parameters".into()),
            (Architecture::Cnn, Some(p)) => {
                if p.filters == 0 || p.dense_units == 0 || p.kernel == 0 || p.width < p.kernel {
                    return invalid(format!("bad cnn parameters {p:?}"));
                }
            }
            (_, Some(_)) => return invalid("cnn parameters on a recurrent model".into()),
            _ => {}
        }
        Ok(())
    }

    /// Width of the vector handed to the classifier layer.
    pub fn pre_classifier_width(&self) -> usize {
        match self.architecture {
            Architecture::BiGru | Architecture::BiLstm => 2 * self.hidden_units,
            Architecture::Cnn => self.cnn.map_or(0, |p| p.dense_units),
            _ => self.hidden_units,
        }
    }

    /// Every tensor the model file must carry, in file order.
    ///
    /// Matrices are `out x in`, row-major. A recurrent cell with prefix `p`
    /// has `pW_<g>` (hidden x input), `pU_<g>` (hidden x hidden) and `pb_<g>`
    /// for each gate `g` (`z, r, h` for GRU; `i, f, g, o` for LSTM).
    pub fn tensor_shapes(&self) -> Vec<TensorShape> {
        let h = self.hidden_units;
        let n = self.input_dim;
        let c = self.num_classes;
        let mut out = Vec::new();
        let mut cell = |prefix: &str, kind: CellKind, input: usize| {
            for g in kind.gates() {
                out.push(TensorShape::matrix(format!("{prefix}W_{g}"), h, input));
            }
            for g in kind.gates() {
                out.push(TensorShape::matrix(format!("{prefix}U_{g}"), h, h));
            }
            for g in kind.gates() {
                out.push(TensorShape::vector(format!("{prefix}b_{g}"), h));
            }
        };
        match self.architecture {
            Architecture::Gru | Architecture::Lstm => {
                cell("", self.architecture.cell().unwrap(), n);
            }
            Architecture::StackedGru | Architecture::StackedLstm => {
                let kind = self.architecture.cell().unwrap();
                cell("layer1.", kind, n);
                cell("layer2.", kind, h);
            }
            Architecture::BiGru | Architecture::BiLstm => {
                let kind = self.architecture.cell().unwrap();
                cell("fwd.", kind, n);
                cell("bwd.", kind, n);
            }
            Architecture::Cnn => {
                let p = self.cnn.unwrap_or_else(|| CnnParams::for_input(n));
                out.push(TensorShape::matrix("conv_W".into(), p.filters, CNN_ROWS * p.kernel));
                out.push(TensorShape::vector("conv_b".into(), p.filters));
                out.push(TensorShape::matrix("dense1_W".into(), p.dense_units, p.filters));
                out.push(TensorShape::vector("dense1_b".into(), p.dense_units));
                out.push(TensorShape::matrix("dense2_W".into(), c, p.dense_units));
                out.push(TensorShape::vector("dense2_b".into(), c));
                return out;
            }
        }
        out.push(TensorShape::matrix("classifier_W".into(), c, self.pre_classifier_width()));
        out.push(TensorShape::vector("classifier_b".into(), c));
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.tensor_shapes().iter().map(|t| t.rows * t.cols).sum()
    }
}
