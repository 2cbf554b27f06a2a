//! Straight-line f64 evaluator for every architecture, written from the
//! cell equations with an explicit previous state.

use apkfeat::model::{Architecture, CellKind, CnnParams, ModelSpec, CNN_ROWS};
use apkfeat::Model;

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

struct Weights<'a> {
    model: &'a Model,
}

impl Weights<'_> {
    fn get(&self, name: &str) -> (usize, usize, Vec<f64>) {
        let t = self.model.tensor(name).unwrap_or_else(|| panic!("missing tensor {name}"));
        (t.rows, t.cols, t.data.iter().map(|&v| f64::from(v)).collect())
    }

    /// `W v` for a row-major `rows x cols` tensor.
    fn matvec(&self, name: &str, v: &[f64]) -> Vec<f64> {
        let (rows, cols, w) = self.get(name);
        assert_eq!(cols, v.len(), "{name}");
        let mut out = vec![0.0; rows];
        for r in 0..rows {
            for c in 0..cols {
                out[r] += w[r * cols + c] * v[c];
            }
        }
        out
    }

    fn bias(&self, name: &str) -> Vec<f64> {
        self.get(name).2
    }

    /// `W x + U h + b` for one gate.
    fn gate(&self, prefix: &str, g: &str, x: &[f64], h: &[f64]) -> Vec<f64> {
        let wx = self.matvec(&format!("{prefix}W_{g}"), x);
        let uh = self.matvec(&format!("{prefix}U_{g}"), h);
        let b = self.bias(&format!("{prefix}b_{g}"));
        (0..b.len()).map(|j| wx[j] + uh[j] + b[j]).collect()
    }

    fn gru(&self, prefix: &str, x: &[f64], h: &[f64]) -> Vec<f64> {
        let z: Vec<f64> = self.gate(prefix, "z", x, h).into_iter().map(sigmoid).collect();
        let r: Vec<f64> = self.gate(prefix, "r", x, h).into_iter().map(sigmoid).collect();
        let rh: Vec<f64> = r.iter().zip(h).map(|(a, b)| a * b).collect();
        let cand: Vec<f64> = self.gate(prefix, "h", x, &rh).into_iter().map(f64::tanh).collect();
        (0..h.len()).map(|j| (1.0 - z[j]) * h[j] + z[j] * cand[j]).collect()
    }

    fn lstm(&self, prefix: &str, x: &[f64], h: &[f64], c: &[f64]) -> Vec<f64> {
        let i: Vec<f64> = self.gate(prefix, "i", x, h).into_iter().map(sigmoid).collect();
        let f: Vec<f64> = self.gate(prefix, "f", x, h).into_iter().map(sigmoid).collect();
        let g: Vec<f64> = self.gate(prefix, "g", x, h).into_iter().map(f64::tanh).collect();
        let o: Vec<f64> = self.gate(prefix, "o", x, h).into_iter().map(sigmoid).collect();
        (0..h.len()).map(|j| o[j] * (f[j] * c[j] + i[j] * g[j]).tanh()).collect()
    }

    fn cell(&self, kind: CellKind, prefix: &str, x: &[f64], hidden: usize) -> Vec<f64> {
        let zero = vec![0.0; hidden];
        match kind {
            CellKind::Gru => self.gru(prefix, x, &zero),
            CellKind::Lstm => self.lstm(prefix, x, &zero, &zero),
        }
    }

    fn dense(&self, w: &str, b: &str, v: &[f64]) -> Vec<f64> {
        self.matvec(w, v).iter().zip(self.bias(b)).map(|(a, b)| a + b).collect()
    }
}

fn cnn(w: &Weights, spec: &ModelSpec, x: &[f64]) -> Vec<f64> {
    let p = spec.cnn.expect("cnn params");
    let mut grid = vec![vec![0.0; p.width]; CNN_ROWS];
    for (i, &v) in x.iter().enumerate().take(CNN_ROWS * p.width) {
        grid[i / p.width][i % p.width] = v;
    }
    let (_, cols, conv) = w.get("conv_W");
    let conv_b = w.bias("conv_b");
    let mut pooled = vec![0.0; p.filters];
    for f in 0..p.filters {
        let mut best = f64::NEG_INFINITY;
        for pos in 0..=p.width - p.kernel {
            let mut s = conv_b[f];
            for r in 0..CNN_ROWS {
                for k in 0..p.kernel {
                    s += conv[f * cols + r * p.kernel + k] * grid[r][pos + k];
                }
            }
            best = best.max(s.max(0.0));
        }
        pooled[f] = best;
    }
    let hidden: Vec<f64> = w.dense("dense1_W", "dense1_b", &pooled).into_iter().map(|v| v.max(0.0)).collect();
    w.dense("dense2_W", "dense2_b", &hidden)
}

/// Logits of `model` at `x`.
pub fn logits(model: &Model, x: &[f64]) -> Vec<f64> {
    let spec = apkfeat::Inference::spec(model);
    let w = Weights { model };
    if spec.architecture == Architecture::Cnn {
        return cnn(&w, spec, x);
    }
    w.dense("classifier_W", "classifier_b", &hidden(model, x))
}

/// Hidden activations fed to the classifier (recurrent architectures).
pub fn hidden(model: &Model, x: &[f64]) -> Vec<f64> {
    let spec = apkfeat::Inference::spec(model);
    let w = Weights { model };
    let h = spec.hidden_units;
    match spec.architecture {
        Architecture::Gru => w.cell(CellKind::Gru, "", x, h),
        Architecture::Lstm => w.cell(CellKind::Lstm, "", x, h),
        Architecture::StackedGru => w.cell(CellKind::Gru, "layer2.", &w.cell(CellKind::Gru, "layer1.", x, h), h),
        Architecture::StackedLstm => w.cell(CellKind::Lstm, "layer2.", &w.cell(CellKind::Lstm, "layer1.", x, h), h),
        Architecture::BiGru => {
            let mut v = w.cell(CellKind::Gru, "fwd.", x, h);
            v.extend(w.cell(CellKind::Gru, "bwd.", x, h));
            v
        }
        Architecture::BiLstm => {
            let mut v = w.cell(CellKind::Lstm, "fwd.", x, h);
            v.extend(w.cell(CellKind::Lstm, "bwd.", x, h));
            v
        }
        Architecture::Cnn => panic!("cnn has no recurrent hidden state"),
    }
}

/// A small random shape for `arch`.
pub fn random_spec(arch: Architecture, rng: &mut impl rand::Rng) -> ModelSpec {
    let input = rng.gen_range(9..200);
    let spec = ModelSpec::new(arch, input, rng.gen_range(1..24), rng.gen_range(2..5));
    if arch == Architecture::Cnn {
        let kernel = rng.gen_range(1..4);
        let width = rng.gen_range(kernel..input);
        spec.with_cnn(CnnParams { filters: rng.gen_range(1..12), kernel, dense_units: rng.gen_range(1..10), width })
    } else {
        spec
    }
}

/// Weights drawn from `U[-a, a]` with `a = gain * sqrt(6 / (rows + cols))`,
/// biases from `U[-gain/2, gain/2]`.
pub fn random_model(spec: ModelSpec, rng: &mut impl rand::Rng, gain: f32) -> Model {
    let tensors = spec
        .tensor_shapes()
        .into_iter()
        .map(|s| {
            let a = if s.bias { gain / 2.0 } else { gain * (6.0 / (s.rows + s.cols) as f32).sqrt() };
            let data = (0..s.rows * s.cols).map(|_| rng.gen_range(-a..=a)).collect();
            (s.name, apkfeat::model::Tensor::new(s.rows, s.cols, data))
        })
        .collect();
    Model::from_tensors(spec, tensors).expect("random model is well-formed")
}

/// A binary input of density `p`, or a continuous one in `[-1, 1]`.
pub fn random_input(n: usize, rng: &mut impl rand::Rng, binary: bool) -> Vec<f32> {
    let p: f64 = rng.gen_range(0.0..0.5);
    (0..n)
        .map(|_| if binary { f32::from(u8::from(rng.gen_bool(p))) } else { rng.gen_range(-1.0..=1.0) })
        .collect()
}

pub fn max_abs_diff(a: &[f32], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (f64::from(*x) - y).abs()).fold(0.0, f64::max)
}
