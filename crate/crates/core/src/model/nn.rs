//! Forward-pass kernels shared by the f32 and int8 weight stores.
//!
//! Every recurrent layer sees the whole feature vector as a single timestep
//! with zero initial state, so `U_*` products vanish for the first layer.
//! They are still evaluated so that a non-zero initial state stays correct.

use super::spec::{CellKind, CnnParams, CNN_ROWS};

/// An `out x in` weight matrix stored column-major.
pub trait MatVec {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    /// `y += W x`, accumulated in f64. Columns whose input is exactly zero
    /// are skipped.
    fn mul_acc(&self, x: &[f32], y: &mut [f32]);
    fn value(&self, row: usize, col: usize) -> f32;
}

#[derive(Debug, Clone)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    col_major: Vec<f32>,
}

impl DenseMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: &[f32]) -> Self {
        assert_eq!(data.len(), rows * cols);
        let mut col_major = vec![0.0; data.len()];
        for r in 0..rows {
            for c in 0..cols {
                col_major[c * rows + r] = data[r * cols + c];
            }
        }
        Self { rows, cols, col_major }
    }
}

impl MatVec for DenseMatrix {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn mul_acc(&self, x: &[f32], y: &mut [f32]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        let mut acc: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
        for (c, &xc) in x.iter().enumerate() {
            if xc == 0.0 {
                continue;
            }
            let xc = f64::from(xc);
            let col = &self.col_major[c * self.rows..(c + 1) * self.rows];
            for (a, &w) in acc.iter_mut().zip(col) {
                *a += xc * f64::from(w);
            }
        }
        for (yr, a) in y.iter_mut().zip(acc) {
            *yr = a as f32;
        }
    }

    fn value(&self, row: usize, col: usize) -> f32 {
        self.col_major[col * self.rows + row]
    }
}

/// Int8 weights with one affine scale: `w = scale * (q - zero_point)`.
#[derive(Debug, Clone)]
pub struct QuantMatrix {
    rows: usize,
    cols: usize,
    col_major: Vec<i8>,
    scale: f32,
    zero_point: i32,
}

impl QuantMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: &[i8], scale: f32, zero_point: i32) -> Self {
        assert_eq!(data.len(), rows * cols);
        let mut col_major = vec![0; data.len()];
        for r in 0..rows {
            for c in 0..cols {
                col_major[c * rows + r] = data[r * cols + c];
            }
        }
        Self { rows, cols, col_major, scale, zero_point }
    }
}

impl MatVec for QuantMatrix {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn mul_acc(&self, x: &[f32], y: &mut [f32]) {
        debug_assert_eq!(x.len(), self.cols);
        let zp = f64::from(self.zero_point);
        let mut acc = vec![0.0f64; self.rows];
        for (c, &xc) in x.iter().enumerate() {
            if xc == 0.0 {
                continue;
            }
            let xc = f64::from(xc);
            let col = &self.col_major[c * self.rows..(c + 1) * self.rows];
            for (a, &q) in acc.iter_mut().zip(col) {
                *a += xc * (f64::from(q) - zp);
            }
        }
        let scale = f64::from(self.scale);
        for (yr, a) in y.iter_mut().zip(acc) {
            *yr = (f64::from(*yr) + scale * a) as f32;
        }
    }

    fn value(&self, row: usize, col: usize) -> f32 {
        self.scale * (f32::from(self.col_major[col * self.rows + row]) - self.zero_point as f32)
    }
}

pub(crate) fn sigmoid(x: f32) -> f32 {
    1.0 / (1.0 + (-x).exp())
}

#[derive(Debug, Clone)]
pub(crate) struct Dense<M> {
    pub w: M,
    pub b: Vec<f32>,
}

impl<M: MatVec> Dense<M> {
    pub fn apply(&self, x: &[f32]) -> Vec<f32> {
        let mut y = self.b.clone();
        self.w.mul_acc(x, &mut y);
        y
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Gate<M> {
    pub w: M,
    pub u: M,
    pub b: Vec<f32>,
}

impl<M: MatVec> Gate<M> {
    fn preact(&self, x: &[f32], h: &[f32]) -> Vec<f32> {
        let mut y = self.b.clone();
        self.w.mul_acc(x, &mut y);
        self.u.mul_acc(h, &mut y);
        y
    }
}

/// Gates in `CellKind::gates()` order.
#[derive(Debug, Clone)]
pub(crate) struct Cell<M> {
    pub kind: CellKind,
    pub gates: Vec<Gate<M>>,
}

impl<M: MatVec> Cell<M> {
    pub fn hidden_units(&self) -> usize {
        self.gates[0].b.len()
    }

    /// One step from zero state.
    pub fn run(&self, x: &[f32]) -> Vec<f32> {
        let h = vec![0.0; self.hidden_units()];
        match self.kind {
            CellKind::Gru => self.gru_step(x, &h),
            CellKind::Lstm => self.lstm_step(x, &h, &h).0,
        }
    }

    /// `z = σ(W_z x + U_z h + b_z)`, `r = σ(...)`,
    /// `ĥ = tanh(W_h x + U_h (r ⊙ h) + b_h)`, `h' = (1 - z) ⊙ h + z ⊙ ĥ`.
    pub fn gru_step(&self, x: &[f32], h: &[f32]) -> Vec<f32> {
        let [gz, gr, gh] = &self.gates[..] else { unreachable!("gru has three gates") };
        let z: Vec<f32> = gz.preact(x, h).into_iter().map(sigmoid).collect();
        let r: Vec<f32> = gr.preact(x, h).into_iter().map(sigmoid).collect();
        let rh: Vec<f32> = r.iter().zip(h).map(|(r, h)| r * h).collect();
        let cand: Vec<f32> = gh.preact(x, &rh).into_iter().map(f32::tanh).collect();
        (0..h.len()).map(|j| (1.0 - z[j]) * h[j] + z[j] * cand[j]).collect()
    }

    /// `c' = f ⊙ c + i ⊙ g`, `h' = o ⊙ tanh(c')`.
    pub fn lstm_step(&self, x: &[f32], h: &[f32], c: &[f32]) -> (Vec<f32>, Vec<f32>) {
        let [gi, gf, gg, go] = &self.gates[..] else { unreachable!("lstm has four gates") };
        let i: Vec<f32> = gi.preact(x, h).into_iter().map(sigmoid).collect();
        let f: Vec<f32> = gf.preact(x, h).into_iter().map(sigmoid).collect();
        let g: Vec<f32> = gg.preact(x, h).into_iter().map(f32::tanh).collect();
        let o: Vec<f32> = go.preact(x, h).into_iter().map(sigmoid).collect();
        let c2: Vec<f32> = (0..c.len()).map(|j| f[j] * c[j] + i[j] * g[j]).collect();
        let h2 = (0..c.len()).map(|j| o[j] * c2[j].tanh()).collect();
        (h2, c2)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Cnn<M> {
    pub params: CnnParams,
    pub conv: Dense<M>,
    pub dense1: Dense<M>,
    pub dense2: Dense<M>,
}

impl<M: MatVec> Cnn<M> {
    /// Folds `x` into `CNN_ROWS x width`, zero-filling or truncating the tail.
    pub fn fold(&self, x: &[f32]) -> Vec<f32> {
        let n = CNN_ROWS * self.params.width;
        let mut m = vec![0.0; n];
        let k = x.len().min(n);
        m[..k].copy_from_slice(&x[..k]);
        m
    }

    /// conv -> ReLU -> global max pool -> dense + ReLU -> dense.
    pub fn logits(&self, x: &[f32]) -> Vec<f32> {
        let p = self.params;
        let m = self.fold(x);
        let mut pooled = vec![0.0f32; p.filters];
        let mut kernel = vec![0.0f32; CNN_ROWS * p.kernel];
        for (f, out) in pooled.iter_mut().enumerate() {
            for (j, w) in kernel.iter_mut().enumerate() {
                *w = self.conv.w.value(f, j);
            }
            let mut best = f64::NEG_INFINITY;
            for pos in 0..p.positions() {
                let mut s = f64::from(self.conv.b[f]);
                for r in 0..CNN_ROWS {
                    let row = &m[r * p.width + pos..r * p.width + pos + p.kernel];
                    let ker = &kernel[r * p.kernel..(r + 1) * p.kernel];
                    s += row.iter().zip(ker).map(|(&a, &b)| f64::from(a) * f64::from(b)).sum::<f64>();
                }
                best = best.max(s);
            }
            *out = best.max(0.0) as f32;
        }
        let hidden: Vec<f32> = self.dense1.apply(&pooled).into_iter().map(|v| v.max(0.0)).collect();
        self.dense2.apply(&hidden)
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Body<M> {
    Single(Cell<M>),
    Stacked(Cell<M>, Cell<M>),
    Bidirectional(Cell<M>, Cell<M>),
    Cnn(Cnn<M>),
}

#[derive(Debug, Clone)]
pub(crate) struct Network<M> {
    pub body: Body<M>,
    /// Absent for the CNN, whose last dense layer is the classifier.
    pub classifier: Option<Dense<M>>,
}

impl<M: MatVec> Network<M> {
    /// Pre-classifier activations of a recurrent network.
    pub fn hidden(&self, x: &[f32]) -> Option<Vec<f32>> {
        Some(match &self.body {
            Body::Single(c) => c.run(x),
            Body::Stacked(a, b) => b.run(&a.run(x)),
            // A length-one sequence reads the same forwards and backwards.
            Body::Bidirectional(f, b) => {
                let mut h = f.run(x);
                h.extend(b.run(x));
                h
            }
            Body::Cnn(_) => return None,
        })
    }

    pub fn logits(&self, x: &[f32]) -> Vec<f32> {
        match (&self.body, &self.classifier) {
            (Body::Cnn(c), _) => c.logits(x),
            (_, Some(cls)) => cls.apply(&self.hidden(x).expect("recurrent body")),
            (_, None) => unreachable!("recurrent network without classifier"),
        }
    }
}

/// Softmax in f64 with max subtraction.
pub fn softmax(logits: &[f32]) -> Vec<f64> {
    let max = logits.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(f64::from(v)));
    let exps: Vec<f64> = logits.iter().map(|&v| (f64::from(v) - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Index of the largest value; ties resolve to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_matvec_against_loops() {
        let data = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let m = DenseMatrix::from_row_major(2, 3, &data);
        let mut y = vec![0.5, -0.5];
        m.mul_acc(&[1.0, 0.0, 2.0], &mut y);
        assert_eq!(y, vec![0.5 + 1.0 + 6.0, -0.5 + 4.0 + 12.0]);
        assert_eq!(m.value(1, 2), 6.0);
    }

    #[test]
    fn quant_matvec_applies_scale_and_zero_point() {
        let m = QuantMatrix::from_row_major(1, 2, &[10, -4], 0.5, 2);
        let mut y = vec![0.0];
        m.mul_acc(&[1.0, 1.0], &mut y);
        assert_eq!(y, vec![0.5 * (8.0 - 6.0)]);
        assert_eq!(m.value(0, 1), -3.0);
    }

    #[test]
    fn softmax_is_stable_and_normalized() {
        let p = softmax(&[1000.0, 1000.0]);
        assert_eq!(p, vec![0.5, 0.5]);
        let p = softmax(&[0.0, f32::MAX]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(argmax(&p), 1);
    }

    #[test]
    fn argmax_prefers_lowest_tie() {
        assert_eq!(argmax(&[0.2, 0.4, 0.4]), 1);
        assert_eq!(argmax(&[0.5, 0.5]), 0);
    }

    #[test]
    fn sigmoid_limits() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(50.0) > 0.999_999);
        assert!(sigmoid(-50.0) < 1e-6);
    }
}
