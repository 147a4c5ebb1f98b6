use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::matrix::{Matrix, SparseVec};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Half-width of the uniform initialization range.
pub const INIT_RANGE: f64 = 0.05;

/// Affine map `W x + b`. An empty bias means the layer has none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub w: Matrix,
    pub b: Vec<f64>,
}

impl Dense {
    pub fn zeros(out: usize, inp: usize, bias: bool) -> Self {
        Dense {
            w: Matrix::zeros(out, inp),
            b: if bias { vec![0.0; out] } else { Vec::new() },
        }
    }

    /// Weights and biases i.i.d. uniform on `[-INIT_RANGE, INIT_RANGE]`.
    pub fn random(out: usize, inp: usize, bias: bool, rng: &mut Rng) -> Self {
        let mut sample = || rng.gen_range(-INIT_RANGE..=INIT_RANGE);
        let w = Matrix::from_fn(out, inp, |_, _| sample());
        let b = if bias {
            (0..out).map(|_| sample()).collect()
        } else {
            Vec::new()
        };
        Dense { w, b }
    }

    pub fn inputs(&self) -> usize {
        self.w.cols
    }

    pub fn outputs(&self) -> usize {
        self.w.rows
    }

    pub fn has_bias(&self) -> bool {
        !self.b.is_empty()
    }

    fn add_bias(&self, mut z: Vec<f64>) -> Vec<f64> {
        for (zi, bi) in z.iter_mut().zip(&self.b) {
            *zi += bi;
        }
        z
    }

    pub fn affine(&self, x: &[f64]) -> Vec<f64> {
        self.add_bias(self.w.mul_vec(x))
    }

    pub fn affine_sparse(&self, x: &SparseVec) -> Vec<f64> {
        self.add_bias(self.w.mul_sparse(x))
    }

    pub fn parameter_count(&self) -> usize {
        self.w.data.len() + self.b.len()
    }
}

/// Gradient of one [`Dense`] layer. For a single example every weight
/// gradient is an outer product `δ xᵀ`; tied layers accumulate several. The
/// sparse input keeps first-layer updates restricted to nonzero columns.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrad {
    pub terms: Vec<(Vec<f64>, SparseVec)>,
    pub bias: Vec<f64>,
}

impl LayerGrad {
    pub fn zeros_like(layer: &Dense) -> Self {
        LayerGrad {
            terms: Vec::new(),
            bias: vec![0.0; layer.b.len()],
        }
    }

    /// Gradient `δ xᵀ` (bias gradient `δ` when the layer has a bias).
    pub fn outer(layer: &Dense, delta: Vec<f64>, input: SparseVec) -> Self {
        let bias = if layer.has_bias() {
            delta.clone()
        } else {
            Vec::new()
        };
        LayerGrad {
            terms: vec![(delta, input)],
            bias,
        }
    }

    pub fn merge(&mut self, other: LayerGrad) {
        self.terms.extend(other.terms);
        for (a, b) in self.bias.iter_mut().zip(other.bias) {
            *a += b;
        }
    }

    pub fn dense_weights(&self, rows: usize, cols: usize) -> Matrix {
        let mut m = Matrix::zeros(rows, cols);
        for (delta, input) in &self.terms {
            for &(j, x) in &input.entries {
                for (i, d) in delta.iter().enumerate() {
                    *m.get_mut(i, j) += d * x;
                }
            }
        }
        m
    }
}

/// Gradients aligned with [`Parameters::layers`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGrad>,
}

impl Gradients {
    /// Flatten in the same order as [`flatten_params`].
    pub fn flatten(&self, params: &impl Parameters) -> Vec<f64> {
        let mut out = Vec::new();
        for (layer, grad) in params.layers().into_iter().zip(&self.layers) {
            out.extend(grad.dense_weights(layer.outputs(), layer.inputs()).data);
            out.extend(&grad.bias);
        }
        out
    }
}

/// Access to every trainable layer of a model, in a fixed order.
pub trait Parameters {
    fn layers(&self) -> Vec<&Dense>;
    fn layers_mut(&mut self) -> Vec<&mut Dense>;

    fn parameter_count(&self) -> usize {
        self.layers().iter().map(|l| l.parameter_count()).sum()
    }
}

/// All weights then biases of each layer, layer by layer.
pub fn flatten_params(params: &impl Parameters) -> Vec<f64> {
    let mut out = Vec::new();
    for layer in params.layers() {
        out.extend(&layer.w.data);
        out.extend(&layer.b);
    }
    out
}

/// Mutable reference to the `k`-th flattened parameter.
pub fn param_mut<P: Parameters>(params: &mut P, mut k: usize) -> &mut f64 {
    for layer in params.layers_mut() {
        let nw = layer.w.data.len();
        if k < nw {
            return &mut layer.w.data[k];
        }
        k -= nw;
        if k < layer.b.len() {
            return &mut layer.b[k];
        }
        k -= layer.b.len();
    }
    panic!("parameter index out of range")
}

/// Plain SGD: `θ ← θ − η ∇θ`, with `∇θ` the gradient of the squared TD loss.
pub fn sgd_step<P: Parameters>(params: &mut P, grads: &Gradients, eta: f64) {
    for (layer, grad) in params.layers_mut().into_iter().zip(&grads.layers) {
        let cols = layer.w.cols;
        for (delta, input) in &grad.terms {
            for &(j, x) in &input.entries {
                let scale = eta * x;
                if scale == 0.0 {
                    continue;
                }
                for (i, d) in delta.iter().enumerate() {
                    layer.w.data[i * cols + j] -= scale * d;
                }
            }
        }
        for (b, g) in layer.b.iter_mut().zip(&grad.bias) {
            *b -= eta * g;
        }
    }
}

/// A stack of tanh layers: `h₁ = tanh(W₁x + b₁)`, `h_l = tanh(W_l h_{l−1} + b_l)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tower {
    pub layers: Vec<Dense>,
}

impl Tower {
    pub fn random(input: usize, widths: &[usize], rng: &mut Rng) -> Self {
        let mut layers = Vec::with_capacity(widths.len());
        let mut prev = input;
        for &w in widths {
            layers.push(Dense::random(w, prev, true, rng));
            prev = w;
        }
        Tower { layers }
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, Dense::inputs)
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, Dense::outputs)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Dimension("tower needs at least one layer".into()));
        }
        for pair in self.layers.windows(2) {
            if pair[0].outputs() != pair[1].inputs() {
                return Err(Error::Dimension(format!(
                    "layer output {} does not feed layer input {}",
                    pair[0].outputs(),
                    pair[1].inputs()
                )));
            }
        }
        Ok(())
    }

    /// Activations of every layer, first to last.
    pub fn forward(&self, x: &SparseVec) -> Result<Vec<Vec<f64>>> {
        if x.dim != self.input_dim() {
            return Err(Error::Dimension(format!(
                "tower expects input dim {}, got {}",
                self.input_dim(),
                x.dim
            )));
        }
        let mut acts: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let z = match acts.last() {
                None => layer.affine_sparse(x),
                Some(h) => layer.affine(h),
            };
            acts.push(z.into_iter().map(f64::tanh).collect());
        }
        Ok(acts)
    }

    /// Backpropagate `upstream = ∂Δ/∂h_L` through the tower.
    pub fn backward(&self, x: &SparseVec, acts: &[Vec<f64>], upstream: &[f64]) -> Vec<LayerGrad> {
        let n = self.layers.len();
        let mut grads = Vec::with_capacity(n);
        let mut delta: Vec<f64> = upstream
            .iter()
            .zip(&acts[n - 1])
            .map(|(g, h)| g * (1.0 - h) * (1.0 + h))
            .collect();
        for l in (0..n).rev() {
            let input = if l == 0 {
                x.clone()
            } else {
                SparseVec::dense(&acts[l - 1])
            };
            let next_delta = (l > 0).then(|| {
                self.layers[l]
                    .w
                    .t_mul_vec(&delta)
                    .into_iter()
                    .zip(&acts[l - 1])
                    .map(|(g, h)| g * (1.0 - h) * (1.0 + h))
                    .collect::<Vec<f64>>()
            });
            grads.push(LayerGrad::outer(&self.layers[l], delta, input));
            if let Some(d) = next_delta {
                delta = d;
            } else {
                break;
            }
        }
        grads.reverse();
        grads
    }
}

impl Parameters for Tower {
    fn layers(&self) -> Vec<&Dense> {
        self.layers.iter().collect()
    }

    fn layers_mut(&mut self) -> Vec<&mut Dense> {
        self.layers.iter_mut().collect()
    }
}
