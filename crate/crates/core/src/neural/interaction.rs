use serde::{Deserialize, Serialize};

use super::layer::{Dense, LayerGrad};
use super::matrix::{dot, SparseVec};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Pairing function `g(h_s, h_a)` producing the Q-value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Interaction {
    InnerProduct,
    /// `h_sᵀ B h_a`; `B` is `d_s × d_a` and carries no bias.
    Bilinear { b: Dense },
    /// One tanh hidden layer over `[h_s; h_a]`, then a linear scalar output.
    ConcatMlp { hidden: Dense, output: Dense },
}

/// Which interaction to build, without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionKind {
    InnerProduct,
    Bilinear,
    ConcatMlp,
}

impl Interaction {
    pub fn random(
        kind: InteractionKind,
        state_dim: usize,
        action_dim: usize,
        mlp_width: usize,
        rng: &mut Rng,
    ) -> Result<Self> {
        match kind {
            InteractionKind::InnerProduct => {
                if state_dim != action_dim {
                    return Err(Error::Dimension(format!(
                        "inner product needs equal embedding dims, got {state_dim} and {action_dim}"
                    )));
                }
                Ok(Interaction::InnerProduct)
            }
            InteractionKind::Bilinear => Ok(Interaction::Bilinear {
                b: Dense::random(state_dim, action_dim, false, rng),
            }),
            InteractionKind::ConcatMlp => Ok(Interaction::ConcatMlp {
                hidden: Dense::random(mlp_width, state_dim + action_dim, true, rng),
                output: Dense::random(1, mlp_width, true, rng),
            }),
        }
    }

    pub fn kind(&self) -> InteractionKind {
        match self {
            Interaction::InnerProduct => InteractionKind::InnerProduct,
            Interaction::Bilinear { .. } => InteractionKind::Bilinear,
            Interaction::ConcatMlp { .. } => InteractionKind::ConcatMlp,
        }
    }

    pub fn check_dims(&self, state_dim: usize, action_dim: usize) -> Result<()> {
        let ok = match self {
            Interaction::InnerProduct => state_dim == action_dim,
            Interaction::Bilinear { b } => b.outputs() == state_dim && b.inputs() == action_dim,
            Interaction::ConcatMlp { hidden, output } => {
                hidden.inputs() == state_dim + action_dim
                    && output.inputs() == hidden.outputs()
                    && output.outputs() == 1
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "{:?} interaction does not fit embeddings of dims {state_dim} and {action_dim}",
                self.kind()
            )))
        }
    }

    /// Q-value and, for the MLP, its hidden activation.
    pub fn forward(&self, hs: &[f64], ha: &[f64]) -> (f64, Option<Vec<f64>>) {
        match self {
            Interaction::InnerProduct => (dot(hs, ha), None),
            Interaction::Bilinear { b } => (dot(hs, &b.w.mul_vec(ha)), None),
            Interaction::ConcatMlp { hidden, output } => {
                let z: Vec<f64> = hs.iter().chain(ha).copied().collect();
                let u: Vec<f64> = hidden.affine(&z).into_iter().map(f64::tanh).collect();
                (output.affine(&u)[0], Some(u))
            }
        }
    }

    /// Gradients `∂Δ/∂h_s`, `∂Δ/∂h_a` and the interaction's own layer
    /// gradients, given `dq = ∂Δ/∂Q`.
    pub fn backward(
        &self,
        hs: &[f64],
        ha: &[f64],
        hidden_act: Option<&[f64]>,
        dq: f64,
    ) -> (Vec<f64>, Vec<f64>, Vec<LayerGrad>) {
        match self {
            Interaction::InnerProduct => (
                ha.iter().map(|x| dq * x).collect(),
                hs.iter().map(|x| dq * x).collect(),
                Vec::new(),
            ),
            Interaction::Bilinear { b } => {
                let gs = b.w.mul_vec(ha).into_iter().map(|x| dq * x).collect();
                let ga = b.w.t_mul_vec(hs).into_iter().map(|x| dq * x).collect();
                let delta: Vec<f64> = hs.iter().map(|x| dq * x).collect();
                let grad = LayerGrad::outer(b, delta, SparseVec::dense(ha));
                (gs, ga, vec![grad])
            }
            Interaction::ConcatMlp { hidden, output } => {
                let u = hidden_act.expect("concat interaction trace carries its hidden layer");
                let out_grad = LayerGrad::outer(output, vec![dq], SparseVec::dense(u));
                let delta_u: Vec<f64> = output
                    .w
                    .row(0)
                    .iter()
                    .zip(u)
                    .map(|(w, h)| dq * w * (1.0 - h) * (1.0 + h))
                    .collect();
                let z: Vec<f64> = hs.iter().chain(ha).copied().collect();
                let gz = hidden.w.t_mul_vec(&delta_u);
                let hidden_grad = LayerGrad::outer(hidden, delta_u, SparseVec::dense(&z));
                let (gs, ga) = gz.split_at(hs.len());
                (gs.to_vec(), ga.to_vec(), vec![hidden_grad, out_grad])
            }
        }
    }

    pub fn layers(&self) -> Vec<&Dense> {
        match self {
            Interaction::InnerProduct => Vec::new(),
            Interaction::Bilinear { b } => vec![b],
            Interaction::ConcatMlp { hidden, output } => vec![hidden, output],
        }
    }

    pub fn layers_mut(&mut self) -> Vec<&mut Dense> {
        match self {
            Interaction::InnerProduct => Vec::new(),
            Interaction::Bilinear { b } => vec![b],
            Interaction::ConcatMlp { hidden, output } => vec![hidden, output],
        }
    }
}
