use serde::{Deserialize, Serialize};

use super::layer::{Dense, Gradients, LayerGrad, Parameters, Tower};
use super::matrix::SparseVec;
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Single-network Q approximator: optional tanh hidden layers, then a linear
/// output layer with one unit per scored slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub hidden: Option<Tower>,
    pub output: Dense,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpTrace {
    pub input: SparseVec,
    pub hidden: Vec<Vec<f64>>,
    pub outputs: Vec<f64>,
}

impl Mlp {
    pub fn random(input: usize, widths: &[usize], outputs: usize, rng: &mut Rng) -> Self {
        let hidden = (!widths.is_empty()).then(|| Tower::random(input, widths, rng));
        let last = widths.last().copied().unwrap_or(input);
        Mlp {
            hidden,
            output: Dense::random(outputs, last, true, rng),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.hidden
            .as_ref()
            .map_or(self.output.inputs(), Tower::input_dim)
    }

    pub fn output_dim(&self) -> usize {
        self.output.outputs()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(h) = &self.hidden {
            h.validate()?;
            if h.output_dim() != self.output.inputs() {
                return Err(Error::Dimension("hidden stack does not feed output layer".into()));
            }
        }
        Ok(())
    }

    pub fn forward(&self, x: &SparseVec) -> Result<MlpTrace> {
        if x.dim != self.input_dim() {
            return Err(Error::Dimension(format!(
                "network expects input dim {}, got {}",
                self.input_dim(),
                x.dim
            )));
        }
        let (hidden, outputs) = match &self.hidden {
            Some(tower) => {
                let acts = tower.forward(x)?;
                let out = self.output.affine(acts.last().unwrap());
                (acts, out)
            }
            None => (Vec::new(), self.output.affine_sparse(x)),
        };
        Ok(MlpTrace {
            input: x.clone(),
            hidden,
            outputs,
        })
    }

    /// Gradient of the loss through output `slot` only.
    pub fn backprop(&self, trace: &MlpTrace, slot: usize, dq: f64) -> Result<Gradients> {
        if slot >= self.output_dim() || trace.outputs.len() != self.output_dim() {
            return Err(Error::Dimension(format!(
                "slot {slot} invalid for {} outputs",
                self.output_dim()
            )));
        }
        let mut delta = vec![0.0; self.output_dim()];
        delta[slot] = dq;
        let mut layers = Vec::new();
        let out_input = match trace.hidden.last() {
            Some(h) => SparseVec::dense(h),
            None => trace.input.clone(),
        };
        if let Some(tower) = &self.hidden {
            let upstream: Vec<f64> = self.output.w.row(slot).iter().map(|w| w * dq).collect();
            layers.extend(tower.backward(&trace.input, &trace.hidden, &upstream));
        }
        // One-hot delta: only the taken slot's row moves.
        layers.push(LayerGrad {
            terms: vec![(delta.clone(), out_input)],
            bias: delta,
        });
        Ok(Gradients { layers })
    }
}

impl Parameters for Mlp {
    fn layers(&self) -> Vec<&Dense> {
        let mut out: Vec<&Dense> = self.hidden.iter().flat_map(|t| t.layers.iter()).collect();
        out.push(&self.output);
        out
    }

    fn layers_mut(&mut self) -> Vec<&mut Dense> {
        let mut out: Vec<&mut Dense> = self
            .hidden
            .iter_mut()
            .flat_map(|t| t.layers.iter_mut())
            .collect();
        out.push(&mut self.output);
        out
    }
}
