use serde::{Deserialize, Serialize};

use super::interaction::{Interaction, InteractionKind};
use super::layer::{Dense, Gradients, LayerGrad, Parameters, Tower};
use super::matrix::SparseVec;
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Layer widths for both sides of a relevance network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrrnShape {
    pub state_input: usize,
    pub action_input: usize,
    pub state_widths: Vec<usize>,
    pub action_widths: Vec<usize>,
    pub interaction: InteractionKind,
    /// Hidden width of the concatenation MLP; ignored by other interactions.
    pub mlp_width: usize,
    /// Share one tower between both sides.
    pub tied: bool,
}

/// Two embedding towers joined by an interaction function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrrnNet {
    pub state: Tower,
    /// `None` when the towers are tied.
    pub action: Option<Tower>,
    pub interaction: Interaction,
}

/// Everything backprop needs from one forward pass on a `(state, action)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DrrnTrace {
    pub state_input: SparseVec,
    pub action_input: SparseVec,
    pub state: Vec<Vec<f64>>,
    pub action: Vec<Vec<f64>>,
    pub interaction_hidden: Option<Vec<f64>>,
    pub q: f64,
}

impl DrrnNet {
    pub fn random(shape: &DrrnShape, rng: &mut Rng) -> Result<Self> {
        if shape.state_widths.is_empty() || shape.action_widths.is_empty() {
            return Err(Error::Dimension("each tower needs at least one layer".into()));
        }
        let state = Tower::random(shape.state_input, &shape.state_widths, rng);
        let action = if shape.tied {
            if shape.state_input != shape.action_input || shape.state_widths != shape.action_widths
            {
                return Err(Error::Dimension(
                    "tied towers need identical input dims and widths on both sides".into(),
                ));
            }
            None
        } else {
            Some(Tower::random(shape.action_input, &shape.action_widths, rng))
        };
        let interaction = Interaction::random(
            shape.interaction,
            *shape.state_widths.last().unwrap(),
            *shape.action_widths.last().unwrap(),
            shape.mlp_width,
            rng,
        )?;
        Ok(DrrnNet {
            state,
            action,
            interaction,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.state.validate()?;
        self.action_tower().validate()?;
        self.interaction
            .check_dims(self.state.output_dim(), self.action_tower().output_dim())
    }

    pub fn is_tied(&self) -> bool {
        self.action.is_none()
    }

    pub fn action_tower(&self) -> &Tower {
        self.action.as_ref().unwrap_or(&self.state)
    }

    pub fn embed_state(&self, s: &SparseVec) -> Result<Vec<Vec<f64>>> {
        self.state.forward(s)
    }

    pub fn embed_action(&self, a: &SparseVec) -> Result<Vec<Vec<f64>>> {
        self.action_tower().forward(a)
    }

    /// Q-value of a pair whose state side has already been embedded.
    pub fn q_with_state(
        &self,
        s: &SparseVec,
        state_acts: &[Vec<f64>],
        a: &SparseVec,
    ) -> Result<DrrnTrace> {
        let action_acts = self.embed_action(a)?;
        let (q, hidden) = self.interaction.forward(
            state_acts.last().expect("non-empty tower"),
            action_acts.last().expect("non-empty tower"),
        );
        Ok(DrrnTrace {
            state_input: s.clone(),
            action_input: a.clone(),
            state: state_acts.to_vec(),
            action: action_acts,
            interaction_hidden: hidden,
            q,
        })
    }

    pub fn q_value(&self, s: &SparseVec, a: &SparseVec) -> Result<(f64, DrrnTrace)> {
        let state_acts = self.embed_state(s)?;
        let trace = self.q_with_state(s, &state_acts, a)?;
        Ok((trace.q, trace))
    }

    /// Gradients of the loss whose derivative w.r.t. Q is `dq`. Only the
    /// traced action contributes.
    pub fn backprop(&self, trace: &DrrnTrace, dq: f64) -> Result<Gradients> {
        if trace.state.len() != self.state.layers.len()
            || trace.action.len() != self.action_tower().layers.len()
            || trace.state_input.dim != self.state.input_dim()
            || trace.action_input.dim != self.action_tower().input_dim()
        {
            return Err(Error::Dimension("trace does not match this network".into()));
        }
        let hs = trace.state.last().unwrap();
        let ha = trace.action.last().unwrap();
        let (gs, ga, inter) =
            self.interaction
                .backward(hs, ha, trace.interaction_hidden.as_deref(), dq);
        let mut state_grads = self.state.backward(&trace.state_input, &trace.state, &gs);
        let action_grads =
            self.action_tower()
                .backward(&trace.action_input, &trace.action, &ga);
        let mut layers = Vec::new();
        if self.is_tied() {
            for (s, a) in state_grads.iter_mut().zip(action_grads) {
                s.merge(a);
            }
            layers.extend(state_grads);
        } else {
            layers.extend(state_grads);
            layers.extend(action_grads);
        }
        layers.extend(inter);
        Ok(Gradients { layers })
    }

    /// Zero gradient of the right shape.
    pub fn zero_gradients(&self) -> Gradients {
        Gradients {
            layers: self.layers().into_iter().map(LayerGrad::zeros_like).collect(),
        }
    }
}

impl Parameters for DrrnNet {
    fn layers(&self) -> Vec<&Dense> {
        let mut out: Vec<&Dense> = self.state.layers.iter().collect();
        if let Some(a) = &self.action {
            out.extend(a.layers.iter());
        }
        out.extend(self.interaction.layers());
        out
    }

    fn layers_mut(&mut self) -> Vec<&mut Dense> {
        let mut out: Vec<&mut Dense> = self.state.layers.iter_mut().collect();
        if let Some(a) = &mut self.action {
            out.extend(a.layers.iter_mut());
        }
        out.extend(self.interaction.layers_mut());
        out
    }
}
