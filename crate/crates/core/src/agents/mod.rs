//! Q-function approximators over text states and variable-length text action
//! lists, plus Boltzmann action selection.
//!
//! * DRRN: separate state and action towers joined by an interaction function.
//! * Per-action DQN: one network over the concatenated `[s; a]` input, one output.
//! * Max-action DQN: one network over `[s; a_1; ...; a_K]` (zero-padded slots in
//!   presentation order) with `K` outputs; only the first `|A_t|` are eligible.
//! * Linear: a single affine layer with the max-action input layout.

mod features;
mod policy;

use serde::{Deserialize, Serialize};

pub use features::Featurizer;
pub use policy::{argmax, select_action, softmax_probabilities, td_target};

use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::harness::Transition;
use crate::neural::{
    sgd_step, Dense, DrrnNet, DrrnShape, DrrnTrace, Gradients, InteractionKind, Mlp, MlpTrace,
    Parameters, SparseVec,
};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arch {
    Drrn,
    PaDqn,
    MaDqn,
    Linear,
}

impl std::fmt::Display for Arch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Arch::Drrn => "drrn",
            Arch::PaDqn => "pa_dqn",
            Arch::MaDqn => "ma_dqn",
            Arch::Linear => "linear",
        })
    }
}

fn default_layers() -> usize {
    1
}
fn default_gamma() -> f64 {
    0.9
}
fn default_interaction() -> InteractionKind {
    InteractionKind::InnerProduct
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentConfig {
    pub arch: Arch,
    /// Hidden layers per tower (ignored by `linear`).
    #[serde(default = "default_layers")]
    pub layers: usize,
    pub hidden_dim: usize,
    /// Action-side width for DRRN; defaults to `hidden_dim`.
    #[serde(default)]
    pub action_hidden_dim: Option<usize>,
    #[serde(default = "default_interaction")]
    pub interaction: InteractionKind,
    /// Hidden width of the concatenation interaction; defaults to `hidden_dim`.
    #[serde(default)]
    pub interaction_hidden: Option<usize>,
    /// One tower for both sides, with a shared vocabulary.
    #[serde(default)]
    pub tied: bool,
    /// Output slots for `ma_dqn` and `linear`; defaults to the game's maximum.
    #[serde(default)]
    pub max_actions: Option<usize>,
    pub alpha: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Use 0/1 word indicators rather than counts.
    #[serde(default)]
    pub binary_features: bool,
}

impl AgentConfig {
    pub fn new(arch: Arch, layers: usize, hidden_dim: usize, alpha: f64) -> Self {
        AgentConfig {
            arch,
            layers,
            hidden_dim,
            action_hidden_dim: None,
            interaction: InteractionKind::InnerProduct,
            interaction_hidden: None,
            tied: false,
            max_actions: None,
            alpha,
            gamma: default_gamma(),
            binary_features: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if !(0.0..1.0).contains(&self.gamma) {
            return fail("gamma must lie in [0, 1)");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return fail("alpha must be positive");
        }
        if self.hidden_dim == 0 || self.action_hidden_dim == Some(0) || self.interaction_hidden == Some(0) {
            return fail("hidden dimensions must be at least 1");
        }
        if self.arch != Arch::Linear && self.layers == 0 {
            return fail("layers must be at least 1");
        }
        if self.arch != Arch::Drrn && (self.tied || self.interaction != InteractionKind::InnerProduct) {
            return fail("tied towers and interaction functions apply to drrn only");
        }
        if self.tied && self.action_hidden_dim.is_some_and(|d| d != self.hidden_dim) {
            return fail("tied towers need equal state and action widths");
        }
        if self.max_actions == Some(0) {
            return fail("max_actions must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "arch", rename_all = "snake_case")]
pub enum QModel {
    Drrn(DrrnNet),
    PaDqn(Mlp),
    MaDqn(Mlp),
    Linear(Mlp),
}

/// Forward state of one scored action.
#[derive(Debug, Clone, PartialEq)]
pub enum Trace {
    Drrn(DrrnTrace),
    Mlp { trace: MlpTrace, slot: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredActions {
    /// Aligned with the presented action order.
    pub q: Vec<f64>,
    pub traces: Vec<Trace>,
}

impl QModel {
    pub fn random(
        config: &AgentConfig,
        state_dim: usize,
        action_dim: usize,
        max_actions: usize,
        rng: &mut Rng,
    ) -> Result<Self> {
        config.validate()?;
        let widths = vec![config.hidden_dim; config.layers];
        let slotted = state_dim + max_actions * action_dim;
        Ok(match config.arch {
            Arch::Drrn => {
                let aw = config.action_hidden_dim.unwrap_or(config.hidden_dim);
                let shape = DrrnShape {
                    state_input: state_dim,
                    action_input: action_dim,
                    state_widths: widths,
                    action_widths: vec![aw; config.layers],
                    interaction: config.interaction,
                    mlp_width: config.interaction_hidden.unwrap_or(config.hidden_dim),
                    tied: config.tied,
                };
                QModel::Drrn(DrrnNet::random(&shape, rng)?)
            }
            Arch::PaDqn => QModel::PaDqn(Mlp::random(state_dim + action_dim, &widths, 1, rng)),
            Arch::MaDqn => QModel::MaDqn(Mlp::random(slotted, &widths, max_actions, rng)),
            Arch::Linear => QModel::Linear(Mlp::random(slotted, &[], max_actions, rng)),
        })
    }

    pub fn arch(&self) -> Arch {
        match self {
            QModel::Drrn(_) => Arch::Drrn,
            QModel::PaDqn(_) => Arch::PaDqn,
            QModel::MaDqn(_) => Arch::MaDqn,
            QModel::Linear(_) => Arch::Linear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            QModel::Drrn(n) => n.validate(),
            QModel::PaDqn(m) | QModel::MaDqn(m) | QModel::Linear(m) => m.validate(),
        }
    }

    /// Number of output slots of the max-action layouts.
    pub fn slots(&self) -> Option<usize> {
        match self {
            QModel::MaDqn(m) | QModel::Linear(m) => Some(m.output_dim()),
            _ => None,
        }
    }

    fn slotted_input(m: &Mlp, state: &SparseVec, actions: &[&SparseVec]) -> Result<SparseVec> {
        let slots = m.output_dim();
        if actions.len() > slots {
            return Err(Error::TooManyActions {
                available: actions.len(),
                max_actions: slots,
            });
        }
        let action_dim = match actions.first() {
            Some(a) => a.dim,
            None => return Err(Error::Dimension("empty action list".into())),
        };
        let pad = SparseVec::zeros(action_dim);
        let parts = std::iter::once(state)
            .chain(actions.iter().copied())
            .chain(std::iter::repeat_n(&pad, slots - actions.len()));
        Ok(SparseVec::concat(parts))
    }

    /// Q-values and traces for every presented action.
    pub fn score(&self, state: &SparseVec, actions: &[&SparseVec]) -> Result<ScoredActions> {
        if actions.is_empty() {
            return Err(Error::Dimension("empty action list".into()));
        }
        match self {
            QModel::Drrn(net) => {
                let state_acts = net.embed_state(state)?;
                let traces = actions
                    .iter()
                    .map(|a| net.q_with_state(state, &state_acts, a))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ScoredActions {
                    q: traces.iter().map(|t| t.q).collect(),
                    traces: traces.into_iter().map(Trace::Drrn).collect(),
                })
            }
            QModel::PaDqn(m) => {
                let traces = actions
                    .iter()
                    .map(|a| m.forward(&SparseVec::concat([state, *a])))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ScoredActions {
                    q: traces.iter().map(|t| t.outputs[0]).collect(),
                    traces: traces
                        .into_iter()
                        .map(|trace| Trace::Mlp { trace, slot: 0 })
                        .collect(),
                })
            }
            QModel::MaDqn(m) | QModel::Linear(m) => {
                let trace = m.forward(&Self::slotted_input(m, state, actions)?)?;
                Ok(ScoredActions {
                    q: trace.outputs[..actions.len()].to_vec(),
                    traces: (0..actions.len())
                        .map(|slot| Trace::Mlp {
                            trace: trace.clone(),
                            slot,
                        })
                        .collect(),
                })
            }
        }
    }

    /// Q-values only; no traces are kept.
    pub fn q_values(&self, state: &SparseVec, actions: &[&SparseVec]) -> Result<Vec<f64>> {
        if actions.is_empty() {
            return Err(Error::Dimension("empty action list".into()));
        }
        match self {
            QModel::Drrn(net) => {
                let hs = net.embed_state(state)?;
                let hs = hs.last().unwrap();
                actions
                    .iter()
                    .map(|a| {
                        let ha = net.embed_action(a)?;
                        Ok(net.interaction.forward(hs, ha.last().unwrap()).0)
                    })
                    .collect()
            }
            QModel::PaDqn(m) => actions
                .iter()
                .map(|a| Ok(m.forward(&SparseVec::concat([state, *a]))?.outputs[0]))
                .collect(),
            QModel::MaDqn(m) | QModel::Linear(m) => {
                let out = m.forward(&Self::slotted_input(m, state, actions)?)?.outputs;
                Ok(out[..actions.len()].to_vec())
            }
        }
    }

    /// Trace of the action at position `taken` only.
    pub fn trace_for(&self, state: &SparseVec, actions: &[&SparseVec], taken: usize) -> Result<Trace> {
        if taken >= actions.len() {
            return Err(Error::ChoiceOutOfRange {
                choice: taken,
                available: actions.len(),
            });
        }
        match self {
            QModel::Drrn(net) => Ok(Trace::Drrn(net.q_value(state, actions[taken])?.1)),
            QModel::PaDqn(m) => Ok(Trace::Mlp {
                trace: m.forward(&SparseVec::concat([state, actions[taken]]))?,
                slot: 0,
            }),
            QModel::MaDqn(m) | QModel::Linear(m) => Ok(Trace::Mlp {
                trace: m.forward(&Self::slotted_input(m, state, actions)?)?,
                slot: taken,
            }),
        }
    }

    pub fn trace_q(trace: &Trace) -> f64 {
        match trace {
            Trace::Drrn(t) => t.q,
            Trace::Mlp { trace, slot } => trace.outputs[*slot],
        }
    }

    /// Gradient of `½(Q − y)²` given `dq = Q − y`.
    pub fn backprop(&self, trace: &Trace, dq: f64) -> Result<Gradients> {
        match (self, trace) {
            (QModel::Drrn(net), Trace::Drrn(t)) => net.backprop(t, dq),
            (QModel::PaDqn(m) | QModel::MaDqn(m) | QModel::Linear(m), Trace::Mlp { trace, slot }) => {
                m.backprop(trace, *slot, dq)
            }
            _ => Err(Error::Dimension("trace was produced by another architecture".into())),
        }
    }
}

impl Parameters for QModel {
    fn layers(&self) -> Vec<&Dense> {
        match self {
            QModel::Drrn(n) => n.layers(),
            QModel::PaDqn(m) | QModel::MaDqn(m) | QModel::Linear(m) => m.layers(),
        }
    }

    fn layers_mut(&mut self) -> Vec<&mut Dense> {
        match self {
            QModel::Drrn(n) => n.layers_mut(),
            QModel::PaDqn(m) | QModel::MaDqn(m) | QModel::Linear(m) => m.layers_mut(),
        }
    }
}

/// A Q-function approximator together with its featurization and policy
/// parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Agent {
    pub config: AgentConfig,
    pub features: Featurizer,
    pub model: QModel,
}

impl Agent {
    /// Fresh agent with vocabularies built from `game` and weights drawn from `rng`.
    pub fn new(config: AgentConfig, game: &GameSpec, rng: &mut Rng) -> Result<Self> {
        config.validate()?;
        let features = Featurizer::for_game(game, config.tied, config.binary_features)?;
        let max_actions = config.max_actions.unwrap_or(game.max_actions);
        if max_actions < game.max_actions && matches!(config.arch, Arch::MaDqn | Arch::Linear) {
            return Err(Error::Config(format!(
                "max_actions {max_actions} is below the game's maximum {}",
                game.max_actions
            )));
        }
        let model = QModel::random(
            &config,
            features.state_dim(),
            features.action_dim(),
            max_actions,
            rng,
        )?;
        Ok(Agent {
            config,
            features,
            model,
        })
    }

    pub fn from_parts(config: AgentConfig, features: Featurizer, model: QModel) -> Result<Self> {
        config.validate()?;
        model.validate()?;
        if model.arch() != config.arch {
            return Err(Error::Config("model architecture differs from config".into()));
        }
        Ok(Agent {
            config,
            features,
            model,
        })
    }

    pub fn score_texts<S: AsRef<str>>(&self, state: &str, actions: &[S]) -> Result<ScoredActions> {
        let s = self.features.state(state);
        let acts: Vec<_> = actions.iter().map(|a| self.features.action(a.as_ref())).collect();
        let refs: Vec<&SparseVec> = acts.iter().map(|a| a.as_ref()).collect();
        self.model.score(&s, &refs)
    }

    pub fn q_values<S: AsRef<str>>(&self, state: &str, actions: &[S]) -> Result<Vec<f64>> {
        let s = self.features.state(state);
        let acts: Vec<_> = actions.iter().map(|a| self.features.action(a.as_ref())).collect();
        let refs: Vec<&SparseVec> = acts.iter().map(|a| a.as_ref()).collect();
        self.model.q_values(&s, &refs)
    }

    pub fn select(&self, q: &[f64], rng: &mut Rng) -> usize {
        select_action(q, self.config.alpha, rng)
    }

    /// Final-layer embeddings `(h_L,s, [h_L,a])` of a DRRN.
    pub fn embeddings<S: AsRef<str>>(&self, state: &str, actions: &[S]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let QModel::Drrn(net) = &self.model else {
            return Err(Error::Analysis("embeddings exist only for drrn agents".into()));
        };
        let hs = net.embed_state(&self.features.state(state))?.pop().unwrap();
        let has = actions
            .iter()
            .map(|a| Ok(net.embed_action(&self.features.action(a.as_ref()))?.pop().unwrap()))
            .collect::<Result<Vec<_>>>()?;
        Ok((hs, has))
    }

    /// One SGD pass over `batch`, tuple by tuple. Each target is recomputed
    /// with the current parameters just before that tuple's update; only the
    /// taken action receives gradient. Returns the mean squared TD error.
    pub fn learn<'t>(
        &mut self,
        batch: impl IntoIterator<Item = &'t Transition>,
        eta: f64,
    ) -> Result<f64> {
        let (mut sq, mut n) = (0.0, 0usize);
        for t in batch {
            n += 1;
            let next_q = if t.terminal {
                Vec::new()
            } else {
                self.q_values(&t.next_state, &t.next_actions)?
            };
            let y = td_target(t.reward, &next_q, t.terminal, self.config.gamma)?;
            let s = self.features.state(&t.state);
            let acts: Vec<_> = t.actions.iter().map(|a| self.features.action(a)).collect();
            let refs: Vec<&SparseVec> = acts.iter().map(|a| a.as_ref()).collect();
            let trace = self.model.trace_for(&s, &refs, t.taken)?;
            let q = QModel::trace_q(&trace);
            let d = y - q;
            sq += d * d;
            if d != 0.0 {
                let grads = self.model.backprop(&trace, q - y)?;
                sgd_step(&mut self.model, &grads, eta);
            }
        }
        Ok(if n == 0 { 0.0 } else { sq / n as f64 })
    }

    pub fn save(&self, out: impl std::io::Write) -> Result<()> {
        crate::neural::checkpoint::write(self, out)
    }

    pub fn save_file(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        self.save(&mut out)?;
        std::io::Write::flush(&mut out).map_err(|e| Error::io(path, e))
    }

    pub fn load(input: impl std::io::Read) -> Result<Self> {
        let agent: Agent = crate::neural::checkpoint::read(input)?;
        Agent::from_parts(agent.config, agent.features, agent.model)
    }

    pub fn load_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::load(std::io::BufReader::new(file))
    }
}
