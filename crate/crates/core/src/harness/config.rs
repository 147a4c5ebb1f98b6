use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::agents::AgentConfig;
use crate::error::{Error, Result};

fn default_per_block() -> usize {
    200
}
fn default_epochs() -> usize {
    1
}
fn default_batch() -> usize {
    32
}
fn default_eta() -> f64 {
    0.001
}
fn default_capacity() -> usize {
    100_000
}
fn default_eval() -> usize {
    200
}
fn default_seeds() -> Vec<u64> {
    vec![1, 2, 3, 4, 5]
}
fn default_true() -> bool {
    true
}

/// Experiment description, usually read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Game file; relative paths resolve against the config file's directory.
    pub game: PathBuf,
    /// Total training episodes per replicate.
    pub episodes: usize,
    #[serde(default = "default_per_block")]
    pub episodes_per_block: usize,
    #[serde(default = "default_epochs")]
    pub epochs_per_block: usize,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_capacity")]
    pub replay_capacity: usize,
    #[serde(default = "default_eval")]
    pub eval_episodes: usize,
    /// Replicate ids; every replicate derives its streams from the master seed and its id.
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub master_seed: u64,
    /// Episode counts after which a copy of each replicate's agent is kept.
    #[serde(default)]
    pub snapshot_episodes: Vec<usize>,
    /// When false, episodes are generated and evaluated but no update is applied.
    #[serde(default = "default_true")]
    pub learn: bool,
    pub agent: AgentConfig,
}

impl ExperimentConfig {
    pub fn new(game: impl Into<PathBuf>, episodes: usize, agent: AgentConfig) -> Self {
        ExperimentConfig {
            game: game.into(),
            episodes,
            episodes_per_block: default_per_block(),
            epochs_per_block: default_epochs(),
            batch_size: default_batch(),
            eta: default_eta(),
            replay_capacity: default_capacity(),
            eval_episodes: default_eval(),
            seeds: default_seeds(),
            master_seed: 0,
            snapshot_episodes: Vec::new(),
            learn: true,
            agent,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Read a config file, resolving the game path against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml(&text)?;
        if config.game.is_relative() {
            if let Some(dir) = path.parent() {
                config.game = dir.join(&config.game);
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.episodes_per_block == 0
            || self.epochs_per_block == 0
            || self.batch_size == 0
            || self.replay_capacity == 0
            || self.eval_episodes == 0
        {
            return fail("block, epoch, batch, capacity and evaluation counts must be positive");
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return fail("eta must be positive");
        }
        if self.seeds.is_empty() {
            return fail("at least one seed is required");
        }
        let mut ids = self.seeds.clone();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.seeds.len() {
            return fail("seed ids must be distinct");
        }
        self.agent.validate()
    }
}
