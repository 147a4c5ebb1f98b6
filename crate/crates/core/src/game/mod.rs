//! Choice-based and hypertext-based text games as episodic MDPs.
//!
//! A game is a directed graph of text states. Each non-terminal state offers
//! a list of action texts; each action carries a distribution over successor
//! states. Terminal states carry the ending's reward, every other transition
//! pays the game's step penalty.

mod episode;
mod load;
mod oracle;

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use episode::{Episode, Observation};
pub use load::{load_game, load_game_file};
pub use oracle::{enumerate_optimal_value, expected_final_reward, ValueTable};

pub const DEFAULT_STEP_PENALTY: f64 = -0.1;
pub const DEFAULT_MAX_STEPS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameKind {
    Deterministic,
    Stochastic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub probability: f64,
    pub next: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionDef {
    pub text: Arc<str>,
    /// Hypertext actions are verbatim substrings of the owning state's text.
    pub hypertext: bool,
    pub outcomes: Vec<Outcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameState {
    pub id: String,
    pub text: Arc<str>,
    pub actions: Vec<ActionDef>,
    /// Present exactly on terminal states.
    pub terminal_reward: Option<f64>,
}

impl GameState {
    pub fn is_terminal(&self) -> bool {
        self.terminal_reward.is_some()
    }
}

#[derive(Debug, Clone)]
pub struct GameSpec {
    pub title: String,
    pub version: Option<String>,
    pub kind: GameKind,
    pub start: usize,
    pub step_penalty: f64,
    pub max_steps: usize,
    /// Upper bound on the number of actions offered by any state.
    pub max_actions: usize,
    pub states: Vec<GameState>,
    index: HashMap<String, usize>,
}

impl GameSpec {
    pub fn state_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn state(&self, id: &str) -> Option<&GameState> {
        self.state_index(id).map(|i| &self.states[i])
    }

    pub fn state_texts(&self) -> impl Iterator<Item = &str> {
        self.states.iter().map(|s| &*s.text)
    }

    pub fn action_texts(&self) -> impl Iterator<Item = &str> {
        self.states
            .iter()
            .flat_map(|s| s.actions.iter().map(|a| &*a.text))
    }

    pub fn terminal_count(&self) -> usize {
        self.states.iter().filter(|s| s.is_terminal()).count()
    }

    /// Reward paid for arriving in `next`.
    pub fn arrival_reward(&self, next: usize) -> f64 {
        self.states[next]
            .terminal_reward
            .unwrap_or(self.step_penalty)
    }
}
