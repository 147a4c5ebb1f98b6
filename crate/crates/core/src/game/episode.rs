use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::GameSpec;
use crate::error::{Error, Result};
use crate::rng::{self, Rng};

/// What the player sees after a reset or a step.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub state_text: Arc<str>,
    /// Action texts in presentation order.
    pub action_texts: Vec<Arc<str>>,
    pub step_index: usize,
    pub done: bool,
    /// True when the episode ended in a terminal state (not by the step cap).
    pub terminal: bool,
    /// `permutation[i]` is the underlying action index shown at position `i`.
    pub permutation: Vec<usize>,
}

/// A single running episode. Owns its RNG stream; not shareable across threads
/// for mutation.
#[derive(Debug, Clone)]
pub struct Episode<'g> {
    game: &'g GameSpec,
    rng: Rng,
    state: usize,
    step_index: usize,
    done: bool,
    permutation: Vec<usize>,
}

impl GameSpec {
    /// Start a new episode at the start state with a freshly shuffled action list.
    pub fn reset(&self, seed: u64) -> (Episode<'_>, Observation) {
        let mut episode = Episode {
            game: self,
            rng: rng::seeded(seed),
            state: self.start,
            step_index: 0,
            done: false,
            permutation: Vec::new(),
        };
        episode.shuffle();
        let obs = episode.observation();
        (episode, obs)
    }
}

impl<'g> Episode<'g> {
    pub fn game(&self) -> &'g GameSpec {
        self.game
    }

    pub fn state(&self) -> usize {
        self.state
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    fn shuffle(&mut self) {
        let n = self.game.states[self.state].actions.len();
        self.permutation = (0..n).collect();
        self.permutation.shuffle(&mut self.rng);
    }

    pub fn observation(&self) -> Observation {
        let state = &self.game.states[self.state];
        Observation {
            state_text: state.text.clone(),
            action_texts: self
                .permutation
                .iter()
                .map(|&i| state.actions[i].text.clone())
                .collect(),
            step_index: self.step_index,
            done: self.done,
            terminal: state.is_terminal(),
            permutation: self.permutation.clone(),
        }
    }

    /// Take the action at position `choice` of the presented list.
    pub fn step(&mut self, choice: usize) -> Result<(f64, Observation)> {
        if self.done {
            return Err(Error::EpisodeFinished);
        }
        if choice >= self.permutation.len() {
            return Err(Error::ChoiceOutOfRange {
                choice,
                available: self.permutation.len(),
            });
        }
        let action = &self.game.states[self.state].actions[self.permutation[choice]];
        let next = match action.outcomes.as_slice() {
            [only] => only.next,
            outcomes => {
                let u: f64 = self.rng.gen();
                let mut acc = 0.0;
                let mut chosen = outcomes[outcomes.len() - 1].next;
                for o in outcomes {
                    acc += o.probability;
                    if u < acc {
                        chosen = o.next;
                        break;
                    }
                }
                chosen
            }
        };
        self.state = next;
        self.step_index += 1;
        let reward = self.game.arrival_reward(next);
        if self.game.states[next].is_terminal() || self.step_index >= self.game.max_steps {
            self.done = true;
        }
        self.shuffle();
        Ok((reward, self.observation()))
    }
}
