//! Q-learning over natural-language state and action spaces.
//!
//! The crate bundles a text-game engine ([`game`]), bag-of-words features
//! ([`textfeat`]), hand-written feed-forward networks with analytic
//! gradients ([`neural`]), the relevance-network agent and its baselines
//! ([`agents`]), the experience-replay training loop ([`harness`]) and
//! post-training analyses ([`analysis`]).

pub mod agents;
pub mod analysis;
pub mod error;
pub mod game;
pub mod harness;
pub mod neural;
pub mod rng;
pub mod textfeat;

pub use error::{Error, Result};
