use std::borrow::Cow;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::game::GameSpec;
use crate::neural::SparseVec;
use crate::textfeat::{Side, Vocabulary};

/// Maps state and action texts to network inputs. Game texts are vectorized
/// once up front; anything else (paraphrases, made-up actions) on demand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "FeaturizerRepr", into = "FeaturizerRepr")]
pub struct Featurizer {
    state_vocab: Vocabulary,
    action_vocab: Vocabulary,
    binary: bool,
    state_cache: HashMap<String, SparseVec>,
    action_cache: HashMap<String, SparseVec>,
}

#[derive(Serialize, Deserialize)]
struct FeaturizerRepr {
    state_vocab: Vocabulary,
    action_vocab: Vocabulary,
    binary: bool,
}

impl From<FeaturizerRepr> for Featurizer {
    fn from(r: FeaturizerRepr) -> Self {
        Featurizer::new(r.state_vocab, r.action_vocab, r.binary)
    }
}

impl From<Featurizer> for FeaturizerRepr {
    fn from(f: Featurizer) -> Self {
        FeaturizerRepr {
            state_vocab: f.state_vocab,
            action_vocab: f.action_vocab,
            binary: f.binary,
        }
    }
}

impl Featurizer {
    pub fn new(state_vocab: Vocabulary, action_vocab: Vocabulary, binary: bool) -> Self {
        Featurizer {
            state_vocab,
            action_vocab,
            binary,
            state_cache: HashMap::new(),
            action_cache: HashMap::new(),
        }
    }

    /// Separate vocabularies over the game's state and action texts, or one
    /// shared vocabulary when `shared` is set.
    pub fn for_game(game: &GameSpec, shared: bool, binary: bool) -> Result<Self> {
        let (state_vocab, action_vocab) = if shared {
            let v = Vocabulary::build(game.state_texts().chain(game.action_texts()), Side::Shared)?;
            (v.clone(), v)
        } else {
            (
                Vocabulary::build(game.state_texts(), Side::State)?,
                Vocabulary::build(game.action_texts(), Side::Action)?,
            )
        };
        let mut f = Featurizer::new(state_vocab, action_vocab, binary);
        f.warm(game);
        Ok(f)
    }

    /// Precompute inputs for every text of `game`.
    pub fn warm(&mut self, game: &GameSpec) {
        for t in game.state_texts() {
            let v = Self::encode(&self.state_vocab, self.binary, t);
            self.state_cache.insert(t.to_string(), v);
        }
        for t in game.action_texts() {
            let v = Self::encode(&self.action_vocab, self.binary, t);
            self.action_cache.insert(t.to_string(), v);
        }
    }

    fn encode(vocab: &Vocabulary, binary: bool, text: &str) -> SparseVec {
        SparseVec::from_bow(&vocab.vectorize(text).0, binary)
    }

    pub fn state_vocab(&self) -> &Vocabulary {
        &self.state_vocab
    }

    pub fn action_vocab(&self) -> &Vocabulary {
        &self.action_vocab
    }

    pub fn state_dim(&self) -> usize {
        self.state_vocab.len()
    }

    pub fn action_dim(&self) -> usize {
        self.action_vocab.len()
    }

    pub fn state(&self, text: &str) -> Cow<'_, SparseVec> {
        match self.state_cache.get(text) {
            Some(v) => Cow::Borrowed(v),
            None => Cow::Owned(Self::encode(&self.state_vocab, self.binary, text)),
        }
    }

    pub fn action(&self, text: &str) -> Cow<'_, SparseVec> {
        match self.action_cache.get(text) {
            Some(v) => Cow::Borrowed(v),
            None => Cow::Owned(Self::encode(&self.action_vocab, self.binary, text)),
        }
    }
}
