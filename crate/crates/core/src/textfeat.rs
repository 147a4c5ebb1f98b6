//! Bag-of-words featurization with separate state-side and action-side
//! vocabularies.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lowercase, split on whitespace and punctuation, drop the separators.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    State,
    Action,
    /// One vocabulary for both sides (tied towers).
    Shared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "VocabRepr", into = "VocabRepr")]
pub struct Vocabulary {
    side: Side,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct VocabRepr {
    side: Side,
    tokens: Vec<String>,
}

impl From<VocabRepr> for Vocabulary {
    fn from(r: VocabRepr) -> Self {
        let mut v = Vocabulary {
            side: r.side,
            tokens: Vec::new(),
            index: HashMap::new(),
        };
        for t in r.tokens {
            v.insert(t);
        }
        v
    }
}

impl From<Vocabulary> for VocabRepr {
    fn from(v: Vocabulary) -> Self {
        VocabRepr {
            side: v.side,
            tokens: v.tokens,
        }
    }
}

impl Vocabulary {
    /// All distinct tokens of `corpus` in first-occurrence order.
    pub fn build<'a>(corpus: impl IntoIterator<Item = &'a str>, side: Side) -> Result<Self> {
        let mut vocab = Vocabulary {
            side,
            tokens: Vec::new(),
            index: HashMap::new(),
        };
        let mut texts = 0usize;
        for text in corpus {
            texts += 1;
            for token in tokenize(text) {
                vocab.insert(token);
            }
        }
        if texts == 0 {
            return Err(Error::EmptyCorpus);
        }
        Ok(vocab)
    }

    fn insert(&mut self, token: String) {
        if !self.index.contains_key(&token) {
            self.index.insert(token.clone(), self.tokens.len());
            self.tokens.push(token);
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// One token per line; the line number is the index.
    pub fn dump(&self, mut out: impl Write) -> std::io::Result<()> {
        for t in &self.tokens {
            writeln!(out, "{t}")?;
        }
        Ok(())
    }

    pub fn load(input: impl BufRead, side: Side) -> Result<Self> {
        let mut vocab = Vocabulary {
            side,
            tokens: Vec::new(),
            index: HashMap::new(),
        };
        for (i, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse {
                line: i + 1,
                column: 0,
                message: e.to_string(),
            })?;
            if vocab.contains(&line) {
                return Err(Error::Parse {
                    line: i + 1,
                    column: 1,
                    message: format!("duplicate token '{line}'"),
                });
            }
            vocab.insert(line);
        }
        Ok(vocab)
    }

    /// Vectorize, returning the bag of words and the number of dropped
    /// out-of-vocabulary tokens.
    pub fn vectorize(&self, text: &str) -> (BowVector, usize) {
        let mut counts: Vec<(usize, u32)> = Vec::new();
        let mut dropped = 0;
        for token in tokenize(text) {
            match self.get(&token) {
                Some(i) => match counts.iter_mut().find(|(j, _)| *j == i) {
                    Some((_, c)) => *c += 1,
                    None => counts.push((i, 1)),
                },
                None => dropped += 1,
            }
        }
        counts.sort_unstable_by_key(|&(i, _)| i);
        (
            BowVector {
                dim: self.len(),
                entries: counts,
            },
            dropped,
        )
    }
}

pub fn build_vocab<'a>(corpus: impl IntoIterator<Item = &'a str>, side: Side) -> Result<Vocabulary> {
    Vocabulary::build(corpus, side)
}

/// Sparse token counts, indices strictly ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BowVector {
    pub dim: usize,
    pub entries: Vec<(usize, u32)>,
}

impl BowVector {
    pub fn total(&self) -> usize {
        self.entries.iter().map(|&(_, c)| c as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn vectorize(text: &str, vocab: &Vocabulary) -> (BowVector, usize) {
    vocab.vectorize(text)
}

/// Fraction of token occurrences across `texts` missing from `vocab`.
pub fn oov_rate<'a>(texts: impl IntoIterator<Item = &'a str>, vocab: &Vocabulary) -> Result<f64> {
    let (mut total, mut oov) = (0usize, 0usize);
    for text in texts {
        for token in tokenize(text) {
            total += 1;
            if !vocab.contains(&token) {
                oov += 1;
            }
        }
    }
    if total == 0 {
        return Err(Error::NoTokens);
    }
    Ok(oov as f64 / total as f64)
}
