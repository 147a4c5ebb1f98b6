use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Boltzmann probabilities `exp(α q_i) / Σ_j exp(α q_j)`, computed after
/// subtracting the maximum.
pub fn softmax_probabilities(q: &[f64], alpha: f64) -> Vec<f64> {
    let max = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = q.iter().map(|&x| (alpha * (x - max)).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Sample an index from the softmax over `q`. One uniform draw per call.
pub fn select_action(q: &[f64], alpha: f64, rng: &mut Rng) -> usize {
    assert!(!q.is_empty(), "cannot select from an empty action list");
    let probs = softmax_probabilities(q, alpha);
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Index of the largest value, lowest index on ties.
pub fn argmax(q: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in q.iter().enumerate() {
        if x > q[best] {
            best = i;
        }
    }
    best
}

/// `r` on terminal transitions, else `r + γ max_a' Q(s', a')` over the
/// feasible next actions.
pub fn td_target(reward: f64, next_q: &[f64], terminal: bool, gamma: f64) -> Result<f64> {
    if terminal {
        return Ok(reward);
    }
    if next_q.is_empty() {
        return Err(Error::EmptyNextActions);
    }
    let best = next_q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(reward + gamma * best)
}
