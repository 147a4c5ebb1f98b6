//! Exact dynamic programming on the underlying finite MDP. Used as the
//! reference for trained Q-values and as the target for convergence tests.

use super::GameSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    pub gamma: f64,
    /// Optimal state values; zero for terminal states.
    pub values: Vec<f64>,
    /// `q[s][a]` for the underlying action order of state `s`.
    pub q: Vec<Vec<f64>>,
}

impl ValueTable {
    /// Optimal action per state in underlying order, lowest index on ties.
    /// `None` for terminal states.
    pub fn greedy_policy(&self) -> Vec<Option<usize>> {
        self.q
            .iter()
            .map(|qs| {
                qs.iter()
                    .enumerate()
                    .fold(None, |best: Option<(usize, f64)>, (i, &q)| match best {
                        Some((_, bq)) if bq >= q => best,
                        _ => Some((i, q)),
                    })
                    .map(|(i, _)| i)
            })
            .collect()
    }
}

fn backup(game: &GameSpec, values: &[f64], gamma: f64, state: usize, action: usize) -> f64 {
    game.states[state].actions[action]
        .outcomes
        .iter()
        .map(|o| {
            let future = if game.states[o.next].is_terminal() {
                0.0
            } else {
                gamma * values[o.next]
            };
            o.probability * (game.arrival_reward(o.next) + future)
        })
        .sum()
}

/// Value iteration to a sup-norm fixed point (error below 1e-10). The step
/// cap is ignored: this is the infinite-horizon discounted optimum.
pub fn enumerate_optimal_value(game: &GameSpec, gamma: f64) -> ValueTable {
    assert!((0.0..1.0).contains(&gamma), "gamma must lie in [0, 1)");
    let n = game.states.len();
    let mut values = vec![0.0; n];
    loop {
        let mut delta: f64 = 0.0;
        for s in 0..n {
            if game.states[s].is_terminal() {
                continue;
            }
            let best = (0..game.states[s].actions.len())
                .map(|a| backup(game, &values, gamma, s, a))
                .fold(f64::NEG_INFINITY, f64::max);
            delta = delta.max((best - values[s]).abs());
            values[s] = best;
        }
        // Contraction bound on the remaining distance to the fixed point.
        if delta * gamma <= 1e-12 * (1.0 - gamma) {
            break;
        }
    }
    let q = (0..n)
        .map(|s| {
            (0..game.states[s].actions.len())
                .map(|a| backup(game, &values, gamma, s, a))
                .collect()
        })
        .collect();
    ValueTable { gamma, values, q }
}

/// Expected reward of the last transition of an episode (terminal reward, or
/// the step penalty if the cap is hit) when following `policy`.
/// `policy(s)` returns action probabilities in underlying order.
pub fn expected_final_reward(game: &GameSpec, policy: impl Fn(usize) -> Vec<f64>) -> f64 {
    let n = game.states.len();
    let policies: Vec<Vec<f64>> = (0..n)
        .map(|s| {
            if game.states[s].is_terminal() {
                Vec::new()
            } else {
                policy(s)
            }
        })
        .collect();
    let mut mass = vec![0.0; n];
    mass[game.start] = 1.0;
    let mut expected = 0.0;
    for step in 1..=game.max_steps {
        let mut next_mass = vec![0.0; n];
        let mut live = 0.0;
        for s in 0..n {
            if mass[s] == 0.0 {
                continue;
            }
            for (a, &pa) in policies[s].iter().enumerate() {
                if pa == 0.0 {
                    continue;
                }
                for o in &game.states[s].actions[a].outcomes {
                    let m = mass[s] * pa * o.probability;
                    if game.states[o.next].is_terminal() || step == game.max_steps {
                        expected += m * game.arrival_reward(o.next);
                    } else {
                        next_mass[o.next] += m;
                        live += m;
                    }
                }
            }
        }
        mass = next_mass;
        if live < 1e-15 {
            break;
        }
    }
    expected
}
