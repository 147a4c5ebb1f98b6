mod common;

use std::collections::HashMap;

use drrn::game::{enumerate_optimal_value, expected_final_reward, load_game, load_game_file, GameSpec};
use drrn::textfeat::{Side, Vocabulary};

#[test]
fn outcome_frequencies_within_three_sigma() {
    for (id, k, bound) in common::spinner_deviations(10_000, 99) {
        assert!(k <= bound, "{id}: deviation {k} beyond {bound}");
    }
}

#[test]
fn episode_stops_exactly_at_the_cap() {
    for cap in [1, 7, 500] {
        assert_eq!(common::capped_episode_steps(cap), cap);
    }
}

#[test]
fn shuffles_are_uniform_over_permutations() {
    let src = r#"{"title": "four", "kind": "deterministic", "start": "a", "states": [
        {"id": "a", "text": "Four doors.", "actions": [
            {"text": "one", "next": "z"}, {"text": "two", "next": "z"},
            {"text": "three", "next": "z"}, {"text": "four", "next": "z"}
        ]},
        {"id": "z", "text": "Out.", "terminal_reward": 0}
    ]}"#;
    let game = load_game(src.as_bytes()).unwrap();
    let n = 10_000usize;
    let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut differ = 0;
    for i in 0..n as u64 {
        let (_, a) = game.reset(2 * i);
        let (_, b) = game.reset(2 * i + 1);
        if a.permutation != b.permutation {
            differ += 1;
        }
        *counts.entry(a.permutation).or_default() += 1;
    }
    assert_eq!(counts.len(), 24);
    let expected = n as f64 / 24.0;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 23 degrees of freedom, upper 0.1% point.
    assert!(chi2 < 49.73, "chi-square {chi2}");
    let p = 23.0 / 24.0;
    let sigma = (n as f64 * p * (1.0 - p)).sqrt();
    assert!((differ as f64 - n as f64 * p).abs() <= 3.0 * sigma, "{differ}");
}

#[test]
fn trajectories_are_reproducible() {
    let game = load_game_file(common::games_dir().join("courier.json")).unwrap();
    let play = |seed| {
        let (mut ep, mut obs) = game.reset(seed);
        let mut log = vec![(0.0, obs.clone())];
        while !obs.done {
            let (r, next) = ep.step(obs.action_texts.len() - 1).unwrap();
            log.push((r, next.clone()));
            obs = next;
        }
        log
    };
    assert_eq!(play(17), play(17));
}

fn lighthouse() -> GameSpec {
    load_game_file(common::games_dir().join("lighthouse.json")).unwrap()
}

#[test]
fn bundled_deterministic_game_shape() {
    let game = lighthouse();
    assert!(game.states.len() >= 20);
    assert_eq!(game.max_actions, 4);
    assert!(game.states.iter().flat_map(|s| &s.actions).all(|a| a.outcomes.len() == 1));
    // Recomputed from the fixture when its text changes.
    let vocab = Vocabulary::build(game.state_texts(), Side::State).unwrap();
    assert_eq!(vocab.len(), LIGHTHOUSE_STATE_VOCAB);
}

const LIGHTHOUSE_STATE_VOCAB: usize = 221;

#[test]
fn bundled_deterministic_game_oracle() {
    let game = lighthouse();
    let table = enumerate_optimal_value(&game, 0.9);
    let policy = table.greedy_policy();
    let best = expected_final_reward(&game, |s| {
        let n = game.states[s].actions.len();
        let mut p = vec![0.0; n];
        if let Some(a) = policy[s] {
            p[a] = 1.0;
        }
        p
    });
    let top = game.states.iter().filter_map(|s| s.terminal_reward).fold(f64::MIN, f64::max);
    assert_eq!(best, top);
    let start = table.values[game.start];
    assert!(start > 0.0 && start < top);
}

#[test]
fn bundled_stochastic_game_shape() {
    let game = load_game_file(common::games_dir().join("courier.json")).unwrap();
    assert_eq!(game.max_actions, 9);
    let actions: Vec<_> = game.states.iter().flat_map(|s| &s.actions).collect();
    assert!(actions.iter().any(|a| a.hypertext));
    assert!(actions.iter().any(|a| !a.hypertext));
    assert!(actions.iter().any(|a| a.outcomes.len() > 1));
}
