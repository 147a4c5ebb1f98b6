//! Oracles shared by the integration tests and the acceptance suite.
#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use drrn::agents::{AgentConfig, Arch, QModel};
use drrn::game::{enumerate_optimal_value, load_game, load_game_file, Episode, Observation};
use drrn::harness::{train, ExperimentConfig};
use drrn::neural::{
    flatten_params, param_mut, Dense, DrrnNet, DrrnShape, Interaction, InteractionKind, Matrix,
    Parameters, SparseVec,
};
use drrn::rng::{self, Rng};
use rand::Rng as _;

pub fn games_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("games")
}

pub fn paraphrases_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("paraphrases")
}

pub fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}

/// Every architecture variant covered by the gradient check.
pub fn gradient_variants() -> Vec<AgentConfig> {
    let mut out = Vec::new();
    for layers in [1, 2] {
        for tied in [false, true] {
            for kind in [
                InteractionKind::InnerProduct,
                InteractionKind::Bilinear,
                InteractionKind::ConcatMlp,
            ] {
                let mut c = AgentConfig::new(Arch::Drrn, layers, 4, 1.0);
                c.tied = tied;
                c.interaction = kind;
                out.push(c);
            }
        }
        out.push(AgentConfig::new(Arch::PaDqn, layers, 4, 1.0));
        out.push(AgentConfig::new(Arch::MaDqn, layers, 4, 1.0));
    }
    out.push(AgentConfig::new(Arch::Linear, 1, 4, 1.0));
    out
}

/// `|a − n| / max(|a|, |n|, 1e-3)`; the floor keeps near-zero entries from
/// dominating on pure round-off.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-3)
}

pub struct GradientCheck {
    pub label: String,
    pub parameters: usize,
    pub max_rel_error: f64,
}

fn dense_input(dim: usize, rng: &mut Rng) -> SparseVec {
    let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    SparseVec::dense(&v)
}

/// Central finite differences against analytic backprop of `½(Q − y)²` on one
/// random instance. Weights are rescaled to ±0.8 so every layer carries signal.
pub fn gradient_instance(base: &AgentConfig, rng: &mut Rng) -> GradientCheck {
    let mut config = base.clone();
    config.hidden_dim = rng.gen_range(2..=8);
    if config.interaction == InteractionKind::ConcatMlp && config.arch == Arch::Drrn {
        config.interaction_hidden = Some(rng.gen_range(2..=8));
    }
    if config.arch == Arch::Drrn && !config.tied && config.interaction != InteractionKind::InnerProduct {
        config.action_hidden_dim = Some(rng.gen_range(2..=8));
    }
    let state_dim = rng.gen_range(1..=8);
    let action_dim = if config.tied { state_dim } else { rng.gen_range(1..=8) };
    let max_actions = rng.gen_range(1..=4);
    let n_actions = rng.gen_range(1..=max_actions);
    let mut model = QModel::random(&config, state_dim, action_dim, max_actions, rng).unwrap();
    let n_params = flatten_params(&model).len();
    for k in 0..n_params {
        *param_mut(&mut model, k) = rng.gen_range(-0.8..0.8);
    }
    let state = dense_input(state_dim, rng);
    let actions: Vec<SparseVec> = (0..n_actions).map(|_| dense_input(action_dim, rng)).collect();
    let refs: Vec<&SparseVec> = actions.iter().collect();
    let taken = rng.gen_range(0..n_actions);
    let y: f64 = rng.gen_range(-2.0..2.0);

    let loss = |m: &QModel| {
        let q = QModel::trace_q(&m.trace_for(&state, &refs, taken).unwrap());
        0.5 * (q - y) * (q - y)
    };
    let trace = model.trace_for(&state, &refs, taken).unwrap();
    let q = QModel::trace_q(&trace);
    let analytic = model.backprop(&trace, q - y).unwrap().flatten(&model);
    assert_eq!(analytic.len(), n_params);

    let eps = 1e-5;
    let mut worst: f64 = 0.0;
    for k in 0..n_params {
        let orig = *param_mut(&mut model, k);
        *param_mut(&mut model, k) = orig + eps;
        let up = loss(&model);
        *param_mut(&mut model, k) = orig - eps;
        let down = loss(&model);
        *param_mut(&mut model, k) = orig;
        let numeric = (up - down) / (2.0 * eps);
        worst = worst.max(relative_error(analytic[k], numeric));
    }
    GradientCheck {
        label: format!(
            "{} L={} tied={} g={:?} h={}",
            config.arch, config.layers, config.tied, config.interaction, config.hidden_dim
        ),
        parameters: n_params,
        max_rel_error: worst,
    }
}

/// `n` instances cycling through [`gradient_variants`].
pub fn gradient_suite(n: usize, seed: u64) -> Vec<GradientCheck> {
    let variants = gradient_variants();
    let mut rng = rng::stream(seed, "gradient-check");
    (0..n)
        .map(|i| gradient_instance(&variants[i % variants.len()], &mut rng))
        .collect()
}

pub struct TabularCheck {
    pub sup_norm: f64,
    pub policy_matches: bool,
}

/// Train on the one-hot tabular fixture and compare every Q(s, a) with value
/// iteration.
pub fn tabular_oracle_check(config: &ExperimentConfig) -> TabularCheck {
    let game = load_game_file(&config.game).unwrap();
    let table = enumerate_optimal_value(&game, config.agent.gamma);
    let output = train(config, &game).unwrap();
    let agent = &output.replicates[0].agent;
    let mut sup: f64 = 0.0;
    let mut matches = true;
    for (s, state) in game.states.iter().enumerate() {
        if state.is_terminal() {
            continue;
        }
        let texts: Vec<&str> = state.actions.iter().map(|a| &*a.text).collect();
        let q = agent.q_values(&state.text, &texts).unwrap();
        for (a, &qa) in q.iter().enumerate() {
            sup = sup.max((qa - table.q[s][a]).abs());
        }
        matches &= Some(drrn::agents::argmax(&q)) == table.greedy_policy()[s];
    }
    TabularCheck {
        sup_norm: sup,
        policy_matches: matches,
    }
}

pub fn tabular_config() -> ExperimentConfig {
    let mut agent = AgentConfig::new(Arch::Drrn, 1, 8, 1.0);
    agent.gamma = 0.9;
    let mut c = ExperimentConfig::new(games_dir().join("tabular.json"), 1000, agent);
    c.eta = 0.01;
    c.epochs_per_block = 2;
    c.eval_episodes = 20;
    c.seeds = vec![1];
    c
}

/// Empirical selection frequencies of [`drrn::agents::select_action`].
pub fn softmax_frequencies(q: &[f64], alpha: f64, draws: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng::stream(seed, "softmax-draws");
    let mut counts = vec![0usize; q.len()];
    for _ in 0..draws {
        counts[drrn::agents::select_action(q, alpha, &mut rng)] += 1;
    }
    counts.into_iter().map(|c| c as f64 / draws as f64).collect()
}

fn random_net(kind: InteractionKind, tied: bool, rng: &mut Rng) -> (DrrnNet, usize, usize) {
    let layers = rng.gen_range(1..=2);
    let width = rng.gen_range(1..=8);
    let state_input = rng.gen_range(1..=8);
    let action_input = if tied { state_input } else { rng.gen_range(1..=8) };
    let shape = DrrnShape {
        state_input,
        action_input,
        state_widths: vec![width; layers],
        action_widths: vec![width; layers],
        interaction: kind,
        mlp_width: rng.gen_range(1..=8),
        tied,
    };
    let mut net = DrrnNet::random(&shape, rng).unwrap();
    for k in 0..flatten_params(&net).len() {
        *param_mut(&mut net, k) = rng.gen_range(-0.8..0.8);
    }
    (net, state_input, action_input)
}

/// Largest |Q_bilinear(B = I) − Q_inner| over `n` random networks and inputs.
pub fn bilinear_identity_gap(n: usize, seed: u64) -> f64 {
    let mut rng = rng::stream(seed, "bilinear-identity");
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (inner, ds, da) = random_net(InteractionKind::InnerProduct, false, &mut rng);
        let width = inner.state.output_dim();
        let mut bilinear = inner.clone();
        bilinear.interaction = Interaction::Bilinear {
            b: Dense {
                w: Matrix::identity(width),
                b: Vec::new(),
            },
        };
        let s = dense_input(ds, &mut rng);
        let a = dense_input(da, &mut rng);
        let q1 = inner.q_value(&s, &a).unwrap().0;
        let q2 = bilinear.q_value(&s, &a).unwrap().0;
        worst = worst.max((q1 - q2).abs());
    }
    worst
}

/// Largest entrywise gap between the tied gradient of the shared tower and
/// the sum of the state and action tower gradients of the equivalent untied
/// network, with the interaction gradients compared directly.
pub fn tied_gradient_gap(n: usize, seed: u64) -> f64 {
    let kinds = [
        InteractionKind::InnerProduct,
        InteractionKind::Bilinear,
        InteractionKind::ConcatMlp,
    ];
    let mut rng = rng::stream(seed, "tied-gradients");
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let (tied, ds, _) = random_net(kinds[i % kinds.len()], true, &mut rng);
        let untied = DrrnNet {
            state: tied.state.clone(),
            action: Some(tied.state.clone()),
            interaction: tied.interaction.clone(),
        };
        let s = dense_input(ds, &mut rng);
        let a = dense_input(ds, &mut rng);
        let (qt, tt) = tied.q_value(&s, &a).unwrap();
        let (qu, tu) = untied.q_value(&s, &a).unwrap();
        worst = worst.max((qt - qu).abs());
        let dq = rng.gen_range(-2.0..2.0);
        let gt = tied.backprop(&tt, dq).unwrap().flatten(&tied);
        let gu = untied.backprop(&tu, dq).unwrap().flatten(&untied);
        let tower = tied.state.parameter_count();
        let (us, rest) = gu.split_at(tower);
        let (ua, ui) = rest.split_at(tower);
        for k in 0..tower {
            worst = worst.max((gt[k] - (us[k] + ua[k])).abs());
        }
        for (t, u) in gt[tower..].iter().zip(ui) {
            worst = worst.max((t - u).abs());
        }
    }
    worst
}

const SPINNER: &str = r#"{
    "title": "spinner", "kind": "stochastic", "start": "hub", "max_steps": 100000,
    "states": [
        {"id": "hub", "text": "A brass wheel with three painted segments.", "actions": [
            {"text": "Spin the wheel.", "outcomes": [
                {"p": 0.2, "next": "hub"}, {"p": 0.3, "next": "red"}, {"p": 0.5, "next": "blue"}
            ]}
        ]},
        {"id": "red", "text": "The pointer rests on red.", "actions": [
            {"text": "Reset the wheel.", "next": "hub"},
            {"text": "Walk away.", "next": "gone"}
        ]},
        {"id": "blue", "text": "The pointer rests on blue.", "actions": [
            {"text": "Reset the wheel.", "next": "hub"}
        ]},
        {"id": "gone", "text": "You leave the fair.", "terminal_reward": 1}
    ]
}"#;

fn position(obs: &Observation, text: &str) -> usize {
    obs.action_texts.iter().position(|t| &**t == text).unwrap()
}

fn spin_or_reset(ep: &Episode, obs: &Observation) -> usize {
    position(obs, if ep.state() == 0 { "Spin the wheel." } else { "Reset the wheel." })
}

/// Spins the wheel `n` times; returns `(outcome, |count − np|, 3σ)` per outcome.
pub fn spinner_deviations(n: usize, seed: u64) -> Vec<(&'static str, f64, f64)> {
    let game = load_game(SPINNER.as_bytes()).unwrap();
    let (mut ep, mut obs) = game.reset(seed);
    let mut counts: HashMap<String, usize> = HashMap::new();
    let mut spins = 0;
    while spins < n {
        let spinning = ep.state() == 0;
        let (_, next) = ep.step(spin_or_reset(&ep, &obs)).unwrap();
        if spinning {
            spins += 1;
            *counts.entry(game.states[ep.state()].id.clone()).or_default() += 1;
        }
        obs = next;
    }
    [("hub", 0.2), ("red", 0.3), ("blue", 0.5)]
        .into_iter()
        .map(|(id, p)| {
            let k = counts.get(id).copied().unwrap_or(0) as f64;
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            (id, (k - n as f64 * p).abs(), 3.0 * sigma)
        })
        .collect()
}

/// Steps taken before the engine ends a never-terminating episode with the
/// given cap. Panics if the capped episode looks terminal or accepts more steps.
pub fn capped_episode_steps(cap: usize) -> usize {
    let src = SPINNER.replace("100000", &cap.to_string());
    let game = load_game(src.as_bytes()).unwrap();
    let (mut ep, mut obs) = game.reset(3);
    let mut steps = 0;
    let mut last_reward = 0.0;
    while !obs.done {
        let (r, next) = ep.step(spin_or_reset(&ep, &obs)).unwrap();
        last_reward = r;
        obs = next;
        steps += 1;
    }
    assert!(!obs.terminal);
    assert_eq!(last_reward, game.step_penalty);
    assert!(ep.step(0).is_err());
    steps
}
