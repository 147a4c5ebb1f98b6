use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::replay::{ReplayMemory, Transition};
use crate::agents::Agent;
use crate::error::Result;
use crate::game::GameSpec;
use crate::rng::{self, Rng};

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeOutcome {
    /// Undiscounted sum of all rewards.
    pub total_reward: f64,
    /// Reward of the last transition: the ending's reward, or the step
    /// penalty when the cap was hit.
    pub final_reward: f64,
    pub steps: usize,
    pub transitions: Vec<Transition>,
}

/// Play one episode with softmax selection. The episode's own stream seed is
/// the first draw from `rng`; action choices use `rng` afterwards.
pub fn run_episode(agent: &Agent, game: &GameSpec, rng: &mut Rng, record: bool) -> Result<EpisodeOutcome> {
    run_episode_with(agent, game, rng, record, |t| t.clone())
}

/// As [`run_episode`], with every presented action text passed through
/// `present` before the agent sees it. Game dynamics are untouched.
pub fn run_episode_with(
    agent: &Agent,
    game: &GameSpec,
    rng: &mut Rng,
    record: bool,
    present: impl Fn(&Arc<str>) -> Arc<str>,
) -> Result<EpisodeOutcome> {
    let (mut episode, mut obs) = game.reset(rng.gen());
    let mut transitions = Vec::new();
    let mut total = 0.0;
    let mut last = 0.0;
    let mut shown: Vec<Arc<str>> = obs.action_texts.iter().map(&present).collect();
    while !obs.done {
        let q = agent.q_values(&obs.state_text, &shown)?;
        let choice = agent.select(&q, rng);
        let (reward, next) = episode.step(choice)?;
        total += reward;
        last = reward;
        let next_shown: Vec<Arc<str>> = next.action_texts.iter().map(&present).collect();
        if record {
            transitions.push(Transition {
                state: obs.state_text.clone(),
                actions: std::mem::take(&mut shown),
                taken: choice,
                reward,
                next_state: next.state_text.clone(),
                next_actions: if next.terminal { Vec::new() } else { next_shown.clone() },
                terminal: next.terminal,
            });
        }
        shown = next_shown;
        obs = next;
    }
    Ok(EpisodeOutcome {
        total_reward: total,
        final_reward: last,
        steps: episode.step_index(),
        transitions,
    })
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Summary {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Summary { mean, std }
    }
}

/// Play `episodes` episodes without learning; summarize the final rewards.
pub fn evaluate(agent: &Agent, game: &GameSpec, episodes: usize, rng: &mut Rng) -> Result<Summary> {
    evaluate_with(agent, game, episodes, rng, |t| t.clone())
}

pub fn evaluate_with(
    agent: &Agent,
    game: &GameSpec,
    episodes: usize,
    rng: &mut Rng,
    present: impl Fn(&Arc<str>) -> Arc<str>,
) -> Result<Summary> {
    let finals = (0..episodes)
        .map(|_| Ok(run_episode_with(agent, game, rng, false, &present)?.final_reward))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Summary::of(&finals))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    /// Training episodes seen so far.
    pub episodes: usize,
    pub mean: f64,
    pub std: f64,
}

/// Evaluation checkpoints aggregated over replicates: the mean over seeds
/// of each seed's mean final reward, and the spread of those means.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningCurve {
    pub points: Vec<CurvePoint>,
}

impl LearningCurve {
    pub fn last(&self) -> CurvePoint {
        *self.points.last().expect("a curve always has its untrained point")
    }

    /// First checkpoint whose mean reaches `threshold`.
    pub fn episodes_to_reach(&self, threshold: f64) -> Option<usize> {
        self.points.iter().find(|p| p.mean >= threshold).map(|p| p.episodes)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("episodes,mean,std\n");
        for p in &self.points {
            s.push_str(&format!("{},{},{}\n", p.episodes, p.mean, p.std));
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct ReplicateRun {
    pub seed: u64,
    pub agent: Agent,
    /// Per-checkpoint evaluation of this replicate.
    pub points: Vec<CurvePoint>,
    /// `(episodes, agent)` copies taken at the configured snapshot counts.
    pub snapshots: Vec<(usize, Agent)>,
}

impl ReplicateRun {
    pub fn final_eval(&self) -> CurvePoint {
        *self.points.last().unwrap()
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub replicates: Vec<ReplicateRun>,
    pub curve: LearningCurve,
}

impl TrainOutput {
    pub fn final_csv(&self) -> String {
        let mut s = String::from("seed,mean,std\n");
        for r in &self.replicates {
            let p = r.final_eval();
            s.push_str(&format!("{},{},{}\n", r.seed, p.mean, p.std));
        }
        s
    }
}

pub fn replicate_label(seed: u64, stream: &str) -> String {
    format!("replicate/{seed}/{stream}")
}

/// Generate-then-replay training for every replicate, in parallel across
/// replicates. Each block plays `episodes_per_block` episodes into replay
/// memory, then makes `epochs_per_block` shuffled passes over the memory in
/// mini-batches, then evaluates.
pub fn train(config: &ExperimentConfig, game: &GameSpec) -> Result<TrainOutput> {
    config.validate()?;
    let replicates = config
        .seeds
        .par_iter()
        .map(|&seed| train_replicate(config, game, seed))
        .collect::<Result<Vec<_>>>()?;
    let n_points = replicates[0].points.len();
    let points = (0..n_points)
        .map(|i| {
            let means: Vec<f64> = replicates.iter().map(|r| r.points[i].mean).collect();
            let s = Summary::of(&means);
            CurvePoint {
                episodes: replicates[0].points[i].episodes,
                mean: s.mean,
                std: s.std,
            }
        })
        .collect();
    Ok(TrainOutput {
        replicates,
        curve: LearningCurve { points },
    })
}

pub fn train_replicate(config: &ExperimentConfig, game: &GameSpec, seed: u64) -> Result<ReplicateRun> {
    let master = config.master_seed;
    let mut init_rng = rng::stream(master, &replicate_label(seed, "init"));
    let mut gen_rng = rng::stream(master, &replicate_label(seed, "generate"));
    let mut replay_rng = rng::stream(master, &replicate_label(seed, "replay"));
    let mut agent = Agent::new(config.agent.clone(), game, &mut init_rng)?;
    let mut memory = ReplayMemory::new(config.replay_capacity);

    let eval_at = |agent: &Agent, block: usize, episodes: usize| -> Result<CurvePoint> {
        let mut rng = rng::stream(master, &replicate_label(seed, &format!("eval/{block}")));
        let s = evaluate(agent, game, config.eval_episodes, &mut rng)?;
        Ok(CurvePoint {
            episodes,
            mean: s.mean,
            std: s.std,
        })
    };

    let mut points = vec![eval_at(&agent, 0, 0)?];
    let mut snapshots = Vec::new();
    let mut pending: Vec<usize> = config.snapshot_episodes.clone();
    pending.sort_unstable();
    pending.dedup();
    pending.reverse();

    let mut seen = 0;
    let mut block = 0;
    while seen < config.episodes {
        let n = config.episodes_per_block.min(config.episodes - seen);
        for _ in 0..n {
            let outcome = run_episode(&agent, game, &mut gen_rng, true)?;
            memory.extend(outcome.transitions);
        }
        seen += n;
        block += 1;
        if config.learn {
            let mut order: Vec<usize> = (0..memory.len()).collect();
            for _ in 0..config.epochs_per_block {
                order.shuffle(&mut replay_rng);
                for chunk in order.chunks(config.batch_size) {
                    agent.learn(chunk.iter().map(|&i| memory.get(i).unwrap()), config.eta)?;
                }
            }
        }
        points.push(eval_at(&agent, block, seen)?);
        while pending.last().is_some_and(|&e| e <= seen) {
            let e = pending.pop().unwrap();
            snapshots.push((e, agent.clone()));
        }
    }
    Ok(ReplicateRun {
        seed,
        agent,
        points,
        snapshots,
    })
}
