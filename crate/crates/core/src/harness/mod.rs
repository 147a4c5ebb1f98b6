//! The generate / replay / evaluate training loop and its outputs.

mod config;
mod replay;
mod run;

use std::path::Path;

pub use config::ExperimentConfig;
pub use replay::{ReplayMemory, Transition};
pub use run::{
    evaluate, evaluate_with, replicate_label, run_episode, run_episode_with, train,
    train_replicate, CurvePoint, EpisodeOutcome, LearningCurve, ReplicateRun, Summary, TrainOutput,
};

use crate::error::{Error, Result};

/// Write `curve.csv`, `final.csv` and one checkpoint per replicate (plus any
/// snapshots) into `dir`.
pub fn write_outputs(output: &TrainOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |name: &str, body: &str| {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| Error::io(p, e))
    };
    write("curve.csv", &output.curve.to_csv())?;
    write("final.csv", &output.final_csv())?;
    for r in &output.replicates {
        r.agent.save_file(dir.join(format!("seed_{}.ckpt", r.seed)))?;
        for (episodes, agent) in &r.snapshots {
            agent.save_file(dir.join(format!("seed_{}_ep{}.ckpt", r.seed, episodes)))?;
        }
    }
    Ok(())
}
