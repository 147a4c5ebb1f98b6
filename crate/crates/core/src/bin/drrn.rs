use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use drrn::agents::Agent;
use drrn::analysis::{
    capture_embeddings, game_pairs, paraphrase_eval, project_embeddings, q_correlation, q_table,
    q_table_csv, ParaphraseMap,
};
use drrn::game::{load_game_file, GameSpec};
use drrn::harness::{evaluate, train, write_outputs, ExperimentConfig};
use drrn::{rng, Error};

#[derive(Parser)]
#[command(name = "drrn", version, about = "Train and inspect Q-learning agents on text games")]
struct Cli {
    /// Print progress to standard error.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a game file and report every violated invariant.
    Validate {
        #[arg(long, value_parser = existing)]
        game: PathBuf,
    },
    /// Run an experiment config and write curve.csv, final.csv and checkpoints.
    Train {
        #[arg(long, value_parser = existing)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Master seed, overriding the config's `master_seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate a checkpoint with softmax action selection.
    Eval {
        #[arg(long, value_parser = existing)]
        checkpoint: PathBuf,
        #[arg(long, value_parser = existing)]
        game: PathBuf,
        #[arg(long, default_value_t = 200)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for eval.csv; the summary is printed either way.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate with paraphrased action texts and correlate Q-values.
    ParaphraseEval {
        #[arg(long, value_parser = existing)]
        checkpoint: PathBuf,
        #[arg(long, value_parser = existing)]
        game: PathBuf,
        /// Tab-separated `original<TAB>paraphrase` lines.
        #[arg(long, value_parser = existing)]
        map: PathBuf,
        /// Accept a map whose paraphrases all equal their originals.
        #[arg(long)]
        allow_identity: bool,
        #[arg(long, default_value_t = 200)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Project state and action embeddings from one or more checkpoints onto shared axes.
    Pca {
        /// Checkpoints in order; a `_ep<N>` file-name suffix sets the checkpoint label.
        #[arg(long, required = true, num_args = 1.., value_parser = existing)]
        checkpoint: Vec<PathBuf>,
        #[arg(long, value_parser = existing)]
        state_file: PathBuf,
        /// One action text per line.
        #[arg(long, value_parser = existing)]
        actions_file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Q-values of arbitrary candidate actions for one state.
    Qtable {
        #[arg(long, value_parser = existing)]
        checkpoint: PathBuf,
        #[arg(long, value_parser = existing)]
        state_file: PathBuf,
        /// One action text per line.
        #[arg(long, value_parser = existing)]
        actions_file: PathBuf,
        /// Directory for qtable.csv; printed to standard output otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Play a game interactively, choosing actions by number on standard input.
    Play {
        #[arg(long, value_parser = existing)]
        game: PathBuf,
        /// Annotate each action with this agent's Q-value.
        #[arg(long, value_parser = existing)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn existing(s: &str) -> Result<PathBuf, String> {
    let p = PathBuf::from(s);
    if p.exists() {
        Ok(p)
    } else {
        Err(format!("no such file: {s}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> drrn::Result<()> {
    let verbose = cli.verbose;
    match cli.command {
        Command::Validate { game } => {
            let g = load_game_file(&game)?;
            println!(
                "ok: '{}' with {} states, {} terminal, at most {} actions",
                g.title,
                g.states.len(),
                g.terminal_count(),
                g.max_actions
            );
        }
        Command::Train { config, out, seed } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            let game = load_game_file(&cfg.game)?;
            if verbose {
                eprintln!(
                    "training {} on '{}' for {} episodes, {} seeds",
                    cfg.agent.arch,
                    game.title,
                    cfg.episodes,
                    cfg.seeds.len()
                );
            }
            let output = train(&cfg, &game)?;
            write_outputs(&output, &out)?;
            let last = output.curve.last();
            println!("episodes={} mean={} std={}", last.episodes, last.mean, last.std);
        }
        Command::Eval {
            checkpoint,
            game,
            episodes,
            seed,
            out,
        } => {
            let agent = Agent::load_file(&checkpoint)?;
            let game = load_game_file(&game)?;
            let mut r = rng::stream(seed, "eval");
            let s = evaluate(&agent, &game, episodes, &mut r)?;
            let csv = format!("episodes,mean,std\n{episodes},{},{}\n", s.mean, s.std);
            if let Some(dir) = out {
                write_in(&dir, "eval.csv", &csv)?;
            }
            println!("mean={} std={}", s.mean, s.std);
        }
        Command::ParaphraseEval {
            checkpoint,
            game,
            map,
            allow_identity,
            episodes,
            seed,
            out,
        } => {
            let agent = Agent::load_file(&checkpoint)?;
            let game = load_game_file(&game)?;
            let map = ParaphraseMap::read_file(&map, allow_identity)?;
            let base = evaluate(&agent, &game, episodes, &mut rng::stream(seed, "eval"))?;
            let para = paraphrase_eval(&agent, &game, &map, episodes, &mut rng::stream(seed, "eval"))?;
            let report = q_correlation(&agent, &game_pairs(&game, &map))?;
            let summary = format!(
                "condition,mean,std\noriginal,{},{}\nparaphrased,{},{}\n",
                base.mean, base.std, para.mean, para.std
            );
            write_in(&out, "paraphrase.csv", &summary)?;
            write_in(&out, "correlation.csv", &report.to_csv())?;
            println!(
                "original={} paraphrased={} pr2={} n={}",
                base.mean, para.mean, report.pr2, report.n
            );
        }
        Command::Pca {
            checkpoint,
            state_file,
            actions_file,
            out,
        } => {
            let state = read_text(&state_file)?;
            let actions = read_lines(&actions_file)?;
            let agents = checkpoint
                .iter()
                .map(Agent::load_file)
                .collect::<drrn::Result<Vec<_>>>()?;
            let labelled: Vec<(usize, &Agent)> = checkpoint
                .iter()
                .zip(&agents)
                .enumerate()
                .map(|(i, (p, a))| (episode_label(p).unwrap_or(i), a))
                .collect();
            let points = capture_embeddings(&labelled, &state, &actions)?;
            let (pca, csv) = project_embeddings(&points)?;
            write_in(&out, "pca.csv", &csv)?;
            println!(
                "explained variance: {}",
                pca.explained_ratio
                    .iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            );
        }
        Command::Qtable {
            checkpoint,
            state_file,
            actions_file,
            out,
        } => {
            let agent = Agent::load_file(&checkpoint)?;
            let state = read_text(&state_file)?;
            let actions = read_lines(&actions_file)?;
            let rows = q_table(&agent, &state, &actions)?;
            let csv = q_table_csv(&rows)?;
            match out {
                Some(dir) => write_in(&dir, "qtable.csv", &csv)?,
                None => print!("{csv}"),
            }
        }
        Command::Play {
            game,
            checkpoint,
            seed,
        } => {
            let game = load_game_file(&game)?;
            let agent = checkpoint.as_deref().map(Agent::load_file).transpose()?;
            play(&game, agent.as_ref(), seed)?;
        }
    }
    Ok(())
}

fn play(game: &GameSpec, agent: Option<&Agent>, seed: u64) -> drrn::Result<()> {
    let stdin = std::io::stdin();
    let mut lines = stdin.lock().lines();
    let mut stdout = std::io::stdout().lock();
    let (mut episode, mut obs) = game.reset(rng::derive_seed(seed, "play"));
    let mut total = 0.0;
    let io_err = |e| Error::Io {
        path: PathBuf::from("<stdio>"),
        source: e,
    };
    while !obs.done {
        writeln!(stdout, "\n{}", obs.state_text).map_err(io_err)?;
        let q = match agent {
            Some(a) => Some(a.q_values(&obs.state_text, &obs.action_texts)?),
            None => None,
        };
        for (i, text) in obs.action_texts.iter().enumerate() {
            match &q {
                Some(q) => writeln!(stdout, "  {}. {text}  [q={:.3}]", i + 1, q[i]),
                None => writeln!(stdout, "  {}. {text}", i + 1),
            }
            .map_err(io_err)?;
        }
        write!(stdout, "> ").map_err(io_err)?;
        stdout.flush().map_err(io_err)?;
        let Some(line) = lines.next() else {
            return Ok(());
        };
        let line = line.map_err(io_err)?;
        let choice = match line.trim().parse::<usize>() {
            Ok(n) if (1..=obs.action_texts.len()).contains(&n) => n - 1,
            _ => {
                writeln!(stdout, "enter a number from 1 to {}", obs.action_texts.len()).map_err(io_err)?;
                continue;
            }
        };
        let (reward, next) = episode.step(choice)?;
        total += reward;
        writeln!(stdout, "reward {reward:+.2}").map_err(io_err)?;
        obs = next;
    }
    writeln!(stdout, "\n{}\nepisode over after {} steps, total reward {total:.2}", obs.state_text, obs.step_index)
        .map_err(io_err)?;
    Ok(())
}

fn episode_label(path: &Path) -> Option<usize> {
    let stem = path.file_stem()?.to_str()?;
    stem.rsplit_once("_ep")?.1.parse().ok()
}

fn read_text(path: &Path) -> drrn::Result<String> {
    std::fs::read_to_string(path)
        .map(|s| s.trim().to_string())
        .map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
}

fn read_lines(path: &Path) -> drrn::Result<Vec<String>> {
    Ok(read_text(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

fn write_in(dir: &Path, name: &str, body: &str) -> drrn::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| Error::Io { path, source: e })
}
