//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails. Pass criterion numbers as arguments to run a subset.

mod common;

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use drrn::analysis::{game_pairs, paraphrase_eval, q_correlation, ParaphraseMap};
use drrn::game::{enumerate_optimal_value, expected_final_reward, load_game_file, GameSpec};
use drrn::harness::{evaluate, train, ExperimentConfig, TrainOutput};
use drrn::rng;

const GRADIENT_TOL: f64 = 1e-5;
const GRADIENT_INSTANCES: usize = 100;
const SUP_NORM_TOL: f64 = 0.05;
const SOFTMAX_TOL: f64 = 0.01;
const SOFTMAX_DRAWS: usize = 100_000;
const CONVERGENCE_FRACTION: f64 = 0.95;
const SYNONYM_PR2: f64 = 0.8;
const SYNONYM_REWARD_FRACTION: f64 = 0.85;
const IDENTITY_TOL: f64 = 1e-12;
const ENGINE_SAMPLES: usize = 10_000;
const PARAPHRASE_EPISODES: usize = 200;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gradients() -> Outcome {
    let variants = common::gradient_variants().len();
    let n = GRADIENT_INSTANCES.div_ceil(variants) * variants;
    let checks = common::gradient_suite(n, 101);
    let worst = checks.iter().max_by(|a, b| a.max_rel_error.total_cmp(&b.max_rel_error)).unwrap();
    check(
        worst.max_rel_error < GRADIENT_TOL,
        format!("{n} instances, worst {:.2e} ({})", worst.max_rel_error, worst.label),
    )
}

fn tabular() -> Outcome {
    let c = common::tabular_oracle_check(&common::tabular_config());
    check(
        c.sup_norm < SUP_NORM_TOL && c.policy_matches,
        format!("sup-norm {:.4}, greedy policy matches: {}", c.sup_norm, c.policy_matches),
    )
}

fn softmax() -> Outcome {
    let cases: [(&[f64], f64, &[f64]); 3] = [
        (&[1.0, 0.0], 1.0, &[0.7311, 0.2689]),
        (&[2.5, 2.5], 1.0, &[0.5, 0.5]),
        (&[-4.0, -4.0, -4.0, -4.0], 0.2, &[0.25, 0.25, 0.25, 0.25]),
    ];
    let mut worst = 0.0f64;
    for (i, (q, alpha, expected)) in cases.iter().enumerate() {
        let f = common::softmax_frequencies(q, *alpha, SOFTMAX_DRAWS, 40 + i as u64);
        for (a, b) in f.iter().zip(*expected) {
            worst = worst.max((a - b).abs());
        }
    }
    check(worst <= SOFTMAX_TOL, format!("max deviation {worst:.4} over {SOFTMAX_DRAWS} draws"))
}

fn oracle_optimum(game: &GameSpec) -> f64 {
    let policy = enumerate_optimal_value(game, 0.9).greedy_policy();
    expected_final_reward(game, |s| {
        let mut p = vec![0.0; game.states[s].actions.len()];
        if let Some(a) = policy[s] {
            p[a] = 1.0;
        }
        p
    })
}

fn load_config(name: &str) -> (ExperimentConfig, GameSpec) {
    let config = ExperimentConfig::load(common::configs_dir().join(name)).unwrap();
    let game = load_game_file(&config.game).unwrap();
    (config, game)
}

fn convergence() -> Outcome {
    let (config, game) = load_config("lighthouse.toml");
    let optimum = oracle_optimum(&game);
    let out = train(&config, &game).map_err(|e| e.to_string())?;
    let last = out.curve.last();
    check(
        last.episodes <= 2000 && last.mean >= CONVERGENCE_FRACTION * optimum,
        format!("mean {:.2} after {} episodes, optimum {optimum:.2}", last.mean, last.episodes),
    )
}

struct CourierRuns {
    drrn2: Option<TrainOutput>,
}

fn ordering(runs: &mut CourierRuns) -> Outcome {
    let mut finals = Vec::new();
    for name in ["drrn2", "drrn1", "pa1", "pa2", "ma1", "ma2", "linear"] {
        let (config, game) = load_config(&format!("courier_{name}.toml"));
        let out = train(&config, &game).map_err(|e| e.to_string())?;
        let last = out.curve.last();
        finals.push((name, last.mean, last.std));
        if name == "drrn2" {
            runs.drrn2 = Some(out);
        }
    }
    let (d2, d1) = (finals[0].1, finals[1].1);
    let best = finals[2..].iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    let summary: Vec<String> = finals.iter().map(|(n, m, s)| format!("{n} {m:.2}±{s:.2}")).collect();
    check(d2 >= d1 && d1 > best.1 + best.2, summary.join(", "))
}

fn paraphrase(runs: &mut CourierRuns) -> Outcome {
    if runs.drrn2.is_none() {
        let (config, game) = load_config("courier_drrn2.toml");
        runs.drrn2 = Some(train(&config, &game).map_err(|e| e.to_string())?);
    }
    let out = runs.drrn2.as_ref().unwrap();
    let game = load_game_file(common::games_dir().join("courier.json")).unwrap();
    let read = |name: &str| ParaphraseMap::read_file(common::paraphrases_dir().join(name), false).unwrap();
    let invariant = [ParaphraseMap::identity(&game), read("courier_reordered.tsv")];
    let synonyms = read("courier_synonyms.tsv");

    let mut exact = true;
    let mut min_pr2 = f64::INFINITY;
    let (mut original, mut paraphrased) = (0.0, 0.0);
    for r in &out.replicates {
        let stream = || rng::stream(r.seed, "acceptance/paraphrase");
        let base = evaluate(&r.agent, &game, PARAPHRASE_EPISODES, &mut stream()).map_err(|e| e.to_string())?;
        for map in &invariant {
            let p = paraphrase_eval(&r.agent, &game, map, PARAPHRASE_EPISODES, &mut stream())
                .map_err(|e| e.to_string())?;
            let report = q_correlation(&r.agent, &game_pairs(&game, map)).map_err(|e| e.to_string())?;
            exact &= p.mean.to_bits() == base.mean.to_bits() && p.std.to_bits() == base.std.to_bits();
            exact &= report.pr2 == 1.0;
        }
        let p = paraphrase_eval(&r.agent, &game, &synonyms, PARAPHRASE_EPISODES, &mut stream())
            .map_err(|e| e.to_string())?;
        let report = q_correlation(&r.agent, &game_pairs(&game, &synonyms)).map_err(|e| e.to_string())?;
        min_pr2 = min_pr2.min(report.pr2);
        original += base.mean;
        paraphrased += p.mean;
    }
    let k = out.replicates.len() as f64;
    let (original, paraphrased) = (original / k, paraphrased / k);
    check(
        exact && min_pr2 >= SYNONYM_PR2 && paraphrased >= SYNONYM_REWARD_FRACTION * original,
        format!(
            "invariant maps exact: {exact}; synonyms min pR² {min_pr2:.3}, reward {paraphrased:.2} vs {original:.2}"
        ),
    )
}

fn identities() -> Outcome {
    let bilinear = common::bilinear_identity_gap(1000, 71);
    let tied = common::tied_gradient_gap(300, 72);
    check(
        bilinear < IDENTITY_TOL && tied < IDENTITY_TOL,
        format!("bilinear gap {bilinear:.1e}, tied gap {tied:.1e}"),
    )
}

fn cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_drrn")).args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv" || x == "ckpt"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn run_subcommands(root: &Path, work: &Path) -> Result<(), String> {
    let s = |p: &Path| p.to_string_lossy().into_owned();
    let config = s(&common::configs_dir().join("contrastive.toml"));
    let game = s(&common::games_dir().join("contrastive.json"));
    let train_dir = work.join("train");
    cli(&["train", "--config", &config, "--out", &s(&train_dir), "--seed", "7"])?;
    let ckpt = s(&train_dir.join("seed_1.ckpt"));
    let state = s(&root.join("state.txt"));
    let actions = s(&root.join("actions.txt"));
    let map = s(&root.join("map.tsv"));
    cli(&["eval", "--checkpoint", &ckpt, "--game", &game, "--episodes", "50", "--seed", "3", "--out", &s(&work.join("eval"))])?;
    cli(&[
        "paraphrase-eval", "--checkpoint", &ckpt, "--game", &game, "--map", &map,
        "--episodes", "50", "--seed", "3", "--out", &s(&work.join("para")),
    ])?;
    let snaps: Vec<String> = [200, 400, 600].iter().map(|e| s(&train_dir.join(format!("seed_1_ep{e}.ckpt")))).collect();
    let mut pca = vec!["pca", "--checkpoint"];
    pca.extend(snaps.iter().map(String::as_str));
    let pca_out = s(&work.join("pca"));
    pca.extend(["--state-file", &state, "--actions-file", &actions, "--out", &pca_out]);
    cli(&pca)?;
    cli(&["qtable", "--checkpoint", &ckpt, "--state-file", &state, "--actions-file", &actions, "--out", &s(&work.join("qtable"))])
}

fn determinism() -> Outcome {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let game = load_game_file(common::games_dir().join("contrastive.json")).unwrap();
    let start = &game.states[game.start];
    std::fs::write(root.path().join("state.txt"), &*start.text).unwrap();
    let actions: Vec<&str> = start.actions.iter().map(|a| &*a.text).collect();
    std::fs::write(root.path().join("actions.txt"), actions.join("\n")).unwrap();
    std::fs::write(root.path().join("map.tsv"), "Sit on a stump and wait.\tWait on a stump.\nRun blindly between the trees.\tRun between the trees.\n").unwrap();

    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let work = root.path().join(run);
        run_subcommands(root.path(), &work)?;
        let mut files = Vec::new();
        for sub in ["train", "eval", "para", "pca", "qtable"] {
            for (name, bytes) in csv_files(&work.join(sub)) {
                files.push((format!("{sub}/{name}"), bytes));
            }
        }
        outputs.push(files);
    }
    let differing: Vec<&str> = outputs[0]
        .iter()
        .zip(&outputs[1])
        .filter(|(a, b)| a != b)
        .map(|(a, _)| a.0.as_str())
        .collect();
    check(
        outputs[0].len() == outputs[1].len() && differing.is_empty() && !outputs[0].is_empty(),
        format!("{} files compared, differing: {differing:?}", outputs[0].len()),
    )
}

fn engine() -> Outcome {
    let deviations = common::spinner_deviations(ENGINE_SAMPLES, 909);
    let within = deviations.iter().all(|(_, k, bound)| k <= bound);
    let caps: Vec<(usize, usize)> = [1, 13, 250].iter().map(|&c| (c, common::capped_episode_steps(c))).collect();
    let capped = caps.iter().all(|(c, s)| c == s);
    let worst = deviations.iter().map(|(_, k, b)| k / b).fold(0.0, f64::max);
    check(
        within && capped,
        format!("worst deviation {worst:.2} of 3σ over {ENGINE_SAMPLES} spins; cap steps {caps:?}"),
    )
}

fn main() -> ExitCode {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let limits = [(1, 10), (2, 30), (4, 300)];
    let mut runs = CourierRuns { drrn2: None };
    let mut failed = 0;
    for n in 1..=9usize {
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let outcome = match n {
            1 => gradients(),
            2 => tabular(),
            3 => softmax(),
            4 => convergence(),
            5 => ordering(&mut runs),
            6 => paraphrase(&mut runs),
            7 => identities(),
            8 => determinism(),
            _ => engine(),
        };
        let elapsed = t.elapsed();
        let outcome = match (outcome, limits.iter().find(|l| l.0 == n)) {
            (Ok(d), Some(&(_, secs))) if elapsed > Duration::from_secs(secs) => {
                Err(format!("{d}; exceeded {secs} s limit"))
            }
            (o, _) => o,
        };
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {n}: {tag} ({detail}) [{:.1} s]", elapsed.as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
