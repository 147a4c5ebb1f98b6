use std::collections::{HashMap, VecDeque};
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use super::{
    ActionDef, GameKind, GameSpec, GameState, Outcome, DEFAULT_MAX_STEPS, DEFAULT_STEP_PENALTY,
};
use crate::error::{Error, Result};

const PROBABILITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGame {
    title: String,
    #[serde(default)]
    version: Option<String>,
    kind: GameKind,
    start: String,
    #[serde(default)]
    step_penalty: Option<f64>,
    #[serde(default)]
    max_steps: Option<i64>,
    #[serde(default)]
    max_actions: Option<usize>,
    states: Vec<RawState>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    id: String,
    text: String,
    #[serde(default)]
    terminal_reward: Option<f64>,
    #[serde(default)]
    actions: Vec<RawAction>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAction {
    text: String,
    #[serde(default)]
    hypertext: bool,
    #[serde(default)]
    next: Option<String>,
    #[serde(default)]
    outcomes: Option<Vec<RawOutcome>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutcome {
    p: f64,
    next: String,
}

/// Parse and validate a game file. All invariant violations are collected
/// into a single [`Error::InvalidGame`].
pub fn load_game(mut source: impl Read) -> Result<GameSpec> {
    let mut buf = String::new();
    source.read_to_string(&mut buf).map_err(|e| Error::Parse {
        line: 0,
        column: 0,
        message: e.to_string(),
    })?;
    let raw: RawGame = serde_json::from_str(&buf).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    build(raw)
}

pub fn load_game_file(path: impl AsRef<Path>) -> Result<GameSpec> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    load_game(std::io::BufReader::new(file))
}

fn format_sum(sum: f64) -> String {
    let s = format!("{sum:.9}");
    let s = s.trim_end_matches('0');
    s.trim_end_matches('.').to_string()
}

fn build(raw: RawGame) -> Result<GameSpec> {
    let mut violations = Vec::new();

    let mut index = HashMap::new();
    for (i, state) in raw.states.iter().enumerate() {
        if index.insert(state.id.clone(), i).is_some() {
            violations.push(format!("duplicate state id '{}'", state.id));
        }
    }

    let start = index.get(&raw.start).copied();
    if start.is_none() {
        violations.push(format!("start state '{}' does not exist", raw.start));
    }

    let step_penalty = raw.step_penalty.unwrap_or(DEFAULT_STEP_PENALTY);
    if !step_penalty.is_finite() {
        violations.push("step_penalty must be finite".to_string());
    }
    let max_steps = match raw.max_steps {
        None => DEFAULT_MAX_STEPS,
        Some(n) if n >= 1 => n as usize,
        Some(n) => {
            violations.push(format!("max_steps must be at least 1, got {n}"));
            1
        }
    };

    let mut states = Vec::with_capacity(raw.states.len());
    for raw_state in &raw.states {
        let sid = &raw_state.id;
        match (raw_state.terminal_reward, raw_state.actions.is_empty()) {
            (Some(_), false) => {
                violations.push(format!("terminal state '{sid}' must not offer actions"))
            }
            (None, true) => violations.push(format!(
                "non-terminal state '{sid}' must offer at least one action"
            )),
            _ => {}
        }
        if let Some(r) = raw_state.terminal_reward {
            if !r.is_finite() {
                violations.push(format!("state '{sid}': terminal_reward must be finite"));
            }
        }
        let mut actions = Vec::with_capacity(raw_state.actions.len());
        for (ai, raw_action) in raw_state.actions.iter().enumerate() {
            let at = format!("state '{sid}' action {ai}");
            if raw_action.hypertext && !raw_state.text.contains(raw_action.text.as_str()) {
                violations.push(format!(
                    "{at}: hypertext '{}' is not a substring of the state text",
                    raw_action.text
                ));
            }
            let raw_outcomes: Vec<(f64, &str)> = match (&raw_action.next, &raw_action.outcomes) {
                (Some(next), None) => vec![(1.0, next.as_str())],
                (None, Some(list)) => list.iter().map(|o| (o.p, o.next.as_str())).collect(),
                (Some(_), Some(_)) => {
                    violations.push(format!("{at}: give either `next` or `outcomes`, not both"));
                    Vec::new()
                }
                (None, None) => {
                    violations.push(format!("{at}: missing `next` or `outcomes`"));
                    Vec::new()
                }
            };
            if raw_outcomes.is_empty() && (raw_action.next.is_some() || raw_action.outcomes.is_some()) {
                violations.push(format!("{at}: empty outcome list"));
            }
            let mut outcomes = Vec::with_capacity(raw_outcomes.len());
            let mut sum = 0.0;
            for (p, next) in &raw_outcomes {
                if !(*p > 0.0 && *p <= 1.0) {
                    violations.push(format!("{at}: probability {p} outside (0, 1]"));
                }
                sum += p;
                match index.get(*next) {
                    Some(&target) => outcomes.push(Outcome {
                        probability: *p,
                        next: target,
                    }),
                    None => violations.push(format!("{at}: target state '{next}' does not exist")),
                }
            }
            if !raw_outcomes.is_empty() && (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
                violations.push(format!("{at}: distribution sums to {}", format_sum(sum)));
            }
            if raw.kind == GameKind::Deterministic && raw_outcomes.len() > 1 {
                violations.push(format!(
                    "{at}: deterministic game actions must have a single outcome"
                ));
            }
            actions.push(ActionDef {
                text: Arc::from(raw_action.text.as_str()),
                hypertext: raw_action.hypertext,
                outcomes,
            });
        }
        states.push(GameState {
            id: sid.clone(),
            text: Arc::from(raw_state.text.as_str()),
            actions,
            terminal_reward: raw_state.terminal_reward,
        });
    }

    let widest = states.iter().map(|s| s.actions.len()).max().unwrap_or(0);
    let max_actions = match raw.max_actions {
        Some(declared) => {
            for s in &states {
                if s.actions.len() > declared {
                    violations.push(format!(
                        "state '{}' offers {} actions, more than the declared maximum {declared}",
                        s.id,
                        s.actions.len()
                    ));
                }
            }
            declared
        }
        None => widest,
    };

    if let Some(start) = start {
        if violations.is_empty() && !terminal_reachable(&states, start) {
            violations.push(format!(
                "no terminal state is reachable from start '{}'",
                raw.start
            ));
        }
    }

    if !violations.is_empty() {
        return Err(Error::InvalidGame(violations));
    }

    Ok(GameSpec {
        title: raw.title,
        version: raw.version,
        kind: raw.kind,
        start: start.expect("validated"),
        step_penalty,
        max_steps,
        max_actions,
        states,
        index,
    })
}

fn terminal_reachable(states: &[GameState], start: usize) -> bool {
    let mut seen = vec![false; states.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(s) = queue.pop_front() {
        if states[s].is_terminal() {
            return true;
        }
        for action in &states[s].actions {
            for o in &action.outcomes {
                if !seen[o.next] {
                    seen[o.next] = true;
                    queue.push_back(o.next);
                }
            }
        }
    }
    false
}
