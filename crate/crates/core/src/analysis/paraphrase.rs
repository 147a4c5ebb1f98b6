use std::collections::HashMap;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use crate::agents::Agent;
use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::harness::{evaluate_with, Summary};
use crate::rng::Rng;

/// Substitutions applied to presented action texts.
#[derive(Debug, Clone, Default)]
pub struct ParaphraseMap {
    pairs: Vec<(String, String)>,
    lookup: HashMap<String, Arc<str>>,
}

impl ParaphraseMap {
    /// `allow_identity` permits a map in which every paraphrase equals its
    /// original.
    pub fn new(pairs: Vec<(String, String)>, allow_identity: bool) -> Result<Self> {
        let mut lookup = HashMap::with_capacity(pairs.len());
        for (orig, para) in &pairs {
            if lookup.insert(orig.clone(), Arc::from(para.as_str())).is_some() {
                return Err(Error::Analysis(format!("original '{orig}' paraphrased twice")));
            }
        }
        if !allow_identity && !pairs.is_empty() && pairs.iter().all(|(o, p)| o == p) {
            return Err(Error::Analysis("paraphrase map only contains identities".into()));
        }
        Ok(ParaphraseMap { pairs, lookup })
    }

    /// Every action text of `game` mapped to itself.
    pub fn identity(game: &GameSpec) -> Self {
        let mut seen = std::collections::HashSet::new();
        let pairs = game
            .action_texts()
            .filter(|t| seen.insert(t.to_string()))
            .map(|t| (t.to_string(), t.to_string()))
            .collect();
        ParaphraseMap::new(pairs, true).expect("distinct originals")
    }

    /// Two tab-separated columns, `original<TAB>paraphrase`, no header.
    pub fn read(input: impl Read, allow_identity: bool) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .has_headers(false)
            .comment(Some(b'#'))
            .quoting(false)
            .from_reader(input);
        let mut pairs = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse {
                line: e.position().map_or(i + 1, |p| p.line() as usize),
                column: 0,
                message: e.to_string(),
            })?;
            if rec.len() != 2 {
                return Err(Error::Parse {
                    line: rec.position().map_or(i + 1, |p| p.line() as usize),
                    column: 0,
                    message: format!("expected 2 columns, found {}", rec.len()),
                });
            }
            pairs.push((rec[0].to_string(), rec[1].to_string()));
        }
        ParaphraseMap::new(pairs, allow_identity)
    }

    pub fn read_file(path: impl AsRef<Path>, allow_identity: bool) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(file, allow_identity)
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn get(&self, original: &str) -> Option<&str> {
        self.lookup.get(original).map(|s| &**s)
    }

    /// The paraphrase of `text`, or `text` itself when uncovered.
    pub fn present(&self, text: &Arc<str>) -> Arc<str> {
        self.lookup.get(&**text).cloned().unwrap_or_else(|| text.clone())
    }
}

/// Evaluate with paraphrased action texts; transitions are unchanged.
pub fn paraphrase_eval(
    agent: &Agent,
    game: &GameSpec,
    map: &ParaphraseMap,
    episodes: usize,
    rng: &mut Rng,
) -> Result<Summary> {
    evaluate_with(agent, game, episodes, rng, |t| map.present(t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub n: usize,
    /// Coefficient of determination of the least-squares fit of paraphrase-Q on original-Q.
    pub pr2: f64,
    pub slope: f64,
    pub intercept: f64,
    /// `(q_original, q_paraphrase)`
    pub points: Vec<(f64, f64)>,
}

impl CorrelationReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("q_original,q_paraphrase\n");
        for (a, b) in &self.points {
            s.push_str(&format!("{a},{b}\n"));
        }
        s
    }
}

/// `(state, original, paraphrase)` for every action of `game` covered by `map`.
pub fn game_pairs(game: &GameSpec, map: &ParaphraseMap) -> Vec<(String, String, String)> {
    let mut out = Vec::new();
    for state in &game.states {
        for action in &state.actions {
            if let Some(p) = map.get(&action.text) {
                out.push((state.text.to_string(), action.text.to_string(), p.to_string()));
            }
        }
    }
    out
}

/// OLS fit of `ys` on `xs`.
pub fn regression_r2(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Analysis("original Q-values have zero variance".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok((r2.clamp(0.0, 1.0), slope, intercept))
}

/// Q-values of original versus paraphrased actions. Consecutive pairs that
/// share a state are scored together as one presented list, so slot-based
/// models see the same layout on both sides.
pub fn q_correlation(agent: &Agent, pairs: &[(String, String, String)]) -> Result<CorrelationReport> {
    if pairs.len() < 2 {
        return Err(Error::Analysis("need at least two pairs".into()));
    }
    let mut points = Vec::with_capacity(pairs.len());
    let mut start = 0;
    while start < pairs.len() {
        let state = &pairs[start].0;
        let mut end = start + 1;
        while end < pairs.len() && &pairs[end].0 == state {
            end += 1;
        }
        let group = &pairs[start..end];
        let originals: Vec<&str> = group.iter().map(|p| p.1.as_str()).collect();
        let paraphrases: Vec<&str> = group.iter().map(|p| p.2.as_str()).collect();
        let qo = agent.q_values(state, &originals)?;
        let qp = agent.q_values(state, &paraphrases)?;
        points.extend(qo.into_iter().zip(qp));
        start = end;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (pr2, slope, intercept) = regression_r2(&xs, &ys)?;
    Ok(CorrelationReport {
        n: points.len(),
        pr2,
        slope,
        intercept,
        points,
    })
}
