use crate::agents::Agent;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct QRow {
    pub text: String,
    pub q: f64,
    /// Every token of the text is out of vocabulary; `q` is that of an empty bag.
    pub all_oov: bool,
}

/// Q-value of each candidate action at `state`, scored one at a time. The
/// candidates need not be feasible in the game.
pub fn q_table<S: AsRef<str>>(agent: &Agent, state: &str, candidates: &[S]) -> Result<Vec<QRow>> {
    candidates
        .iter()
        .map(|c| {
            let text = c.as_ref();
            let q = agent.q_values(state, &[text])?[0];
            let all_oov = agent.features.action(text).entries.is_empty();
            Ok(QRow {
                text: text.to_string(),
                q,
                all_oov,
            })
        })
        .collect()
}

pub fn q_table_csv(rows: &[QRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| crate::error::Error::Analysis(e.to_string());
    w.write_record(["text", "q", "all_oov"]).map_err(err)?;
    for r in rows {
        w.write_record([r.text.clone(), r.q.to_string(), r.all_oov.to_string()])
            .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::error::Error::Analysis(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
