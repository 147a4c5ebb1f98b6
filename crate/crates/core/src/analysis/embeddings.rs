use super::pca::{pca_project, Pca};
use crate::agents::Agent;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingSide {
    State,
    Action,
}

impl EmbeddingSide {
    pub fn tag(self) -> &'static str {
        match self {
            EmbeddingSide::State => "state",
            EmbeddingSide::Action => "action",
        }
    }
}

/// Final-layer embedding of one text at one training checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingPoint {
    /// 0 for the state, `i + 1` for the `i`-th action.
    pub point: usize,
    pub side: EmbeddingSide,
    pub checkpoint: usize,
    pub vector: Vec<f64>,
}

/// Embeddings of `state` and `actions` under each `(episodes, agent)` snapshot.
pub fn capture_embeddings<S: AsRef<str>>(
    snapshots: &[(usize, &Agent)],
    state: &str,
    actions: &[S],
) -> Result<Vec<EmbeddingPoint>> {
    let mut out = Vec::new();
    for &(checkpoint, agent) in snapshots {
        let (hs, has) = agent.embeddings(state, actions)?;
        out.push(EmbeddingPoint {
            point: 0,
            side: EmbeddingSide::State,
            checkpoint,
            vector: hs,
        });
        for (i, ha) in has.into_iter().enumerate() {
            out.push(EmbeddingPoint {
                point: i + 1,
                side: EmbeddingSide::Action,
                checkpoint,
                vector: ha,
            });
        }
    }
    Ok(out)
}

/// Joint 2-D projection of all captured points, so every checkpoint shares axes.
pub fn project_embeddings(points: &[EmbeddingPoint]) -> Result<(Pca, String)> {
    let vectors: Vec<Vec<f64>> = points.iter().map(|p| p.vector.clone()).collect();
    if vectors.windows(2).any(|w| w[0].len() != w[1].len()) {
        return Err(Error::Analysis(
            "state and action embeddings differ in dimension; cannot share a projection".into(),
        ));
    }
    let pca = pca_project(&vectors, 2)?;
    let mut csv = String::from("point,side,x,y,checkpoint\n");
    for (p, xy) in points.iter().zip(&pca.projected) {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            p.point,
            p.side.tag(),
            xy[0],
            xy[1],
            p.checkpoint
        ));
    }
    Ok((pca, csv))
}
