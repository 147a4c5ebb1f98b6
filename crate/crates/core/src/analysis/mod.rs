//! Post-hoc analyses of trained agents: embedding projections, paraphrase
//! robustness and Q-value tables.

mod embeddings;
mod paraphrase;
mod pca;
mod qtable;

pub use embeddings::{capture_embeddings, project_embeddings, EmbeddingPoint, EmbeddingSide};
pub use paraphrase::{
    game_pairs, paraphrase_eval, q_correlation, regression_r2, CorrelationReport, ParaphraseMap,
};
pub use pca::{pca_project, Pca};
pub use qtable::{q_table, q_table_csv, QRow};
