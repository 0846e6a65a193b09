//! Leave-one-out evaluation: PLD selection, folds, ranking metrics,
//! reports, and a synthetic corpus generator.

mod loo;
mod metrics;
mod report;
mod stats;
mod synth;

use thiserror::Error;

use crate::rdf::IngestError;
use crate::ranker::RankError;

pub use loo::{evaluate_queries, run_loo_evaluation, EvalConfig, Fold, FoldPlan, QueryScores, RR_CUTOFF};
pub use metrics::{average_precision, reciprocal_rank_at_k};
pub use report::{Aggregate, Cell, EvalReport, FoldResult, Scope, REPORT_HEADER};
pub use stats::{format_pld_stats, pld_stats, select_plds, PldStats};
pub use synth::{generate_synthetic_corpus, synthetic_pld, synthetic_templates, vocabulary_iri, SynthConfig};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("relevant set must not be empty")]
    NoRelevantItems,
    #[error("need {needed} PLDs but the corpus has {available}")]
    TooFewPlds { needed: usize, available: usize },
    #[error("invalid fold plan: {0}")]
    InvalidPlan(String),
    #[error(transparent)]
    Rank(#[from] RankError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
}
