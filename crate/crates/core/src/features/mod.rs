//! Background-corpus indices and the five per-candidate features.
//!
//! | feature | meaning                                                        |
//! |---------|----------------------------------------------------------------|
//! | f1      | datasets (PLDs) using the candidate                            |
//! | f2      | datasets using any term of the candidate's vocabulary          |
//! | f3      | total statements using the candidate                           |
//! | f4      | 1 if the candidate shares a vocabulary with the query SLP      |
//! | f5      | stored SLPs containing the query SLP extended by the candidate |
//!
//! A term is "used" when it is the predicate of a statement, or the object
//! of an `rdf:type` statement. All values are raw counts.

mod index;
mod persist;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::slp::SlpError;

pub use index::{BackgroundCorpus, CooccurrenceMode, TermStats};
pub use persist::{load_index, save_index, SLPS_FILE, TERMS_FILE, VOCABS_FILE};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error(transparent)]
    Slp(#[from] SlpError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("index file {file}: {message}")]
    Index { file: String, message: String },
}

/// Number of features in a [`FeatureVector`].
pub const FEATURE_COUNT: usize = 5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FeatureVector {
    pub f1: u64,
    pub f2: u64,
    pub f3: u64,
    pub f4: u64,
    pub f5: u64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [u64; FEATURE_COUNT] {
        [self.f1, self.f2, self.f3, self.f4, self.f5]
    }

    pub fn values(&self) -> [f64; FEATURE_COUNT] {
        self.to_array().map(|v| v as f64)
    }

    pub fn from_array(a: [u64; FEATURE_COUNT]) -> Self {
        FeatureVector {
            f1: a[0],
            f2: a[1],
            f3: a[2],
            f4: a[3],
            f5: a[4],
        }
    }
}
