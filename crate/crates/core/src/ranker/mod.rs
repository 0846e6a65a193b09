//! Learning-to-rank: held-out training data, point-wise Random Forests,
//! list-wise Coordinate Ascent, and ranked recommendation lists.

mod coordinate_ascent;
mod forest;
mod model;
mod training;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::features::{FeatureError, FEATURE_COUNT};
use crate::slp::SlpError;

pub(crate) use model::ranking_order;
pub use coordinate_ascent::{train_coordinate_ascent, train_coordinate_ascent_traced, AscentTrace};
pub use forest::train_random_forests;
pub use model::{
    load_model, rank, rank_features, recommend_all, save_model, ModelBody, ModelSet, ModelVariant,
    Recommendation, Recommendations, RankingModel, TreeNode, MODEL_VERSION,
};
pub use training::{
    generate_training_data, Candidate, ExtractionQuery, TrainingData, TrainingInstance,
};

#[derive(Debug, Error)]
pub enum RankError {
    #[error("no training instances")]
    EmptyTrainingData,
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error("model version {found} is not supported (expected {expected})")]
    ModelVersion { found: u32, expected: u32 },
    #[error("malformed model: {0}")]
    ModelFormat(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Slp(#[from] SlpError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    RandomForests,
    CoordinateAscent,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::RandomForests => "rf",
            Algorithm::CoordinateAscent => "ca",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rf" => Ok(Algorithm::RandomForests),
            "ca" => Ok(Algorithm::CoordinateAscent),
            _ => Err(format!("unknown algorithm `{s}` (expected rf or ca)")),
        }
    }
}

/// Which of f1..f5 a model may look at.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureMask(u8);

impl FeatureMask {
    /// Popularity only: f1, f2, f3.
    pub const POP: FeatureMask = FeatureMask(0b00111);
    /// Popularity plus same-vocabulary: f1..f4.
    pub const SAME: FeatureMask = FeatureMask(0b01111);
    /// All five features.
    pub const SLP: FeatureMask = FeatureMask(0b11111);

    /// Builds a mask from zero-based feature indices.
    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Result<Self, String> {
        let mut bits = 0u8;
        for i in indices {
            if i >= FEATURE_COUNT {
                return Err(format!("feature index {i} out of range"));
            }
            bits |= 1 << i;
        }
        if bits == 0 {
            return Err("feature mask must not be empty".into());
        }
        Ok(FeatureMask(bits))
    }

    pub fn contains(self, index: usize) -> bool {
        index < FEATURE_COUNT && self.0 & (1 << index) != 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..FEATURE_COUNT).filter(move |&i| self.contains(i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Zeroes every feature outside the mask.
    pub fn apply(self, values: [u64; FEATURE_COUNT]) -> [u64; FEATURE_COUNT] {
        let mut out = [0; FEATURE_COUNT];
        for i in self.indices() {
            out[i] = values[i];
        }
        out
    }

    /// Preset name if this mask is one of POP/SAME/SLP.
    pub fn preset_name(self) -> Option<&'static str> {
        match self {
            FeatureMask::POP => Some("pop"),
            FeatureMask::SAME => Some("same"),
            FeatureMask::SLP => Some("slp"),
            _ => None,
        }
    }

    fn names(self) -> Vec<String> {
        self.indices().map(|i| format!("f{}", i + 1)).collect()
    }
}

impl fmt::Debug for FeatureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FeatureMask{:?}", self.names())
    }
}

impl fmt::Display for FeatureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.preset_name() {
            Some(name) => f.write_str(name),
            None => f.write_str(&self.names().join("+")),
        }
    }
}

impl FromStr for FeatureMask {
    type Err = String;

    /// Accepts `pop`, `same`, `slp`, or a `+`/`,`-separated list like `f1+f5`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pop" => return Ok(FeatureMask::POP),
            "same" => return Ok(FeatureMask::SAME),
            "slp" => return Ok(FeatureMask::SLP),
            _ => {}
        }
        let indices = s
            .split(['+', ','])
            .map(|name| {
                name.trim()
                    .strip_prefix('f')
                    .and_then(|n| n.parse::<usize>().ok())
                    .filter(|n| (1..=FEATURE_COUNT).contains(n))
                    .map(|n| n - 1)
                    .ok_or_else(|| format!("unknown feature `{name}`"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        FeatureMask::from_indices(indices)
    }
}

impl Serialize for FeatureMask {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.names().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FeatureMask {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let names = Vec::<String>::deserialize(deserializer)?;
        names.join("+").parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub trees: usize,
    pub bag_fraction: f64,
    pub features_per_split: usize,
    pub min_leaf: usize,
    /// `None` grows trees until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            trees: 300,
            bag_fraction: 0.7,
            features_per_split: 2,
            min_leaf: 1,
            max_depth: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AscentParams {
    pub restarts: usize,
    pub max_sweeps: usize,
    pub initial_step: f64,
    pub step_grow: f64,
    pub step_shrink: f64,
    /// Minimum training-MAP gain for a step to be accepted.
    pub tolerance: f64,
}

impl Default for AscentParams {
    fn default() -> Self {
        AscentParams {
            restarts: 5,
            max_sweeps: 25,
            initial_step: 0.05,
            step_grow: 2.0,
            step_shrink: 0.5,
            tolerance: 1e-4,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub forest: ForestParams,
    pub coordinate_ascent: AscentParams,
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), RankError> {
        let bad = |m: &str| Err(RankError::InvalidHyperparams(m.to_owned()));
        let f = &self.forest;
        if f.trees == 0 || f.features_per_split == 0 || f.min_leaf == 0 || f.max_depth == Some(0) {
            return bad("forest counts must be at least 1");
        }
        if !(f.bag_fraction > 0.0 && f.bag_fraction <= 1.0) {
            return bad("bag_fraction must be in (0, 1]");
        }
        let a = &self.coordinate_ascent;
        if a.restarts == 0 || a.max_sweeps == 0 {
            return bad("coordinate ascent counts must be at least 1");
        }
        if !(a.initial_step > 0.0 && a.step_grow > 1.0 && a.step_shrink > 0.0 && a.step_shrink < 1.0) {
            return bad("step schedule must have initial > 0, grow > 1 and shrink in (0, 1)");
        }
        if a.tolerance.is_nan() || a.tolerance < 0.0 {
            return bad("tolerance must be non-negative");
        }
        Ok(())
    }
}

/// Trains a model of the given algorithm.
pub fn train(
    algorithm: Algorithm,
    data: &TrainingData,
    hp: &Hyperparams,
    mask: FeatureMask,
    seed: u64,
) -> Result<RankingModel, RankError> {
    match algorithm {
        Algorithm::RandomForests => train_random_forests(data, hp, mask, seed),
        Algorithm::CoordinateAscent => train_coordinate_ascent(data, hp, mask, seed),
    }
}
