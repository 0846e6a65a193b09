use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{FeatureMask, Hyperparams, RankError};
use crate::features::{BackgroundCorpus, FeatureVector, FEATURE_COUNT};
use crate::rdf::Iri;
use crate::slp::{Position, QuerySlp};

pub const MODEL_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelVariant {
    Linear,
    Forest,
}

/// A binary regression tree. Values `<= threshold` go left.
#[derive(Clone, Debug, PartialEq)]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        leaf: f64,
    },
}

impl TreeNode {
    pub fn predict(&self, x: &[f64; FEATURE_COUNT]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { leaf } => return *leaf,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if x[*feature] <= *threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    fn check(&self, mask: FeatureMask) -> Result<(), String> {
        match self {
            TreeNode::Leaf { leaf } if leaf.is_finite() => Ok(()),
            TreeNode::Leaf { .. } => Err("leaf value is not finite".into()),
            TreeNode::Split { feature, threshold, left, right } => {
                if !mask.contains(*feature) {
                    return Err(format!("tree splits on masked-out feature f{}", feature + 1));
                }
                if !threshold.is_finite() {
                    return Err("split threshold is not finite".into());
                }
                left.check(mask)?;
                right.check(mask)
            }
        }
    }
}

fn feature_name(i: usize) -> String {
    format!("f{}", i + 1)
}

fn parse_feature_name(s: &str) -> Option<usize> {
    let n: usize = s.strip_prefix('f')?.parse().ok()?;
    (1..=FEATURE_COUNT).contains(&n).then(|| n - 1)
}

impl Serialize for TreeNode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            TreeNode::Leaf { leaf } => {
                let mut m = serializer.serialize_map(Some(1))?;
                m.serialize_entry("leaf", leaf)?;
                m.end()
            }
            TreeNode::Split { feature, threshold, left, right } => {
                let mut m = serializer.serialize_map(Some(4))?;
                m.serialize_entry("feature", &feature_name(*feature))?;
                m.serialize_entry("threshold", threshold)?;
                m.serialize_entry("left", left)?;
                m.serialize_entry("right", right)?;
                m.end()
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    feature: Option<String>,
    threshold: Option<f64>,
    left: Option<Box<TreeNode>>,
    right: Option<Box<TreeNode>>,
    leaf: Option<f64>,
}

impl<'de> Deserialize<'de> for TreeNode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = RawNode::deserialize(deserializer)?;
        match raw {
            RawNode { leaf: Some(leaf), feature: None, threshold: None, left: None, right: None } => {
                Ok(TreeNode::Leaf { leaf })
            }
            RawNode {
                leaf: None,
                feature: Some(f),
                threshold: Some(threshold),
                left: Some(left),
                right: Some(right),
            } => Ok(TreeNode::Split {
                feature: parse_feature_name(&f)
                    .ok_or_else(|| D::Error::custom(format!("unknown feature `{f}`")))?,
                threshold,
                left,
                right,
            }),
            _ => Err(D::Error::custom(
                "tree node must be {leaf} or {feature, threshold, left, right}",
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelBody {
    /// One weight per feature; masked-out entries are zero.
    Linear { weights: [f64; FEATURE_COUNT] },
    Forest { trees: Vec<TreeNode> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBody {
    weights: Option<BTreeMap<String, f64>>,
    trees: Option<Vec<TreeNode>>,
}

#[derive(Serialize)]
struct RawBodyRef<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trees: Option<&'a [TreeNode]>,
}

impl Serialize for ModelBody {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = match self {
            ModelBody::Linear { weights } => RawBodyRef {
                weights: Some(
                    weights
                        .iter()
                        .enumerate()
                        .filter(|(_, w)| **w != 0.0)
                        .map(|(i, w)| (feature_name(i), *w))
                        .collect(),
                ),
                trees: None,
            },
            ModelBody::Forest { trees } => RawBodyRef {
                weights: None,
                trees: Some(trees),
            },
        };
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ModelBody {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match RawBody::deserialize(deserializer)? {
            RawBody { weights: Some(map), trees: None } => {
                let mut weights = [0.0; FEATURE_COUNT];
                for (name, w) in map {
                    let i = parse_feature_name(&name)
                        .ok_or_else(|| D::Error::custom(format!("unknown feature `{name}`")))?;
                    weights[i] = w;
                }
                Ok(ModelBody::Linear { weights })
            }
            RawBody { weights: None, trees: Some(trees) } => Ok(ModelBody::Forest { trees }),
            _ => Err(D::Error::custom("body must hold exactly one of `weights` or `trees`")),
        }
    }
}

/// A trained scoring function over masked feature vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankingModel {
    pub version: u32,
    pub variant: ModelVariant,
    pub mask: FeatureMask,
    pub seed: u64,
    pub hyperparams: Hyperparams,
    /// Position the model was trained for; `None` when pooled over all three.
    #[serde(default)]
    pub position: Option<Position>,
    pub body: ModelBody,
}

impl RankingModel {
    pub fn new(mask: FeatureMask, seed: u64, hyperparams: Hyperparams, body: ModelBody) -> Self {
        let variant = match body {
            ModelBody::Linear { .. } => ModelVariant::Linear,
            ModelBody::Forest { .. } => ModelVariant::Forest,
        };
        RankingModel {
            version: MODEL_VERSION,
            variant,
            mask,
            seed,
            hyperparams,
            position: None,
            body,
        }
    }

    pub fn with_position(mut self, position: Option<Position>) -> Self {
        self.position = position;
        self
    }

    /// Scores one feature vector. Features outside the mask are ignored.
    pub fn score(&self, features: &FeatureVector) -> f64 {
        let mut x = [0.0; FEATURE_COUNT];
        for i in self.mask.indices() {
            x[i] = features.to_array()[i] as f64;
        }
        match &self.body {
            ModelBody::Linear { weights } => self.mask.indices().map(|i| weights[i] * x[i]).sum(),
            ModelBody::Forest { trees } => {
                trees.iter().map(|t| t.predict(&x)).sum::<f64>() / trees.len() as f64
            }
        }
    }

    fn validate(&self) -> Result<(), RankError> {
        let bad = |m: String| Err(RankError::ModelFormat(m));
        match (&self.body, self.variant) {
            (ModelBody::Linear { weights }, ModelVariant::Linear) => {
                for (i, w) in weights.iter().enumerate() {
                    if !w.is_finite() {
                        return bad(format!("weight for f{} is not finite", i + 1));
                    }
                    if *w != 0.0 && !self.mask.contains(i) {
                        return bad(format!("weight for masked-out feature f{}", i + 1));
                    }
                }
            }
            (ModelBody::Forest { trees }, ModelVariant::Forest) => {
                if trees.is_empty() {
                    return bad("forest has no trees".into());
                }
                for t in trees {
                    t.check(self.mask).map_err(RankError::ModelFormat)?;
                }
            }
            _ => return bad("variant does not match body".into()),
        }
        self.hyperparams.validate()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("models serialize to JSON")
    }

    pub fn from_json(text: &str) -> Result<Self, RankError> {
        #[derive(Deserialize)]
        struct Header {
            version: u32,
        }
        fn parse(text: &str) -> serde_json::Deserializer<serde_json::de::StrRead<'_>> {
            let mut de = serde_json::Deserializer::from_str(text);
            de.disable_recursion_limit();
            de
        }
        let header = Header::deserialize(&mut parse(text))
            .map_err(|e| RankError::ModelFormat(e.to_string()))?;
        if header.version != MODEL_VERSION {
            return Err(RankError::ModelVersion {
                found: header.version,
                expected: MODEL_VERSION,
            });
        }
        let mut de = parse(text);
        let model = RankingModel::deserialize(&mut de)
            .and_then(|m| de.end().map(|_| m))
            .map_err(|e| RankError::ModelFormat(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }
}

pub fn save_model(model: &RankingModel, path: &Path) -> Result<(), RankError> {
    let mut text = model.to_json();
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<RankingModel, RankError> {
    RankingModel::from_json(&fs::read_to_string(path)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Recommendation {
    pub term: Iri,
    pub score: f64,
    pub features: FeatureVector,
}

/// Orders by score descending, then IRI ascending.
pub(crate) fn ranking_order(a: &Recommendation, b: &Recommendation) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.term.cmp(&b.term))
}

/// Scores pre-computed candidate features and returns the top `limit`.
pub fn rank_features(
    model: &RankingModel,
    candidates: Vec<(Iri, FeatureVector)>,
    limit: usize,
) -> Vec<Recommendation> {
    if limit == 0 {
        return Vec::new();
    }
    let mut recs: Vec<Recommendation> = candidates
        .into_iter()
        .map(|(term, features)| Recommendation {
            score: model.score(&features),
            term,
            features,
        })
        .collect();
    if recs.len() > limit {
        recs.select_nth_unstable_by(limit - 1, ranking_order);
        recs.truncate(limit);
    }
    recs.sort_by(ranking_order);
    recs
}

/// Ranks every candidate at `pos` for query `q`.
pub fn rank(
    model: &RankingModel,
    corpus: &BackgroundCorpus,
    q: &QuerySlp,
    pos: Position,
    limit: usize,
) -> Vec<Recommendation> {
    rank_features(model, corpus.features_for_candidates(q, pos), limit)
}

/// The model used for each position.
#[derive(Clone, Debug)]
pub struct ModelSet {
    models: [Arc<RankingModel>; 3],
}

impl ModelSet {
    pub fn pooled(model: RankingModel) -> Self {
        let m = Arc::new(model);
        ModelSet {
            models: [m.clone(), m.clone(), m],
        }
    }

    pub fn per_position(sts: RankingModel, ps: RankingModel, ots: RankingModel) -> Self {
        ModelSet {
            models: [Arc::new(sts), Arc::new(ps), Arc::new(ots)],
        }
    }

    pub fn get(&self, pos: Position) -> &RankingModel {
        &self.models[pos.index()]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Recommendations {
    pub sts: Vec<Recommendation>,
    pub ps: Vec<Recommendation>,
    pub ots: Vec<Recommendation>,
}

impl Recommendations {
    pub fn get(&self, pos: Position) -> &[Recommendation] {
        match pos {
            Position::Sts => &self.sts,
            Position::Ps => &self.ps,
            Position::Ots => &self.ots,
        }
    }
}

/// The three recommendation lists for `q`.
pub fn recommend_all(
    models: &ModelSet,
    corpus: &BackgroundCorpus,
    q: &QuerySlp,
    limit: usize,
) -> Recommendations {
    let at = |pos| rank(models.get(pos), corpus, q, pos, limit);
    Recommendations {
        sts: at(Position::Sts),
        ps: at(Position::Ps),
        ots: at(Position::Ots),
    }
}
