use std::collections::{BTreeMap, BTreeSet};

use log::{info, warn};
use rayon::prelude::*;

use super::metrics::{average_precision, reciprocal_rank_at_k};
use super::report::{Cell, EvalReport, FoldResult, Scope};
use super::EvalError;
use crate::features::{BackgroundCorpus, CooccurrenceMode, FeatureVector};
use crate::ranker::{
    generate_training_data, ranking_order, train, Algorithm, FeatureMask, Hyperparams, RankingModel,
    Recommendation, TrainingData,
};
use crate::rdf::{Corpus, Iri, PayLevelDomain, PldGraph};
use crate::seed::derive_seed;
use crate::slp::{compute_slps, Position, SlpSet};

/// Cutoff for the reciprocal-rank metric.
pub const RR_CUTOFF: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fold {
    /// Zero-based fold number.
    pub index: usize,
    pub test: PayLevelDomain,
    pub train: Vec<PayLevelDomain>,
}

/// The selected evaluation PLDs and the background PLDs that feed the
/// feature index. Each selected PLD is the test set of exactly one fold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldPlan {
    selected: Vec<PayLevelDomain>,
    background: BTreeSet<PayLevelDomain>,
}

impl FoldPlan {
    /// `selected` must be distinct members of `all`, at least two of them.
    pub fn new(
        selected: Vec<PayLevelDomain>,
        all: &BTreeSet<PayLevelDomain>,
    ) -> Result<FoldPlan, EvalError> {
        let unique: BTreeSet<&PayLevelDomain> = selected.iter().collect();
        if unique.len() != selected.len() {
            return Err(EvalError::InvalidPlan("selected PLDs must be distinct".into()));
        }
        if selected.len() < 2 {
            return Err(EvalError::InvalidPlan("at least two PLDs are needed".into()));
        }
        if let Some(p) = selected.iter().find(|p| !all.contains(*p)) {
            return Err(EvalError::InvalidPlan(format!("{p} is not in the corpus")));
        }
        let background = all.iter().filter(|p| !unique.contains(p)).cloned().collect();
        Ok(FoldPlan {
            selected,
            background,
        })
    }

    pub fn selected(&self) -> &[PayLevelDomain] {
        &self.selected
    }

    pub fn background(&self) -> &BTreeSet<PayLevelDomain> {
        &self.background
    }

    pub fn folds(&self) -> Vec<Fold> {
        (0..self.selected.len())
            .map(|i| Fold {
                index: i,
                test: self.selected[i].clone(),
                train: self
                    .selected
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, p)| p.clone())
                    .collect(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalConfig {
    pub algorithms: Vec<Algorithm>,
    pub masks: Vec<FeatureMask>,
    pub seed: u64,
    pub hyperparams: Hyperparams,
    /// Upper bound of terms removed per source SLP.
    pub max_extract: usize,
    /// Train one model over all positions instead of one per position.
    pub pooled: bool,
    pub cooccurrence: CooccurrenceMode,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            algorithms: vec![Algorithm::RandomForests, Algorithm::CoordinateAscent],
            masks: vec![FeatureMask::POP, FeatureMask::SAME, FeatureMask::SLP],
            seed: 0,
            hyperparams: Hyperparams::default(),
            max_extract: 2,
            pooled: false,
            cooccurrence: CooccurrenceMode::Distinct,
        }
    }
}

/// Per-query AP and RR@5, split by position.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QueryScores {
    pub by_position: BTreeMap<Position, Vec<(f64, f64)>>,
}

impl QueryScores {
    pub fn cell(&self, scope: Scope) -> Option<Cell> {
        let values: Vec<(f64, f64)> = match scope {
            Scope::Position(p) => self.by_position.get(&p).cloned().unwrap_or_default(),
            Scope::Overall => self.by_position.values().flatten().copied().collect(),
        };
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        Some(Cell {
            map: values.iter().map(|v| v.0).sum::<f64>() / n,
            mrr5: values.iter().map(|v| v.1).sum::<f64>() / n,
            queries: values.len(),
        })
    }
}

/// Ranks every query's candidates with `score` (ties by IRI) and collects
/// AP and RR@5. Unreachable relevant terms lower AP.
pub fn evaluate_queries<F>(queries: &TrainingData, score: F) -> QueryScores
where
    F: Fn(Position, &Iri, &FeatureVector) -> f64,
{
    let mut out = QueryScores::default();
    for q in &queries.queries {
        let mut recs: Vec<Recommendation> = q
            .candidates
            .iter()
            .map(|c| Recommendation {
                score: score(q.position, &c.term, &c.features),
                term: c.term.clone(),
                features: c.features,
            })
            .collect();
        recs.sort_by(ranking_order);
        let ranked: Vec<Iri> = recs.into_iter().map(|r| r.term).collect();
        let ap = average_precision(&ranked, &q.relevant).expect("extraction queries have relevant terms");
        let rr = reciprocal_rank_at_k(&ranked, &q.relevant, RR_CUTOFF).expect("non-empty relevant set");
        out.by_position.entry(q.position).or_default().push((ap, rr));
    }
    out
}

/// Trained models for one (algorithm, mask): one per position, or one
/// shared model when pooled or when a position has nothing to train on.
struct FoldModels {
    per_position: [Option<RankingModel>; 3],
    pooled: Option<RankingModel>,
}

impl FoldModels {
    fn get(&self, pos: Position) -> Option<&RankingModel> {
        self.per_position[pos.index()].as_ref().or(self.pooled.as_ref())
    }
}

fn train_fold_models(
    data: &TrainingData,
    algorithm: Algorithm,
    mask: FeatureMask,
    config: &EvalConfig,
    seed: u64,
) -> Result<FoldModels, EvalError> {
    let fit = |d: &TrainingData, stream: u64, position: Option<Position>| {
        if d.trainable().next().is_none() {
            return Ok(None);
        }
        train(algorithm, d, &config.hyperparams, mask, derive_seed(seed, stream))
            .map(|m| Some(m.with_position(position)))
    };
    let mut per_position: [Option<RankingModel>; 3] = Default::default();
    if !config.pooled {
        for pos in Position::ALL {
            per_position[pos.index()] = fit(&data.for_position(pos), pos.index() as u64, Some(pos))?;
        }
    }
    let pooled = if per_position.iter().all(Option::is_some) {
        None
    } else {
        fit(data, 3, None)?
    };
    Ok(FoldModels {
        per_position,
        pooled,
    })
}

/// Leave-one-out evaluation over the plan's folds. The background index is
/// built from the plan's background PLDs only and shared by all folds.
pub fn run_loo_evaluation(
    corpus: &Corpus,
    plan: &FoldPlan,
    config: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    config.hyperparams.validate()?;
    let background: Vec<&PldGraph> = plan
        .background()
        .iter()
        .filter_map(|p| corpus.graphs.get(p))
        .collect();
    let index = BackgroundCorpus::build(background).with_cooccurrence_mode(config.cooccurrence);
    info!(
        "background index: {} PLDs, {} SLPs",
        plan.background().len(),
        index.slp_count()
    );

    let slps_of: BTreeMap<&PayLevelDomain, SlpSet> = plan
        .selected()
        .par_iter()
        .map(|p| {
            let graph = corpus.graphs.get(p).ok_or_else(|| {
                EvalError::InvalidPlan(format!("{p} is not in the corpus"))
            })?;
            Ok((p, compute_slps(graph)))
        })
        .collect::<Result<_, EvalError>>()?;

    let mut folds = Vec::new();
    for fold in plan.folds() {
        let train_slps = fold
            .train
            .iter()
            .fold(SlpSet::new(), |acc, p| acc.merge(slps_of[p].clone()));
        let fold_seed = derive_seed(config.seed, fold.index as u64);
        let training = generate_training_data(&train_slps, &index, config.max_extract, derive_seed(fold_seed, 0));
        let test = generate_training_data(
            &slps_of[&fold.test],
            &index,
            config.max_extract,
            derive_seed(fold_seed, 1),
        );
        info!(
            "fold {} (test {}): {} training queries, {} test queries",
            fold.index + 1,
            fold.test,
            training.len(),
            test.len()
        );

        for (a, &algorithm) in config.algorithms.iter().enumerate() {
            for (m, &mask) in config.masks.iter().enumerate() {
                let model_seed = derive_seed(fold_seed, 100 + (a * 64 + m) as u64);
                let scores = if test.is_empty() {
                    None
                } else {
                    match train_fold_models(&training, algorithm, mask, config, model_seed)? {
                        models if Position::ALL.iter().all(|p| models.get(*p).is_some()) => {
                            Some(evaluate_queries(&test, |pos, _, f| {
                                models.get(pos).expect("checked above").score(f)
                            }))
                        }
                        _ => None,
                    }
                };
                if scores.is_none() {
                    warn!("fold {} {algorithm}/{mask}: no usable queries, skipped", fold.index + 1);
                }
                folds.push(FoldResult {
                    fold: fold.index + 1,
                    test_pld: fold.test.clone(),
                    algorithm,
                    mask,
                    cells: Scope::ALL.map(|s| scores.as_ref().and_then(|q| q.cell(s))),
                });
            }
        }
    }
    Ok(EvalReport::new(config.algorithms.clone(), config.masks.clone(), folds))
}
