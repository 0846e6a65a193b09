use rand::seq::SliceRandom;
use rand::Rng;

use super::model::{ModelBody, RankingModel};
use super::{FeatureMask, Hyperparams, RankError, TrainingData};
use crate::features::FEATURE_COUNT;
use crate::seed;

/// Step sizes tried per direction: `step`, `step * grow`, ... (this many).
const TRIALS_PER_DIRECTION: usize = 16;
/// How often the base step may shrink before a restart gives up.
const MAX_SHRINKS: usize = 3;

/// Accepted training-MAP values per restart. The first entry of each
/// restart is the MAP of its starting weights.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AscentTrace {
    pub restarts: Vec<Vec<f64>>,
    /// Index of the restart whose weights were kept.
    pub best: usize,
}

impl AscentTrace {
    pub fn best_map(&self) -> f64 {
        self.restarts[self.best].last().copied().unwrap_or(0.0)
    }
}

struct Group {
    start: usize,
    len: usize,
    /// Offsets of relevant candidates within the group (IRI order).
    relevant: Vec<usize>,
    /// Number of relevant terms, reachable or not.
    m: f64,
}

/// Feature rows of every trainable query, laid out contiguously.
struct Prepared {
    x: Vec<[f64; FEATURE_COUNT]>,
    groups: Vec<Group>,
}

impl Prepared {
    fn new(data: &TrainingData, mask: FeatureMask) -> Prepared {
        let mut x = Vec::new();
        let mut groups = Vec::new();
        for q in data.trainable() {
            let start = x.len();
            let mut relevant = Vec::new();
            for (i, c) in q.candidates.iter().enumerate() {
                x.push(mask.apply(c.features.to_array()).map(|v| v as f64));
                if c.relevant {
                    relevant.push(i);
                }
            }
            groups.push(Group {
                start,
                len: q.candidates.len(),
                relevant,
                m: q.relevant.len() as f64,
            });
        }
        Prepared { x, groups }
    }

    fn scores(&self, w: &[f64; FEATURE_COUNT]) -> Vec<f64> {
        self.x
            .iter()
            .map(|row| row.iter().zip(w).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Mean AP when coordinate `coord` moves by `delta` from `scores`.
    fn map_after(&self, scores: &[f64], coord: usize, delta: f64) -> f64 {
        let mut total = 0.0;
        let mut ranks = Vec::with_capacity(4);
        for g in &self.groups {
            let s = |j: usize| scores[g.start + j] + delta * self.x[g.start + j][coord];
            ranks.clear();
            for &r in &g.relevant {
                let sr = s(r);
                let mut ahead = 0usize;
                for j in 0..g.len {
                    let sj = s(j);
                    if sj > sr || (sj == sr && j < r) {
                        ahead += 1;
                    }
                }
                ranks.push(ahead + 1);
            }
            ranks.sort_unstable();
            let ap: f64 = ranks
                .iter()
                .enumerate()
                .map(|(h, &rank)| (h + 1) as f64 / rank as f64)
                .sum();
            total += ap / g.m;
        }
        total / self.groups.len() as f64
    }
}

/// List-wise linear model: coordinate ascent on training MAP.
pub fn train_coordinate_ascent(
    data: &TrainingData,
    hp: &Hyperparams,
    mask: FeatureMask,
    seed: u64,
) -> Result<RankingModel, RankError> {
    train_coordinate_ascent_traced(data, hp, mask, seed).map(|(m, _)| m)
}

/// Like [`train_coordinate_ascent`], also returning the accepted-MAP trace.
pub fn train_coordinate_ascent_traced(
    data: &TrainingData,
    hp: &Hyperparams,
    mask: FeatureMask,
    seed: u64,
) -> Result<(RankingModel, AscentTrace), RankError> {
    hp.validate()?;
    let prepared = Prepared::new(data, mask);
    if prepared.groups.is_empty() {
        return Err(RankError::EmptyTrainingData);
    }
    let params = &hp.coordinate_ascent;
    let coords: Vec<usize> = mask.indices().collect();

    let mut trace = AscentTrace::default();
    let mut best: Option<(f64, [f64; FEATURE_COUNT])> = None;
    for restart in 0..params.restarts {
        let mut rng = seed::stream_rng(seed, restart as u64);
        let mut w = [0.0; FEATURE_COUNT];
        for &i in &coords {
            w[i] = if restart == 0 {
                1.0 / coords.len() as f64
            } else {
                rng.random_range(-1.0..=1.0)
            };
        }
        let mut scores = prepared.scores(&w);
        let mut current = prepared.map_after(&scores, coords[0], 0.0);
        let mut accepted = vec![current];

        let mut base_step = params.initial_step;
        let mut shrinks = 0;
        let mut order = coords.clone();
        for _ in 0..params.max_sweeps {
            order.shuffle(&mut rng);
            let mut improved = false;
            for &i in &order {
                let mut best_move: Option<(f64, f64)> = None;
                for dir in [1.0, -1.0] {
                    let mut step = base_step;
                    for _ in 0..TRIALS_PER_DIRECTION {
                        let delta = dir * step;
                        let map = prepared.map_after(&scores, i, delta);
                        let bar = best_move.map_or(current, |(m, _)| m);
                        if map > bar + params.tolerance {
                            best_move = Some((map, delta));
                        }
                        step *= params.step_grow;
                    }
                }
                if let Some((map, delta)) = best_move {
                    w[i] += delta;
                    for (s, row) in scores.iter_mut().zip(&prepared.x) {
                        *s += delta * row[i];
                    }
                    current = map;
                    accepted.push(current);
                    improved = true;
                }
            }
            if !improved {
                if shrinks == MAX_SHRINKS {
                    break;
                }
                base_step *= params.step_shrink;
                shrinks += 1;
            }
        }
        if best.is_none_or(|(m, _)| current > m) {
            best = Some((current, w));
            trace.best = restart;
        }
        trace.restarts.push(accepted);
    }

    let (_, weights) = best.expect("at least one restart");
    let model = RankingModel::new(mask, seed, hp.clone(), ModelBody::Linear { weights });
    Ok((model, trace))
}
