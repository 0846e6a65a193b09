use std::collections::HashMap;

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::model::{ModelBody, RankingModel, TreeNode};
use super::{FeatureMask, ForestParams, Hyperparams, RankError, TrainingData};
use crate::features::FEATURE_COUNT;
use crate::seed;

const EPS: f64 = 1e-12;

/// Distinct masked feature rows with the labels of every instance that
/// shares them. Bagging draws instances, then aggregates draws per row.
struct Rows {
    values: Vec<[u64; FEATURE_COUNT]>,
    /// Row index of each training instance.
    of_instance: Vec<u32>,
    labels: Vec<f64>,
}

impl Rows {
    fn collect(data: &TrainingData, mask: FeatureMask) -> Rows {
        let mut lookup: HashMap<[u64; FEATURE_COUNT], u32> = HashMap::new();
        let mut values = Vec::new();
        let mut of_instance = Vec::new();
        let mut labels = Vec::new();
        for inst in data.instances() {
            let key = mask.apply(inst.features.to_array());
            let row = *lookup.entry(key).or_insert_with(|| {
                values.push(key);
                (values.len() - 1) as u32
            });
            of_instance.push(row);
            labels.push(inst.relevance as f64);
        }
        Rows {
            values,
            of_instance,
            labels,
        }
    }
}

/// Bootstrap weight and label sums of one row.
#[derive(Clone, Copy, Default)]
struct Stat {
    w: f64,
    y: f64,
    y2: f64,
}

impl Stat {
    fn add(&mut self, o: &Stat) {
        self.w += o.w;
        self.y += o.y;
        self.y2 += o.y2;
    }

    fn sub(&self, o: &Stat) -> Stat {
        Stat {
            w: self.w - o.w,
            y: self.y - o.y,
            y2: self.y2 - o.y2,
        }
    }

    fn sse(&self) -> f64 {
        if self.w <= 0.0 {
            0.0
        } else {
            (self.y2 - self.y * self.y / self.w).max(0.0)
        }
    }
}

struct TreeBuilder<'a> {
    values: &'a [[u64; FEATURE_COUNT]],
    stats: Vec<Stat>,
    features: Vec<usize>,
    params: &'a ForestParams,
    rng: ChaCha8Rng,
}

impl TreeBuilder<'_> {
    fn build(&mut self, rows: &mut [u32], depth: usize) -> TreeNode {
        let mut total = Stat::default();
        for &r in rows.iter() {
            total.add(&self.stats[r as usize]);
        }
        let leaf = TreeNode::Leaf {
            leaf: total.y / total.w,
        };
        let min_leaf = self.params.min_leaf as f64;
        let parent_sse = total.sse();
        if total.w < 2.0 * min_leaf
            || parent_sse <= EPS
            || self.params.max_depth.is_some_and(|d| depth >= d)
        {
            return leaf;
        }

        let k = self.params.features_per_split.min(self.features.len());
        let mut tried: Vec<usize> = index::sample(&mut self.rng, self.features.len(), k)
            .into_iter()
            .map(|i| self.features[i])
            .collect();
        tried.sort_unstable();

        // (gain, feature, threshold)
        let mut best: Option<(f64, usize, f64)> = None;
        for &f in &tried {
            rows.sort_unstable_by_key(|&r| self.values[r as usize][f]);
            let mut left = Stat::default();
            for i in 0..rows.len() - 1 {
                left.add(&self.stats[rows[i] as usize]);
                let here = self.values[rows[i] as usize][f];
                let next = self.values[rows[i + 1] as usize][f];
                if here == next {
                    continue;
                }
                let right = total.sub(&left);
                if left.w < min_leaf || right.w < min_leaf {
                    continue;
                }
                let gain = parent_sse - left.sse() - right.sse();
                if gain > EPS && best.is_none_or(|(g, _, _)| gain > g + EPS) {
                    best = Some((gain, f, (here as f64 + next as f64) / 2.0));
                }
            }
        }

        let Some((_, feature, threshold)) = best else {
            return leaf;
        };
        let split = partition_rows(rows, |r| (self.values[r as usize][feature] as f64) <= threshold);
        let (l, r) = rows.split_at_mut(split);
        TreeNode::Split {
            feature,
            threshold,
            left: Box::new(self.build(l, depth + 1)),
            right: Box::new(self.build(r, depth + 1)),
        }
    }
}

/// Moves rows satisfying `pred` to the front and returns how many there are.
fn partition_rows(rows: &mut [u32], pred: impl Fn(u32) -> bool) -> usize {
    let mut split = 0;
    for i in 0..rows.len() {
        if pred(rows[i]) {
            rows.swap(i, split);
            split += 1;
        }
    }
    split
}

fn fit_tree(rows: &Rows, mask: FeatureMask, params: &ForestParams, tree_seed: u64) -> TreeNode {
    let mut rng = seed::rng(tree_seed);
    let n = rows.of_instance.len();
    let draws = ((params.bag_fraction * n as f64).round() as usize).max(1);
    let mut stats = vec![Stat::default(); rows.values.len()];
    for _ in 0..draws {
        let i = rng.random_range(0..n);
        let y = rows.labels[i];
        let s = &mut stats[rows.of_instance[i] as usize];
        s.w += 1.0;
        s.y += y;
        s.y2 += y * y;
    }
    let mut present: Vec<u32> = (0..rows.values.len() as u32)
        .filter(|&r| stats[r as usize].w > 0.0)
        .collect();
    let mut builder = TreeBuilder {
        values: &rows.values,
        stats,
        features: mask.indices().collect(),
        params,
        rng,
    };
    builder.build(&mut present, 0)
}

/// Point-wise bagged regression trees on binary relevance. Tree `t` draws
/// from its own RNG stream derived from `seed`, so the result does not
/// depend on thread scheduling.
pub fn train_random_forests(
    data: &TrainingData,
    hp: &Hyperparams,
    mask: FeatureMask,
    seed: u64,
) -> Result<RankingModel, RankError> {
    hp.validate()?;
    let rows = Rows::collect(data, mask);
    if rows.labels.is_empty() {
        return Err(RankError::EmptyTrainingData);
    }
    let params = &hp.forest;
    let trees: Vec<TreeNode> = (0..params.trees as u64)
        .into_par_iter()
        .map(|t| fit_tree(&rows, mask, params, seed::derive_seed(seed, t)))
        .collect();
    Ok(RankingModel::new(mask, seed, hp.clone(), ModelBody::Forest { trees }))
}
