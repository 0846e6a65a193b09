use std::collections::BTreeSet;

use super::EvalError;

/// Average precision of `ranked` against `relevant`. Relevant items that
/// never appear in `ranked` still count towards the denominator.
pub fn average_precision<T: Ord>(ranked: &[T], relevant: &BTreeSet<T>) -> Result<f64, EvalError> {
    if relevant.is_empty() {
        return Err(EvalError::NoRelevantItems);
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, item) in ranked.iter().enumerate() {
        if relevant.contains(item) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    Ok(sum / relevant.len() as f64)
}

/// `1/r` for the first relevant item at rank `r <= k`, otherwise 0.
pub fn reciprocal_rank_at_k<T: Ord>(
    ranked: &[T],
    relevant: &BTreeSet<T>,
    k: usize,
) -> Result<f64, EvalError> {
    if relevant.is_empty() {
        return Err(EvalError::NoRelevantItems);
    }
    Ok(ranked
        .iter()
        .take(k)
        .position(|item| relevant.contains(item))
        .map_or(0.0, |i| 1.0 / (i + 1) as f64))
}
