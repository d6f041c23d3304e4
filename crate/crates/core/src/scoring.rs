//! Anomaly-score statistics, standardization, and model reliability.
//!
//! Reliability compares a model's score distribution on the current batch
//! against the last batch that updated the model, via a Hoeffding-style
//! mean-difference bound: `r = exp(-b * eps^2 / (s_max - s_min)^2)` where
//! `eps` is the gap between the two batch means and the min/max range is
//! taken across both batches.

use crate::error::{Error, Result};

/// The `(min, max, avg)` triplet of a model's scores on one batch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreStats {
    pub min: f64,
    pub max: f64,
    pub avg: f64,
    pub count: usize,
}

/// Exact min/max/mean of a nonempty score vector.
pub fn compute_stats(scores: &[f64]) -> Result<ScoreStats> {
    if scores.is_empty() {
        return Err(Error::EmptyScores);
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for &s in scores {
        min = min.min(s);
        max = max.max(s);
        sum += s;
    }
    Ok(ScoreStats {
        min,
        max,
        avg: sum / scores.len() as f64,
        count: scores.len(),
    })
}

/// Reliability of a model for the current batch, in `(0, 1]`.
///
/// Equal batch sizes are required; a zero score range forces equal means,
/// so that case returns 1 (the `eps = 0` limit).
pub fn model_reliability(curr: &ScoreStats, last: &ScoreStats) -> Result<f64> {
    if curr.count != last.count {
        return Err(Error::UnequalBatchSizes {
            curr: curr.count,
            last: last.count,
        });
    }
    let eps = (curr.avg - last.avg).abs();
    let s_max = curr.max.max(last.max);
    let s_min = curr.min.min(last.min);
    let range = s_max - s_min;
    if range == 0.0 || eps == 0.0 {
        return Ok(1.0);
    }
    let b = curr.count as f64;
    Ok((-b * eps * eps / (range * range)).exp())
}

/// Z-scores with the population standard deviation; a constant vector maps
/// to all zeros.
pub fn standardize(scores: &[f64]) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(Error::EmptyScores);
    }
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    let var = scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std == 0.0 {
        return Ok(vec![0.0; scores.len()]);
    }
    Ok(scores.iter().map(|s| (s - mean) / std).collect())
}
