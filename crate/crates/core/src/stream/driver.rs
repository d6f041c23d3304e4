//! Prequential driver: every batch is scored by the pool before it updates
//! the pool. The first batch only initializes the pool and yields no scores.

use std::time::Instant;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::pool::{pool_reliability, AdaptationEvent, ModelPool};

use super::Batch;

/// Traces produced by one prequential run. All per-batch vectors cover the
/// scored batches only: entry `i` belongs to stream batch `i + 1`. The event
/// log additionally starts with the init event of batch 0.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub scores: Vec<Vec<f64>>,
    pub labels: Option<Vec<Vec<u8>>>,
    /// Pool reliability per scored batch, computed before adaptation.
    pub reliability: Vec<f64>,
    /// Pool size after each batch's adaptation.
    pub pool_sizes: Vec<usize>,
    pub events: Vec<AdaptationEvent>,
    pub batch_seconds: Vec<f64>,
}

impl RunResult {
    pub fn scored_batches(&self) -> usize {
        self.scores.len()
    }

    pub fn major_updates(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, AdaptationEvent::Major { .. }))
            .count()
    }

    pub fn mean_pool_size(&self) -> f64 {
        if self.pool_sizes.is_empty() {
            return 0.0;
        }
        self.pool_sizes.iter().sum::<usize>() as f64 / self.pool_sizes.len() as f64
    }

    pub fn max_pool_size(&self) -> usize {
        self.pool_sizes.iter().copied().max().unwrap_or(0)
    }

    pub fn mean_batch_seconds(&self) -> f64 {
        if self.batch_seconds.is_empty() {
            return 0.0;
        }
        self.batch_seconds.iter().sum::<f64>() / self.batch_seconds.len() as f64
    }
}

/// Runs the full loop over a stream: initialize the pool from the first
/// batch, then score and adapt on every following batch.
///
/// Fails with [`Error::StreamTooShort`] unless the stream yields at least
/// two batches. Deterministic for a fixed stream and seed.
pub fn run_prequential<I>(stream: I, cfg: &RunConfig) -> Result<RunResult>
where
    I: IntoIterator<Item = Result<Batch>>,
{
    let mut batches = stream.into_iter();
    let first = batches.next().transpose()?.ok_or(Error::StreamTooShort)?;
    let mut pool = ModelPool::init(cfg.pool.clone(), cfg.model.clone(), cfg.seed, &first.data)?;
    let labeled = first.labels.is_some();

    let mut result = RunResult {
        scores: Vec::new(),
        labels: labeled.then(Vec::new),
        reliability: Vec::new(),
        pool_sizes: Vec::new(),
        events: vec![AdaptationEvent::Init {
            model_id: pool.models()[0].id,
        }],
        batch_seconds: Vec::new(),
    };

    for batch in batches {
        let batch = batch?;
        if batch.dim() != pool.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: pool.input_dim(),
                actual: batch.dim(),
            });
        }
        if batch.labels.is_some() != labeled {
            return Err(Error::InvalidConfig(
                "stream mixes labeled and unlabeled batches".into(),
            ));
        }

        let started = Instant::now();
        let (scores, reliabilities) = pool.score(&batch.data)?;
        let r_pool = pool_reliability(&reliabilities)?;
        let event = pool.adapt(&batch.data, &reliabilities)?;
        let elapsed = started.elapsed().as_secs_f64();

        result.scores.push(scores);
        if let (Some(all), Some(labels)) = (result.labels.as_mut(), batch.labels) {
            all.push(labels);
        }
        result.reliability.push(r_pool);
        result.pool_sizes.push(pool.len());
        result.events.push(event);
        result.batch_seconds.push(elapsed);
    }

    if result.scores.is_empty() {
        return Err(Error::StreamTooShort);
    }
    Ok(result)
}
