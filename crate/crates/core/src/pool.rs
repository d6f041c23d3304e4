//! The adaptive model pool: concept-driven inference, reliability-triggered
//! pool updates, and similarity-based model merging.
//!
//! Each batch is processed in two phases. `score` runs every model over the
//! batch and combines their standardized scores weighted by per-model
//! reliability. `adapt` then either retrains the most reliable model (minor
//! update, pool reliability at or above alpha) or spawns a model trained on
//! the batch and compacts the pool by merging it with gamma-similar members
//! (major update).

use ndarray::Array2;

use crate::config::{
    derive_seed, InferenceMode, MergeMode, ModelConfig, PoolConfig, UpdateMode,
};
use crate::error::{Error, Result};
use crate::nn::{train_epochs, AdamState, DenseAutoencoder};
use crate::scoring::{compute_stats, model_reliability, standardize, ScoreStats};
use crate::similarity::cka_similarity;

/// An autoencoder plus the bookkeeping the pool needs: the score statistics
/// from the last batch that updated it and how many batches it has seen.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledModel {
    pub id: u64,
    pub ae: DenseAutoencoder,
    pub opt: AdamState,
    pub last_stats: ScoreStats,
    pub num_batches: u64,
}

/// What `adapt` did with a batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdaptationEvent {
    /// Pool creation from the first batch.
    Init { model_id: u64 },
    /// Incremental retraining of the most reliable model.
    Minor { model_id: u64 },
    /// A new model was created and the pool compacted around it.
    Major {
        new_model_id: u64,
        merged_ids: Vec<u64>,
        pool_size: usize,
    },
}

impl AdaptationEvent {
    /// Short tag used in trace files: `init`, `minor`, or `major`.
    pub fn kind(&self) -> &'static str {
        match self {
            AdaptationEvent::Init { .. } => "init",
            AdaptationEvent::Minor { .. } => "minor",
            AdaptationEvent::Major { .. } => "major",
        }
    }
}

/// Pool reliability: 1 minus the probability that no member is reliable,
/// `1 - prod(1 - r_i)`.
pub fn pool_reliability(reliabilities: &[f64]) -> Result<f64> {
    if reliabilities.is_empty() {
        return Err(Error::EmptyPool);
    }
    let none_reliable: f64 = reliabilities.iter().map(|r| 1.0 - r).product();
    Ok(1.0 - none_reliable)
}

/// Index of the highest reliability; ties go to the lowest (oldest) id.
pub fn most_reliable(models: &[PooledModel], reliabilities: &[f64]) -> Result<usize> {
    if models.is_empty() {
        return Err(Error::EmptyPool);
    }
    if models.len() != reliabilities.len() {
        return Err(Error::LengthMismatch {
            left: models.len(),
            right: reliabilities.len(),
        });
    }
    let mut best = 0;
    for i in 1..models.len() {
        let better = reliabilities[i] > reliabilities[best]
            || (reliabilities[i] == reliabilities[best] && models[i].id < models[best].id);
        if better {
            best = i;
        }
    }
    Ok(best)
}

/// Batch-count-weighted parameter average of two same-architecture models.
///
/// The merged model carries `N1 + N2` batches, a fresh optimizer state, and
/// the last-update statistics of the parent with more batches (ties keep
/// the first parent's).
pub fn merge_models(m1: &PooledModel, m2: &PooledModel, new_id: u64) -> Result<PooledModel> {
    if m1.ae.layer_dims() != m2.ae.layer_dims() {
        return Err(Error::ArchitectureMismatch(
            m1.ae.layer_dims().to_vec(),
            m2.ae.layer_dims().to_vec(),
        ));
    }
    let n1 = m1.num_batches as f64;
    let n2 = m2.num_batches as f64;
    let w1 = n1 / (n1 + n2);
    let w2 = n2 / (n1 + n2);

    let weights = m1
        .ae
        .weights()
        .iter()
        .zip(m2.ae.weights())
        .map(|(a, b)| a * w1 + b * w2)
        .collect();
    let biases = m1
        .ae
        .biases()
        .iter()
        .zip(m2.ae.biases())
        .map(|(a, b)| a * w1 + b * w2)
        .collect();
    let ae = DenseAutoencoder::from_parameters(m1.ae.layer_dims().to_vec(), weights, biases)?;

    let last_stats = if m2.num_batches > m1.num_batches {
        m2.last_stats
    } else {
        m1.last_stats
    };
    let opt = AdamState::new(&ae, m1.opt.learning_rate, m1.opt.minibatch_size);
    Ok(PooledModel {
        id: new_id,
        ae,
        opt,
        last_stats,
        num_batches: m1.num_batches + m2.num_batches,
    })
}

/// The dynamic model set driving inference and adaptation.
#[derive(Debug, Clone)]
pub struct ModelPool {
    models: Vec<PooledModel>,
    config: PoolConfig,
    model_config: ModelConfig,
    input_dim: usize,
    base_seed: u64,
    next_id: u64,
}

impl ModelPool {
    /// Initializes the pool with one model trained on the first batch.
    pub fn init(
        config: PoolConfig,
        model_config: ModelConfig,
        base_seed: u64,
        first_batch: &Array2<f64>,
    ) -> Result<Self> {
        config.validate()?;
        model_config.validate(first_batch.ncols())?;
        let mut pool = Self {
            models: Vec::new(),
            config,
            model_config,
            input_dim: first_batch.ncols(),
            base_seed,
            next_id: 0,
        };
        let model = pool.spawn_model(first_batch)?;
        pool.models.push(model);
        Ok(pool)
    }

    /// Rebuilds a pool from explicit members (e.g. restored state). Ids must
    /// be unique; `next_id` continues after the largest.
    pub fn from_models(
        models: Vec<PooledModel>,
        config: PoolConfig,
        model_config: ModelConfig,
        base_seed: u64,
    ) -> Result<Self> {
        config.validate()?;
        if models.is_empty() {
            return Err(Error::EmptyPool);
        }
        let input_dim = models[0].ae.input_dim();
        model_config.validate(input_dim)?;
        for m in &models {
            if m.ae.input_dim() != input_dim {
                return Err(Error::ArchitectureMismatch(
                    models[0].ae.layer_dims().to_vec(),
                    m.ae.layer_dims().to_vec(),
                ));
            }
        }
        let mut ids: Vec<u64> = models.iter().map(|m| m.id).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != models.len() {
            return Err(Error::InvalidConfig("model ids must be unique".into()));
        }
        let next_id = ids.last().copied().unwrap_or(0) + 1;
        Ok(Self {
            models,
            config,
            model_config,
            input_dim,
            base_seed,
            next_id,
        })
    }

    pub fn models(&self) -> &[PooledModel] {
        &self.models
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn config(&self) -> &PoolConfig {
        &self.config
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn alloc_id(&mut self) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    /// Creates and trains a new model on `batch`; its last-update statistics
    /// are computed after training so they describe the model that will face
    /// the next batch.
    fn spawn_model(&mut self, batch: &Array2<f64>) -> Result<PooledModel> {
        let id = self.alloc_id();
        let seed = derive_seed(self.base_seed, id);
        let mut ae = DenseAutoencoder::init(
            self.input_dim,
            self.model_config.latent_dim,
            self.model_config.hidden_layers,
            seed,
        )?;
        let mut opt = AdamState::new(
            &ae,
            self.model_config.learning_rate,
            self.model_config.minibatch_size,
        );
        train_epochs(&mut ae, &mut opt, batch, self.config.epochs_init)?;
        let last_stats = compute_stats(&ae.reconstruction_scores(batch)?)?;
        Ok(PooledModel {
            id,
            ae,
            opt,
            last_stats,
            num_batches: 1,
        })
    }

    /// Scores a batch with the whole pool.
    ///
    /// Returns the combined anomaly scores and the per-model reliabilities;
    /// the reliabilities are reused by [`ModelPool::adapt`] so each batch is
    /// scored by each model exactly once.
    pub fn score(&self, batch: &Array2<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
        if self.models.is_empty() {
            return Err(Error::EmptyPool);
        }
        if batch.ncols() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                actual: batch.ncols(),
            });
        }

        let mut reliabilities = Vec::with_capacity(self.models.len());
        let mut standardized = Vec::with_capacity(self.models.len());
        for model in &self.models {
            let raw = model.ae.reconstruction_scores(batch)?;
            let stats = compute_stats(&raw)?;
            reliabilities.push(model_reliability(&stats, &model.last_stats)?);
            standardized.push(standardize(&raw)?);
        }

        let combined = match self.config.inference_mode {
            InferenceMode::ConceptDriven => {
                let mut acc = vec![0.0; batch.nrows()];
                for (r, z) in reliabilities.iter().zip(&standardized) {
                    for (a, &v) in acc.iter_mut().zip(z) {
                        *a += r * v;
                    }
                }
                acc
            }
            InferenceMode::SingleModel => {
                let best = most_reliable(&self.models, &reliabilities)?;
                standardized[best]
                    .iter()
                    .map(|&v| reliabilities[best] * v)
                    .collect()
            }
        };
        Ok((combined, reliabilities))
    }

    /// Updates the pool with a batch that was just scored.
    ///
    /// `reliabilities` must be the values returned by [`ModelPool::score`]
    /// for this same batch (inference precedes update).
    pub fn adapt(
        &mut self,
        batch: &Array2<f64>,
        reliabilities: &[f64],
    ) -> Result<AdaptationEvent> {
        if reliabilities.len() != self.models.len() {
            return Err(Error::LengthMismatch {
                left: self.models.len(),
                right: reliabilities.len(),
            });
        }
        let r_pool = pool_reliability(reliabilities)?;
        let minor =
            self.config.update_mode == UpdateMode::Incremental || r_pool >= self.config.alpha;

        if minor {
            let idx = most_reliable(&self.models, reliabilities)?;
            let model = &mut self.models[idx];
            train_epochs(
                &mut model.ae,
                &mut model.opt,
                batch,
                self.config.epochs_update,
            )?;
            model.num_batches += 1;
            model.last_stats = compute_stats(&model.ae.reconstruction_scores(batch)?)?;
            Ok(AdaptationEvent::Minor {
                model_id: model.id,
            })
        } else {
            let new_model = self.spawn_model(batch)?;
            let (new_model_id, merged_ids) = self.compact(new_model, batch)?;
            Ok(AdaptationEvent::Major {
                new_model_id,
                merged_ids,
                pool_size: self.models.len(),
            })
        }
    }

    /// Inserts `new_model` into the pool, recursively merging it with the
    /// most similar existing model while any similarity reaches gamma.
    ///
    /// Similarities are measured between latent representations of `batch`
    /// and recomputed for the merged model after every merge. On exit no
    /// remaining model is gamma-similar to the inserted one. Returns the
    /// inserted model's id and the ids of the absorbed members.
    pub fn compact(
        &mut self,
        new_model: PooledModel,
        batch: &Array2<f64>,
    ) -> Result<(u64, Vec<u64>)> {
        let mut new_model = new_model;
        let mut merged_ids = Vec::new();

        match self.config.merge_mode {
            MergeMode::Never => {}
            MergeMode::Always => {
                for existing in std::mem::take(&mut self.models) {
                    merged_ids.push(existing.id);
                    let id = self.alloc_id();
                    new_model = merge_models(&new_model, &existing, id)?;
                }
            }
            MergeMode::Similarity => {
                let gamma = self.config.gamma;
                let mut z_new = new_model.ae.latent(batch)?;
                loop {
                    let mut best: Option<(usize, f64)> = None;
                    for (idx, existing) in self.models.iter().enumerate() {
                        let z_i = existing.ae.latent(batch)?;
                        let sim = match cka_similarity(&z_new, &z_i) {
                            Ok(s) => s,
                            // A collapsed representation is treated as not
                            // similar to anything.
                            Err(Error::DegenerateRepresentation) => 0.0,
                            Err(e) => return Err(e),
                        };
                        if sim >= gamma && best.is_none_or(|(_, b)| sim > b) {
                            best = Some((idx, sim));
                        }
                    }
                    match best {
                        Some((idx, _)) => {
                            let absorbed = self.models.remove(idx);
                            merged_ids.push(absorbed.id);
                            let id = self.alloc_id();
                            new_model = merge_models(&new_model, &absorbed, id)?;
                            z_new = new_model.ae.latent(batch)?;
                        }
                        None => break,
                    }
                }
            }
        }

        let id = new_model.id;
        self.models.push(new_model);
        Ok((id, merged_ids))
    }
}
