//! Run configuration: model hyperparameters, pool thresholds, and the
//! inference/merge/update strategy switches.

use crate::error::{Error, Result};

/// Hyperparameters of a single autoencoder.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    /// Width of the bottleneck layer. Must be smaller than the input width.
    pub latent_dim: usize,
    /// Encoder depth; the decoder mirrors it.
    pub hidden_layers: usize,
    pub learning_rate: f64,
    /// Mini-batch size used inside a training epoch.
    pub minibatch_size: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            latent_dim: 2,
            hidden_layers: 2,
            learning_rate: 1e-3,
            minibatch_size: 32,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self, input_dim: usize) -> Result<()> {
        if self.hidden_layers < 1 {
            return Err(Error::InvalidConfig(
                "hidden_layers must be at least 1".into(),
            ));
        }
        if self.latent_dim == 0 {
            return Err(Error::InvalidConfig("latent_dim must be positive".into()));
        }
        if self.latent_dim >= input_dim {
            return Err(Error::InvalidConfig(format!(
                "latent_dim {} must be smaller than input_dim {}",
                self.latent_dim, input_dim
            )));
        }
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig(
                "learning_rate must be positive".into(),
            ));
        }
        if self.minibatch_size == 0 {
            return Err(Error::InvalidConfig(
                "minibatch_size must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// How per-model scores are combined into the reported anomaly score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InferenceMode {
    /// Reliability-weighted sum of every model's standardized scores.
    ConceptDriven,
    /// Only the most reliable model contributes.
    SingleModel,
}

/// What happens to a freshly created model during a major update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeMode {
    /// Merge with existing models whose latent similarity reaches gamma.
    Similarity,
    /// Merge with every existing model; the pool always holds one model.
    Always,
    /// Keep every model; the pool only grows.
    Never,
}

/// Whether the pool reacts to drift or just retrains its single model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateMode {
    /// Reliability-triggered minor/major updates.
    DriftAware,
    /// Every batch is a minor update; no new models are ever created.
    Incremental,
}

/// Pool-level thresholds and strategy switches.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolConfig {
    /// Reliability threshold: a pool reliability below alpha triggers a
    /// major update.
    pub alpha: f64,
    /// Latent-similarity threshold for merging models.
    pub gamma: f64,
    /// Epochs used to train a newly created model.
    pub epochs_init: usize,
    /// Epochs used for the incremental (minor) update.
    pub epochs_update: usize,
    pub inference_mode: InferenceMode,
    pub merge_mode: MergeMode,
    pub update_mode: UpdateMode,
}

impl Default for PoolConfig {
    fn default() -> Self {
        Self {
            alpha: 0.95,
            gamma: 0.8,
            epochs_init: 5,
            epochs_update: 1,
            inference_mode: InferenceMode::ConceptDriven,
            merge_mode: MergeMode::Similarity,
            update_mode: UpdateMode::DriftAware,
        }
    }
}

impl PoolConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig("alpha must lie in (0, 1)".into()));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidConfig("gamma must lie in (0, 1)".into()));
        }
        if self.epochs_init == 0 || self.epochs_update == 0 {
            return Err(Error::InvalidConfig("epoch counts must be positive".into()));
        }
        Ok(())
    }
}

/// Everything a prequential run needs besides the stream itself.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub pool: PoolConfig,
    pub model: ModelConfig,
    /// Base seed; each model created during the run derives its own seed
    /// from this value and its pool id.
    pub seed: u64,
}

impl RunConfig {
    pub fn new(pool: PoolConfig, model: ModelConfig, seed: u64) -> Self {
        Self { pool, model, seed }
    }
}

/// Splits one base seed into independent per-model seeds (splitmix64).
pub(crate) fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9e3779b97f4a7c15)
        .wrapping_add(index.wrapping_mul(0xbf58476d1ce4e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_thresholds() {
        let cfg = PoolConfig::default();
        assert_eq!(cfg.alpha, 0.95);
        assert_eq!(cfg.gamma, 0.8);
        assert_eq!(cfg.epochs_init, 5);
        assert_eq!(cfg.epochs_update, 1);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_latent_not_smaller_than_input() {
        let cfg = ModelConfig {
            latent_dim: 4,
            ..ModelConfig::default()
        };
        assert!(cfg.validate(4).is_err());
        assert!(cfg.validate(3).is_err());
        assert!(cfg.validate(5).is_ok());
    }

    #[test]
    fn derived_seeds_differ_per_index() {
        let a = derive_seed(7, 0);
        let b = derive_seed(7, 1);
        assert_ne!(a, b);
        assert_eq!(a, derive_seed(7, 0));
    }
}
