//! Online anomaly detection for evolving data streams.
//!
//! The engine maintains an adaptive pool of dense autoencoders. Each
//! incoming batch is scored with a reliability-weighted combination of the
//! pool members' standardized reconstruction errors, then used to update
//! the pool: a reliable pool gets an incremental update of its best model,
//! an unreliable one (a likely concept drift) gets a new model that is
//! merged with any latent-similar existing members to keep the pool
//! compact.
//!
//! Entry points:
//! - [`stream::run_prequential`] drives the score-then-train loop over a
//!   batch source ([`stream::CsvStream`] or [`stream::DriftStream`]).
//! - [`eval::run_benchmark`] compares the adaptive pool against a single
//!   incrementally trained model and the ablation variants.

pub mod config;
pub mod error;
pub mod eval;
pub mod nn;
pub mod pool;
pub mod scoring;
pub mod similarity;
pub mod stream;

pub use config::{InferenceMode, MergeMode, ModelConfig, PoolConfig, RunConfig, UpdateMode};
pub use error::{Error, Result};
pub use eval::{auc, run_benchmark, stream_auc, BenchmarkReport};
pub use nn::{train_epochs, AdamState, DenseAutoencoder};
pub use pool::{merge_models, pool_reliability, AdaptationEvent, ModelPool, PooledModel};
pub use scoring::{compute_stats, model_reliability, standardize, ScoreStats};
pub use similarity::cka_similarity;
pub use stream::{run_prequential, Batch, DriftScenario, DriftStream, RunResult};

// Re-exported so downstream crates use the same array types.
pub use ndarray;
