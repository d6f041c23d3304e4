//! Minimal dense autoencoder with mini-batch Adam training.
//!
//! The pool only needs reconstruction scores, latents, incremental training,
//! and parameter access, so richer autoencoder variants could replace this
//! module behind the same surface.

mod autoencoder;
mod optimizer;

pub use autoencoder::{DenseAutoencoder, Gradients};
pub use optimizer::{train_epochs, AdamState};
