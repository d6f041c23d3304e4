//! Adam optimizer state and the mini-batch training loop.

use ndarray::{s, Array1, Array2};

use super::autoencoder::{DenseAutoencoder, Gradients};
use crate::error::{Error, Result};

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPSILON: f64 = 1e-8;

/// Per-parameter first/second moment accumulators plus the training
/// hyperparameters they belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    m_weights: Vec<Array2<f64>>,
    v_weights: Vec<Array2<f64>>,
    m_biases: Vec<Array1<f64>>,
    v_biases: Vec<Array1<f64>>,
    step: u64,
    pub learning_rate: f64,
    pub minibatch_size: usize,
}

impl AdamState {
    /// Fresh state (zero moments) shaped after `model`.
    pub fn new(model: &DenseAutoencoder, learning_rate: f64, minibatch_size: usize) -> Self {
        Self {
            m_weights: model.weights().iter().map(|w| Array2::zeros(w.dim())).collect(),
            v_weights: model.weights().iter().map(|w| Array2::zeros(w.dim())).collect(),
            m_biases: model.biases().iter().map(|b| Array1::zeros(b.len())).collect(),
            v_biases: model.biases().iter().map(|b| Array1::zeros(b.len())).collect(),
            step: 0,
            learning_rate,
            minibatch_size,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One Adam update from the given gradients.
    fn apply(&mut self, model: &mut DenseAutoencoder, grads: &Gradients) {
        self.step += 1;
        let t = self.step as i32;
        let bias1 = 1.0 - BETA1.powi(t);
        let bias2 = 1.0 - BETA2.powi(t);
        let lr = self.learning_rate;

        for l in 0..grads.weights.len() {
            let g = &grads.weights[l];
            let m = &mut self.m_weights[l];
            let v = &mut self.v_weights[l];
            m.zip_mut_with(g, |m, &g| *m = BETA1 * *m + (1.0 - BETA1) * g);
            v.zip_mut_with(g, |v, &g| *v = BETA2 * *v + (1.0 - BETA2) * g * g);
            let w = &mut model.weights_mut()[l];
            for ((w, &m), &v) in w.iter_mut().zip(m.iter()).zip(v.iter()) {
                *w -= lr * (m / bias1) / ((v / bias2).sqrt() + EPSILON);
            }

            let g = &grads.biases[l];
            let m = &mut self.m_biases[l];
            let v = &mut self.v_biases[l];
            m.zip_mut_with(g, |m, &g| *m = BETA1 * *m + (1.0 - BETA1) * g);
            v.zip_mut_with(g, |v, &g| *v = BETA2 * *v + (1.0 - BETA2) * g * g);
            let b = &mut model.biases_mut()[l];
            for ((b, &m), &v) in b.iter_mut().zip(m.iter()).zip(v.iter()) {
                *b -= lr * (m / bias1) / ((v / bias2).sqrt() + EPSILON);
            }
        }
    }
}

/// Trains `model` for `epochs` passes of sequential mini-batch Adam on the
/// mean squared reconstruction error. The final short mini-batch of each
/// pass is used as-is.
pub fn train_epochs(
    model: &mut DenseAutoencoder,
    opt: &mut AdamState,
    x: &Array2<f64>,
    epochs: usize,
) -> Result<()> {
    if epochs == 0 {
        return Err(Error::InvalidConfig("epochs must be at least 1".into()));
    }
    if x.nrows() == 0 {
        return Err(Error::InvalidConfig("training data is empty".into()));
    }

    let b = x.nrows();
    let mb = opt.minibatch_size.max(1);
    let n_minibatches = b.div_ceil(mb);
    for epoch in 0..epochs {
        for minibatch in 0..n_minibatches {
            let start = minibatch * mb;
            let end = (start + mb).min(b);
            let chunk = x.slice(s![start..end, ..]);
            let (loss, grads) = model.gradients_view(&chunk);
            if !loss.is_finite() {
                return Err(Error::NumericDivergence { epoch, minibatch });
            }
            opt.apply(model, &grads);
        }
    }

    if !model.is_finite() {
        return Err(Error::NumericDivergence {
            epoch: epochs - 1,
            minibatch: n_minibatches - 1,
        });
    }
    Ok(())
}
