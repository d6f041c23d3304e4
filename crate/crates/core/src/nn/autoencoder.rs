//! Dense autoencoder: a symmetric encoder/decoder MLP with tanh hidden
//! layers and a linear output layer.
//!
//! Layer widths interpolate linearly from the input width down to the
//! latent width and back up again, so `input_dim=784, latent_dim=20,
//! hidden_layers=3` gives `[784, 529, 274, 20, 274, 529, 784]`.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Per-parameter gradients of the mean squared reconstruction error.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseAutoencoder {
    layer_dims: Vec<usize>,
    weights: Vec<Array2<f64>>,
    biases: Vec<Array1<f64>>,
}

/// Encoder widths from `input_dim` down to `latent_dim` over `hidden_layers`
/// transitions, truncating the linear interpolation to integers.
fn encoder_dims(input_dim: usize, latent_dim: usize, hidden_layers: usize) -> Vec<usize> {
    let n = hidden_layers;
    let mut dims = Vec::with_capacity(n + 1);
    dims.push(input_dim);
    for i in 1..n {
        let d = input_dim as f64
            + (latent_dim as f64 - input_dim as f64) * (i as f64) / (n as f64);
        dims.push(d.floor() as usize);
    }
    dims.push(latent_dim);
    dims
}

impl DenseAutoencoder {
    /// Builds a seeded autoencoder. Weights are uniform in
    /// `±sqrt(6/(fan_in+fan_out))`, biases start at zero.
    pub fn init(
        input_dim: usize,
        latent_dim: usize,
        hidden_layers: usize,
        seed: u64,
    ) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::InvalidConfig("input_dim must be positive".into()));
        }
        if latent_dim == 0 {
            return Err(Error::InvalidConfig("latent_dim must be positive".into()));
        }
        if latent_dim >= input_dim {
            return Err(Error::InvalidConfig(format!(
                "latent_dim {latent_dim} must be smaller than input_dim {input_dim}"
            )));
        }
        if hidden_layers < 1 {
            return Err(Error::InvalidConfig(
                "hidden_layers must be at least 1".into(),
            ));
        }

        let enc = encoder_dims(input_dim, latent_dim, hidden_layers);
        let mut layer_dims = enc.clone();
        layer_dims.extend(enc.iter().rev().skip(1));

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::with_capacity(layer_dims.len() - 1);
        let mut biases = Vec::with_capacity(layer_dims.len() - 1);
        for win in layer_dims.windows(2) {
            let (fan_in, fan_out) = (win[0], win[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let dist = Uniform::new_inclusive(-limit, limit)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            weights.push(Array2::from_shape_fn((fan_in, fan_out), |_| {
                dist.sample(&mut rng)
            }));
            biases.push(Array1::zeros(fan_out));
        }

        Ok(Self {
            layer_dims,
            weights,
            biases,
        })
    }

    /// Rebuilds a model from explicit parameters (used by model merging).
    pub fn from_parameters(
        layer_dims: Vec<usize>,
        weights: Vec<Array2<f64>>,
        biases: Vec<Array1<f64>>,
    ) -> Result<Self> {
        if layer_dims.len() < 3 || weights.len() != layer_dims.len() - 1 || biases.len() != weights.len() {
            return Err(Error::InvalidConfig(
                "parameter lists do not match layer_dims".into(),
            ));
        }
        for (l, w) in weights.iter().enumerate() {
            if w.dim() != (layer_dims[l], layer_dims[l + 1]) || biases[l].len() != layer_dims[l + 1]
            {
                return Err(Error::InvalidConfig(format!(
                    "parameter shape mismatch at layer {l}"
                )));
            }
        }
        Ok(Self {
            layer_dims,
            weights,
            biases,
        })
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn latent_dim(&self) -> usize {
        self.layer_dims[self.layer_dims.len() / 2]
    }

    /// Total number of scalar parameters.
    pub fn param_count(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>()
            + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    pub fn weights(&self) -> &[Array2<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Array1<f64>] {
        &self.biases
    }

    pub fn weights_mut(&mut self) -> &mut [Array2<f64>] {
        &mut self.weights
    }

    pub fn biases_mut(&mut self) -> &mut [Array1<f64>] {
        &mut self.biases
    }

    fn check_input(&self, x: &ArrayView2<f64>) -> Result<()> {
        if x.ncols() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                actual: x.ncols(),
            });
        }
        Ok(())
    }

    /// Activations at every layer, input included. `acts[l+1]` is the output
    /// of layer `l`; hidden layers apply tanh, the output layer is linear.
    fn activations(&self, x: &ArrayView2<f64>) -> Vec<Array2<f64>> {
        let n_layers = self.weights.len();
        let mut acts = Vec::with_capacity(n_layers + 1);
        acts.push(x.to_owned());
        for l in 0..n_layers {
            let z = acts[l].dot(&self.weights[l]) + &self.biases[l];
            if l == n_layers - 1 {
                acts.push(z);
            } else {
                acts.push(z.mapv(f64::tanh));
            }
        }
        acts
    }

    /// Runs the batch through the network, returning the latent
    /// representation and the reconstruction.
    pub fn forward(&self, x: &Array2<f64>) -> Result<(Array2<f64>, Array2<f64>)> {
        self.check_input(&x.view())?;
        let mut acts = self.activations(&x.view());
        let latent_index = self.layer_dims.len() / 2;
        let reconstruction = acts.pop().expect("activations nonempty");
        let latent = acts.swap_remove(latent_index);
        Ok((latent, reconstruction))
    }

    /// The latent representation only.
    pub fn latent(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        let (latent, _) = self.forward(x)?;
        Ok(latent)
    }

    /// Per-point anomaly score: squared reconstruction error averaged over
    /// the input dimensions, `||x - x_hat||^2 / d`.
    pub fn reconstruction_scores(&self, x: &Array2<f64>) -> Result<Vec<f64>> {
        let (_, x_hat) = self.forward(x)?;
        let d = self.input_dim() as f64;
        let diff = &x_hat - x;
        Ok(diff
            .rows()
            .into_iter()
            .map(|row| row.iter().map(|v| v * v).sum::<f64>() / d)
            .collect())
    }

    /// Mean squared reconstruction error over the whole batch.
    pub fn loss(&self, x: &Array2<f64>) -> Result<f64> {
        self.check_input(&x.view())?;
        Ok(self.loss_view(&x.view()))
    }

    fn loss_view(&self, x: &ArrayView2<f64>) -> f64 {
        let acts = self.activations(x);
        let x_hat = acts.last().expect("activations nonempty");
        let diff = x_hat - x;
        diff.iter().map(|v| v * v).sum::<f64>() / (x.nrows() * x.ncols()) as f64
    }

    /// Loss and its gradient with respect to every parameter.
    pub fn gradients(&self, x: &Array2<f64>) -> Result<(f64, Gradients)> {
        self.check_input(&x.view())?;
        Ok(self.gradients_view(&x.view()))
    }

    pub(crate) fn gradients_view(&self, x: &ArrayView2<f64>) -> (f64, Gradients) {
        let n_layers = self.weights.len();
        let acts = self.activations(x);
        let x_hat = &acts[n_layers];
        let diff = x_hat - x;
        let scale = (x.nrows() * x.ncols()) as f64;
        let loss = diff.iter().map(|v| v * v).sum::<f64>() / scale;

        let mut grad_w = vec![Array2::zeros((0, 0)); n_layers];
        let mut grad_b = vec![Array1::zeros(0); n_layers];

        // Output layer is linear, so dL/dz starts as 2*(x_hat - x)/(b*d).
        let mut delta = diff * (2.0 / scale);
        for l in (0..n_layers).rev() {
            grad_w[l] = acts[l].t().dot(&delta);
            grad_b[l] = delta.sum_axis(Axis(0));
            if l > 0 {
                let upstream = delta.dot(&self.weights[l].t());
                // acts[l] is a tanh output here; tanh' = 1 - tanh^2.
                delta = upstream * acts[l].mapv(|h| 1.0 - h * h);
            }
        }

        (
            loss,
            Gradients {
                weights: grad_w,
                biases: grad_b,
            },
        )
    }

    /// True when every parameter is finite.
    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.iter().all(|v| v.is_finite()))
            && self.biases.iter().all(|b| b.iter().all(|v| v.is_finite()))
    }
}
