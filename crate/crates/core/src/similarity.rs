//! Linear-kernel centered kernel alignment between two latent
//! representations of the same batch.
//!
//! Both matrices are column-centered first; the similarity is then
//! `||Z1^T Z2||_F^2 / (||Z1^T Z1||_F * ||Z2^T Z2||_F)`, which equals the
//! HSIC ratio on centered linear Gram matrices. The value lies in [0, 1]
//! and is invariant to orthogonal transformations and positive isotropic
//! scaling of either argument.

use ndarray::{Array2, Axis};

use crate::error::{Error, Result};

fn center_columns(z: &Array2<f64>) -> Array2<f64> {
    let means = z.mean_axis(Axis(0)).expect("nonempty matrix");
    z - &means
}

fn frobenius(m: &Array2<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// CKA similarity of two representations with equal row counts.
///
/// Fails with [`Error::DegenerateRepresentation`] when either matrix is
/// exactly zero after centering (for example a collapsed latent space);
/// pool compaction treats that case as "not similar".
pub fn cka_similarity(z1: &Array2<f64>, z2: &Array2<f64>) -> Result<f64> {
    if z1.nrows() != z2.nrows() {
        return Err(Error::LengthMismatch {
            left: z1.nrows(),
            right: z2.nrows(),
        });
    }
    if z1.nrows() < 2 {
        return Err(Error::TooFewRows(z1.nrows()));
    }

    let c1 = center_columns(z1);
    let c2 = center_columns(z2);
    let self1 = frobenius(&c1.t().dot(&c1));
    let self2 = frobenius(&c2.t().dot(&c2));
    if self1 == 0.0 || self2 == 0.0 {
        return Err(Error::DegenerateRepresentation);
    }

    let cross = c1.t().dot(&c2);
    let numerator = cross.iter().map(|v| v * v).sum::<f64>();
    // Cauchy-Schwarz bounds the ratio by 1; clamp the floating-point spill.
    Ok((numerator / (self1 * self2)).min(1.0))
}
