//! Batch sources and the prequential driver.

mod csv_io;
mod driver;
mod generator;

use ndarray::Array2;

use crate::error::{Error, Result};

pub use csv_io::{write_stream_csv, CsvStream};
pub use driver::{run_prequential, RunResult};
pub use generator::{ConceptSpec, DriftScenario, DriftStream, Segment, Transition};

/// One batch from a stream: a `b x d` matrix of feature vectors, optional
/// ground-truth anomaly labels (1 = anomaly), and its position in the
/// stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub data: Array2<f64>,
    pub labels: Option<Vec<u8>>,
    pub index: usize,
}

impl Batch {
    pub fn new(data: Array2<f64>, labels: Option<Vec<u8>>, index: usize) -> Result<Self> {
        if let Some(labels) = &labels {
            if labels.len() != data.nrows() {
                return Err(Error::LengthMismatch {
                    left: data.nrows(),
                    right: labels.len(),
                });
            }
            if labels.iter().any(|&l| l > 1) {
                return Err(Error::InvalidConfig("labels must be 0 or 1".into()));
            }
        }
        Ok(Self {
            data,
            labels,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.data.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.data.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.data.ncols()
    }
}
