//! Synthetic concept-drift stream generator.
//!
//! Concepts are diagonal Gaussians with separate normal- and anomaly-class
//! distributions. A schedule of segments switches between them abruptly,
//! gradually (point-wise mixture with linearly increasing new-concept
//! probability), or incrementally (linear mean interpolation across the
//! segment). The first segment always emits its concept unmixed.

use std::path::Path;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::Batch;
use crate::error::{Error, Result};

/// Per-class diagonal Gaussian parameters of one concept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConceptSpec {
    pub normal_mean: Vec<f64>,
    /// Diagonal covariance (per-feature variance) of the normal class.
    pub normal_var: Vec<f64>,
    pub anomaly_mean: Vec<f64>,
    pub anomaly_var: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transition {
    Abrupt,
    Gradual,
    Incremental,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    /// Index into `DriftScenario::concepts`.
    pub concept: usize,
    /// Length of the segment in batches.
    pub duration: usize,
    pub transition: Transition,
}

fn default_anomaly_ratio() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftScenario {
    pub dim: usize,
    pub batch_size: usize,
    #[serde(default = "default_anomaly_ratio")]
    pub anomaly_ratio: f64,
    pub seed: u64,
    pub concepts: Vec<ConceptSpec>,
    pub schedule: Vec<Segment>,
}

impl DriftScenario {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let scenario: DriftScenario =
            toml::from_str(s).map_err(|e| Error::InvalidScenario(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn total_batches(&self) -> usize {
        self.schedule.iter().map(|s| s.duration).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidScenario("dim must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidScenario("batch_size must be positive".into()));
        }
        if !(self.anomaly_ratio > 0.0 && self.anomaly_ratio < 0.5) {
            return Err(Error::InvalidScenario(
                "anomaly_ratio must lie in (0, 0.5)".into(),
            ));
        }
        if self.concepts.is_empty() {
            return Err(Error::InvalidScenario("at least one concept required".into()));
        }
        if self.schedule.is_empty() {
            return Err(Error::InvalidScenario("schedule must not be empty".into()));
        }
        for (i, c) in self.concepts.iter().enumerate() {
            for (name, v) in [
                ("normal_mean", &c.normal_mean),
                ("normal_var", &c.normal_var),
                ("anomaly_mean", &c.anomaly_mean),
                ("anomaly_var", &c.anomaly_var),
            ] {
                if v.len() != self.dim {
                    return Err(Error::InvalidScenario(format!(
                        "concept {i}: {name} has length {}, expected dim {}",
                        v.len(),
                        self.dim
                    )));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidScenario(format!(
                        "concept {i}: {name} contains a non-finite value"
                    )));
                }
            }
            if c.normal_var.iter().chain(&c.anomaly_var).any(|&x| x < 0.0) {
                return Err(Error::InvalidScenario(format!(
                    "concept {i}: variances must be nonnegative"
                )));
            }
        }
        for (i, seg) in self.schedule.iter().enumerate() {
            if seg.duration == 0 {
                return Err(Error::InvalidScenario(format!(
                    "segment {i}: duration must be at least 1"
                )));
            }
            if seg.concept >= self.concepts.len() {
                return Err(Error::InvalidScenario(format!(
                    "segment {i}: concept index {} out of range ({} concepts)",
                    seg.concept,
                    self.concepts.len()
                )));
            }
        }
        Ok(())
    }

    /// Anomalies per batch: `round(batch_size * anomaly_ratio)`.
    pub fn anomalies_per_batch(&self) -> usize {
        (self.batch_size as f64 * self.anomaly_ratio).round() as usize
    }
}

/// Class distribution used when sampling one point.
struct ClassParams<'a> {
    mean: &'a [f64],
    var: &'a [f64],
}

pub struct DriftStream {
    scenario: DriftScenario,
    rng: ChaCha8Rng,
    /// (segment index, offset within segment) of the next batch.
    cursor: Option<(usize, usize)>,
    next_index: usize,
}

impl DriftStream {
    pub fn new(scenario: &DriftScenario) -> Result<Self> {
        scenario.validate()?;
        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(scenario.seed),
            scenario: scenario.clone(),
            cursor: Some((0, 0)),
            next_index: 0,
        })
    }

    fn sample_point(&mut self, params: &ClassParams, out: &mut Vec<f64>) {
        for f in 0..self.scenario.dim {
            let noise: f64 = self.rng.sample(StandardNormal);
            out.push(params.mean[f] + params.var[f].sqrt() * noise);
        }
    }

    fn generate_batch(&mut self, segment: usize, offset: usize) -> Batch {
        let scenario = self.scenario.clone();
        let seg = &scenario.schedule[segment];
        let new_concept = &scenario.concepts[seg.concept];
        let prev_concept = segment
            .checked_sub(1)
            .map(|p| &scenario.concepts[scenario.schedule[p].concept]);

        let b = scenario.batch_size;
        let n_anom = scenario.anomalies_per_batch();
        let n_norm = b - n_anom;
        // Progress through the segment; reaches exactly 1 on its last batch.
        let progress = (offset + 1) as f64 / seg.duration as f64;

        // Interpolated means for incremental transitions.
        let (inc_normal_mean, inc_anomaly_mean);
        let incremental = matches!(seg.transition, Transition::Incremental) && prev_concept.is_some();
        if incremental {
            let prev = prev_concept.unwrap();
            inc_normal_mean = lerp(&prev.normal_mean, &new_concept.normal_mean, progress);
            inc_anomaly_mean = lerp(&prev.anomaly_mean, &new_concept.anomaly_mean, progress);
        } else {
            inc_normal_mean = Vec::new();
            inc_anomaly_mean = Vec::new();
        }

        let mut rows: Vec<(Vec<f64>, u8)> = Vec::with_capacity(b);
        let mut point = Vec::with_capacity(scenario.dim);
        for i in 0..b {
            let anomaly = i >= n_norm;
            let params = match (seg.transition, prev_concept) {
                (Transition::Gradual, Some(prev)) => {
                    let use_new = self.rng.random_bool(progress.min(1.0));
                    let spec = if use_new { new_concept } else { prev };
                    class_params(spec, anomaly)
                }
                (Transition::Incremental, Some(_)) => ClassParams {
                    mean: if anomaly { &inc_anomaly_mean } else { &inc_normal_mean },
                    var: if anomaly {
                        &new_concept.anomaly_var
                    } else {
                        &new_concept.normal_var
                    },
                },
                // Abrupt, or the first segment of any transition kind.
                _ => class_params(new_concept, anomaly),
            };
            point.clear();
            self.sample_point(&params, &mut point);
            rows.push((point.clone(), u8::from(anomaly)));
        }
        rows.shuffle(&mut self.rng);

        let mut values = Vec::with_capacity(b * scenario.dim);
        let mut labels = Vec::with_capacity(b);
        for (row, label) in rows {
            values.extend(row);
            labels.push(label);
        }
        let data = Array2::from_shape_vec((b, scenario.dim), values)
            .expect("row-major buffer matches shape");
        let index = self.next_index;
        self.next_index += 1;
        Batch::new(data, Some(labels), index).expect("generated batch is valid")
    }
}

fn class_params(spec: &ConceptSpec, anomaly: bool) -> ClassParams<'_> {
    if anomaly {
        ClassParams {
            mean: &spec.anomaly_mean,
            var: &spec.anomaly_var,
        }
    } else {
        ClassParams {
            mean: &spec.normal_mean,
            var: &spec.normal_var,
        }
    }
}

fn lerp(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    from.iter()
        .zip(to)
        .map(|(a, b)| a + (b - a) * t)
        .collect()
}

impl Iterator for DriftStream {
    type Item = Result<Batch>;

    fn next(&mut self) -> Option<Self::Item> {
        let (segment, offset) = self.cursor?;
        let batch = self.generate_batch(segment, offset);
        self.cursor = if offset + 1 < self.scenario.schedule[segment].duration {
            Some((segment, offset + 1))
        } else if segment + 1 < self.scenario.schedule.len() {
            Some((segment + 1, 0))
        } else {
            None
        };
        Some(Ok(batch))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_concept_scenario(batch_size: usize, transition: Transition) -> DriftScenario {
        let dim = 4;
        DriftScenario {
            dim,
            batch_size,
            anomaly_ratio: 0.01,
            seed: 11,
            concepts: vec![
                ConceptSpec {
                    normal_mean: vec![0.0; dim],
                    normal_var: vec![1.0; dim],
                    anomaly_mean: vec![5.0; dim],
                    anomaly_var: vec![1.0; dim],
                },
                ConceptSpec {
                    normal_mean: vec![10.0; dim],
                    normal_var: vec![1.0; dim],
                    anomaly_mean: vec![15.0; dim],
                    anomaly_var: vec![1.0; dim],
                },
            ],
            schedule: vec![
                Segment {
                    concept: 0,
                    duration: 4,
                    transition: Transition::Abrupt,
                },
                Segment {
                    concept: 1,
                    duration: 4,
                    transition,
                },
            ],
        }
    }

    fn collect(scenario: &DriftScenario) -> Vec<Batch> {
        DriftStream::new(scenario)
            .unwrap()
            .map(|b| b.unwrap())
            .collect()
    }

    #[test]
    fn batch_composition_is_exact() {
        let scenario = two_concept_scenario(512, Transition::Abrupt);
        let batches = collect(&scenario);
        assert_eq!(batches.len(), 8);
        for batch in &batches {
            assert_eq!(batch.len(), 512);
            assert_eq!(batch.dim(), 4);
            let labels = batch.labels.as_ref().unwrap();
            let anomalies: usize = labels.iter().map(|&l| l as usize).sum();
            assert_eq!(anomalies, 5); // round(512 * 0.01)
            assert_eq!(labels.len() - anomalies, 507);
        }
    }

    #[test]
    fn abrupt_switch_jumps_the_batch_mean() {
        let scenario = two_concept_scenario(512, Transition::Abrupt);
        let batches = collect(&scenario);
        let mean0 = |b: &Batch| b.data.column(0).sum() / b.len() as f64;
        let before = mean0(&batches[3]);
        let after = mean0(&batches[4]);
        // Standard error of a batch mean is sigma/sqrt(b) = 1/sqrt(512).
        let se = 1.0 / (512f64).sqrt();
        assert!(
            (after - before).abs() > 5.0 * se,
            "jump {} not significant",
            after - before
        );
        assert!((after - before).abs() > 8.0, "expected ~10, got {}", after - before);
    }

    #[test]
    fn gradual_transition_mixes_concepts() {
        let scenario = two_concept_scenario(512, Transition::Gradual);
        let batches = collect(&scenario);
        let mean0 = |b: &Batch| b.data.column(0).sum() / b.len() as f64;
        // First batch of the gradual segment is mostly old concept, last is
        // fully new.
        let first = mean0(&batches[4]);
        let last = mean0(&batches[7]);
        assert!(first < 5.0, "first gradual batch too new: {first}");
        assert!((last - 10.0).abs() < 1.0, "last gradual batch not new: {last}");
    }

    #[test]
    fn incremental_transition_interpolates_means() {
        let scenario = two_concept_scenario(512, Transition::Incremental);
        let batches = collect(&scenario);
        let mean0 = |b: &Batch| b.data.column(0).sum() / b.len() as f64;
        // Same progress rule: mean of batch 4+j is 10*(j+1)/4.
        for j in 0..4 {
            let expected = 10.0 * (j + 1) as f64 / 4.0;
            let got = mean0(&batches[4 + j]);
            assert!(
                (got - expected).abs() < 0.5,
                "batch {}: expected ~{expected}, got {got}",
                4 + j
            );
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let scenario = two_concept_scenario(64, Transition::Gradual);
        let a = collect(&scenario);
        let b = collect(&scenario);
        assert_eq!(a, b);
        let mut other = scenario.clone();
        other.seed = 12;
        assert_ne!(a, collect(&other));
    }

    #[test]
    fn toml_round_trip_and_unknown_keys() {
        let scenario = two_concept_scenario(64, Transition::Abrupt);
        let text = toml::to_string(&scenario).unwrap();
        let parsed = DriftScenario::from_toml_str(&text).unwrap();
        assert_eq!(parsed, scenario);

        let with_unknown = format!("{text}\nmystery = 3\n");
        assert!(matches!(
            DriftScenario::from_toml_str(&with_unknown),
            Err(Error::InvalidScenario(_))
        ));
    }

    #[test]
    fn validation_rejects_bad_fields() {
        let mut s = two_concept_scenario(64, Transition::Abrupt);
        s.anomaly_ratio = 0.6;
        assert!(s.validate().is_err());

        let mut s = two_concept_scenario(64, Transition::Abrupt);
        s.schedule[0].duration = 0;
        assert!(s.validate().is_err());

        let mut s = two_concept_scenario(64, Transition::Abrupt);
        s.schedule[1].concept = 5;
        assert!(s.validate().is_err());

        let mut s = two_concept_scenario(64, Transition::Abrupt);
        s.concepts[0].normal_mean.pop();
        assert!(s.validate().is_err());
    }
}
