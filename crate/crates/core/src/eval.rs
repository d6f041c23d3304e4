//! AUC computation, result serialization, and the benchmark harness that
//! compares the adaptive pool against a single incrementally updated model
//! and the ablation variants.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::config::{InferenceMode, MergeMode, RunConfig, UpdateMode};
use crate::error::{Error, Result};
use crate::stream::{run_prequential, DriftScenario, DriftStream, RunResult};

/// Area under the ROC curve: the probability that a uniformly random
/// positive outranks a uniformly random negative, ties counted half.
///
/// Computed by rank summation in O(n log n); requires at least one label of
/// each class.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    if labels.iter().any(|&l| l > 1) {
        return Err(Error::InvalidConfig("labels must be 0 or 1".into()));
    }
    let positives = labels.iter().filter(|&&l| l == 1).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::DegenerateLabels);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("finite scores"));

    // Sum of average ranks (1-based) over the positive class.
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            if labels[idx] == 1 {
                rank_sum += avg_rank;
            }
        }
        i = j + 1;
    }

    let p = positives as f64;
    let n = negatives as f64;
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// AUC over the concatenation of every scored batch in a run.
pub fn stream_auc(result: &RunResult) -> Result<f64> {
    let labels = result
        .labels
        .as_ref()
        .ok_or(Error::DegenerateLabels)?;
    let flat_scores: Vec<f64> = result.scores.iter().flatten().copied().collect();
    let flat_labels: Vec<u8> = labels.iter().flatten().copied().collect();
    auc(&flat_scores, &flat_labels)
}

/// Writes `scores.csv`: one row per scored data point with 17-significant-
/// digit scores; the label column appears only when ground truth exists.
pub fn write_scores_csv(path: impl AsRef<Path>, result: &RunResult) -> Result<()> {
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    let labeled = result.labels.is_some();
    if labeled {
        writeln!(out, "batch_index,point_index,score,label")?;
    } else {
        writeln!(out, "batch_index,point_index,score")?;
    }
    for (i, scores) in result.scores.iter().enumerate() {
        let batch_index = i + 1;
        for (point_index, score) in scores.iter().enumerate() {
            if let Some(labels) = &result.labels {
                writeln!(
                    out,
                    "{batch_index},{point_index},{score:.16e},{}",
                    labels[i][point_index]
                )?;
            } else {
                writeln!(out, "{batch_index},{point_index},{score:.16e}")?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Writes `trace.csv`: pool reliability, pool size, and the adaptation event
/// per batch. Batch 0 is the init row; a pool freshly trained on that batch
/// is fully reliable by construction.
pub fn write_trace_csv(path: impl AsRef<Path>, result: &RunResult) -> Result<()> {
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    writeln!(out, "batch_index,pool_reliability,pool_size,event")?;
    writeln!(out, "0,{},1,init", 1.0)?;
    for i in 0..result.scores.len() {
        writeln!(
            out,
            "{},{},{},{}",
            i + 1,
            result.reliability[i],
            result.pool_sizes[i],
            result.events[i + 1].kind()
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Per-run metrics of one benchmark variant.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub variant: String,
    pub seed: u64,
    pub auc: f64,
    pub mean_pool_size: f64,
    pub max_pool_size: usize,
    pub major_updates: usize,
    pub mean_batch_seconds: f64,
}

/// Mean and standard error of a variant across seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantSummary {
    pub variant: String,
    pub runs: usize,
    pub mean_auc: f64,
    pub se_auc: f64,
    pub mean_pool_size: f64,
    pub mean_major_updates: f64,
    pub mean_batch_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub runs: Vec<RunMetrics>,
    pub summaries: Vec<VariantSummary>,
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

impl BenchmarkReport {
    pub fn summary(&self, variant: &str) -> Option<&VariantSummary> {
        self.summaries.iter().find(|s| s.variant == variant)
    }

    pub fn runs_for<'a>(&'a self, variant: &'a str) -> impl Iterator<Item = &'a RunMetrics> {
        self.runs.iter().filter(move |r| r.variant == variant)
    }

    /// Machine-readable per-run rows.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = BufWriter::new(File::create(path.as_ref())?);
        writeln!(
            out,
            "variant,seed,auc,mean_pool_size,max_pool_size,major_updates,mean_batch_seconds"
        )?;
        for r in &self.runs {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.variant,
                r.seed,
                r.auc,
                r.mean_pool_size,
                r.max_pool_size,
                r.major_updates,
                r.mean_batch_seconds
            )?;
        }
        out.flush()?;
        Ok(())
    }
}

impl fmt::Display for BenchmarkReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<14} {:>4} {:>8} {:>8} {:>10} {:>8} {:>12}",
            "variant", "runs", "auc", "se", "pool_size", "majors", "batch_secs"
        )?;
        for s in &self.summaries {
            writeln!(
                f,
                "{:<14} {:>4} {:>8.4} {:>8.4} {:>10.2} {:>8.1} {:>12.5}",
                s.variant,
                s.runs,
                s.mean_auc,
                s.se_auc,
                s.mean_pool_size,
                s.mean_major_updates,
                s.mean_batch_seconds
            )?;
        }
        Ok(())
    }
}

/// The benchmark variants: the full adaptive pool, the single-model
/// incremental baseline, and optionally the ablation modes.
fn variants(base: &RunConfig, ablations: bool) -> Vec<(String, RunConfig)> {
    let mut adaptive = base.clone();
    adaptive.pool.inference_mode = InferenceMode::ConceptDriven;
    adaptive.pool.merge_mode = MergeMode::Similarity;
    adaptive.pool.update_mode = UpdateMode::DriftAware;

    let mut incremental = adaptive.clone();
    incremental.pool.update_mode = UpdateMode::Incremental;

    let mut list = vec![
        ("adaptive".to_string(), adaptive.clone()),
        ("incremental".to_string(), incremental),
    ];
    if ablations {
        let mut no_merge = adaptive.clone();
        no_merge.pool.merge_mode = MergeMode::Never;
        let mut always_merge = adaptive.clone();
        always_merge.pool.merge_mode = MergeMode::Always;
        let mut single_model = adaptive.clone();
        single_model.pool.inference_mode = InferenceMode::SingleModel;
        list.push(("no_merge".into(), no_merge));
        list.push(("always_merge".into(), always_merge));
        list.push(("single_model".into(), single_model));
    }
    list
}

/// Runs every variant over `seeds` repetitions of the scenario. Repetition
/// `s` shifts both the stream seed and the model seed by `s`, so all
/// variants see identical streams within a repetition.
pub fn run_benchmark(
    scenario: &DriftScenario,
    base: &RunConfig,
    seeds: u64,
    ablations: bool,
) -> Result<BenchmarkReport> {
    if seeds == 0 {
        return Err(Error::InvalidConfig("seeds must be at least 1".into()));
    }
    let variants = variants(base, ablations);
    let mut runs = Vec::new();
    for s in 0..seeds {
        let mut scenario_s = scenario.clone();
        scenario_s.seed = scenario.seed.wrapping_add(s);
        for (name, cfg) in &variants {
            let mut cfg_s = cfg.clone();
            cfg_s.seed = cfg.seed.wrapping_add(s);
            let stream = DriftStream::new(&scenario_s)?;
            let result = run_prequential(stream, &cfg_s)?;
            runs.push(RunMetrics {
                variant: name.clone(),
                seed: s,
                auc: stream_auc(&result)?,
                mean_pool_size: result.mean_pool_size(),
                max_pool_size: result.max_pool_size(),
                major_updates: result.major_updates(),
                mean_batch_seconds: result.mean_batch_seconds(),
            });
        }
    }

    let mut summaries = Vec::new();
    for (name, _) in &variants {
        let of_variant: Vec<&RunMetrics> = runs.iter().filter(|r| &r.variant == name).collect();
        let aucs: Vec<f64> = of_variant.iter().map(|r| r.auc).collect();
        let (mean_auc, se_auc) = mean_and_se(&aucs);
        let mean_pool_size =
            of_variant.iter().map(|r| r.mean_pool_size).sum::<f64>() / of_variant.len() as f64;
        let mean_major_updates =
            of_variant.iter().map(|r| r.major_updates as f64).sum::<f64>() / of_variant.len() as f64;
        let mean_batch_seconds =
            of_variant.iter().map(|r| r.mean_batch_seconds).sum::<f64>() / of_variant.len() as f64;
        summaries.push(VariantSummary {
            variant: name.clone(),
            runs: of_variant.len(),
            mean_auc,
            se_auc,
            mean_pool_size,
            mean_major_updates,
            mean_batch_seconds,
        });
    }
    Ok(BenchmarkReport { runs, summaries })
}
