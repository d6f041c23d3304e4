//! Full-pipeline test: a generated stream written to CSV and read back
//! drives the engine to bit-identical results.

use driftpool_core::stream::{
    write_stream_csv, ConceptSpec, CsvStream, DriftScenario, DriftStream, Segment, Transition,
};
use driftpool_core::*;

fn scenario() -> DriftScenario {
    let dim = 6;
    DriftScenario {
        dim,
        batch_size: 96,
        anomaly_ratio: 0.03,
        seed: 77,
        concepts: vec![
            ConceptSpec {
                normal_mean: vec![0.0; dim],
                normal_var: vec![0.3, 0.25, 0.2, 0.05, 0.05, 0.05],
                anomaly_mean: vec![1.5; dim],
                anomaly_var: vec![0.05; dim],
            },
            ConceptSpec {
                normal_mean: vec![3.0; dim],
                normal_var: vec![0.05, 0.05, 0.05, 0.3, 0.25, 0.2],
                anomaly_mean: vec![1.5; dim],
                anomaly_var: vec![0.05; dim],
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
                transition: Transition::Gradual,
            },
        ],
    }
}

fn config() -> RunConfig {
    RunConfig::new(
        PoolConfig::default(),
        ModelConfig {
            latent_dim: 2,
            hidden_layers: 1,
            ..ModelConfig::default()
        },
        5,
    )
}

#[test]
fn csv_round_trip_reproduces_the_run() {
    let scenario = scenario();
    let direct = run_prequential(DriftStream::new(&scenario).unwrap(), &config()).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stream.csv");
    let batches: Vec<Batch> = DriftStream::new(&scenario)
        .unwrap()
        .collect::<Result<_>>()
        .unwrap();
    write_stream_csv(&path, &batches).unwrap();

    let reread = CsvStream::open(&path, scenario.batch_size, Some("label")).unwrap();
    let from_csv = run_prequential(reread, &config()).unwrap();

    assert_eq!(direct.scores, from_csv.scores);
    assert_eq!(direct.labels, from_csv.labels);
    assert_eq!(direct.events, from_csv.events);
    assert_eq!(
        stream_auc(&direct).unwrap(),
        stream_auc(&from_csv).unwrap()
    );
}

#[test]
fn trace_and_scores_serialize_consistently() {
    let scenario = scenario();
    let result = run_prequential(DriftStream::new(&scenario).unwrap(), &config()).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let scores_path = dir.path().join("scores.csv");
    let trace_path = dir.path().join("trace.csv");
    eval::write_scores_csv(&scores_path, &result).unwrap();
    eval::write_trace_csv(&trace_path, &result).unwrap();

    let scores_text = std::fs::read_to_string(&scores_path).unwrap();
    let mut lines = scores_text.lines();
    assert_eq!(lines.next().unwrap(), "batch_index,point_index,score,label");
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        let batch: usize = fields[0].parse().unwrap();
        let point: usize = fields[1].parse().unwrap();
        let score: f64 = fields[2].parse().unwrap();
        assert_eq!(score, result.scores[batch - 1][point], "17 significant digits round-trip");
        rows += 1;
    }
    assert_eq!(rows, result.scores.iter().map(Vec::len).sum::<usize>());

    let trace_text = std::fs::read_to_string(&trace_path).unwrap();
    let lines: Vec<&str> = trace_text.lines().collect();
    assert_eq!(lines.len(), 2 + result.scored_batches());
    for (i, line) in lines.iter().enumerate().skip(2) {
        let fields: Vec<&str> = line.split(',').collect();
        let batch = i - 1;
        assert_eq!(fields[0], batch.to_string());
        assert_eq!(fields[1].parse::<f64>().unwrap(), result.reliability[batch - 1]);
        assert_eq!(fields[2].parse::<usize>().unwrap(), result.pool_sizes[batch - 1]);
        assert!(matches!(fields[3], "minor" | "major"));
    }
}

#[test]
fn stationary_stream_benchmark_is_a_tie() {
    // With nothing drifting, pooling is a no-op: the adaptive engine and
    // the single incremental baseline land within 0.03 AUC of each other.
    let dim = 6;
    let scenario = DriftScenario {
        dim,
        batch_size: 128,
        anomaly_ratio: 0.02,
        seed: 11,
        concepts: vec![ConceptSpec {
            normal_mean: vec![0.0; dim],
            normal_var: vec![0.3, 0.25, 0.2, 0.05, 0.05, 0.05],
            anomaly_mean: vec![2.0; dim],
            anomaly_var: vec![0.05; dim],
        }],
        schedule: vec![Segment {
            concept: 0,
            duration: 12,
            transition: Transition::Abrupt,
        }],
    };
    let report = eval::run_benchmark(&scenario, &config(), 5, false).unwrap();
    let adaptive = report.summary("adaptive").unwrap();
    let incremental = report.summary("incremental").unwrap();
    assert!(
        (adaptive.mean_auc - incremental.mean_auc).abs() <= 0.03,
        "adaptive {:.4} vs incremental {:.4}",
        adaptive.mean_auc,
        incremental.mean_auc
    );
}

#[test]
fn alternating_concepts_settle_at_two_models() {
    // Two alternating well-separated concepts: once both have been seen the
    // pool holds two models and every recurrence is a minor update.
    let dim = 16;
    let block = |b: usize| -> Vec<f64> {
        let mut var = vec![0.0324; dim];
        let decay = [1.0, 0.9, 0.8, 0.7];
        for (i, d) in decay.iter().enumerate() {
            let s: f64 = 0.3 * d;
            var[b * 4 + i] = s * s;
        }
        var
    };
    let concept = |b: usize| ConceptSpec {
        normal_mean: (0..dim)
            .map(|f| if (b * 4..b * 4 + 4).contains(&f) { 3.0 } else { 0.0 })
            .collect(),
        normal_var: block(b),
        anomaly_mean: vec![1.5; dim],
        anomaly_var: vec![0.0324; dim],
    };

    let mut stable_seeds = 0;
    for seed in 0..5u64 {
        let scenario = DriftScenario {
            dim,
            batch_size: 512,
            anomaly_ratio: 0.01,
            seed: 300 + seed,
            concepts: vec![concept(0), concept(2)],
            schedule: (0..6)
                .map(|i| Segment {
                    concept: i % 2,
                    duration: 5,
                    transition: Transition::Abrupt,
                })
                .collect(),
        };
        let cfg = RunConfig::new(
            PoolConfig {
                epochs_init: 10,
                ..PoolConfig::default()
            },
            ModelConfig {
                latent_dim: 2,
                hidden_layers: 2,
                learning_rate: 3e-3,
                minibatch_size: 32,
            },
            800 + seed,
        );
        let result = run_prequential(DriftStream::new(&scenario).unwrap(), &cfg).unwrap();

        // Both concepts have been seen once the second segment started.
        let both_seen = 5;
        let stable = result.pool_sizes.iter().skip(both_seen).all(|&p| p == 2)
            && result
                .events
                .iter()
                .enumerate()
                .filter(|(i, _)| *i > both_seen)
                .all(|(_, e)| matches!(e, AdaptationEvent::Minor { .. }));
        if stable {
            stable_seeds += 1;
        }
    }
    assert!(
        stable_seeds >= 4,
        "pool settled at two models in only {stable_seeds}/5 seeds"
    );
}
