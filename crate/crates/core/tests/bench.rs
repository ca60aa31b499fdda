mod common;

use std::path::PathBuf;

use fstsp::bench::{
    emit_report, emit_sweep, run_experiment, sweep_hyperparameters, write_reports, ExperimentSpec,
    ReportFormat, SweepDesign, SweepGrid, SweepSpec, CSV_HEADER,
};
use fstsp::{Error, GAConfig};

use common::*;

fn spec(names: &[&str], trials: usize) -> ExperimentSpec {
    ExperimentSpec {
        instances: names
            .iter()
            .map(|n| data_dir().join(format!("{n}.txt")))
            .collect(),
        trials,
        config: GAConfig {
            num_generations: 3_000,
            seed: 11,
            ..GAConfig::default()
        },
        reference_values: references().into_iter().collect(),
        format: None,
        output_dir: None,
    }
}

/// Drops the wall-time column, which is the only non-deterministic one.
fn without_time(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            f.remove(6);
            f.join(",")
        })
        .collect()
}

#[test]
fn same_seed_same_report() {
    let s = spec(&["s5_01", "s6_02"], 4);
    let a = emit_report(&run_experiment(&s, 1).unwrap(), ReportFormat::Csv).unwrap();
    let b = emit_report(&run_experiment(&s, 2).unwrap(), ReportFormat::Csv).unwrap();
    assert_eq!(without_time(&a), without_time(&b));
    assert_eq!(a.lines().next(), Some(CSV_HEADER));
    assert_eq!(a.lines().count(), 3);
}

#[test]
fn summary_statistics_are_consistent() {
    let report = run_experiment(&spec(&["s5_02", "s5_03"], 5), 1).unwrap();
    for row in &report.instances {
        assert_eq!(row.trials.len(), 5);
        assert_eq!(row.failed_trials, 0);
        let best = row.best.unwrap();
        assert!(best <= row.mean.unwrap() + 1e-12);
        // References are proven optima, so no trial can beat them.
        assert!(row.gap_pct.unwrap() >= -1e-9);
        let seeds: Vec<u64> = row.trials.iter().map(|t| t.seed).collect();
        assert_eq!(seeds, vec![11, 12, 13, 14, 15]);
    }
}

#[test]
fn missing_reference_leaves_gap_empty() {
    let mut s = spec(&["r20"], 1);
    s.reference_values.clear();
    let report = run_experiment(&s, 1).unwrap();
    let csv = emit_report(&report, ReportFormat::Csv).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "r20");
    assert_eq!(row[1], "19");
    assert_eq!(row[5], "");
    assert_eq!(row[7], "");
    let json: serde_json::Value =
        serde_json::from_str(&emit_report(&report, ReportFormat::Json).unwrap()).unwrap();
    assert!(json["instances"][0]["gap_pct"].is_null());
}

#[test]
fn missing_instance_fails_before_running() {
    let mut s = spec(&["s5_01"], 1);
    s.instances.push(PathBuf::from("/nonexistent/instance.txt"));
    assert!(matches!(run_experiment(&s, 1), Err(Error::Io { .. })));
    s.instances.pop();
    s.trials = 0;
    assert!(matches!(run_experiment(&s, 1), Err(Error::Config(_))));
}

#[test]
fn reports_written_to_disk() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&spec(&["s5_04"], 2), 1).unwrap();
    write_reports(&report, dir.path()).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(csv.starts_with(CSV_HEADER));
    let json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(json.contains("\"instance\": \"s5_04\""));
}

#[test]
fn spec_file_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(data_dir().join("s5_05.txt"), dir.path().join("s5_05.txt")).unwrap();
    let path = dir.path().join("spec.json");
    std::fs::write(
        &path,
        r#"{"instances": ["s5_05.txt"], "trials": 2, "config": {"num_generations": 100}}"#,
    )
    .unwrap();
    let s = ExperimentSpec::load(&path).unwrap();
    assert_eq!(s.instances[0], dir.path().join("s5_05.txt"));
    assert_eq!(run_experiment(&s, 1).unwrap().instances[0].trials.len(), 2);
    std::fs::write(&path, r#"{"instances": [], "trails": 2}"#).unwrap();
    assert!(ExperimentSpec::load(&path).is_err());
}

#[test]
fn degenerate_sweep_matches_experiment() {
    let s = spec(&["s6_03"], 3);
    let sweep = SweepSpec {
        instance: s.instances[0].clone(),
        trials: 3,
        base: s.config.clone(),
        grid: SweepGrid::default(),
        design: SweepDesign::Full,
        allow_large: false,
    };
    let rows = sweep_hyperparameters(&sweep, 1).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].selected);
    let report = run_experiment(&s, 1).unwrap();
    assert_eq!(rows[0].mean, report.instances[0].mean);
    let csv = emit_sweep(&rows, ReportFormat::Csv).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().ends_with(",true"));
}

#[test]
fn l16_sweep_has_seventeen_rows() {
    let sweep = SweepSpec {
        instance: data_dir().join("s5_06.txt"),
        trials: 1,
        base: GAConfig {
            num_generations: 200,
            ..GAConfig::default()
        },
        grid: SweepGrid {
            innovation_rate: Some(vec![1, 3, 5, 9]),
            initial_drone_pct: Some(vec![1.0, 5.0, 10.0, 20.0]),
            population_size: Some(vec![10, 20, 30, 40]),
            tournament_size: Some(vec![2, 3, 4, 6]),
        },
        design: SweepDesign::L16,
        allow_large: false,
    };
    let rows = sweep_hyperparameters(&sweep, 1).unwrap();
    assert_eq!(rows.len(), 17);
    assert_eq!(rows.iter().filter(|r| r.selected).count(), 1);
    let last = rows.last().unwrap();
    assert!(last.selected);
    assert_eq!(
        (
            last.innovation_rate,
            last.population_size,
            last.tournament_size
        ),
        (7, 50, 5)
    );
    assert!(rows.iter().all(|r| r.mean.is_some()));
}
