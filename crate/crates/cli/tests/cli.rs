use std::process::{Command, Output};

use modpois_cli::commands::{cmd_ratios, cmd_sample};
use modpois_cli::config::{CommandKind, Format, RunConfig};
use modpois::model::{Coupling, IndexConvention};

fn modpois(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modpois")).args(args).output().unwrap()
}

fn config(command: CommandKind, n: u64, x_grid: Vec<f64>, samples: u64) -> RunConfig {
    RunConfig {
        command,
        n,
        x_grid,
        samples,
        seed: 1,
        convention: IndexConvention::LemmaWeights,
        coupling: Coupling::IteratedSizeBias,
        eps: 1e-14,
        output_path: None,
        format: Format::Csv,
        tolerance_override: None,
    }
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .records()
        .map(Result::unwrap)
        .collect()
}

#[test]
fn ratios_at_one_are_one() {
    let out = modpois(&["ratios", "--n", "10000", "--x", "1", "--x", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 12);
    for r in rows.iter().filter(|r| &r[1] == "1.0000000000000000e0") {
        let ratio: f64 = r[3].parse().unwrap();
        assert!((ratio - 1.0).abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn penalised_model_beats_independent_model() {
    let table = cmd_ratios(&config(CommandKind::Ratios, 1_000_000, vec![2.0], 0)).unwrap();
    let find = |m: &str| table.rows.iter().find(|r| r.model == m).unwrap();
    let dprime = find("dprime");
    let indep = find("indep");
    // both measured against Φ_ω(2)
    assert!(dprime.deviation < (indep.ratio - dprime.reference_phi).abs());
    assert!(table.rows.iter().all(|r| r.mc_halfwidth.is_none()));
}

#[test]
fn outputs_are_byte_identical() {
    let args = ["ratios", "--n", "5000", "--x", "0.5", "--x", "1.5"];
    assert_eq!(modpois(&args).stdout, modpois(&args).stdout);
    let args = ["sample", "--n", "300", "--samples", "20000", "--seed", "9", "--format", "json"];
    let a = modpois(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, modpois(&args).stdout);
}

#[test]
fn json_report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = modpois(&["ratios", "--n", "1000", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["config"]["n"], 1000);
    assert_eq!(v["rows"].as_array().unwrap().len(), 24);
}

#[test]
fn unwritable_output_names_the_path() {
    let out = modpois(&["ratios", "--n", "1000", "--out", "/nonexistent/dir/r.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/dir/r.csv"));
}

#[test]
fn sampler_report_at_ten_thousand() {
    let report = cmd_sample(&config(CommandKind::Sample, 10_000, vec![0.5, 1.5, 2.0], 1_000_000)).unwrap();
    assert!(report.tv_pathwise <= 4e-3, "{}", report.tv_pathwise);
    for r in &report.rows {
        assert!((r.pathwise - r.conditioned).abs() <= r.pathwise_halfwidth.max(r.conditioned_halfwidth));
        assert!((r.pathwise - r.exact).abs() <= r.pathwise_halfwidth);
    }
}

#[test]
fn sample_input_errors() {
    assert!(cmd_sample(&config(CommandKind::Sample, 1000, vec![], 10_000)).is_err());
    assert!(cmd_sample(&config(CommandKind::Sample, 1000, vec![2.0], 999)).is_err());
    let out = modpois(&["sample", "--n", "1000", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let ok = modpois(&["verify"]);
    assert_eq!(ok.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["passed"], true);

    let paper = modpois(&["verify", "--convention", "paper"]);
    assert_eq!(paper.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&paper.stdout).unwrap();
    let oracle = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "construction_oracle").unwrap();
    assert_eq!(oracle["report_only"], true);
    assert!(oracle["value"].as_f64().unwrap() > 1e-6);

    let strict = modpois(&["verify", "--tolerance-override", "0"]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn usage_errors() {
    assert_eq!(modpois(&["ratios", "--unknown"]).status.code(), Some(2));
    assert_eq!(modpois(&["ratios", "--n", "100000001"]).status.code(), Some(2));
    assert_eq!(modpois(&["sample", "--samples", "1000000001"]).status.code(), Some(2));
    assert_eq!(modpois(&["ratios", "--eps", "1.5"]).status.code(), Some(2));
    assert_eq!(modpois(&["ratios", "--x", "-1"]).status.code(), Some(2));
    assert_eq!(modpois(&["ratios", "--n", "3"]).status.code(), Some(1));
}
