//! End-to-end CLI behavior: exit codes, file outputs, determinism, and the
//! config-file precedence rules.

use std::path::Path;
use std::process::{Command, Output};

fn ghpd(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghpd"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.to_string_lossy().into_owned()
}

fn binomial_json(dir: &Path) -> String {
    write(
        dir,
        "binom.json",
        r#"{"labels":["0","1","2","3","4","5"],"weights":[1,5,10,10,5,1]}"#,
    )
}

fn parse_json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).expect("valid JSON output")
}

#[test]
fn compute_binomial_reports_threshold_and_gamma() {
    let dir = tempfile::tempdir().unwrap();
    let input = binomial_json(dir.path());
    let out = ghpd(&["compute", "--input", &input, "--alpha", "0.05"], dir.path());
    assert!(out.status.success());
    let value = parse_json(&out.stdout);
    assert_eq!(value["kappa"].as_f64().unwrap(), 0.03125);
    assert!((value["gamma"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    assert!((value["credible_mass"].as_f64().unwrap() - 0.95).abs() < 1e-12);
    assert_eq!(value["interior"].as_array().unwrap().len(), 4);
}

#[test]
fn compute_rejects_alpha_outside_unit_interval() {
    let dir = tempfile::tempdir().unwrap();
    let input = binomial_json(dir.path());
    let out = ghpd(&["compute", "--input", &input, "--alpha", "1.5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--alpha"), "{stderr}");
}

#[test]
fn compute_distinguishes_input_errors_from_invariant_errors() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = write(dir.path(), "garbage.json", "{not json");
    let out = ghpd(&["compute", "--input", &garbage], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let off = write(
        dir.path(),
        "off.json",
        r#"{"labels":["a","b"],"probs":[0.7,0.2]}"#,
    );
    let out = ghpd(&["compute", "--input", &off], dir.path());
    assert_eq!(out.status.code(), Some(3), "far-from-normalized is an invariant violation");
}

#[test]
fn failed_compute_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let off = write(
        dir.path(),
        "off.json",
        r#"{"labels":["a","b"],"probs":[0.7,0.2]}"#,
    );
    let target = dir.path().join("phi.json");
    let out = ghpd(
        &["compute", "--input", &off, "--output", target.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(!target.exists(), "output must stay untouched on failure");
}

#[test]
fn compute_grid_finds_the_normal_interval() {
    let dir = tempfile::tempdir().unwrap();
    let step = 0.005f64;
    let cells = (12.0 / step).round() as usize;
    let density: Vec<String> = (0..cells)
        .map(|i| {
            let x = -6.0 + (i as f64 + 0.5) * step;
            format!("{:.17e}", (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt())
        })
        .collect();
    let grid = write(
        dir.path(),
        "grid.json",
        &format!(
            r#"{{"lo":-6,"hi":6,"step":{step},"density":[{}]}}"#,
            density.join(",")
        ),
    );
    let out = ghpd(&["compute", "--input", &grid, "--alpha", "0.05"], dir.path());
    assert!(out.status.success());
    let value = parse_json(&out.stdout);
    let intervals = value["intervals"].as_array().unwrap();
    assert_eq!(intervals.len(), 1);
    let lo = intervals[0][0].as_f64().unwrap();
    let hi = intervals[0][1].as_f64().unwrap();
    assert!((lo + 1.959964).abs() <= 2.0 * step, "lo {lo}");
    assert!((hi - 1.959964).abs() <= 2.0 * step, "hi {hi}");
}

#[test]
fn format_both_needs_an_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let input = binomial_json(dir.path());
    let out = ghpd(
        &["compute", "--input", &input, "--format", "both"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let out = ghpd(
        &["compute", "--input", &input, "--format", "both", "--output", "out"],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(dir.path().join("out.json").exists());
    assert!(dir.path().join("out.svg").exists());
}

#[test]
fn simulate_is_byte_stable_and_level_exact() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let out = ghpd(
            &["simulate", "--seed", "42", "--output", name],
            dir.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["dataset.csv", "records.jsonl", "panel.svg"] {
        let a = std::fs::read(dir.path().join("a").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
    let records = std::fs::read_to_string(dir.path().join("a/records.jsonl")).unwrap();
    let lines: Vec<&str> = records.lines().collect();
    assert_eq!(lines.len(), 30);
    for line in lines {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        let mass = record["phi"]["credible_mass"].as_f64().unwrap();
        assert!((mass - 0.95).abs() <= 1e-9);
    }
    let csv = std::fs::read_to_string(dir.path().join("a/dataset.csv")).unwrap();
    assert_eq!(csv.lines().count(), 31); // header + 30 rows
}

#[test]
fn lower_level_gives_smaller_sets() {
    let dir = tempfile::tempdir().unwrap();
    let mut means = Vec::new();
    for alpha in ["0.5", "0.05"] {
        let out_dir = format!("out{alpha}");
        let out = ghpd(
            &["simulate", "--seed", "42", "--alpha", alpha, "--output", &out_dir],
            dir.path(),
        );
        assert!(out.status.success());
        let records =
            std::fs::read_to_string(dir.path().join(&out_dir).join("records.jsonl")).unwrap();
        let sizes: Vec<f64> = records
            .lines()
            .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["phi"]["size"]
                .as_f64()
                .unwrap())
            .collect();
        means.push(sizes.iter().sum::<f64>() / sizes.len() as f64);
    }
    assert!(
        means[0] < means[1],
        "mean size at alpha=0.5 ({}) must be below alpha=0.05 ({})",
        means[0],
        means[1]
    );
}

#[test]
fn classify_round_trips_the_simulated_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = ghpd(&["simulate", "--seed", "42", "--output", "sim"], dir.path());
    assert!(out.status.success());
    let dataset = dir.path().join("sim/dataset.csv");
    let out = ghpd(
        &[
            "classify",
            "--train",
            dataset.to_str().unwrap(),
            "--test",
            dataset.to_str().unwrap(),
            "--output",
            "cls",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sim_records = std::fs::read_to_string(dir.path().join("sim/records.jsonl")).unwrap();
    let cls_records = std::fs::read_to_string(dir.path().join("cls/predictions.jsonl")).unwrap();
    for (a, b) in sim_records.lines().zip(cls_records.lines()) {
        let a: serde_json::Value = serde_json::from_str(a).unwrap();
        let b: serde_json::Value = serde_json::from_str(b).unwrap();
        assert_eq!(a["predicted"], b["predicted"], "pipelines disagree");
    }
    assert!(dir.path().join("cls/model.json").exists());
}

#[test]
fn classify_two_class_closed_form_posterior() {
    let dir = tempfile::tempdir().unwrap();
    // class A: sample mean 0, sample variance 1; class B: mean 2, variance 1
    let train = write(
        dir.path(),
        "train.csv",
        "f1,label\n-1,A\n0,A\n1,A\n1,B\n2,B\n3,B\n",
    );
    let test = write(dir.path(), "test.csv", "f1\n0\n1\n2\n");
    let out = ghpd(
        &["classify", "--train", &train, "--test", &test, "--output", "out"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let records = std::fs::read_to_string(dir.path().join("out/predictions.jsonl")).unwrap();
    let rows: Vec<serde_json::Value> = records
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), 3);
    // x = 0: unit-variance classes at 0 and 2 give 1/(1 + e^-2)
    let expected = 1.0 / (1.0 + (-2.0f64).exp());
    let p = rows[0]["posterior"]["A"].as_f64().unwrap();
    assert!((p - expected).abs() < 1e-9, "posterior {p} vs {expected}");
    let q = rows[0]["posterior"]["B"].as_f64().unwrap();
    assert!((q - (1.0 - expected)).abs() < 1e-9);
    // midpoint splits evenly, far side flips the prediction
    let p_mid = rows[1]["posterior"]["A"].as_f64().unwrap();
    assert!((p_mid - 0.5).abs() < 1e-9, "midpoint posterior {p_mid}");
    assert_eq!(rows[0]["predicted"], "A");
    assert_eq!(rows[2]["predicted"], "B");
}

#[test]
fn simulate_reports_fit_failure_as_model_error() {
    let dir = tempfile::tempdir().unwrap();
    // 2 samples per class cannot support a 2-D covariance (needs d + 1 = 3)
    let out = ghpd(
        &["simulate", "--per-class", "2", "--output", "out"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(!dir.path().join("out/records.jsonl").exists());
}

#[test]
fn classify_rejects_dimension_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let train = write(
        dir.path(),
        "train.csv",
        "f1,f2,label\n0,0,A\n1,1,A\n2,0,A\n5,5,B\n6,4,B\n5,4,B\n",
    );
    let test = write(dir.path(), "test.csv", "f1\n1\n");
    let out = ghpd(
        &["classify", "--train", &train, "--test", &test],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_reports_fit_failure_as_model_error() {
    let dir = tempfile::tempdir().unwrap();
    // class B has 2 samples in 2 dimensions: below the d+1 floor
    let train = write(
        dir.path(),
        "train.csv",
        "f1,f2,label\n0,0,A\n1,1,A\n2,0,A\n5,5,B\n6,4,B\n",
    );
    let test = write(dir.path(), "test.csv", "f1,f2\n1,1\n");
    let out = ghpd(
        &["classify", "--train", &train, "--test", &test],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn wheel_renders_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let input = binomial_json(dir.path());
    let out = ghpd(
        &["compute", "--input", &input, "--output", "phi.json"],
        dir.path(),
    );
    assert!(out.status.success());

    let svg1 = ghpd(&["wheel", "--input", "phi.json"], dir.path());
    assert!(svg1.status.success());
    let text = String::from_utf8_lossy(&svg1.stdout);
    assert_eq!(text.matches("<line").count(), 6);
    let svg2 = ghpd(&["wheel", "--input", "phi.json"], dir.path());
    assert_eq!(svg1.stdout, svg2.stdout, "identical inputs must render identical bytes");

    // corrupt one membership value: neither 0, gamma, nor 1
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("phi.json")).unwrap())
            .unwrap();
    doc["phi"]["2"] = serde_json::json!(0.5);
    std::fs::write(dir.path().join("bad_phi.json"), doc.to_string()).unwrap();
    let out = ghpd(&["wheel", "--input", "bad_phi.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compute_accepts_posterior_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "post.csv", "label,prob\nh,0.9\nt,0.1\n");
    let out = ghpd(&["compute", "--input", &input, "--alpha", "0.2"], dir.path());
    assert!(out.status.success());
    let value = parse_json(&out.stdout);
    assert_eq!(value["kappa"].as_f64().unwrap(), 0.9);
    assert!((value["gamma"].as_f64().unwrap() - 0.8 / 0.9).abs() < 1e-12);
}

#[test]
fn large_simulation_keeps_every_record_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = ghpd(
        &["simulate", "--seed", "7", "--per-class", "1000", "--format", "json", "--output", "big"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let records = std::fs::read_to_string(dir.path().join("big/records.jsonl")).unwrap();
    let mut n = 0;
    for line in records.lines() {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        let mass = record["phi"]["credible_mass"].as_f64().unwrap();
        assert!((mass - 0.95).abs() <= 1e-9, "record {n}: mass {mass}");
        n += 1;
    }
    assert_eq!(n, 3000);
}

#[test]
fn emitted_documents_revalidate_through_the_wheel_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = ghpd(&["simulate", "--seed", "42", "--output", "sim"], dir.path());
    assert!(out.status.success());
    let records = std::fs::read_to_string(dir.path().join("sim/records.jsonl")).unwrap();
    for (i, line) in records.lines().enumerate().take(5) {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        let phi_doc = record["phi"].to_string();
        let path = write(dir.path(), &format!("phi{i}.json"), &phi_doc);
        let out = ghpd(&["wheel", "--input", &path], dir.path());
        assert!(
            out.status.success(),
            "record {i} failed re-validation: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn config_file_sets_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let input = binomial_json(dir.path());
    let config = write(dir.path(), "ghpd.conf", "alpha = 0.25\n");
    let out = ghpd(
        &["compute", "--input", &input, "--config", &config],
        dir.path(),
    );
    assert!(out.status.success());
    let value = parse_json(&out.stdout);
    assert_eq!(value["alpha"].as_f64().unwrap(), 0.25);

    let out = ghpd(
        &["compute", "--input", &input, "--config", &config, "--alpha", "0.05"],
        dir.path(),
    );
    let value = parse_json(&out.stdout);
    assert_eq!(value["alpha"].as_f64().unwrap(), 0.05);
}
