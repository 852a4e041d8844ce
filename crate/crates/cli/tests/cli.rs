//! End-to-end tests against the built binary.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_periodic-spectra"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(args: &[&str]) -> Vec<u8> {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

#[test]
fn traces_square_constant_coefficient() {
    let out = stdout_of(&["traces", "--example", "square", "--kind", "adjacency", "--n", "2"]);
    let json: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let coeffs = json["results"][0]["coefficients"].as_array().unwrap();
    let constant = coeffs
        .iter()
        .find(|c| c["m"] == serde_json::json!([0, 0]))
        .unwrap();
    assert_eq!(constant["c"], serde_json::json!(16.0));
    assert_eq!(json["results"][0]["regularized_trace"], serde_json::json!(16.0));
}

#[test]
fn traces_kagome_constant_term() {
    let out = stdout_of(&["traces", "--example", "kagome", "--kind", "adjacency", "--n", "3"]);
    let json: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(json["results"][0]["regularized_trace"], serde_json::json!(12.0));
}

#[test]
fn bipartite_matrix_of_verdicts() {
    for (args, fundamental, periodic) in [
        (vec!["bipartite", "--example", "square"], true, true),
        (vec!["bipartite", "--example", "kagome"], false, false),
        (vec!["bipartite", "--example", "gp", "--p", "3"], false, true),
        (vec!["bipartite", "--example", "g2"], false, false),
    ] {
        let out = stdout_of(&args);
        let json: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(json["fundamental"], serde_json::json!(fundamental), "{args:?}");
        assert_eq!(json["periodic"], serde_json::json!(periodic), "{args:?}");
        assert_eq!(json["witness"].is_object(), periodic);
    }
}

#[test]
fn example_round_trip_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["square", "kagome", "zline", "g2"] {
        let doc = stdout_of(&["example", name]);
        let path = dir.path().join(format!("{name}.json"));
        std::fs::write(&path, &doc).unwrap();
        let path = path.to_str().unwrap();

        for extra in [
            vec!["traces", "--kind", "schrodinger", "--n", "1", "--n", "2", "--n", "3"],
            vec!["bands", "--kind", "adjacency", "--grid", "8"],
            vec!["zeta", "--u", "0.05", "--length-cap", "6"],
        ] {
            let mut from_builtin = extra.clone();
            from_builtin.extend(["--example", name]);
            let mut from_file = extra.clone();
            from_file.extend(["--graph", path]);
            let a = stdout_of(&from_builtin);
            let b = stdout_of(&from_file);
            // identical modulo the graph label
            let mut ja: serde_json::Value = serde_json::from_slice(&a).unwrap();
            let mut jb: serde_json::Value = serde_json::from_slice(&b).unwrap();
            ja["graph"] = serde_json::json!("");
            jb["graph"] = serde_json::json!("");
            assert_eq!(ja, jb, "{name} {extra:?}");
        }
    }
}

#[test]
fn deterministic_bytes() {
    let args = [
        "bands",
        "--example",
        "kagome",
        "--kind",
        "adjacency",
        "--grid",
        "16",
        "--format",
        "csv",
    ];
    assert_eq!(stdout_of(&args), stdout_of(&args));
}

#[test]
fn kagome_flat_band_appears_in_csv() {
    let out = stdout_of(&[
        "bands", "--example", "kagome", "--kind", "adjacency", "--grid", "32", "--format", "csv",
    ]);
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "k_1,k_2,lambda_1,lambda_2,lambda_3");
    for line in lines {
        let first_eigenvalue: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((first_eigenvalue + 2.0).abs() < 1e-9, "{line}");
    }
}

#[test]
fn schrodinger_bands_report_bandwidth_bound() {
    let out = stdout_of(&[
        "bands", "--example", "square", "--kind", "schrodinger", "--grid", "16",
    ]);
    let json: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let bound = &json["bandwidth_bound"];
    assert_eq!(bound["lower_bound"], serde_json::json!(0.0625));
    assert_eq!(bound["satisfied"], serde_json::json!(true));
}

#[test]
fn heat_report_carries_oracle_and_bound() {
    let out = stdout_of(&[
        "heat", "--example", "zline", "--kind", "adjacency", "--t", "0.5", "--k", "0.0",
        "--n-max", "12",
    ]);
    let json: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let row = &json["results"][0];
    let value = row["value"]["re"].as_f64().unwrap();
    let oracle = row["oracle_value"]["re"].as_f64().unwrap();
    let bound = row["tail_bound"].as_f64().unwrap();
    assert!((oracle - 1.0_f64.exp()).abs() < 1e-12);
    assert!((value - oracle).abs() <= bound);
}

#[test]
fn resolvent_sweep_csv_shape() {
    let out = stdout_of(&[
        "resolvent", "--example", "zline", "--kind", "adjacency", "--lambda", "10",
        "--lambda", "-10", "--k", "0.0", "--format", "csv",
    ]);
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("lambda,value_re"));
    let first: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((first + 0.125).abs() < 1e-9);
}

#[test]
fn exit_codes_follow_error_classes() {
    // validation: unknown builtin
    let out = run(&["traces", "--example", "nope", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));

    // validation: resolvent parameter inside the fiber spectrum
    let out = run(&[
        "resolvent", "--example", "zline", "--kind", "adjacency", "--lambda", "0.1", "--k", "0.0",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // cap exceedance
    let out = run(&["traces", "--example", "zline", "--n", "40"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["det", "--example", "zline", "--t", "0.01", "--length-cap", "20"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn graph_file_errors_are_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, b"{\"dimension\": 2}").unwrap();
    let out = run(&["traces", "--graph", path.to_str().unwrap(), "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let missing = Path::new("/nonexistent/graph.json");
    let out = run(&["traces", "--graph", missing.to_str().unwrap(), "--n", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn potential_override_shifts_trace() {
    let out = stdout_of(&[
        "traces", "--example", "square", "--kind", "schrodinger", "--n", "1",
        "--potential", "1,1,1,1",
    ]);
    let json: serde_json::Value = serde_json::from_slice(&out).unwrap();
    // Σ (V_x - 4) = 4 - 16
    assert_eq!(json["results"][0]["regularized_trace"], serde_json::json!(-12.0));
}

#[test]
fn csv_floats_have_fixed_precision() {
    let out = stdout_of(&[
        "traces", "--example", "square", "--kind", "adjacency", "--n", "2", "--format", "csv",
    ]);
    let text = String::from_utf8(out).unwrap();
    let row = text.lines().nth(1).unwrap();
    let value = row.split(',').next_back().unwrap();
    assert!(value.contains('e'), "{value}");
    let mantissa = value.split('e').next().unwrap();
    let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
    assert_eq!(digits, 17, "{value}");
}
