//! End-to-end tests of the compiled binary: exit codes, output documents,
//! and determinism guarantees.

use std::path::Path;
use std::process::{Command, Output};

use fdrthresh::fitting::plugin_fit;
use fdrthresh::models::{ModelKind, StatisticBatch, StatisticScale};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fdrthresh"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn write_file(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn z_file(dir: &Path) -> String {
    let mut text = String::from("gene\tz\n");
    for (i, z) in [0.0, 1.862, -2.5, 0.4, 3.1, -0.9].iter().enumerate() {
        text.push_str(&format!("g{i}\t{z}\n"));
    }
    write_file(dir, "zs.tsv", &text)
}

#[test]
fn plugin_fit_reports_the_threshold_for_eta0_08() {
    let dir = tempfile::tempdir().unwrap();
    let input = z_file(dir.path());
    let out = run(&[
        "fit", "--input", &input, "--kind", "hnd", "--mode", "plugin", "--eta0", "0.8",
        "--sigma", "1",
    ]);
    assert!(out.status.success(), "{out:?}");
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((doc["s_hat"].as_f64().unwrap() - 0.862).abs() < 1e-3, "{doc}");
    assert_eq!(doc["mode"], "plugin");
    assert_eq!(doc["converged"], true);
    assert!(doc["log_likelihood"].is_f64());
}

#[test]
fn score_at_zero_gives_full_fdr_and_eta0_tail() {
    let dir = tempfile::tempdir().unwrap();
    let input = z_file(dir.path());
    let out = run(&[
        "score", "--input", &input, "--kind", "hnd", "--eta0", "0.8", "--sigma", "1",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("raw,y,fdr,Fdr"));
    let first: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(first, {
        let fdr0 = first[3];
        assert!((fdr0 - 0.8).abs() < 1e-12);
        vec![0.0, 0.0, 1.0, fdr0]
    });
    assert_eq!(text.lines().count(), 7, "one row per input row");
}

#[test]
fn scoring_after_plugin_fit_matches_the_library_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let input = z_file(dir.path());
    let fit_out = run(&[
        "fit", "--input", &input, "--kind", "bum", "--mode", "plugin", "--eta0", "0.75",
        "--sigma", "2",
    ]);
    assert!(fit_out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&fit_out)).unwrap();
    let eta0 = doc["eta0_hat"].as_f64().unwrap();
    let sigma = doc["sigma_hat"].as_f64().unwrap();

    let score_out = run(&[
        "score",
        "--input",
        &input,
        "--kind",
        "bum",
        "--eta0",
        &eta0.to_string(),
        "--sigma",
        &sigma.to_string(),
    ]);
    assert!(score_out.status.success());

    let zs = vec![0.0, 1.862, -2.5, 0.4, 3.1, -0.9];
    let batch = StatisticBatch::new(zs, StatisticScale::ZScore).unwrap();
    let (_, table) = plugin_fit(ModelKind::Bum, eta0, sigma, &batch).unwrap();
    let text = stdout(&score_out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), table.rows.len());
    for (line, expect) in rows.iter().zip(&table.rows) {
        let got: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(got[0].to_bits(), expect.raw.to_bits());
        assert_eq!(got[1].to_bits(), expect.y.to_bits());
        assert_eq!(got[2].to_bits(), expect.fdr.to_bits());
        assert_eq!(got[3].to_bits(), expect.tail_fdr.to_bits());
    }
}

#[test]
fn empty_input_exits_2_with_one_line_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "empty.csv", "");
    let out = run(&["fit", "--input", &input, "--kind", "hnd"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let stderr = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(stderr.lines().count(), 1, "{stderr}");
    assert!(stderr.contains("empty input"), "{stderr}");
}

#[test]
fn bad_rows_and_bad_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "bad.csv", "p\n0.5\n1.5\n");
    let out = run(&[
        "score", "--input", &input, "--scale", "p", "--kind", "bum", "--eta0", "0.8",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("row 2"));

    let out = run(&["curve", "--kind", "hnd", "--eta0", "0.8", "--scale", "q"]);
    assert_eq!(out.status.code(), Some(2), "invalid scale is a usage error");

    let out = run(&["curve", "--kind", "hnd", "--eta0", "0.8", "--grid", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.path().join("absent.csv");
    let out = run(&["fit", "--input", missing.to_str().unwrap(), "--kind", "bum"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn p_value_input_maps_p1_to_y0() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "ps.csv", "p\n1.0\n0.05\n");
    let out = run(&[
        "score", "--input", &input, "--scale", "p", "--kind", "hnd", "--eta0", "0.8",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    let first: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(first[1], 0.0, "p = 1 folds to y = 0");
    assert_eq!(first[2], 1.0);
}

#[test]
fn curve_grid_hits_the_documented_endpoints() {
    let out = run(&["curve", "--kind", "hnd", "--eta0", "0.8", "--grid", "601"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,fdr,Fdr,f,f0,fA");
    assert_eq!(lines.len(), 602);
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert_eq!(first[1], 1.0, "fdr(0) = 1");
    assert!((first[2] - 0.8).abs() < 1e-12, "Fdr(0) = eta0");
    let last: Vec<f64> = lines[601].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last[0], 6.0, "z grid is inclusive");

    // p and y grids run over [0, 1)
    let out = run(&[
        "curve", "--kind", "bum", "--eta0", "0.8", "--scale", "p", "--grid", "10",
    ]);
    let text = stdout(&out);
    let xs: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(xs.first(), Some(&0.0));
    assert_eq!(xs.last(), Some(&0.9));
}

#[test]
fn pure_null_bum_curve_is_identically_one() {
    let out = run(&[
        "curve", "--kind", "bum", "--eta0", "1", "--scale", "y", "--grid", "64",
    ]);
    assert!(out.status.success());
    for line in stdout(&out).lines().skip(1) {
        let fdr: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(fdr, 1.0, "{line}");
    }
}

#[test]
fn family_curves_differ_visibly_at_z2() {
    let fdr_at_z2 = |kind: &str| -> f64 {
        let out = run(&[
            "curve", "--kind", kind, "--eta0", "0.8", "--grid", "4",
        ]);
        // grid 4 on [0,6] puts the second point at z = 2
        stdout(&out)
            .lines()
            .nth(2)
            .unwrap()
            .split(',')
            .nth(1)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!((fdr_at_z2("hnd") - fdr_at_z2("bum")).abs() > 0.05);
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "simulate", "--preset", "separated", "--methods", "hnd-native", "--B", "20",
        "--seed", "7",
    ];
    let a_path = dir.path().join("a.json");
    let b_path = dir.path().join("b.json");
    for (path, label) in [(&a_path, "a"), (&b_path, "b")] {
        let out = bin()
            .args(args)
            .arg("--out")
            .arg(path)
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "{label}: {out:?}");
    }
    let a = std::fs::read(&a_path).unwrap();
    let b = std::fs::read(&b_path).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b, "identical flags must produce identical bytes");

    let doc: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(doc["scenario"]["B"], 20);
    assert_eq!(doc["scenario"]["seed"], 7);
    assert_eq!(doc["methods"][0]["method"], "hnd-native");
    assert_eq!(doc["methods"][0]["reps"].as_array().unwrap().len(), 20);
}

#[test]
fn simulate_scenario_file_and_flat_table() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_file(
        dir.path(),
        "sc.txt",
        "eta0 = 0.8\nnull_sd = 2\nalt_lo = 5\nalt_hi = 10\nm = 30\nB = 4\nseed = 3\n",
    );
    let out = run(&[
        "simulate", "--scenario", &scenario, "--methods", "truth,hnd-plugin", "--format",
        "csv",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0].split(',').count(), 11);
    assert_eq!(lines.len(), 1 + 2 * 4, "one row per rep x method");
    assert!(lines[1].starts_with("truth,0,false,0,0,0,0,"), "{}", lines[1]);

    let out = run(&["simulate", "--scenario", &scenario, "--methods", "locfdr"]);
    assert_eq!(out.status.code(), Some(2), "unknown method");
    let out = run(&["simulate", "--preset", "separated", "--B", "0"]);
    assert_eq!(out.status.code(), Some(2), "empty study");
    let out = run(&["simulate", "--methods", "truth"]);
    assert_eq!(out.status.code(), Some(2), "no scenario source");
}

#[test]
fn output_files_are_not_left_behind_on_failure() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "bad.csv", "z\nnot-a-number\n");
    let target = dir.path().join("result.csv");
    let out = run(&[
        "score", "--input", &input, "--kind", "hnd", "--eta0", "0.8", "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!target.exists(), "failed command must not write output");
}
