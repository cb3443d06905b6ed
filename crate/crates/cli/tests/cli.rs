use std::collections::{BTreeMap, BTreeSet};
use std::process::{Command, Output};

use serde_json::Value;

fn rabi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rabi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

/// `(g, n, E)` rows of a spectrum CSV.
fn rows(csv: &str) -> Vec<(f64, u32, f64)> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("g,branch,n,x,E"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[2].parse().unwrap(), f[4].parse().unwrap())
        })
        .collect()
}

#[test]
fn upper_sweep_has_one_curve_per_level() {
    let out = rabi(&[
        "spectrum",
        "--omega",
        "1",
        "--omega0",
        "0.5",
        "--g-range",
        "0.1:2:0.05",
        "--nmax",
        "5",
        "--branch",
        "upper",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = rows(&stdout(&out));
    let levels: BTreeSet<u32> = rows.iter().map(|r| r.1).collect();
    assert_eq!(levels.len(), 6);
    assert_eq!(rows.len(), 6 * 39);
    assert!(stderr(&out).contains("upper: 234 roots"));
}

#[test]
fn lower_sweep_thins_out_with_coupling() {
    let out = rabi(&[
        "spectrum",
        "--g-range",
        "0.1:2:0.05",
        "--nmax",
        "5",
        "--branch",
        "lower",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut per_g: BTreeMap<u64, usize> = BTreeMap::new();
    for (g, _, _) in rows(&stdout(&out)) {
        assert!(g * g < 0.25, "lower root at g = {g}");
        *per_g.entry(g.to_bits()).or_default() += 1;
    }
    assert!(!per_g.is_empty());
    assert!(per_g.len() < 39);
}

#[test]
fn generic_coupling_exits_2() {
    let out = rabi(&["spectrum", "--u", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("out of scope"));
}

#[test]
fn u_minus_matches_reduced_spectrum() {
    let a = rabi(&["spectrum", "--u", "-2", "--omega0", "-0.5", "--g", "0.4"]);
    let b = rabi(&["spectrum", "--omega0", "0.5", "--g", "0.4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn classify_examples() {
    let c = json(&rabi(&["classify", "--energy", "-0.6"]));
    assert_eq!(c["class"], "Continuum");
    assert!(c["whittaker"].is_null());

    let c = json(&rabi(&["classify", "--energy", "-0.25"]));
    assert_eq!(c["class"], "DegenerateBoundary");

    let sweep = stdout(&rabi(&["spectrum", "--nmax", "3", "--branch", "upper"]));
    let (_, n, e) = rows(&sweep)[3];
    let c = json(&rabi(&["classify", "--energy", &format!("{e:.17e}")]));
    assert_eq!(c["class"], "PointSpectrumCandidate");
    assert_eq!(c["nearest_level"]["n"], n);
    assert_eq!(c["whittaker"]["mu"], 0.25);
    assert_eq!(c["whittaker"]["beta_vanishes"], true);
}

#[test]
fn ground_state_sample_reports_small_residual() {
    let out = rabi(&[
        "eigenfunction",
        "--n",
        "0",
        "--branch",
        "upper",
        "--z-re",
        "-2:2:0.5",
        "--z-im",
        "-1:1:1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let header = text.lines().next().unwrap();
    let residual: f64 = header.split("max_residual=").nth(1).unwrap().parse().unwrap();
    assert!(residual <= 1e-10, "{header}");
    assert_eq!(text.lines().nth(1), Some("re_z,im_z,re_psi1,im_psi1,re_psi2,im_psi2"));
    assert_eq!(text.lines().count(), 2 + 9 * 3);
}

#[test]
fn lower_n3_has_three_real_zeros() {
    let out = rabi(&[
        "eigenfunction",
        "--g",
        "0.3",
        "--n",
        "3",
        "--branch",
        "lower",
        "--z-re",
        "-10:10:0.0037",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    let values: Vec<f64> = v["samples"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["re_psi1"].as_f64().unwrap())
        .filter(|v| *v != 0.0)
        .collect();
    let changes = values.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
    assert_eq!(changes, 3);
}

#[test]
fn empty_level_exits_3() {
    let out = rabi(&["eigenfunction", "--g", "1", "--n", "0", "--branch", "lower"]);
    assert_eq!(out.status.code(), Some(3));
    let out = rabi(&["norm", "--g", "1", "--n", "2", "--branch", "lower"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn norm_is_finite_for_an_eigenfunction() {
    let v = json(&rabi(&["norm", "--n", "2"]));
    let level = &v["levels"][0];
    assert_eq!(level["norm"]["psi1"]["tag"], "Finite");
    assert_eq!(level["norm"]["psi2"]["tag"], "Finite");
    assert!(level["norm"]["doubling_change"].as_f64().unwrap() < 1e-10);
}

#[test]
fn oracle_report_matches() {
    let out = rabi(&["oracle", "--g", "0.3", "--cutoff", "160", "--nmax", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert!(v["levels"].as_array().unwrap().iter().any(|l| l["delta"].is_number()));
    assert!(v["unmatched_numeric"].is_array());
}

#[test]
fn verify_defaults_pass() {
    let out = rabi(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["sections"].as_array().unwrap().len(), 7);
}

#[test]
fn loosened_root_tolerance_fails_the_oracle() {
    let out = rabi(&[
        "verify",
        "--tau-root",
        "1e-2",
        "--skip",
        "identities,whittaker,continuum",
        "--cutoff",
        "160",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("first failing section"));
    let v = json(&out);
    let oracle = v["sections"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["section"] == "oracle")
        .unwrap();
    assert_eq!(oracle["status"], "fail");
}

#[test]
fn skipped_sections_are_reported() {
    let out = rabi(&[
        "verify",
        "--skip",
        "oracle",
        "--skip",
        "continuum,norms,growth,whittaker",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let oracle = v["sections"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["section"] == "oracle")
        .unwrap();
    assert_eq!(oracle["status"], "skipped");
}

#[test]
fn outputs_are_byte_identical_and_file_output_matches_stdout() {
    let args = ["spectrum", "--g-range", "0.2:0.6:0.1", "--nmax", "4"];
    let a = rabi(&args);
    let b = rabi(&args);
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let c = rabi(&with_out);
    assert_eq!(c.status.code(), Some(0));
    assert!(c.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
}

#[test]
fn argument_and_io_errors_exit_1() {
    for args in [
        &["spectrum", "--bogus"][..],
        &["spectrum", "--g-range", "1:0:0.1"],
        &["spectrum", "--g", "0"],
        &["verify", "--format", "csv"],
        &["verify", "--skip", "nothing"],
        &["oracle", "--cutoff", "40"],
        &["classify"],
        &["spectrum", "--out", "/nonexistent-dir/x.csv"],
    ] {
        let out = rabi(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr(&out));
    }
    assert_eq!(rabi(&["--help"]).status.code(), Some(0));
}
