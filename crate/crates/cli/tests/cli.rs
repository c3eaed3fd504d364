//! End-to-end tests against the built binary.

use std::path::Path;
use std::process::{Command, Output};

fn qclat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qclat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn payload(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("envelope JSON");
    assert_eq!(v["schema"], 1);
    v["payload"].clone()
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn bounds_c_of_two_is_thirty() {
    let p = payload(&qclat(&["bounds", "C", "2"]));
    assert_eq!(p, serde_json::json!({ "C": 30.0 }));
}

#[test]
fn bounds_reject_bad_constant_with_exit_2() {
    let out = qclat(&["bounds", "C", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analytic_annulus_value() {
    let p = payload(&qclat(&["modulus", "annulus", "1", "2.718281828459045"]));
    let v = p["value"].as_f64().unwrap();
    assert!((v - 2.0 * std::f64::consts::PI).abs() < 1e-9);
    assert_eq!(p["method"], "analytic_annulus");
}

#[test]
fn payloads_are_deterministic() {
    let a = payload(&qclat(&["bounds", "ratio-bound", "1.5", "2"]));
    let b = payload(&qclat(&["bounds", "ratio-bound", "1.5", "2"]));
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn corpus_pipes_into_decide() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("e1.json");
    let gen = qclat(&[
        "corpus",
        "e1",
        "--window",
        "-4,4",
        "--nmax",
        "6",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    // The envelope written by --out is accepted back as input.
    let p = payload(&qclat(&["decide", out_path.to_str().unwrap()]));
    assert_eq!(p["kind"], "exact_no");
    assert_eq!(p["theorem"], "periodic-additive-finiteness");
}

#[test]
fn check_ratio_two_slope_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("# two-slope sample\n");
    for n in -8..=8 {
        let v = if n <= 0 { n as f64 } else { 2.0 * n as f64 };
        csv.push_str(&format!("{v},0\n"));
    }
    let path = write(dir.path(), "two_slope.csv", &csv);
    let p = payload(&qclat(&["check-ratio", &path, "--M", "1.5"]));
    assert_eq!(p["pass"], false);
    assert_eq!(p["m_hat"], 2.0);
    let p = payload(&qclat(&["check-ratio", &path]));
    assert_eq!(p["m_hat"], 2.0);
}

#[test]
fn duplicate_points_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "dup.csv", "0,0\n0,0\n");
    let out = qclat(&["decide", &path]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("duplicate"), "stderr: {msg}");
}

#[test]
fn periodic_requires_descriptor() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "plain.csv", "0,0\n1,0\n2,0\n");
    let out = qclat(&["periodic", &path]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn periodic_json_descriptor_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "periodic.json",
        r#"{
            "points": [[0.0, 0.0], [1.0, 0.0], [0.5, 1.0]],
            "descriptor": {"type": "additive_periodic", "reps": [[0.0, 0.0], [0.5, 1.0]], "count": 2}
        }"#,
    );
    let p = payload(&qclat(&["periodic", &path]));
    assert_eq!(p["kind"], "exact_yes");
    assert_eq!(p["evidence"]["coset_count"], 2);
}

#[test]
fn multiplicative_periodic_marked_infinite() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "mult.json",
        r#"{
            "points": [[1.0, 0.0], [2.0, 0.0], [1.3, 0.0]],
            "descriptor": {"type": "multiplicative_periodic", "factor": 2.0,
                           "reps": [[1.0, 0.0], [1.3, 0.0]], "count": "infinite"}
        }"#,
    );
    let p = payload(&qclat(&["periodic", &path]));
    assert_eq!(p["kind"], "exact_no");
    assert_eq!(p["theorem"], "periodic-multiplicative-finiteness");
}

#[test]
fn extend_grid_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::new();
    for n in -6..=6 {
        csv.push_str(&format!("{n},0\n"));
    }
    let path = write(dir.path(), "ints.csv", &csv);
    let svg_path = dir.path().join("map.svg");
    let p = payload(&qclat(&[
        "extend",
        &path,
        "--grid=-2,2,0,2,9",
        "--svg",
        svg_path.to_str().unwrap(),
    ]));
    assert_eq!(p["grid"]["nx"], 9);
    assert_eq!(p["values"].as_array().unwrap().len(), 81);
    assert_eq!(p["vertical_scale"], 2.0);
    let svg = std::fs::read_to_string(svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("polyline"));
}

#[test]
fn dilatation_rejects_lower_half_plane_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "i.csv", "-1,0\n0,0\n1,0\n");
    let out = qclat(&["dilatation", &path, "--grid=-1,1,-0.5,0.5,5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn porosity_auto_disks() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::new();
    for n in -32..=32 {
        csv.push_str(&format!("{n},0\n"));
    }
    let path = write(dir.path(), "ints.csv", &csv);
    let p = payload(&qclat(&["porosity", &path, "--disks", "auto:3", "--resolution", "96"]));
    assert_eq!(p["per_disk"].as_array().unwrap().len(), 3);
    assert!(p["c_hat"].as_f64().unwrap() >= 1.0);
}

#[test]
fn condenser_spec_runs_and_matches_annulus() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "cond.json",
        r#"{"rect": [-4, 4, -4, 4], "h": 0.0625,
            "c1": {"type": "disk", "center": [0, 0], "radius": 1.0},
            "c2": {"type": "outside", "radius": 2.718281828459045}}"#,
    );
    let p = payload(&qclat(&["modulus", "condenser", &spec]));
    let v = p["value"].as_f64().unwrap();
    assert!((v - 2.0 * std::f64::consts::PI).abs() / (2.0 * std::f64::consts::PI) < 0.05);
    assert_eq!(p["method"], "grid_capacity");
    // Fields are stripped unless --full is passed.
    assert!(p.get("potential").is_none());
    assert!(p.get("density").is_none());
}

#[test]
fn spacing_cli_flags_planted_gap() {
    let dir = tempfile::tempdir().unwrap();
    let mut src = String::new();
    let mut img = String::new();
    for n in 0..=6 {
        src.push_str(&format!("{n},0\n"));
        let v = if n >= 3 { n + 4 } else { n };
        img.push_str(&format!("{v},0\n"));
    }
    let src = write(dir.path(), "src.csv", &src);
    let img = write(dir.path(), "img.csv", &img);
    let p = payload(&qclat(&["spacing", &src, &img, "--A", "1"]));
    let violations = p["violations"].as_array().unwrap();
    assert!(violations.iter().any(|v| v["rule"] == "consecutive_gap" && v["quantity"] == 5.0));
}

#[test]
fn solver_divergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "cond.json",
        r#"{"rect": [-2, 2, -2, 2], "h": 0.25,
            "c1": {"type": "disk", "center": [0, 0], "radius": 0.5},
            "c2": {"type": "outside", "radius": 1.5}}"#,
    );
    // CG cannot reach the target within two iterations.
    let out = qclat(&["modulus", "condenser", &spec, "--tol", "1e-14", "--max-iter", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("numeric failure"));
}

#[test]
fn unknown_corpus_exits_2() {
    let out = qclat(&["corpus", "mystery"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown corpus"));
}

#[test]
fn corpus_counts_match() {
    let p = payload(&qclat(&["corpus", "integers", "--window", "-8,8"]));
    assert_eq!(p["points"].as_array().unwrap().len(), 17);
    assert_eq!(p["descriptor"]["type"], "additive_periodic");
    assert_eq!(p["descriptor"]["count"], 1);

    let p = payload(&qclat(&["corpus", "pm_geometric", "--s", "2", "--nmax", "8"]));
    assert_eq!(p["points"].as_array().unwrap().len(), 18);

    let out = qclat(&["corpus", "geometric", "--r", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}
