use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn zernlets(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zernlets"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = zernlets(args);
    assert!(
        out.status.success(),
        "zernlets {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn data_rows(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

fn arg(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn regular_points_have_j_rows() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("p.csv");
    ok(&["points", "--degree", "3", "--output", arg(&out)]);
    assert_eq!(data_rows(&out), 10);
    assert!(fs::read_to_string(&out)
        .unwrap()
        .starts_with("j,rho,theta\n0,"));
}

#[test]
fn wavelet_points_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        ok(&[
            "points",
            "--wavelet",
            "--level",
            "3",
            "--strategy",
            "random",
            "--seed",
            "7",
            "-o",
            arg(path),
        ]);
    }
    assert_eq!(data_rows(&a), 18);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let c = dir.path().join("c.csv");
    ok(&[
        "points",
        "--wavelet",
        "--level",
        "3",
        "--strategy",
        "random",
        "--seed",
        "8",
        "-o",
        arg(&c),
    ]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn points_to_stdout() {
    let out = ok(&["points", "-N", "2"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 7);
}

#[test]
fn fit_astigmatism_gives_45_coefficients() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("astig.csv");
    let coeffs = dir.path().join("coeffs.csv");
    ok(&["synth", "--kind", "astigmatism", "--output", arg(&data)]);
    assert_eq!(data_rows(&data), 10200);
    let out = ok(&[
        "fit",
        "--input",
        arg(&data),
        "--degree",
        "8",
        "--output",
        arg(&coeffs),
    ]);
    assert_eq!(data_rows(&coeffs), 45);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(coeffs.with_extension("json")).unwrap()).unwrap();
    assert_eq!(summary["J"], 45);
    assert_eq!(summary["samples"], 10200);
    assert!(summary["condition"].as_f64().unwrap() >= 1.0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("residual (l2)"));
    assert!(stdout.contains("condition"));
}

#[test]
fn planted_polynomial_fit_has_tiny_residual() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("planted.csv");
    let coeffs = dir.path().join("c.csv");
    let summary = dir.path().join("s.json");
    let mut text = String::from("x,y,z\n");
    for i in 1..=12 {
        for k in 0..40 {
            let r = i as f64 / 12.0;
            let t = std::f64::consts::TAU * k as f64 / 40.0;
            let (x, y) = (r * t.cos(), r * t.sin());
            let z = 0.3 + x - 2.0 * y * y + x * x * x * y;
            text.push_str(&format!("{x:.17e},{y:.17e},{z:.17e}\n"));
        }
    }
    fs::write(&data, text).unwrap();
    let out = ok(&[
        "fit",
        "-i",
        arg(&data),
        "-N",
        "4",
        "-o",
        arg(&coeffs),
        "--summary",
        arg(&summary),
        "--norm",
        "rms",
    ]);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
    assert!(report["residual_l2"].as_f64().unwrap() <= 1e-10);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("residual (rms)"));
}

#[test]
fn missing_input_fails_without_output() {
    let dir = TempDir::new().unwrap();
    let coeffs = dir.path().join("coeffs.csv");
    let missing = dir.path().join("nope.csv");
    let out = zernlets(&["fit", "--input", arg(&missing), "--output", arg(&coeffs)]);
    assert!(!out.status.success());
    assert!(!coeffs.exists());
    assert!(!coeffs.with_extension("json").exists());
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn underdetermined_fit_fails_without_output() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("few.csv");
    let coeffs = dir.path().join("coeffs.csv");
    fs::write(&data, "r,theta,z\n0.1,0,1\n0.5,1,2\n0.9,2,3\n").unwrap();
    let out = zernlets(&["fit", "-i", arg(&data), "-N", "8", "-o", arg(&coeffs)]);
    assert!(!out.status.success());
    assert!(!coeffs.exists());
    assert!(String::from_utf8(out.stderr).unwrap().contains("samples"));
}

#[test]
fn decompose_keratoconus() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("k.csv");
    let dec = dir.path().join("dec.csv");
    let grid = dir.path().join("grid.csv");
    let diff = dir.path().join("diff.csv");
    ok(&[
        "synth",
        "--kind",
        "keratoconus",
        "--noise",
        "0.001",
        "--seed",
        "3",
        "-o",
        arg(&data),
    ]);
    let out = ok(&[
        "decompose",
        "-i",
        arg(&data),
        "-N",
        "8",
        "-o",
        arg(&dec),
        "--grid",
        arg(&grid),
        "--difference",
        arg(&diff),
        "--grid-res",
        "10",
    ]);
    assert_eq!(data_rows(&dec), 45);
    assert_eq!(data_rows(&grid), 1 + 10 * 40);
    assert_eq!(data_rows(&diff), 1 + 10 * 40);
    let stdout = String::from_utf8(out.stdout).unwrap();
    for label in ["V_0", "W_0", "W_1", "W_2", "W_4", "hierarchy discrepancy"] {
        assert!(stdout.contains(label), "missing {label} in {stdout}");
    }
    let gap: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("residual difference = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(gap <= 1e-8);
}

#[test]
fn decompose_at_16_has_153_coefficients() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("n.csv");
    let dec = dir.path().join("dec.csv");
    ok(&["synth", "--kind", "normal", "-o", arg(&data)]);
    ok(&["decompose", "-i", arg(&data), "-N", "16", "-o", arg(&dec)]);
    assert_eq!(data_rows(&dec), 153);
}

#[test]
fn decompose_rejects_non_power_of_two() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("n.csv");
    let dec = dir.path().join("dec.csv");
    ok(&["synth", "-o", arg(&data)]);
    let out = zernlets(&["decompose", "-i", arg(&data), "-N", "6", "-o", arg(&dec)]);
    assert!(!out.status.success());
    assert!(!dec.exists());
}

#[test]
fn synth_is_byte_identical_per_seed() {
    let a = ok(&[
        "synth",
        "--kind",
        "keratoconus",
        "--noise",
        "0.01",
        "--seed",
        "4",
        "--rings",
        "3",
        "--meridians",
        "5",
    ]);
    let b = ok(&[
        "synth",
        "--kind",
        "keratoconus",
        "--noise",
        "0.01",
        "--seed",
        "4",
        "--rings",
        "3",
        "--meridians",
        "5",
    ]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 16);
    let bad = zernlets(&["synth", "--radius", "0.5"]);
    assert!(!bad.status.success());
    assert!(bad.stdout.is_empty());
}

#[test]
fn validate_passes_and_corruption_fails() {
    let out = ok(&["validate", "--degree", "8"]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    for suite in report["suites"].as_array().unwrap() {
        assert!(suite["max_error"].as_f64().unwrap() <= suite["tolerance"].as_f64().unwrap());
    }

    let bad = zernlets(&["validate", "--degree", "4", "--corrupt"]);
    assert!(!bad.status.success());
    let report: serde_json::Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("k.csv");
    ok(&["synth", "--kind", "keratoconus", "-o", arg(&data)]);
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_zernlets"))
            .env("ZERNLETS_THREADS", threads)
            .args([
                "fit",
                "-i",
                arg(&data),
                "-o",
                arg(&dir.path().join(format!("c{threads}.csv"))),
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        fs::read(dir.path().join(format!("c{threads}.csv"))).unwrap()
    };
    assert_eq!(run("1"), run("4"));
}
