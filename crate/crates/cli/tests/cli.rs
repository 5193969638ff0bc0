use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn paircorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paircorr")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&paircorr(&["--help"])), 0);
    assert_eq!(code(&paircorr(&["gaps", "--help"])), 0);
    assert_eq!(code(&paircorr(&["--version"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&paircorr(&[])), 1);
    assert_eq!(code(&paircorr(&["frobnicate"])), 1);
    assert_eq!(code(&paircorr(&["gaps", "--no-such-flag"])), 1);
    assert_eq!(code(&paircorr(&["gaps", "--n", "lots"])), 1);
}

#[test]
fn invalid_parameters_exit_one_without_files() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("bad");
    let p = prefix.to_str().unwrap();
    for args in [
        vec!["gaps", "--theta", "0", "--n", "100", "--out", p],
        vec!["gaps", "--bin", "-0.1", "--n", "100", "--out", p],
        vec!["paircorr", "--n", "10", "--s", "6", "--out", p],
        vec!["smoothed", "--n", "30000", "--out", p],
        vec!["count", "cz", "--m", "8", "--h1", "4", "--h2", "4", "--mirror", "--out", p],
        vec!["optimize", "--grid-n", "10", "--out", p],
        vec!["optimize", "--families", "z", "--out", p],
        vec!["holder", "--k", "1", "--out", p],
    ] {
        let out = paircorr(&args);
        assert_eq!(code(&out), 1, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn synthetic_uniform_gaps_fill_one_bin() {
    let out = paircorr(&["gaps", "--synthetic-uniform", "--n", "2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["n_points"], 2);
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("u");
    let out = paircorr(&["gaps", "--synthetic-uniform", "--n", "2", "--out", prefix.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(dir.path().join("u.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("bin_lo,bin_hi,empirical_mass,poisson_mass"));
    let occupied: Vec<&str> = lines.filter(|l| l.split(',').nth(2) != Some("0")).collect();
    assert_eq!(occupied.len(), 1);
    assert!(occupied[0].starts_with("1,1.1,1,"), "{occupied:?}");
}

#[test]
fn synthetic_uniform_pair_correlation_is_two() {
    let out = paircorr(&["paircorr", "--synthetic-uniform", "--n", "100", "--s", "1.5"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["values"][0]["r2"], 2.0);
}

#[test]
fn pair_histogram_mode() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("h");
    let out = paircorr(&[
        "paircorr",
        "--synthetic-uniform",
        "--n",
        "50",
        "--bin",
        "0.1",
        "--t-max",
        "2.5",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(dir.path().join("h.csv")).unwrap();
    assert!(csv.starts_with("bin_lo,bin_hi,mass,poisson_mass\n"));
    assert_eq!(csv.lines().count(), 26);
    let heavy: Vec<&str> = csv.lines().skip(1).filter(|l| l.split(',').nth(2) == Some("2")).collect();
    assert_eq!(heavy.len(), 2);
    assert!(dir.path().join("h.svg").exists());
}

#[test]
fn output_files_and_stdout_agree() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("sub").join("run");
    let out = paircorr(&["gaps", "--n", "20000", "--out", prefix.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let stdout = json(&out);
    let files: Vec<&str> = stdout["files"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    assert_eq!(files.len(), 3);
    for f in &files {
        assert!(Path::new(f).exists(), "{f}");
    }
    let text = std::fs::read_to_string(dir.path().join("sub/run.json")).unwrap();
    assert!(text.ends_with('\n'));
    let mut on_disk: Value = serde_json::from_str(&text).unwrap();
    let mut printed = stdout.clone();
    printed.as_object_mut().unwrap().remove("files");
    on_disk.as_object_mut().unwrap().remove("timing_ms");
    printed.as_object_mut().unwrap().remove("timing_ms");
    assert_eq!(on_disk, printed);
    let svg = std::fs::read_to_string(dir.path().join("sub/run.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
    let csv = std::fs::read_to_string(dir.path().join("sub/run.csv")).unwrap();
    assert!(!csv.contains('\r'));
    assert_eq!(csv.lines().count(), 51);
}

#[test]
fn config_file_with_command_line_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# pair correlation batch\ntheta = 1/2\nn = 1000\nexclude_squares = true\ns = 1\n").unwrap();
    let c = cfg.to_str().unwrap();
    let v = json(&paircorr(&["paircorr", "--config", c]));
    assert_eq!(v["params"]["theta"], 0.5);
    assert_eq!(v["params"]["exclude_squares"], true);
    assert_eq!(v["n_points"], 1000 - 31);
    let v = json(&paircorr(&["paircorr", "--config", c, "--n", "400"]));
    assert_eq!(v["n_points"], 400 - 20);
    assert_eq!(v["params"]["theta"], 0.5);
    assert_eq!(code(&paircorr(&["paircorr", "--config", dir.path().join("missing").to_str().unwrap()])), 1);
}

#[test]
fn optimize_prints_exact_rationals() {
    let out = paircorr(&["optimize"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["theta_star"], "43/117");
    assert_eq!(v["kappa"], serde_json::json!(["12/43", "24/43"]));
    assert_eq!(v["active"], serde_json::json!(["A1", "A2", "A7"]));
    assert_eq!(v["side_condition_ok"], true);
    let v = json(&paircorr(&["optimize", "--families", "b", "--families", "d", "--grid-n", "64", "--refine", "1"]));
    assert_eq!(v["families_used"], serde_json::json!(["B", "D"]));
}

#[test]
fn holder_csv() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("t");
    let out = paircorr(&["holder", "--k", "2,3,4,5,6", "--out", prefix.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert_eq!(
        csv,
        "k,theta_k,decimal\n2,1/3,0.333333333333\n3,2/5,0.400000000000\n4,2/5,0.400000000000\n\
         5,5/13,0.384615384615\n6,3/8,0.375000000000\n"
    );
}

#[test]
fn count_reports() {
    let v = json(&paircorr(&["count", "rs", "--m-hi", "32"]));
    assert_eq!(v["count"], v["brute_force_count"]);
    assert_eq!(v["params"]["m_lo"], 16);
    let v = json(&paircorr(&["count", "cz", "--m", "64", "--h1", "4", "--h2", "8", "--delta", "0.01"]));
    assert_eq!(v["count"], v["brute_force_count"]);
    assert!(v["ratio"]["ratio1"].as_f64().unwrap() <= 100.0);
    let v = json(&paircorr(&["count", "b1", "--k", "200", "--y1", "1000", "--y2", "1000", "--alpha", "3"]));
    assert_eq!(v["count"], v["brute_force_count"]);
    // no applicable region is reported as a guard, not a failure
    let out = paircorr(&["count", "cz", "--m", "64", "--h1", "4", "--h2", "8", "--separation", "100"]);
    assert_eq!(code(&out), 0);
    assert!(!json(&out)["guards"].as_array().unwrap().is_empty());
}

#[test]
fn contract_violation_exits_two() {
    // a vanishing exponent flattens m^a below working precision, so near
    // coincidences swamp the M^2 bound
    let out = paircorr(&["count", "rs", "--m-hi", "1024", "--exponent", "1e-9"]);
    assert_eq!(code(&out), 2);
    let v = json(&out);
    assert_eq!(v["status"], "contract_violation");
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn dual_check_rows() {
    let out = paircorr(&["dual-check", "--k", "100,1000", "--y", "1000,100000", "--theta", "0.3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["max_ratio"].as_f64().unwrap() < 5.0);
    assert!(v["soft_misses"].as_array().unwrap().is_empty());
}
