//! End-to-end tests of the binary: reproducible CSV, figure-space sweep
//! content, exit codes, config-file handling, trajectory export.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bathvirial"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a CSV (comment lines stripped), split on commas.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("bathvirial-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn i2_sweep_is_byte_identical_and_crosses_zero() {
    let args = [
        "i2-sweep", "--var", "x", "--start", "0.2", "--stop", "3.0", "--steps", "57",
        "--rho", "0.5",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "identical config must give identical bytes");

    let text = stdout_str(&a);
    assert!(text.starts_with("# bathvirial"));
    assert!(text.contains("# columns: x,beta_i2,verdict"));
    let data = rows(&text);
    assert_eq!(data.len(), 57);
    // sign pattern from the sweep itself
    let mut crossed = false;
    for r in &data {
        let x: f64 = r[0].parse().unwrap();
        let v: f64 = r[1].parse().unwrap();
        if x < 0.999 {
            assert!(v < 0.0, "beta_i2({x}) = {v}");
        }
        if x > 1.001 {
            assert!(v > 0.0, "beta_i2({x}) = {v}");
            crossed = true;
        }
        assert_eq!(r[2], "converged");
    }
    assert!(crossed);
}

#[test]
fn minimal_sweep_has_exactly_two_rows() {
    let out = run(&["i2-sweep", "--var", "rho", "--start", "0.1", "--stop", "1.3",
        "--steps", "2", "--x", "0.95"]);
    assert!(out.status.success());
    let data = rows(&stdout_str(&out));
    assert_eq!(data.len(), 2);
    // x = 0.95 < 1: negative, and larger damping means larger magnitude
    let v0: f64 = data[0][1].parse().unwrap();
    let v1: f64 = data[1][1].parse().unwrap();
    assert!(v0 < 0.0 && v1 < 0.0 && v1.abs() > v0.abs());
}

#[test]
fn i1_drude_sweep_matches_figure_space_shape() {
    let out = run(&["i1-drude-sweep", "--var", "x", "--start", "0.5", "--stop", "3.0",
        "--steps", "26", "--rho", "2.1", "--sigma", "10"]);
    assert!(out.status.success());
    let data = rows(&stdout_str(&out));
    assert_eq!(data.len(), 26);
    // integral-faithful sign convention: beta*I1 decreases with x
    // (magnitude grows as the bath gets colder)
    let vals: Vec<f64> = data.iter().map(|r| r[1].parse().unwrap()).collect();
    for w in vals.windows(2) {
        assert!(w[1] < w[0], "beta_i1 not decreasing: {w:?}");
    }
    assert!(data.iter().all(|r| r[2] == "converged"));

    // magnitude grows with rho at fixed x
    let out2 = run(&["i1-drude-sweep", "--var", "x", "--start", "0.5", "--stop", "3.0",
        "--steps", "26", "--rho", "3.5", "--sigma", "10"]);
    let data2 = rows(&stdout_str(&out2));
    for (r1, r2) in data.iter().zip(&data2) {
        let v1: f64 = r1[1].parse().unwrap();
        let v2: f64 = r2[1].parse().unwrap();
        assert!(v2.abs() > v1.abs(), "rho = 3.5 not larger in magnitude at x = {}", r1[0]);
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    // invalid sweep arguments -> 2 with a one-line diagnostic
    let out = run(&["i2-sweep", "--var", "x", "--start", "2", "--stop", "1", "--rho", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(String::from_utf8(out.stderr).unwrap().lines().count(), 1);

    // unstable dt -> 2 before any integration
    let out = run(&["langevin", "--dt", "0.5", "--steps", "1000", "--burnin", "10"]);
    assert_eq!(out.status.code(), Some(2));

    // the I2 series-vs-integral comparison is beyond any bar -> 3
    let out = run(&["oracle-compare", "--which", "i2", "--x", "2", "--rho", "0.75"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout_str(&out).contains("beyond-bar"));

    // a passing comparison -> 0
    let out = run(&["oracle-compare", "--which", "ec", "--x", "2", "--rho", "0.5",
        "--cutoff", "1e6"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_str(&out));

    // statistical check failure (noise intensity far from thermal) -> 4
    let out = run(&["langevin", "--steps", "400000", "--burnin", "20000",
        "--noise-intensity", "2.0", "--check"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn noise_intensity_override_doubles_position_variance() {
    let base = run(&["langevin", "--steps", "1500000", "--burnin", "50000", "--seed", "7"]);
    // gamma = 0.5, m = kB = T = 1: thermal intensity is 2*mu*kBT = 1.0
    let hot = run(&["langevin", "--steps", "1500000", "--burnin", "50000", "--seed", "7",
        "--noise-intensity", "2.0"]);
    let get = |out: &Output, name: &str| -> (f64, f64) {
        let text = stdout_str(out);
        let row = rows(&text).into_iter().find(|r| r[0] == name).unwrap();
        (row[1].parse().unwrap(), row[2].parse().unwrap())
    };
    let (x2, err) = get(&base, "mean_x2");
    let (x2_hot, err_hot) = get(&hot, "mean_x2");
    let ratio = x2_hot / x2;
    let sigma = (err_hot / x2).hypot(err * x2_hot / (x2 * x2));
    assert!(
        (ratio - 2.0).abs() < 3.0 * sigma,
        "variance ratio {ratio} with sigma {sigma}"
    );
}

#[test]
fn config_file_feeds_sweeps_and_flags_win() {
    let cfg = tmp("params.toml");
    std::fs::write(
        &cfg,
        r#"
[oscillator]
omega0 = 1.0
gamma = 2.1
T = 1.0

[bath]
kind = "drude"
omega_cut = 10.0
"#,
    )
    .unwrap();

    // rho and sigma come from the config (rho = 2.1, sigma = 10)
    let from_cfg = run(&["i1-drude-sweep", "--config", cfg.to_str().unwrap(),
        "--var", "x", "--start", "1", "--stop", "2", "--steps", "3"]);
    assert!(from_cfg.status.success(), "{}", String::from_utf8_lossy(&from_cfg.stderr));
    let explicit = run(&["i1-drude-sweep", "--var", "x", "--start", "1", "--stop", "2",
        "--steps", "3", "--rho", "2.1", "--sigma", "10"]);
    assert_eq!(rows(&stdout_str(&from_cfg)), rows(&stdout_str(&explicit)));

    // an explicit flag overrides the config value
    let overridden = run(&["i1-drude-sweep", "--config", cfg.to_str().unwrap(),
        "--var", "x", "--start", "1", "--stop", "2", "--steps", "3", "--rho", "3.5"]);
    let alt = run(&["i1-drude-sweep", "--var", "x", "--start", "1", "--stop", "2",
        "--steps", "3", "--rho", "3.5", "--sigma", "10"]);
    assert_eq!(rows(&stdout_str(&overridden)), rows(&stdout_str(&alt)));

    std::fs::remove_file(&cfg).ok();
}

#[test]
fn trajectory_export_writes_t_x_v() {
    let path = tmp("traj.csv");
    let out = run(&["langevin", "--steps", "120000", "--burnin", "20000",
        "--sample-every", "100", "--traj-out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let data = rows(&text);
    assert_eq!(data.len(), 1000);
    assert!(data.iter().all(|r| r.len() == 3));
    let t1: f64 = data[1][0].parse().unwrap();
    assert!((t1 - 5.0).abs() < 1e-12); // t advances by sample_every * dt = 5.0
    std::fs::remove_file(&path).ok();
}

#[test]
fn csv_floats_round_trip_exactly() {
    let out = run(&["i2-sweep", "--var", "x", "--start", "0.3", "--stop", "2.7",
        "--steps", "5", "--rho", "1.25"]);
    for r in rows(&stdout_str(&out)) {
        let v: f64 = r[1].parse().unwrap();
        assert_eq!(format!("{v:.16e}"), r[1], "17 significant digits round-trip");
    }
}
