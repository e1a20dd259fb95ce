use std::path::Path;
use std::process::{Command, Output};

fn afsec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_afsec"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn run_writes_results_and_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "fig6.toml",
        "experiment = \"fig6\"\nsubcarriers = 16\nrelay_grid = [1, 2]\n",
    );
    let out = dir.path().join("fig6.csv");
    let res = afsec(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 4);
    assert!(dir.path().join("fig6.config.toml").exists());
}

#[test]
fn validate_accepts_good_and_rejects_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(
        dir.path(),
        "good.toml",
        "experiment = \"fig3\"\nbudgets = [1.0, 2.0]\n",
    );
    let res = afsec(&["validate", "--config", &good]);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stdout).contains("fig3"));
    let bad = write(
        dir.path(),
        "bad.toml",
        "experiment = \"fig3\"\nbudgets = [0.0]\n",
    );
    assert_eq!(
        afsec(&["validate", "--config", &bad]).status.code(),
        Some(1)
    );
    let unknown = write(dir.path(), "unknown.toml", "experimnet = \"fig3\"\n");
    assert_eq!(
        afsec(&["validate", "--config", &unknown]).status.code(),
        Some(1)
    );
}

#[test]
fn unknown_experiment_is_a_config_error() {
    assert_eq!(
        afsec(&["run", "--experiment", "fig9"]).status.code(),
        Some(1)
    );
}

#[test]
fn strict_run_reports_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "tight.toml",
        "experiment = \"fig4\"\nsubcarriers = 16\n[solver]\nmax_iters = 2\n",
    );
    let out = dir.path().join("tight.csv");
    let res = afsec(&[
        "run",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--strict",
    ]);
    assert_eq!(res.status.code(), Some(2));
    let relaxed = afsec(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(relaxed.status.success());
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("x.csv");
    let res = afsec(&[
        "run",
        "--experiment",
        "fig6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn oracle_check_passes() {
    let res = afsec(&["oracle-check", "--samples", "200"]);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stdout).contains("fail: 0"));
}

#[test]
fn channels_dump_one_row_per_gain() {
    let res = afsec(&[
        "channels",
        "--subcarriers",
        "8",
        "--relays",
        "2",
        "--users",
        "3",
    ]);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 8 * 2 * (3 + 2));
}
