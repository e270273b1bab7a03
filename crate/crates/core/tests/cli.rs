use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anderson2p"))
        .args(args)
        .env_remove("ANDERSON2P_OUT")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn unknown_command_is_a_usage_error() {
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn schedule_prints_lengths_and_masses() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["schedule", "--out", &out_arg(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("L: [3, 5, 11, 36]"), "{s}");
    assert!(s.contains("floor ok: true"), "{s}");
    let csv = fs::read_to_string(dir.path().join("schedule.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# manifest=manifest.json config_hash="));
    assert_eq!(lines.next(), Some("k,L,m"));
    assert_eq!(lines.next(), Some("0,3,0.5"));
}

#[test]
fn verify_ct_reports_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify-ct", "--set", "ct.n_instances=20", "--out", &out_arg(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("violations: 0"), "{}", stdout(&o));
}

#[test]
fn invalid_config_names_the_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["schedule", "--set", "msa.alpha=2.5", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpha = 2.5 must lie in (1, 2)"), "{}", stderr(&o));

    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[msa]\nL0 = 2\n").unwrap();
    let o = run(&["schedule", "--config", cfg.to_str().unwrap(), "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("L0 = 2 must exceed 2"), "{}", stderr(&o));

    fs::write(&cfg, "[run]\nseeed = 3\n").unwrap();
    let o = run(&["schedule", "--config", cfg.to_str().unwrap(), "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compute_failure_flushes_partial_results() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "estimate-lifshitz",
        "--set",
        "lifshitz.lengths=[10, 0]",
        "--set",
        "run.n_samples=50",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let manifest = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("\"status\": \"failed:"));
    let csv = fs::read_to_string(dir.path().join("estimate-lifshitz.csv")).unwrap();
    assert!(csv.contains("LIFSHITZ,10,"));
}

#[test]
fn replay_matches_and_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = run(&["estimate-w1", "--set", "run.n_samples=300", "--set", "run.mode=\"montecarlo\"", "--workers", "1", "--out", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(&["replay", &out, "--workers", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("matches"));

    let jsonl = dir.path().join("estimate-w1.jsonl");
    let text = fs::read_to_string(&jsonl).unwrap().replace("\"estimate\":", "\"estimate\": ");
    fs::write(&jsonl, text).unwrap();
    let o = run(&["replay", &out]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).contains("estimate-w1.jsonl"), "{}", stderr(&o));
}

#[test]
fn exhaustive_flag_gives_exact_fraction() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["estimate-w1", "--exhaustive", "--out", &out_arg(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let jsonl = fs::read_to_string(dir.path().join("estimate-w1.jsonl")).unwrap();
    assert!(jsonl.contains("\"exact\":\"3/32\""), "{jsonl}");
}
