use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn leashed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leashed"))
        .args(args)
        .env_clear()
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all = vec!["run", "--out", dir.to_str().unwrap()];
    all.extend_from_slice(args);
    leashed(&all)
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn leashed_never_moves_on_a_zero_stream() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["--algo", "leashed", "--adversary", "zero", "--T", "10"]);
    assert!(out.status.success(), "{}", stderr(&out));

    let mut trace = csv::Reader::from_path(dir.path().join("trace.csv")).unwrap();
    assert_eq!(
        trace.headers().unwrap(),
        vec!["t", "w_norm", "g_norm", "hint", "barrier", "wealth", "cum_loss"]
    );
    let rows: Vec<_> = trace.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r[1].parse::<f64>().unwrap() == 0.0));

    let s = summary(dir.path());
    for row in s["comparators"].as_array().unwrap() {
        assert_eq!(row["regret"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn hinted_bettor_stays_under_theorem_bound() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["--algo", "ons_hints", "--adversary", "constant", "--T", "1000"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let s = summary(dir.path());
    assert_eq!(s["all_within_bound"], Value::Bool(true));
    for row in s["comparators"].as_array().unwrap() {
        assert_eq!(row["claimed"], "thm1");
        assert!(row["ratio"].as_f64().unwrap() <= 1.0);
        assert_eq!(row["bound"], row["thm1"]);
    }
}

#[test]
fn hintless_stack_has_empty_barrier_column() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["--algo", "adagrad_ball", "--dim", "3", "--adversary", "seeded_uniform", "--T", "20"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let mut trace = csv::Reader::from_path(dir.path().join("trace.csv")).unwrap();
    for r in trace.records() {
        let r = r.unwrap();
        assert_eq!((&r[3], &r[4], &r[5]), ("", "", ""));
    }
}

#[test]
fn overflowing_wealth_names_the_round() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["--algo", "ons_hints", "--adversary", "constant", "--T", "10000"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("at round"), "{}", stderr(&out));
}

#[test]
fn missing_output_directory_fails() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope");
    let out = run_in(&missing, &["--T", "5"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("does not exist"));
}

#[test]
fn invalid_configs_fail_with_a_message() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["--algo", "leashed", "--dim", "2"][..],
        &["--p", "1.5"],
        &["--comparators", "1,2"],
    ] {
        let out = run_in(dir.path(), args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(stderr(&out).starts_with("error:"));
    }
    assert_eq!(run_in(dir.path(), &["--algo", "sgd"]).status.code(), Some(2));
}

#[test]
fn traces_are_reproducible() {
    let args = ["--algo", "leashed", "--adversary", "seeded_signs", "--seed", "42", "--T", "500"];
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    assert!(run_in(a.path(), &args).status.success());
    assert!(run_in(b.path(), &args).status.success());
    let read = |d: &TempDir| fs::read(d.path().join("trace.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn config_file_is_overridden_by_flags_and_environment() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("run.toml");
    fs::write(&file, "algo = \"hintless\"\nadversary = \"alternating\"\nT = 7\nk = 3.0\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_leashed"))
        .args(["run", "--config", file.to_str().unwrap(), "--T", "9"])
        .env_clear()
        .env("LEASHED_OUT", dir.path())
        .env("LEASHED_K", "2.5")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let s = summary(dir.path());
    assert_eq!(s["algo"], "hintless");
    assert_eq!(s["T"], 9);
    assert_eq!(s["k"], 2.5);

    fs::write(&file, "colour = \"red\"\n").unwrap();
    let out = run_in(dir.path(), &["--config", file.to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn verify_ball_passes() {
    let out = leashed(&["verify", "ball"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[PASS]"));
}

#[test]
fn verify_coin_catches_a_broken_clip() {
    let out = leashed(&["verify", "coin", "--mutate-clip"]);
    assert!(!out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("[FAIL]") && l.contains("clip")), "{stdout}");
}

#[test]
fn unknown_suite_is_a_usage_error() {
    assert_eq!(leashed(&["verify", "everything"]).status.code(), Some(2));
}

#[test]
fn sweep_writes_exponents_for_several_horizons() {
    let dir = TempDir::new().unwrap();
    let out = leashed(&[
        "sweep",
        "--algo",
        "leashed",
        "--k-grid",
        "0.1,1,10",
        "--T-grid",
        "100,1000,10000",
        "--comparators",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let mut csv = csv::Reader::from_path(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(
        csv.headers().unwrap(),
        vec!["k", "p", "adversary", "T", "comparator", "regret", "bound", "ratio", "exponent"]
    );
    let rows: Vec<_> = csv.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 9);
    for r in &rows {
        assert!(r[7].parse::<f64>().unwrap() <= 1.0);
        assert!(r[8].parse::<f64>().unwrap() <= 0.55);
    }
    // The bound is smallest at the middle of the grid, k = |u|.
    for t in ["100", "1000", "10000"] {
        let best = rows
            .iter()
            .filter(|r| &r[3] == t)
            .min_by(|a, b| a[6].parse::<f64>().unwrap().total_cmp(&b[6].parse::<f64>().unwrap()))
            .unwrap();
        assert_eq!(best[0].parse::<f64>().unwrap(), 1.0);
    }
    assert!(!dir.path().join("trace.csv").exists());
}

#[test]
fn single_cell_sweep_matches_run() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let common = ["--adversary", "seeded_uniform", "--seed", "3", "--T", "200"];
    let mut sweep = vec!["sweep", "--out", a.path().to_str().unwrap()];
    sweep.extend_from_slice(&common);
    assert!(leashed(&sweep).status.success());
    assert!(run_in(b.path(), &common).status.success());

    let header = fs::read_to_string(a.path().join("sweep.csv")).unwrap();
    assert!(!header.lines().next().unwrap().contains("exponent"));
    for file in ["trace.csv", "summary.json"] {
        assert_eq!(fs::read(a.path().join(file)).unwrap(), fs::read(b.path().join(file)).unwrap());
    }
}

#[test]
fn empty_grid_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = leashed(&["sweep", "--k-grid", "", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("empty"));
}
