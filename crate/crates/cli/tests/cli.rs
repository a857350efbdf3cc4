use std::io::Write;
use std::process::{Command, Output};

use ptlab::report::*;
use ptlab_core::games::{builtin_simple_game, serialize_game};
use serde::de::DeserializeOwned;
use serde::Serialize;

fn ptlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptlab"))
        .args(args)
        .env_remove("PTLAB_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Runs with `--format json`, checks exit 0 and that the document survives
/// a typed round trip unchanged.
fn json<T: Serialize + DeserializeOwned>(args: &[&str]) -> Report<T> {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = ptlab(&all);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let raw: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let typed: Report<T> = serde_json::from_value(raw.clone()).unwrap();
    assert_eq!(serde_json::to_value(&typed).unwrap(), raw);
    typed
}

fn temp_file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn list_shows_both_games() {
    let o = ptlab(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("full: 28 pairs, 32 predicates"), "{out}");
    assert!(out.contains("simple: 14 pairs"), "{out}");
    let r: Report<Vec<GameSummary>> = json(&["list"]);
    assert_eq!(r.result.len(), 2);
    assert_eq!((r.result[1].alice_variables, r.result[1].bob_variables), (10, 10));
    assert_eq!(r.command, "list --format json");
    assert_eq!(r.version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn classical_optimal_values() {
    assert!(stdout(&ptlab(&["classical", "full", "--mode", "optimal"])).contains("26/28"));
    let r: Report<ClassicalResult> = json(&["classical", "full", "--mode", "optimal", "--threads", "2"]);
    let ClassicalResult::Optimal(full) = r.result else { panic!() };
    assert_eq!((full.value.as_str(), full.reduced.as_str(), full.wins), ("26/28", "13/14", 26));
    assert_eq!(full.evaluation.failed_predicates.len(), 2);

    let r: Report<ClassicalResult> = json(&["classical", "simple"]);
    let ClassicalResult::Optimal(simple) = r.result else { panic!() };
    assert_eq!(simple.value, "13/14");
    assert_eq!(r.game.as_deref(), Some("simple"));

    let r: Report<ClassicalResult> = json(&["classical", "full", "--mode", "noncontextual"]);
    let ClassicalResult::Noncontextual(nc) = r.result else { panic!() };
    assert_eq!(nc.value, "26/28");
}

#[test]
fn classical_feasibility_prints_certificate() {
    let out = stdout(&ptlab(&["classical", "full", "--mode", "feasibility"]));
    assert!(out.starts_with("infeasible"), "{out}");
    let r: Report<ClassicalResult> = json(&["classical", "full", "--mode", "feasibility"]);
    let ClassicalResult::Feasibility(FeasibilityResult::Infeasible { certificate }) = r.result else {
        panic!()
    };
    assert!(certificate.predicates.iter().all(|p| out.contains(p.as_str())));
}

#[test]
fn quantum_verify_value_and_distribution() {
    let out = stdout(&ptlab(&["quantum", "full", "--action", "verify"]));
    assert_eq!(out.lines().count(), 14);
    assert!(out.lines().all(|l| l.ends_with("ok")));
    let r: Report<QuantumResult> = json(&["quantum", "full", "--action", "verify"]);
    let QuantumResult::Verify(report) = r.result else { panic!() };
    assert!(report.checks.iter().all(|c| c.residual.unwrap() <= 1e-12));

    let r: Report<QuantumResult> = json(&["quantum", "full", "--action", "value"]);
    let QuantumResult::Value { value } = r.result else { panic!() };
    assert!((value - 1.0).abs() <= 1e-12);

    let out = stdout(&ptlab(&["quantum", "full", "--action", "distribution", "--pair", "Xz:Xz"]));
    assert_eq!(out.lines().count(), 17);
    let r: Report<QuantumResult> = json(&["quantum", "full", "--action", "distribution", "--pair", "Xz:Xz"]);
    let QuantumResult::Distribution(d) = r.result else { panic!() };
    assert_eq!(d.outcomes.len(), 16);
    let total: f64 = d.outcomes.iter().map(|o| o.probability).sum();
    assert!((total - 1.0).abs() <= 1e-12);
}

#[test]
fn unknown_pair_is_a_usage_error() {
    let o = ptlab(&["quantum", "full", "--action", "distribution", "--pair", "Zz:Qq"]);
    assert_eq!(o.status.code(), Some(2));
    // asked by the full game only
    let o = ptlab(&["quantum", "simple", "--action", "distribution", "--pair", "Zx:Zx"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ptlab(&["quantum", "full", "--action", "distribution"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn quantum_play_never_loses() {
    let r: Report<PlayResult> = json(&["play", "full", "--strategy", "quantum", "--rounds", "100000", "--seed", "7"]);
    assert_eq!((r.result.tally.rounds, r.result.tally.wins), (100_000, 100_000));
    assert_eq!(r.result.win_rate, Some(1.0));
}

#[test]
fn classical_play_rate_near_optimum() {
    let r: Report<PlayResult> =
        json(&["play", "full", "--strategy", "classical-optimal", "--rounds", "100000", "--seed", "7"]);
    let p = 26.0 / 28.0;
    let sigma = (p * (1.0 - p) / 1e5f64).sqrt();
    assert!((r.result.win_rate.unwrap() - p).abs() <= 3.0 * sigma);
}

#[test]
fn zero_rounds_is_an_empty_tally() {
    let r: Report<PlayResult> = json(&["play", "simple", "--strategy", "quantum", "--rounds", "0"]);
    assert_eq!(r.result.tally.rounds, 0);
    assert_eq!(r.result.win_rate, None);
    assert!(r.result.tally.pairs.iter().all(|p| p.rounds == 0));
}

#[test]
fn seeds_accept_hex_and_results_ignore_threads() {
    let a: Report<PlayResult> = json(&["play", "full", "--strategy", "classical-optimal", "--rounds", "5000", "--seed", "0x1f", "--threads", "1"]);
    let b: Report<PlayResult> = json(&["play", "full", "--strategy", "classical-optimal", "--rounds", "5000", "--seed", "31", "--threads", "4"]);
    assert_eq!(a.result.tally, b.result.tally);
    assert_eq!(ptlab(&["play", "full", "--seed", "0xzz"]).status.code(), Some(2));
}

#[test]
fn threads_fall_back_to_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_ptlab"))
        .args(["classical", "simple"])
        .env("PTLAB_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_ptlab"))
        .args(["list"])
        .env("PTLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn strategy_files() {
    let f = temp_file(r#"{"alice": "0x0", "bob": "0x3030"}"#);
    let r: Report<PlayResult> = json(&["play", "full", "--strategy", f.path().to_str().unwrap(), "--rounds", "2000"]);
    assert!(r.result.tally.wins < 2000);

    for bad in [r#"{"alice": "0x0"}"#, r#"{"alice": "0xg", "bob": "0x0"}"#, "not json", r#"{"alice": "0x1ffff", "bob": "0x0"}"#] {
        let f = temp_file(bad);
        let o = ptlab(&["play", "full", "--strategy", f.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{bad}");
    }
    assert_eq!(ptlab(&["play", "full", "--strategy", "/no/such/file"]).status.code(), Some(2));
}

#[test]
fn game_files_and_validation() {
    let f = temp_file(&serialize_game(&builtin_simple_game()));
    let path = f.path().to_str().unwrap();
    let r: Report<Validation> = json(&["validate", path]);
    assert!(r.result.valid);
    assert_eq!(r.result.summary.pairs, 14);
    let r: Report<ClassicalResult> = json(&["classical", path]);
    let ClassicalResult::Optimal(opt) = r.result else { panic!() };
    assert_eq!(opt.value, "13/14");

    // weights no longer sum to one
    let mut g = builtin_simple_game();
    g.pairs.pop();
    let bad = temp_file(&serialize_game(&g));
    let bad_path = bad.path().to_str().unwrap();
    let o = ptlab(&["validate", bad_path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("weights sum"));
    assert_eq!(ptlab(&["classical", bad_path]).status.code(), Some(2));

    let garbage = temp_file("{\"name\": 3}");
    assert_eq!(ptlab(&["classical", garbage.path().to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(ptlab(&["classical", "no-such-game"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(ptlab(&[]).status.code(), Some(2));
    assert_eq!(ptlab(&["list", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(ptlab(&["classical", "full", "--mode", "best"]).status.code(), Some(2));
    assert_eq!(ptlab(&["--help"]).status.code(), Some(0));
}
