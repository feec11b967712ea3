//! End-to-end runs of the `ovsg` binary: exit codes, file outputs, replay.

use std::path::Path;
use std::process::{Command, Output};

fn ovsg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ovsg"))
        .current_dir(dir)
        .env_remove("OVSG_CONFIG")
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) {
    std::fs::write(dir.join(name), content).expect("writable temp dir");
}

const RUNNING: &str = "p cnf 2 1\na 1 0\ne 2 0\n1 -1 2 0\n";

#[test]
fn reduce_play_replay_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "running.qdimacs", RUNNING);

    let out = ovsg(
        dir.path(),
        &["reduce", "running.qdimacs", "--problem", "vc", "--dot", "g.dot", "--format", "structured"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("reduce k 52"), "{stdout}");
    assert!(stdout.contains("reduce fake-clauses 3"), "{stdout}");
    assert!(dir.path().join("g.dot").exists());

    let out = ovsg(
        dir.path(),
        &["play", "running.vc.inst", "--transcript", "t.txt", "--format", "structured"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("play outcome algorithm"), "{stdout}");
    assert!(stdout.contains("play solution-size 52"), "{stdout}");

    let out = ovsg(dir.path(), &["play", "running.vc.inst", "--replay", "t.txt"]);
    assert_eq!(out.status.code(), Some(0));

    // Repeated runs are byte-identical.
    let first = ovsg(dir.path(), &["play", "running.vc.inst", "--format", "structured"]);
    let second = ovsg(dir.path(), &["play", "running.vc.inst", "--format", "structured"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn offline_reduction_reports_the_base_budget() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "running.qdimacs", RUNNING);
    let out = ovsg(
        dir.path(),
        &["reduce", "running.qdimacs", "--problem", "vc", "--offline", "--format", "structured"],
    );
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("reduce k 4"), "{stdout}");
    // Offline instances cannot be played.
    let out = ovsg(dir.path(), &["play", "running.vc.inst"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn solve_exit_codes_and_caps() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "k2.graph", "ovsg-graph v1\nvertices 2\nedge 0 1\n");
    assert_eq!(ovsg(dir.path(), &["solve", "k2.graph", "-k", "1"]).status.code(), Some(0));
    assert_eq!(ovsg(dir.path(), &["solve", "k2.graph", "-k", "0"]).status.code(), Some(10));

    // Oversize graphs hit the cap error.
    let mut big = String::from("ovsg-graph v1\nvertices 20\n");
    for v in 1..20 {
        big.push_str(&format!("edge 0 {v}\n"));
    }
    write(dir.path(), "big.graph", &big);
    assert_eq!(ovsg(dir.path(), &["solve", "big.graph", "-k", "1"]).status.code(), Some(4));
    // ... unless the cap is raised; a star is easy to decide.
    let out = ovsg(dir.path(), &["solve", "big.graph", "-k", "1", "--cap-vertices", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn parse_failures_exit_three_and_usage_two() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.qdimacs", "p cnf 1 1\ne 1 0\n0\n");
    assert_eq!(
        ovsg(dir.path(), &["reduce", "bad.qdimacs", "--problem", "vc"]).status.code(),
        Some(3)
    );
    assert_eq!(ovsg(dir.path(), &["verify", "nonsense"]).status.code(), Some(2));
    let dirless = ovsg(dir.path(), &["play", "missing.inst"]);
    assert_eq!(dirless.status.code(), Some(3));
}

#[test]
fn verify_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = ovsg(dir.path(), &["verify", "degrees", "--format", "structured"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().all(|l| l.starts_with("check ") && l.ends_with(" pass")), "{stdout}");
}

#[test]
fn deviant_adversary_and_leak_aware_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "witness.qdimacs",
        "p cnf 3 4\ne 1 0\na 2 0\ne 3 0\n-1 2 -3 0\n-1 2 3 0\n1 -2 -3 0\n1 -2 3 0\n",
    );
    let out = ovsg(dir.path(), &["reduce", "witness.qdimacs", "--problem", "vc"]);
    assert!(out.status.success());
    // Unwinnable formula: the compliant adversary wins.
    assert_eq!(ovsg(dir.path(), &["play", "witness.vc.inst"]).status.code(), Some(10));
    // Leaking the dependency reveal center hands the game to the leak-aware
    // algorithm.
    let out = ovsg(
        dir.path(),
        &[
            "play",
            "witness.vc.inst",
            "--algorithm",
            "leak-aware",
            "--adversary",
            "deviant:dr-first:2",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn config_file_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "config.toml", "vertex-cap = 1\n");
    write(dir.path(), "k2.graph", "ovsg-graph v1\nvertices 2\nedge 0 1\n");
    let out = Command::new(env!("CARGO_BIN_EXE_ovsg"))
        .current_dir(dir.path())
        .env("OVSG_CONFIG", dir.path().join("config.toml"))
        .args(["solve", "k2.graph", "-k", "1"])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(4));
}
