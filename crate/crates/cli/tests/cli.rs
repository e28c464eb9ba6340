// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

use std::process::{Command, Output};

fn kannai(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kannai"))
        .args(args)
        .env_remove("KANNAI_SIZE_CAP")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn heat_writes_one_row_per_unknown() {
    let o = kannai(&["heat", "--n", "20", "--T", "0.5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = stdout(&o);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "x_index,u_kannai_re,u_kannai_im,u_ref_re,u_ref_im,abs_err"
    );
    assert_eq!(lines.count(), 19);
    assert!(stderr(&o).contains("status=ok"));
}

#[test]
fn file_output_moves_summary_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.csv");
    let o = kannai(&["heat", "--n", "10", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("subcommand=heat"));
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 10);
}

#[test]
fn degenerate_grid_is_a_usage_error() {
    assert_eq!(code(&kannai(&["heat", "--n", "1"])), 2);
}

#[test]
fn unknown_keys_are_usage_errors() {
    assert_eq!(code(&kannai(&["heat", "--bogus", "1"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "n = 10\nbogus = 1\n").unwrap();
    assert_eq!(
        code(&kannai(&["heat", "--config", cfg.to_str().unwrap()])),
        2
    );
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# coarse run\nn = 10\nT = 0.5\n").unwrap();
    let o = kannai(&["heat", "--config", cfg.to_str().unwrap(), "--n", "12"]);
    assert_eq!(code(&o), 0);
    let err = stderr(&o);
    assert!(err.contains("n=12\n"), "{err}");
    assert!(err.contains("T=0.5\n"), "{err}");
}

#[test]
fn kernel_compare_lists_all_kernels() {
    let o = kannai(&["kernel-compare", "--M", "20"]);
    assert_eq!(code(&o), 0);
    let csv = stdout(&o);
    assert!(csv.starts_with("kernel,T,eps_param,R,tail_eps\n"));
    assert_eq!(csv.lines().count(), 1 + 4 * 20);
    assert!(stderr(&o).contains("R_min_kannai=6.9"));
}

#[test]
fn injected_noise_violates_the_budget() {
    let honest = kannai(&["bench-bounds"]);
    assert_eq!(code(&honest), 0, "{}", stderr(&honest));
    let dishonest = kannai(&["bench-bounds", "--delta_off", "0", "--inject", "0.1"]);
    assert_eq!(code(&dishonest), 1);
    assert!(stdout(&dishonest).contains(",false\n"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["heat", "--n", "16"][..],
        &["verify-blockenc", "--seed", "3"][..],
        &["bench-bounds", "--seed", "5"][..],
    ] {
        let (a, b) = (kannai(args), kannai(args));
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.stderr, b.stderr);
    }
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("u.csv");
    assert_eq!(
        code(&kannai(&[
            "heat",
            "--n",
            "8",
            "--out",
            path.to_str().unwrap()
        ])),
        3
    );
}

#[test]
fn size_cap_is_enforced() {
    let o = Command::new(env!("CARGO_BIN_EXE_kannai"))
        .args(["heat", "--n", "50"])
        .env("KANNAI_SIZE_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn explicit_tolerance_can_fail() {
    let o = kannai(&["heat", "--rule", "trapezoid", "--tol", "1e-6"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("status=fail"));
}

#[test]
fn every_subcommand_runs_with_defaults() {
    for sub in [
        "biharmonic",
        "hj",
        "linsolve",
        "epd",
        "transport",
        "verify-blockenc",
    ] {
        let o = kannai(&[sub]);
        assert_eq!(code(&o), 0, "{sub}: {}", stderr(&o));
    }
}
