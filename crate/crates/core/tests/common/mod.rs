// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use kannai_core::linalg::{CMat, CVec, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense complex matrix with entries uniform in the unit square.
pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> CMat {
    let mut r = rng(seed);
    CMat::from_fn(rows, cols, |_, _| {
        C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
    })
}

pub fn random_vector(n: usize, seed: u64) -> CVec {
    let mut r = rng(seed);
    CVec::from_fn(n, |_, _| {
        C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
    })
}

pub fn random_hermitian(n: usize, seed: u64) -> CMat {
    let m = random_matrix(n, n, seed);
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Proptest settings without on-disk regression files.
pub fn cases(n: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases: n,
        failure_persistence: None,
        ..Default::default()
    }
}
