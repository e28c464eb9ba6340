// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

use kannai_core::extensions::{
    cartesian_split, epd_solve, linear_solve_kannai, longtime_steady, simulate_normal,
    strang_simulate, transport_multiplier, STEADY_PIPELINE_SHARE,
};
use kannai_core::linalg::{expm, re, spectral_norm, CMat, CVec, C64, I};
use kannai_core::operators::build_heat_gradient_1d;
use kannai_core::reference::direct_solve;
use kannai_core::DiscreteFactor;
use proptest::prelude::*;

mod common;
use common::{random_hermitian, random_matrix, random_vector, rng};
use rand::Rng;

/// `U diag(z) U†` with `Re z ≥ 0`.
fn random_normal(n: usize, seed: u64) -> CMat {
    let q = random_matrix(n, n, seed).qr().q();
    let mut r = rng(seed ^ 77);
    let z = CVec::from_fn(n, |_, _| {
        C64::new(r.random_range(0.0..3.0), r.random_range(-3.0..3.0))
    });
    &q * CMat::from_diagonal(&z) * q.adjoint()
}

fn strang_decrements(a: &CMat, u0: &CVec) -> Vec<f64> {
    let pair = cartesian_split(a).unwrap();
    let errors: Vec<f64> = [4, 8, 16, 32]
        .iter()
        .map(|&n| strang_simulate(&pair, u0, 1.0, n, 1e-12).unwrap().error)
        .collect();
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn strang_is_second_order_on_a_jordan_block() {
    let a = CMat::from_row_slice(2, 2, &[re(1.0), re(1.0), re(0.0), re(1.0)]);
    for d in strang_decrements(&a, &CVec::from_element(2, re(1.0))) {
        assert!((1.8..=2.2).contains(&d), "decrement {d}");
    }
}

#[test]
fn strang_is_second_order_on_a_random_dissipative_pair() {
    let g = random_matrix(8, 8, 7);
    let a = g.adjoint() * g + random_hermitian(8, 8) * I;
    for d in strang_decrements(&a, &random_vector(8, 9)) {
        assert!((1.8..=2.2).contains(&d), "decrement {d}");
    }
}

#[test]
fn linear_solver_meets_its_tolerance_on_the_dirichlet_laplacian() {
    let f = build_heat_gradient_1d(16).unwrap();
    let b = CVec::from_fn(f.cols(), |i, _| re(1.0 + (i as f64).sin()));
    let result = linear_solve_kannai(&f, &b, 1e-4).unwrap();
    assert!(result.rel_error <= 1e-4, "rel_error {}", result.rel_error);
}

proptest! {
    #![proptest_config(common::cases(10))]

    #[test]
    fn normal_generators_are_simulated_to_precision(n in 1usize..6, seed in any::<u64>(), t in 0.1f64..2.0) {
        let a = random_normal(n, seed);
        let pair = cartesian_split(&a).unwrap();
        prop_assert!(pair.normal);
        let u0 = random_vector(n, seed ^ 1);
        let got = simulate_normal(&pair, &u0, t, 1e-6).unwrap();
        let want = expm(&(&a * re(-t))) * &u0;
        prop_assert!((got - want).norm() <= 1e-6 * u0.norm());
    }

    #[test]
    fn steady_state_matches_the_direct_solve(n in 1usize..5, seed in any::<u64>()) {
        let g = random_matrix(n, n, seed) + CMat::identity(n, n) * re(2.0);
        let f = DiscreteFactor::custom(g).unwrap();
        let rhs = random_vector(n, seed ^ 2);
        let eps = 1e-4;
        let out = longtime_steady(&f, &rhs, eps, None).unwrap();
        let x = direct_solve(&f.generator(), &rhs).unwrap();
        let err = (&out.x - &x).norm();
        let tail = (-out.gap * out.t_tilde).exp() * x.norm();
        prop_assert!(tail <= eps * x.norm() * (1.0 + 1e-12));
        // For n = 1 both error pieces are collinear and the triangle inequality is tight.
        prop_assert!(err <= (tail + out.report.abs_error) * (1.0 + 1e-9));
        prop_assert!(err <= eps * (1.0 + STEADY_PIPELINE_SHARE / 8.0) * x.norm(), "rel {:e}", err / x.norm());
    }

    #[test]
    fn epd_solution_satisfies_its_ode(n in 1usize..4, seed in any::<u64>(), d in 2usize..6, t in 0.5f64..2.0) {
        let f = DiscreteFactor::custom(random_matrix(n, n, seed)).unwrap();
        let a = f.generator();
        let u0 = random_vector(n, seed ^ 3);
        let h = 1e-3;
        let at = |s: f64| epd_solve(&f, &u0, s, d).unwrap();
        let (um, uc, up) = (at(t - h), at(t), at(t + h));
        let second = (&up - &uc * re(2.0) + &um) / re(h * h);
        let first = (&up - &um) / re(2.0 * h);
        let residual = (second + first * re((d as f64 - 1.0) / t) + &a * &uc).norm();
        prop_assert!(residual <= 1e-4 * spectral_norm(&a).max(1.0) * u0.norm(), "residual {residual:e}");
    }

    #[test]
    fn transport_average_reproduces_the_heat_multiplier(
        k in prop::collection::vec(-8i64..=8, 1..4),
        t in 0.0f64..=0.25,
    ) {
        let got = transport_multiplier(&k, t, 60).unwrap();
        let k2: f64 = k.iter().map(|&v| (v * v) as f64).sum();
        let want = (-4.0 * std::f64::consts::PI.powi(2) * k2 * t).exp();
        prop_assert!((got - re(want)).norm() <= 1e-8, "{got} vs {want}");
    }
}
