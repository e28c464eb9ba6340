// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

use kannai_core::bounds::{coefficient_checks, quadrature_checks, total_checks, truncation_checks};
use kannai_core::hermitian_dilation;
use kannai_core::kernels::KernelNoise;
use kannai_core::quadrature::{
    build_panel_grid, coefficients, gauss_legendre_reference, select_parameters,
};
use kannai_core::{DiscreteFactor, TimeProfile};
use proptest::prelude::*;

mod common;
use common::{random_matrix, random_vector};

fn monomial_integral(k: u32) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        2.0 / (k as f64 + 1.0)
    }
}

proptest! {
    #![proptest_config(common::cases(32))]

    #[test]
    fn gauss_legendre_is_exact_to_degree_2q_minus_1(q in 1usize..=40) {
        let (x, w) = gauss_legendre_reference(q).unwrap();
        for k in 0..(2 * q as u32).min(30) {
            let sum: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
            prop_assert!((sum - monomial_integral(k)).abs() <= 1e-13, "q={q} k={k}: {sum}");
        }
        prop_assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn panel_weights_sum_to_the_interval_length(r in 0.5f64..20.0, frac in 0.05f64..1.0, q in 1usize..20) {
        let plan = build_panel_grid(r, r * frac, q).unwrap();
        let total: f64 = plan.weights.iter().sum();
        prop_assert!((total - 2.0 * r).abs() <= 1e-12 * r);
        prop_assert!(plan.s_max() < r);
        let panels = (r / plan.h1).round();
        prop_assert!((panels * plan.h1 - r).abs() <= 1e-12 * r);
    }

    #[test]
    fn truncation_and_quadrature_bounds_hold(
        n in 1usize..6,
        seed in any::<u64>(),
        t in 0.2f64..4.0,
        q in 2usize..10,
        frac in 0.1f64..1.0,
    ) {
        let f = DiscreteFactor::custom(random_matrix(n, n, seed)).unwrap();
        let h = hermitian_dilation(&f).unwrap();
        let psi0 = random_vector(h.dim(), seed ^ 7);
        let b = random_vector(h.dim(), seed ^ 11);
        let r = 3.0 * t.sqrt();
        for check in truncation_checks(h.spectrum(), &psi0, &b, t, r).unwrap() {
            prop_assert!(check.holds(), "{check:?}");
        }
        let plan = build_panel_grid(r, r * frac, q).unwrap();
        let clean = coefficients(&plan, t, TimeProfile::LinearInS, None).unwrap();
        for check in quadrature_checks(&h, &psi0, &b, t, &plan, &clean).unwrap() {
            prop_assert!(check.holds(), "{check:?}");
        }
    }

    #[test]
    fn noisy_kernels_stay_inside_the_total_budget(
        n in 1usize..5,
        seed in any::<u64>(),
        t in 0.25f64..3.0,
        eps_exp in 3i32..8,
    ) {
        let eps = 10f64.powi(-eps_exp);
        let f = DiscreteFactor::custom(random_matrix(n, n, seed)).unwrap();
        let h = hermitian_dilation(&f).unwrap();
        let params = select_parameters(t, h.norm(), eps).unwrap();
        let plan = params.plan().unwrap();
        let noise = KernelNoise::new(params.delta_off, seed).unwrap();
        let noisy = coefficients(&plan, t, TimeProfile::LinearInS, Some(&noise)).unwrap();
        let psi0 = random_vector(h.dim(), seed ^ 3);
        let b = random_vector(h.dim(), seed ^ 5);
        for check in total_checks(&h, &psi0, &b, t, &plan, &noisy, params.delta_off).unwrap() {
            prop_assert!(check.holds(), "{check:?}");
        }
    }
}

#[test]
fn coefficient_budgets_hold_across_the_parameter_grid() {
    for t in [0.5, 1.0, 4.0] {
        for eps in [1e-4, 1e-8] {
            for norm_h in [1.0, 10.0] {
                let params = select_parameters(t, norm_h, eps).unwrap();
                let plan = params.plan().unwrap();
                let clean = coefficients(&plan, t, TimeProfile::LinearInS, None).unwrap();
                for check in coefficient_checks(&plan, &clean, t, params.delta_off).unwrap() {
                    assert!(check.holds(), "T={t} ε={eps:e}: {check:?}");
                }
                let noise = KernelNoise::new(params.delta_off, 42).unwrap();
                let noisy = coefficients(&plan, t, TimeProfile::LinearInS, Some(&noise)).unwrap();
                for check in coefficient_checks(&plan, &noisy, t, params.delta_off).unwrap() {
                    assert!(check.holds(), "noisy T={t} ε={eps:e}: {check:?}");
                }
            }
        }
    }
}

#[test]
fn trapezoid_plans_are_rejected_by_the_bound_checker() {
    let plan = kannai_core::quadrature::build_trapezoid_grid(4.0, 40).unwrap();
    let clean = coefficients(&plan, 1.0, TimeProfile::LinearInS, None).unwrap();
    assert!(coefficient_checks(&plan, &clean, 1.0, 0.0).is_err());
}
