// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

use kannai_core::linalg::{re, CVec};
use kannai_core::operators::{build_heat_gradient_1d, build_heat_neumann_1d};
use kannai_core::pipeline::{
    assemble, budget_report_injected, error_budget_check, run, theorem_plan,
};
use kannai_core::quadrature::{
    build_panel_grid, build_trapezoid_grid, coefficients, select_parameters,
};
use kannai_core::{DiscreteFactor, Error, ForcingVector, Rule, SimulationProblem, TimeProfile};
use proptest::prelude::*;

mod common;
use common::{loglog_slope, random_matrix, random_vector};

fn random_problem(
    rows: usize,
    cols: usize,
    seed: u64,
    t: f64,
    eps: f64,
    forced: bool,
) -> SimulationProblem {
    let f = DiscreteFactor::custom(random_matrix(rows, cols, seed)).unwrap();
    let u0 = random_vector(cols, seed ^ 21);
    let forcing = if forced {
        ForcingVector::interior(random_vector(cols, seed ^ 23))
    } else {
        ForcingVector::zero(&f)
    };
    SimulationProblem::new(&f, u0, forcing, t, eps).unwrap()
}

proptest! {
    #![proptest_config(common::cases(12))]

    #[test]
    fn pipeline_matches_the_semigroup_oracle(
        rows in 1usize..5,
        cols in 1usize..5,
        seed in any::<u64>(),
        t in 0.2f64..2.0,
        eps_exp in 4i32..8,
        forced in any::<bool>(),
    ) {
        let eps = 10f64.powi(-eps_exp);
        let p = random_problem(rows, cols, seed, t, eps, forced);
        let report = run(&p, Rule::TheoremGL).unwrap();
        let scale = p.u0().norm() + t * p.b().norm();
        prop_assert!(report.abs_error <= eps * scale, "{} > {}", report.abs_error, eps * scale);

        let unit = |v: &CVec| v / re(v.norm());
        let normalized = (unit(&report.u_h) - unit(&report.u_ref)).norm();
        prop_assert!(normalized <= eps, "normalized error {normalized:e}");

        prop_assert!(report.g as f64 * report.u_h.norm() >= report.eta0);
        prop_assert_eq!(report.queries.state_prep_calls, if forced { 2 * report.g } else { report.g });
        prop_assert_eq!(report.queries.total_matrix_queries, report.queries.per_sel * report.g);
    }
}

#[test]
fn queries_grow_like_the_square_root_of_time() {
    let n = 16;
    let f = build_heat_neumann_1d(n).unwrap();
    let u0 = CVec::from_fn(n, |i, _| {
        re(1.0 + 0.5 * (std::f64::consts::PI * (i as f64 + 0.5) / n as f64).cos())
    });
    let ts = [1.0, 4.0, 16.0];
    let queries: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let p = SimulationProblem::homogeneous(&f, u0.clone(), t, 1e-6).unwrap();
            run(&p, Rule::TheoremGL)
                .unwrap()
                .queries
                .total_matrix_queries as f64
        })
        .collect();
    let slope = loglog_slope(&ts, &queries);
    assert!((0.4..=0.6).contains(&slope), "slope {slope}");
}

#[test]
fn perturbed_assembly_requires_a_seed_and_a_matching_plan() {
    let p = random_problem(3, 3, 4, 1.0, 1e-4, true);
    let (plan, coeffs) = theorem_plan(&p, 1e-4).unwrap();
    assert!(matches!(
        assemble(&p, &plan, &coeffs, Some(1e-3), None),
        Err(Error::InvalidArgument(_))
    ));
    let other = build_trapezoid_grid(4.0, 10).unwrap();
    assert!(matches!(
        assemble(&p, &other, &coeffs, None, None),
        Err(Error::PlanMismatch(_))
    ));
    let clean = assemble(&p, &plan, &coeffs, None, None).unwrap();
    let a = assemble(&p, &plan, &coeffs, Some(1e-3), Some(5)).unwrap();
    let b = assemble(&p, &plan, &coeffs, Some(1e-3), Some(5)).unwrap();
    assert_eq!(a, b);
    let eta = coeffs.alpha_c * p.psi0().norm() + coeffs.alpha_d * p.b().norm();
    assert!((a - clean).norm() <= 1e-3 * eta);
}

#[test]
fn budget_holds_for_honest_noise_and_breaks_for_injected_noise() {
    let f = build_heat_gradient_1d(6).unwrap();
    let u0 = CVec::from_fn(f.cols(), |i, _| re((i as f64 + 1.0).sin()));
    let forcing = ForcingVector::interior(CVec::from_element(f.cols(), re(1.0)));
    let t = 1.0;
    let p = SimulationProblem::new(&f, u0, forcing, t, 1e-4).unwrap();
    let params = select_parameters(t, p.dilation().norm(), 1e-4).unwrap();
    let plan = build_panel_grid(8.0 * t.sqrt(), params.h1, params.q).unwrap();
    error_budget_check(&p, &plan, 1e-3, 1e-4, 11).unwrap();
    let broken = budget_report_injected(&p, &plan, 0.0, 0.1, 1e-4, 11).unwrap();
    assert!(!broken.holds());
    assert!(broken.violations().any(|c| c.name.starts_with("total/")));
}

#[test]
fn constant_profile_budgets_are_refused() {
    let f = build_heat_gradient_1d(4).unwrap();
    let mut forcing = ForcingVector::interior(CVec::from_element(f.cols(), re(1.0)));
    forcing.time_profile = TimeProfile::ConstantInS;
    let p = SimulationProblem::new(&f, CVec::zeros(f.cols()), forcing, 1.0, 1e-3).unwrap();
    let plan = build_panel_grid(4.0, 1.0, 3).unwrap();
    let _ = coefficients(&plan, 1.0, TimeProfile::ConstantInS, None).unwrap();
    assert!(budget_report_injected(&p, &plan, 0.0, 0.0, 1e-3, 0).is_err());
}
