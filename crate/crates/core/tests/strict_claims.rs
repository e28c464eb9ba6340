// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

//! Verbatim statements that do not hold for this implementation. They are
//! ignored by default; run them with `cargo test -- --ignored`. The README
//! explains why each one fails.

use std::f64::consts::PI;

use kannai_core::kernels::min_truncation_radius;
use kannai_core::linalg::{re, rel_error, CVec};
use kannai_core::operators::{build_heat_gradient_1d, dirichlet_boundary_forcing};
use kannai_core::pipeline::run;
use kannai_core::reference::{fd_time_march, MarchScheme};
use kannai_core::{KernelKind, KernelSpec, Rule, SimulationProblem, SimulationReport};

fn dirichlet_run() -> (SimulationReport, CVec) {
    let n = 50;
    let f = build_heat_gradient_1d(n).unwrap();
    let h = f.grid().h;
    let u0 = CVec::from_fn(n - 1, |i, _| re((2.0 * PI * (i + 1) as f64 * h).cos()));
    let forcing = dirichlet_boundary_forcing(n, 1.0, 1.0).unwrap();
    let g = forcing.effective_source(&f).unwrap();
    let p = SimulationProblem::new(&f, u0.clone(), forcing, 1.0, 1e-6).unwrap();
    let report = run(
        &p,
        Rule::Trapezoid {
            r: 10.0,
            panels: 800,
        },
    )
    .unwrap();
    let cn = fd_time_march(
        &f.generator(),
        &u0,
        &g,
        1.0,
        1e-4,
        MarchScheme::CrankNicolson,
    )
    .unwrap();
    (report, cn)
}

#[test]
#[ignore = "the constant-profile kernel jumps at zero, so the trapezoid rule is only second order"]
fn dirichlet_case_matches_spectral_oracle_to_1e_6() {
    let (report, _) = dirichlet_run();
    assert!(report.rel_error <= 1e-6, "rel_error {:e}", report.rel_error);
}

#[test]
#[ignore = "same quadrature error as the oracle comparison"]
fn dirichlet_case_matches_crank_nicolson_to_1e_4() {
    let (report, cn) = dirichlet_run();
    let err = rel_error(&report.u_h, &cn);
    assert!(err <= 1e-4, "rel_error {err:e}");
}

#[test]
#[ignore = "7.97 is the closed-form radius with its safety factor, the minimal radius is 6.918"]
fn kannai_minimal_radius_at_1e_6_is_7_97() {
    let r = min_truncation_radius(&KernelSpec::new(KernelKind::KannaiGaussian, 1.0), 1e-6).unwrap();
    assert!((r - 7.97).abs() <= 0.01, "R = {r}");
}
