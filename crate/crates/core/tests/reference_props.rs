// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

use kannai_core::hermitian_dilation;
use kannai_core::linalg::{re, CMat, CVec};
use kannai_core::operators::build_heat_gradient_1d;
use kannai_core::reference::{
    direct_solve, duhamel_state, fd_time_march, phi, semigroup_solution, wave_duhamel_check,
    MarchScheme, SemigroupOracle,
};
use kannai_core::{DiscreteFactor, Error, TimeProfile};
use proptest::prelude::*;

mod common;
use common::{loglog_slope, random_matrix, random_vector};

fn random_psd(n: usize, seed: u64) -> CMat {
    let g = random_matrix(n, n, seed);
    g.adjoint() * g
}

#[test]
fn crank_nicolson_converges_at_second_order() {
    let a = random_psd(4, 3);
    let u0 = random_vector(4, 4);
    let f = random_vector(4, 5);
    let exact = semigroup_solution(&a, &u0, &f, 1.0).unwrap();
    let steps = [0.1, 0.05, 0.025, 0.0125];
    let errors: Vec<f64> = steps
        .iter()
        .map(|&dt| {
            let u = fd_time_march(&a, &u0, &f, 1.0, dt, MarchScheme::CrankNicolson).unwrap();
            (u - &exact).norm()
        })
        .collect();
    let slope = loglog_slope(&steps, &errors);
    assert!((slope - 2.0).abs() <= 0.2, "slope {slope}");
}

#[test]
fn explicit_euler_beyond_its_stability_limit_is_flagged() {
    let f = build_heat_gradient_1d(50).unwrap();
    let a = f.generator();
    let u0 = CVec::from_element(f.cols(), re(1.0));
    let zero = CVec::zeros(f.cols());
    let result = fd_time_march(&a, &u0, &zero, 0.5, 1e-3, MarchScheme::ExplicitEuler);
    assert!(matches!(result, Err(Error::UnstableMarch { .. })));
    assert!(fd_time_march(&a, &u0, &zero, 0.5, 1e-3, MarchScheme::CrankNicolson).is_ok());
}

#[test]
fn oracle_rejects_indefinite_generators() {
    let mut a = CMat::identity(2, 2);
    a[(1, 1)] = re(-1.0);
    assert!(matches!(
        SemigroupOracle::new(&a),
        Err(Error::InvalidOperator(_))
    ));
}

proptest! {
    #![proptest_config(common::cases(24))]

    #[test]
    fn wave_system_obeys_duhamel(
        rows in 1usize..5,
        cols in 1usize..5,
        seed in any::<u64>(),
        s in 0.0f64..3.0,
        linear in any::<bool>(),
    ) {
        let h = hermitian_dilation(&DiscreteFactor::custom(random_matrix(rows, cols, seed)).unwrap()).unwrap();
        let psi0 = random_vector(h.dim(), seed ^ 1);
        let b = random_vector(h.dim(), seed ^ 2);
        let profile = if linear { TimeProfile::LinearInS } else { TimeProfile::ConstantInS };
        let residual = wave_duhamel_check(&h, &psi0, &b, profile, s).unwrap();
        prop_assert!(residual <= 1e-8, "residual {residual:e}");
        let start = duhamel_state(&h, &psi0, &b, profile, 0.0);
        prop_assert!((start - &psi0).norm() <= 1e-14 * psi0.norm());
    }

    #[test]
    fn phi_is_the_integrated_semigroup(lambda in 0.0f64..50.0, t in 0.0f64..10.0) {
        let want = if lambda * t < 1e-8 { t } else { -(-lambda * t).exp_m1() / lambda };
        prop_assert!((phi(lambda, t) - want).abs() <= 1e-12 * t.max(1e-300));
        prop_assert!(phi(lambda, t) <= t * (1.0 + 1e-15));
    }

    #[test]
    fn semigroup_approaches_the_steady_state_contractively(n in 1usize..6, seed in any::<u64>(), t in 0.0f64..5.0) {
        let a = random_psd(n, seed) + CMat::identity(n, n) * re(0.1);
        let u0 = random_vector(n, seed ^ 3);
        let f = random_vector(n, seed ^ 4);
        let oracle = SemigroupOracle::new(&a).unwrap();
        let steady = direct_solve(&a, &f).unwrap();
        let u = oracle.solve(&u0, &f, t).unwrap();
        let lhs = (u - &steady).norm();
        let rhs = (-oracle.gap() * t).exp() * (&u0 - &steady).norm();
        prop_assert!(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn semigroup_is_self_adjoint(n in 1usize..5, seed in any::<u64>()) {
        let a = random_psd(n, seed);
        let u = random_vector(n, seed ^ 5);
        let v = random_vector(n, seed ^ 6);
        let zero = CVec::zeros(n);
        let eu = semigroup_solution(&a, &u, &zero, 0.7).unwrap();
        let ev = semigroup_solution(&a, &v, &zero, 0.7).unwrap();
        prop_assert!((v.dotc(&eu) - ev.dotc(&u)).norm() <= 1e-12 * u.norm() * v.norm());
    }
}
