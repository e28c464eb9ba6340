// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

//! Independent classical oracles.
//!
//! None of these touch the quadrature or the LCU code paths: the semigroup
//! oracle works on `A` directly, the dilated target uses closed-form symbols,
//! and the time march and Duhamel check integrate ODEs step by step.

use nalgebra::linalg::LU;

use crate::dilation::{skew_generator, DilationHamiltonian};
use crate::error::{Error, Result};
use crate::integrate::adaptive;
use crate::linalg::{cholesky_solve, identity, re, CMat, CVec, HermitianEigen, C64};
use crate::operators::{DiscreteFactor, ForcingVector, TimeProfile};
use crate::special::half_gamma_ratio;

/// `φ_T(λ) = (1 − e^{−λT})/λ`, continuous at `λ = 0`.
pub fn phi(lambda: f64, t: f64) -> f64 {
    let x = lambda * t;
    if x.abs() < 1e-8 {
        t * (1.0 - x / 2.0 + x * x / 6.0)
    } else {
        -(-x).exp_m1() / lambda
    }
}

/// Spectral oracle for `u' = −Au + f` with `A` Hermitian PSD.
#[derive(Debug, Clone)]
pub struct SemigroupOracle {
    a: CMat,
    spectrum: HermitianEigen,
}

impl SemigroupOracle {
    pub fn new(a: &CMat) -> Result<Self> {
        let spectrum = HermitianEigen::new(a)?;
        let scale = spectrum.max_abs();
        if spectrum.dim() > 0 && spectrum.min() < -1e-10 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidOperator(format!(
                "generator is not positive semidefinite (min eigenvalue {:.3e})",
                spectrum.min()
            )));
        }
        Ok(Self {
            a: a.clone(),
            spectrum,
        })
    }

    pub fn generator(&self) -> &CMat {
        &self.a
    }

    pub fn spectrum(&self) -> &HermitianEigen {
        &self.spectrum
    }

    /// Smallest eigenvalue `λ₀`.
    pub fn gap(&self) -> f64 {
        self.spectrum.min()
    }

    /// `e^{−AT}u₀ + φ_T(A) f`.
    pub fn solve(&self, u0: &CVec, f: &CVec, t: f64) -> Result<CVec> {
        let n = self.spectrum.dim();
        for v in [u0, f] {
            if v.len() != n {
                return Err(Error::ShapeError {
                    expected: n,
                    got: v.len(),
                });
            }
        }
        let cu = self.spectrum.to_eigenbasis(u0);
        let cf = self.spectrum.to_eigenbasis(f);
        let lam = self.spectrum.values();
        let c = CVec::from_fn(n, |k, _| {
            let l = lam[k].max(0.0);
            cu[k] * (-l * t).exp() + cf[k] * phi(l, t)
        });
        Ok(self.spectrum.from_eigenbasis(&c))
    }
}

/// `u(T) = e^{−AT}u₀ + φ_T(A) f`.
pub fn semigroup_solution(a: &CMat, u0: &CVec, f: &CVec, t: f64) -> Result<CVec> {
    SemigroupOracle::new(a)?.solve(u0, f, t)
}

/// Physical solution for a factor and forcing, using the source the forcing
/// induces on the primary block.
pub fn physical_solution(
    factor: &DiscreteFactor,
    u0: &CVec,
    forcing: &ForcingVector,
    t: f64,
) -> Result<CVec> {
    let g = forcing.effective_source(factor)?;
    semigroup_solution(&factor.generator(), u0, &g, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MarchScheme {
    #[default]
    CrankNicolson,
    ExplicitEuler,
}

/// Fixed-step march of `u' = −Au + f` to time `t`.
pub fn fd_time_march(
    a: &CMat,
    u0: &CVec,
    f: &CVec,
    t: f64,
    dt: f64,
    scheme: MarchScheme,
) -> Result<CVec> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidTime(t));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let n = a.nrows();
    if u0.len() != n || f.len() != n {
        return Err(Error::ShapeError {
            expected: n,
            got: if u0.len() != n { u0.len() } else { f.len() },
        });
    }
    let steps = (t / dt).round().max(1.0) as usize;
    let dt = t / steps as f64;
    let initial = u0.norm();
    let limit = 10.0 * (initial + t * f.norm()).max(f64::MIN_POSITIVE);
    let mut u = u0.clone();
    let id = identity(n);
    let fdt = f * re(dt);
    match scheme {
        MarchScheme::CrankNicolson => {
            let lhs = LU::new(&id + a * re(dt / 2.0));
            let rhs = &id - a * re(dt / 2.0);
            for _ in 0..steps {
                let r = &rhs * &u + &fdt;
                u = lhs.solve(&r).ok_or_else(|| {
                    Error::NumericalBreakdown("Crank–Nicolson system singular".into())
                })?;
                check_growth(&u, initial, limit)?;
            }
        }
        MarchScheme::ExplicitEuler => {
            let step = &id - a * re(dt);
            for _ in 0..steps {
                u = &step * &u + &fdt;
                check_growth(&u, initial, limit)?;
            }
        }
    }
    Ok(u)
}

fn check_growth(u: &CVec, initial: f64, limit: f64) -> Result<()> {
    let current = u.norm();
    if !current.is_finite() || current > limit {
        return Err(Error::UnstableMarch { initial, current });
    }
    Ok(())
}

/// Integrates `ψ' = L̃ψ + ρ(σ)b` with classical RK4 and compares against the
/// spectral Duhamel formula; returns the Euclidean discrepancy at `s`.
pub fn wave_duhamel_check(
    h: &DilationHamiltonian,
    psi0: &CVec,
    b: &CVec,
    profile: TimeProfile,
    s: f64,
) -> Result<f64> {
    let dim = h.dim();
    for v in [psi0, b] {
        if v.len() != dim {
            return Err(Error::ShapeError {
                expected: dim,
                got: v.len(),
            });
        }
    }
    let lt = skew_generator(h.factor());
    let rho = |sigma: f64| match profile {
        TimeProfile::LinearInS => sigma,
        TimeProfile::ConstantInS => 1.0,
    };
    let steps = ((s.abs() * h.norm().max(1.0)) / 2e-3).ceil().max(200.0) as usize;
    let dt = s / steps as f64;
    let rhs = |sigma: f64, y: &CVec| &lt * y + b * re(rho(sigma));
    let mut y = psi0.clone();
    for k in 0..steps {
        let sigma = k as f64 * dt;
        let k1 = rhs(sigma, &y);
        let k2 = rhs(sigma + dt / 2.0, &(&y + &k1 * re(dt / 2.0)));
        let k3 = rhs(sigma + dt / 2.0, &(&y + &k2 * re(dt / 2.0)));
        let k4 = rhs(sigma + dt, &(&y + &k3 * re(dt)));
        y += (k1 + k2 * re(2.0) + k3 * re(2.0) + k4) * re(dt / 6.0);
    }
    let exact = duhamel_state(h, psi0, b, profile, s);
    Ok((y - exact).norm())
}

/// `U(s)ψ₀ + ∫₀^s U(s−σ)ρ(σ)dσ · b`, evaluated per eigenvalue.
pub fn duhamel_state(
    h: &DilationHamiltonian,
    psi0: &CVec,
    b: &CVec,
    profile: TimeProfile,
    s: f64,
) -> CVec {
    let spec = h.spectrum();
    let cp = spec.to_eigenbasis(psi0);
    let cb = spec.to_eigenbasis(b);
    let c = CVec::from_fn(h.dim(), |k, _| {
        let mu = C64::new(0.0, -spec.values()[k]);
        let z = mu * s;
        let e = z.exp();
        let forced = match profile {
            TimeProfile::ConstantInS => s * exprel(z),
            TimeProfile::LinearInS => s * s * exprel2(z),
        };
        cp[k] * e + cb[k] * forced
    });
    spec.from_eigenbasis(&c)
}

/// `(e^z − 1)/z`.
fn exprel(z: C64) -> C64 {
    if z.norm() < 1e-3 {
        C64::new(1.0, 0.0) + z / 2.0 + z * z / 6.0 + z * z * z / 24.0
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `(e^z − 1 − z)/z²`.
fn exprel2(z: C64) -> C64 {
    if z.norm() < 1e-2 {
        C64::new(0.5, 0.0) + z / 6.0 + z * z / 24.0 + z * z * z / 120.0 + z * z * z * z / 720.0
    } else {
        (z.exp() - 1.0 - z) / (z * z)
    }
}

/// Exact dilated output `e^{−H²T}ψ₀ + G(H) b` where `G` is the transform of
/// the moment kernel selected by `profile`.
pub fn dilated_target(
    h: &DilationHamiltonian,
    psi0: &CVec,
    b: &CVec,
    profile: TimeProfile,
    t: f64,
) -> CVec {
    let spec = h.spectrum();
    let cp = spec.to_eigenbasis(psi0);
    let cb = spec.to_eigenbasis(b);
    let c = CVec::from_fn(h.dim(), |k, _| {
        let lam = spec.values()[k];
        let l2 = lam * lam;
        let g = match profile {
            TimeProfile::LinearInS => re(phi(l2, t)),
            TimeProfile::ConstantInS => C64::new(0.0, -lam * phi(l2, t)),
        };
        cp[k] * (-l2 * t).exp() + cb[k] * g
    });
    spec.from_eigenbasis(&c)
}

/// Solves `Ax = b` for Hermitian positive definite `A`.
pub fn direct_solve(a: &CMat, b: &CVec) -> Result<CVec> {
    cholesky_solve(a, b)
}

/// Euler–Poisson–Darboux solution by per-eigenvalue adaptive quadrature of
/// `c_d ∫_{−π/2}^{π/2} cos(μt sin θ) cos^{d−2}θ dθ`, `μ² ∈ spec(A)`. The
/// substitution `λ = sin θ` removes the endpoint singularity of the weight.
pub fn epd_reference(a: &CMat, u0: &CVec, t: f64, d: usize) -> Result<CVec> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidTime(t));
    }
    if u0.len() != a.nrows() {
        return Err(Error::ShapeError {
            expected: a.nrows(),
            got: u0.len(),
        });
    }
    let eig = HermitianEigen::new(a)?;
    let c_d = half_gamma_ratio(d) / std::f64::consts::PI.sqrt();
    let half = std::f64::consts::FRAC_PI_2;
    let mut coords = eig.to_eigenbasis(u0);
    for (c, &lam) in coords.iter_mut().zip(eig.values().iter()) {
        let x = lam.max(0.0).sqrt() * t;
        let m = adaptive(
            |th| (x * th.sin()).cos() * th.cos().powi(d as i32 - 2),
            -half,
            half,
            1e-14,
            1e-13,
        )?;
        *c *= re(c_d * m);
    }
    Ok(eig.from_eigenbasis(&coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::hermitian_dilation;
    use crate::linalg::real_vector;

    fn scalar(x: f64) -> CMat {
        CMat::from_element(1, 1, re(x))
    }

    #[test]
    fn semigroup_scalar_cases() {
        let one = real_vector(&[1.0]);
        let zero = real_vector(&[0.0]);
        let u = semigroup_solution(&scalar(4.0), &one, &zero, 1.0).unwrap();
        assert!((u[0].re - (-4f64).exp()).abs() < 1e-16);
        let u = semigroup_solution(&scalar(4.0), &zero, &real_vector(&[4.0]), 1.0).unwrap();
        assert!((u[0].re - (1.0 - (-4f64).exp())).abs() < 1e-15);
        let u = semigroup_solution(&scalar(0.0), &zero, &one, 3.0).unwrap();
        assert!((u[0].re - 3.0).abs() < 1e-15);
    }

    #[test]
    fn semigroup_rejects_non_hermitian() {
        let a = CMat::from_row_slice(2, 2, &[re(1.0), re(1.0), re(0.0), re(1.0)]);
        let v = real_vector(&[1.0, 0.0]);
        assert!(matches!(
            semigroup_solution(&a, &v, &v, 1.0),
            Err(Error::InvalidOperator(_))
        ));
    }

    #[test]
    fn crank_nicolson_scalar() {
        let one = real_vector(&[1.0]);
        let zero = real_vector(&[0.0]);
        let u = fd_time_march(
            &scalar(4.0),
            &one,
            &zero,
            1.0,
            1e-3,
            MarchScheme::CrankNicolson,
        )
        .unwrap();
        assert!((u[0].re - (-4f64).exp()).abs() < 1e-5);
        let u = fd_time_march(
            &scalar(4.0),
            &zero,
            &real_vector(&[4.0]),
            1.0,
            1e-3,
            MarchScheme::CrankNicolson,
        )
        .unwrap();
        assert!((u[0].re - (1.0 - (-4f64).exp())).abs() < 1e-5);
    }

    #[test]
    fn explicit_euler_blows_up_past_stability_limit() {
        let one = real_vector(&[1.0]);
        let zero = real_vector(&[0.0]);
        let err = fd_time_march(
            &scalar(100.0),
            &one,
            &zero,
            1.0,
            0.05,
            MarchScheme::ExplicitEuler,
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnstableMarch { .. }));
    }

    #[test]
    fn duhamel_scalar_cases() {
        let h = hermitian_dilation(&DiscreteFactor::scalar(2.0)).unwrap();
        let psi0 = real_vector(&[1.0, 0.0]);
        let zero = real_vector(&[0.0, 0.0]);
        let r = wave_duhamel_check(&h, &psi0, &zero, TimeProfile::LinearInS, 1.0).unwrap();
        assert!(r < 1e-10);
        let exact = duhamel_state(&h, &psi0, &zero, TimeProfile::LinearInS, 1.0);
        assert!(
            (exact[0].re - 2f64.cos()).abs() < 1e-15 && (exact[1].re + 2f64.sin()).abs() < 1e-15
        );

        let b = real_vector(&[1.0, 0.0]);
        let s = 0.8;
        let forced = duhamel_state(&h, &zero, &b, TimeProfile::LinearInS, s);
        assert!((forced[0].re - (1.0 - (2.0 * s).cos()) / 4.0).abs() < 1e-14);
        assert!(wave_duhamel_check(&h, &zero, &b, TimeProfile::LinearInS, s).unwrap() < 1e-8);
    }

    #[test]
    fn dilated_target_scalar() {
        let h = hermitian_dilation(&DiscreteFactor::scalar(2.0)).unwrap();
        let psi0 = real_vector(&[1.0, 0.0]);
        let b = real_vector(&[4.0, 0.0]);
        let u = dilated_target(&h, &psi0, &b, TimeProfile::LinearInS, 1.0);
        assert!((u[0].re - 1.0).abs() < 1e-14);
        assert!(u[1].norm() < 1e-14);
    }

    #[test]
    fn direct_solve_cases() {
        let x = direct_solve(&identity(3), &real_vector(&[1.0, 2.0, 3.0])).unwrap();
        assert!((x - real_vector(&[1.0, 2.0, 3.0])).norm() < 1e-15);
        let l = crate::operators::build_heat_neumann_1d(4).unwrap();
        assert_eq!(
            direct_solve(&l.generator(), &real_vector(&[1.0, 0.0, 0.0, 0.0])),
            Err(Error::SingularSystem)
        );
    }

    #[test]
    fn epd_reference_closed_forms() {
        let a = CMat::from_element(1, 1, re(4.0));
        let one = CVec::from_element(1, re(1.0));
        for t in [0.5f64, 1.0, 2.0] {
            let d3 = epd_reference(&a, &one, t, 3).unwrap()[0].re;
            assert!((d3 - (2.0 * t).sin() / (2.0 * t)).abs() < 1e-12);
        }
        // J₀(2) from mpmath.
        let d2 = epd_reference(&a, &one, 1.0, 2).unwrap()[0].re;
        assert!((d2 - 0.223_890_779_141_235_67).abs() < 1e-12);
        assert!(matches!(
            epd_reference(&a, &one, 1.0, 1),
            Err(Error::UnsupportedDimension(1))
        ));
    }
}
