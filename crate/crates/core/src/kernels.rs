// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

//! Kernel family: the Gaussian `κ_T`, its moment kernels, and the three
//! comparison kernels of the LCHS / Schrödingerization literature.
//!
//! All kernels are evaluated to machine precision. Controlled relative noise
//! can be layered on top with [`KernelNoise`] when exercising error bounds.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::integrate;
use crate::linalg::{re, C64};
use crate::special::{erfc, exp_neg_sq};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    KannaiGaussian,
    LambdaFirstMoment,
    LambdaZerothMoment,
    OptSchrodingerization,
    ImprovedLCHS,
    OptLCHS,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::KannaiGaussian => "kannai",
            KernelKind::LambdaFirstMoment => "lambda_first",
            KernelKind::LambdaZerothMoment => "lambda_zeroth",
            KernelKind::OptSchrodingerization => "opt_schro",
            KernelKind::ImprovedLCHS => "improved_lchs",
            KernelKind::OptLCHS => "opt_lchs",
        }
    }

    /// The three competitors in the truncation comparison.
    pub const COMPETITORS: [KernelKind; 3] = [
        KernelKind::OptLCHS,
        KernelKind::ImprovedLCHS,
        KernelKind::OptSchrodingerization,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub t: f64,
    pub eps_param: Option<f64>,
    pub beta: Option<f64>,
    pub delta_off: f64,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, t: f64) -> Self {
        Self {
            kind,
            t,
            eps_param: None,
            beta: None,
            delta_off: 0.0,
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps_param = Some(eps);
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    fn log_inv_eps(&self) -> Result<f64> {
        let eps = self.eps_param.ok_or(Error::MissingParameter("eps_param"))?;
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidPrecision(eps));
        }
        Ok(-eps.ln())
    }

    fn beta(&self) -> Result<f64> {
        let beta = self.beta.ok_or(Error::MissingParameter("beta"))?;
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "beta must lie in (0, 1), got {beta}"
            )));
        }
        Ok(beta)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTime(t))
    }
}

/// Heat kernel `κ_T(s) = (4πT)^{−1/2} e^{−s²/(4T)}`.
pub fn kappa(t: f64, s: f64) -> Result<f64> {
    check_time(t)?;
    Ok(exp_neg_sq(s / (2.0 * t.sqrt())) / (4.0 * PI * t).sqrt())
}

/// Gaussian tail `Φ_T(a) = ∫_a^∞ κ_T = ½ erfc(a / (2√T))`.
pub fn gaussian_tail(t: f64, a: f64) -> Result<f64> {
    check_time(t)?;
    Ok(0.5 * erfc(a / (2.0 * t.sqrt())))
}

/// First-moment kernel `Λ_T(σ) = √(T/π) e^{−σ²/(4T)} − |σ| Φ_T(|σ|)`.
///
/// It is even in `σ`, which is what makes `∫Λ_T(σ) e^{−iλσ} dσ` equal to
/// `(1 − e^{−λ²T})/λ²`, the symbol of `φ_T(H²)`.
pub fn lambda_first_moment(t: f64, sigma: f64) -> Result<f64> {
    check_time(t)?;
    let a = sigma.abs();
    let x = a / (2.0 * t.sqrt());
    Ok((t / PI).sqrt() * exp_neg_sq(x) - a * 0.5 * erfc(x))
}

/// Zeroth-moment kernel: `Φ_T(σ)` for `σ ≥ 0` and `−Φ_T(−σ)` for `σ < 0`.
/// `σ = 0` takes the positive branch.
pub fn lambda_zeroth_moment(t: f64, sigma: f64) -> Result<f64> {
    check_time(t)?;
    let x = sigma.abs() / (2.0 * t.sqrt());
    let v = 0.5 * erfc(x);
    Ok(if sigma < 0.0 { -v } else { v })
}

/// `R = 2√T √(log(8/ε))`.
///
/// Any `ε ∈ (0, 8)` yields a positive radius, so the range is not clipped
/// at 1.
pub fn truncation_radius(t: f64, eps: f64) -> Result<f64> {
    check_time(t)?;
    if !(eps > 0.0 && eps < 8.0) {
        return Err(Error::InvalidPrecision(eps));
    }
    Ok(2.0 * t.sqrt() * (8.0 / eps).ln().sqrt())
}

/// Complex kernel value `K(s)` for any kind.
pub fn comparison_kernel(spec: &KernelSpec, s: f64) -> Result<C64> {
    let t = spec.t;
    check_time(t)?;
    let k = s / t;
    match spec.kind {
        KernelKind::KannaiGaussian => kappa(t, s).map(re),
        KernelKind::LambdaFirstMoment => lambda_first_moment(t, s).map(re),
        KernelKind::LambdaZerothMoment => lambda_zeroth_moment(t, s).map(re),
        KernelKind::OptLCHS => {
            let l = spec.log_inv_eps()?;
            let num = (-(k * k + 1.0) / (4.0 * l)).exp();
            Ok(re(num) / (C64::new(t, -s) * (2.0 * PI)))
        }
        KernelKind::ImprovedLCHS => {
            let beta = spec.beta()?;
            let z = C64::new(1.0, k).powf(beta);
            let num = (re(2f64.powf(beta)) - z).exp();
            Ok(num / (C64::new(t, -s) * (2.0 * PI)))
        }
        KernelKind::OptSchrodingerization => {
            let l = spec.log_inv_eps()?;
            let w = C64::new(1.0, k);
            let num = (w * w / (16.0 * l)).exp();
            Ok(num / (C64::new(t, s) * (2.0 * PI)))
        }
    }
}

/// `|K(s)|` in a cancellation-free real form.
pub fn kernel_magnitude(spec: &KernelSpec, s: f64) -> Result<f64> {
    let t = spec.t;
    check_time(t)?;
    let k = s / t;
    let denom = 2.0 * PI * t.hypot(s);
    Ok(match spec.kind {
        KernelKind::KannaiGaussian => kappa(t, s)?,
        KernelKind::LambdaFirstMoment => lambda_first_moment(t, s)?.abs(),
        KernelKind::LambdaZerothMoment => lambda_zeroth_moment(t, s)?.abs(),
        KernelKind::OptLCHS => (-(k * k + 1.0) / (4.0 * spec.log_inv_eps()?)).exp() / denom,
        KernelKind::ImprovedLCHS => {
            let beta = spec.beta()?;
            let modulus = (1.0 + k * k).powf(beta / 2.0);
            let arg = beta * k.atan();
            (2f64.powf(beta) - modulus * arg.cos()).exp() / denom
        }
        KernelKind::OptSchrodingerization => {
            ((1.0 - k * k) / (16.0 * spec.log_inv_eps()?)).exp() / denom
        }
    })
}

/// Two-sided tail `ε(R) = 2 ∫_R^∞ |K(s)| ds` (one-sided integral doubled,
/// as all magnitudes are even in `s`).
pub fn tail_mass(spec: &KernelSpec, r: f64) -> Result<f64> {
    check_time(spec.t)?;
    if r < 0.0 || !r.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "radius must be nonnegative, got {r}"
        )));
    }
    if spec.kind == KernelKind::KannaiGaussian {
        return Ok(erfc(r / (2.0 * spec.t.sqrt())));
    }
    // Validate parameters once so the integrand cannot fail.
    kernel_magnitude(spec, r)?;
    let f = |s: f64| kernel_magnitude(spec, s).unwrap_or(f64::NAN);
    let one_sided = integrate::to_infinity(f, r, 1e-13, 1e-12)?;
    if !one_sided.is_finite() {
        return Err(Error::QuadratureFailure("non-finite tail integral".into()));
    }
    Ok(2.0 * one_sided)
}

/// Tail curve `(R, ε(R))` on an increasing nonnegative grid.
pub fn truncation_error_curve(spec: &KernelSpec, r_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "R grid must be strictly increasing".into(),
        ));
    }
    r_grid
        .iter()
        .map(|&r| Ok((r, tail_mass(spec, r)?)))
        .collect()
}

/// Smallest `R` with `ε(R) ≤ target`, located by bisection to `1e-6`
/// relative width.
pub fn min_truncation_radius(spec: &KernelSpec, target: f64) -> Result<f64> {
    if !(target > 0.0) {
        return Err(Error::InvalidPrecision(target));
    }
    if tail_mass(spec, 0.0)? <= target {
        return Ok(0.0);
    }
    let mut hi = spec.t.sqrt().max(spec.t);
    let mut lo = 0.0;
    let mut guard = 0;
    while tail_mass(spec, hi)? > target {
        lo = hi;
        hi *= 2.0;
        guard += 1;
        if guard > 60 {
            return Err(Error::QuadratureFailure(
                "tail never drops below target".into(),
            ));
        }
    }
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if tail_mass(spec, mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Reproducible relative perturbation `v ↦ v(1 + δ u)` with `u ∈ [−1, 1]`,
/// one independent stream per node index.
#[derive(Debug, Clone, Copy)]
pub struct KernelNoise {
    pub delta_off: f64,
    pub seed: u64,
}

impl KernelNoise {
    pub fn new(delta_off: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&delta_off) {
            return Err(Error::InvalidPerturbation(delta_off));
        }
        Ok(Self { delta_off, seed })
    }

    /// Perturbs `value` at node `index`; `channel` separates the κ and Λ draws.
    pub fn apply(&self, value: f64, index: usize, channel: u64) -> f64 {
        if self.delta_off == 0.0 {
            return value;
        }
        let mut rng =
            ChaCha8Rng::seed_from_u64(self.seed ^ channel.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        rng.set_stream(index as u64);
        let u: f64 = rng.random_range(-1.0..=1.0);
        value * (1.0 + self.delta_off * u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_values() {
        assert!((kappa(1.0, 0.0).unwrap() - 0.282_094_791_773_878_1).abs() < 1e-16);
        assert!((kappa(1.0, 2.0).unwrap() - 0.103_776_874_355_148_7).abs() < 1e-15);
        assert!((kappa(0.25, 0.0).unwrap() - 0.564_189_583_547_756_3).abs() < 1e-15);
        assert_eq!(kappa(0.0, 1.0), Err(Error::InvalidTime(0.0)));
    }

    #[test]
    fn tail_values() {
        assert_eq!(gaussian_tail(1.0, 0.0).unwrap(), 0.5);
        assert!((gaussian_tail(1.0, 2.0).unwrap() - 0.078_649_603_525_142_7).abs() < 1e-15);
        assert!((gaussian_tail(1.0, -80.0).unwrap() - 1.0).abs() < 1e-16);
    }

    #[test]
    fn first_moment_values_and_parity() {
        let at0 = lambda_first_moment(1.0, 0.0).unwrap();
        assert!((at0 - (1.0 / PI).sqrt()).abs() < 1e-15);
        let at2 = lambda_first_moment(1.0, 2.0).unwrap();
        assert!((at2 - 0.050_254_541_660_012_22).abs() < 1e-15);
        assert_eq!(lambda_first_moment(1.0, -2.0).unwrap(), at2);
    }

    #[test]
    fn zeroth_moment_values() {
        assert!((lambda_zeroth_moment(1.0, 2.0).unwrap() - 0.078_649_603_525_142_7).abs() < 1e-15);
        assert_eq!(lambda_zeroth_moment(1.0, 0.0).unwrap(), 0.5);
        assert!((lambda_zeroth_moment(1.0, -2.0).unwrap() + 0.078_649_603_525_142_7).abs() < 1e-15);
    }

    #[test]
    fn radius_values() {
        assert!((truncation_radius(1.0, 1e-6).unwrap() - 7.973_7).abs() < 1e-4);
        assert!((truncation_radius(4.0, 1e-6).unwrap() - 15.947_4).abs() < 1e-4);
        assert!((truncation_radius(1.0, 8.0 / std::f64::consts::E).unwrap() - 2.0).abs() < 1e-14);
        assert!(truncation_radius(1.0, 0.0).is_err());
    }

    #[test]
    fn comparison_kernel_values() {
        let opt = KernelSpec::new(KernelKind::OptLCHS, 1.0).with_eps(1e-6);
        assert!((comparison_kernel(&opt, 0.0).unwrap().re - 0.1563).abs() < 1e-4);
        let kan = KernelSpec::new(KernelKind::KannaiGaussian, 1.0);
        assert!((comparison_kernel(&kan, 0.0).unwrap().re - 0.2820948).abs() < 1e-7);
        let imp = KernelSpec::new(KernelKind::ImprovedLCHS, 1.0).with_beta(0.5);
        assert!((comparison_kernel(&imp, 0.0).unwrap().re - 0.2409).abs() < 1e-4);
        let missing = KernelSpec::new(KernelKind::ImprovedLCHS, 1.0);
        assert_eq!(
            comparison_kernel(&missing, 0.0),
            Err(Error::MissingParameter("beta"))
        );
    }

    #[test]
    fn magnitudes_match_complex_values() {
        let specs = [
            KernelSpec::new(KernelKind::OptLCHS, 1.3).with_eps(1e-4),
            KernelSpec::new(KernelKind::ImprovedLCHS, 0.7).with_beta(0.4),
            KernelSpec::new(KernelKind::OptSchrodingerization, 2.0).with_eps(1e-3),
        ];
        for spec in specs {
            for s in [-5.0, -0.3, 0.0, 1.1, 9.0] {
                let z = comparison_kernel(&spec, s).unwrap().norm();
                let m = kernel_magnitude(&spec, s).unwrap();
                assert!(((z - m) / m).abs() < 1e-12, "{:?} at {s}", spec.kind);
            }
        }
    }

    #[test]
    fn kannai_tail_curve() {
        let spec = KernelSpec::new(KernelKind::KannaiGaussian, 1.0);
        let c = truncation_error_curve(&spec, &[0.0, 4.0]).unwrap();
        assert_eq!(c[0].1, 1.0);
        assert!((c[1].1 - 0.004_677_734_981_047_266).abs() < 1e-15);
        let opt = KernelSpec::new(KernelKind::OptLCHS, 1.0).with_eps(1e-6);
        assert!(tail_mass(&opt, 4.0).unwrap() > c[1].1);
    }

    #[test]
    fn noise_is_bounded_and_reproducible() {
        let n = KernelNoise::new(1e-3, 7).unwrap();
        for i in 0..50 {
            let v = n.apply(2.0, i, 0);
            assert!((v - 2.0).abs() <= 2e-3);
            assert_eq!(v, n.apply(2.0, i, 0));
        }
        assert_eq!(KernelNoise::new(0.0, 1).unwrap().apply(3.0, 5, 1), 3.0);
    }
}
