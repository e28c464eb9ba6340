// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

//! Beyond `A = L†L`: general dissipative generators by Cartesian splitting,
//! long-time steady states and the linear solver built on them, the
//! Euler–Poisson–Darboux transmutation, transport–heat averaging and the
//! Hopf–Cole recovery for the viscous Hamilton–Jacobi surrogate.

use std::f64::consts::PI;

use crate::dilation::{hermitian_dilation, DilationHamiltonian};
use crate::error::{Error, Result};
use crate::linalg::{
    cholesky_factor, cholesky_solve, expm, psd_sqrt, re, rel_error, spectral_norm, CMat, CVec,
    HermitianEigen, C64, I,
};
use crate::operators::{fft_frequency, unitary_dft, DiscreteFactor, ForcingVector, TimeProfile};
use crate::pipeline::{run, transforms, QueryCount, Rule, SimulationProblem, SimulationReport};
use crate::propagator::evolve;
use crate::quadrature::{coefficients, gauss_legendre_reference, select_parameters};
use crate::special::half_gamma_ratio;

/// `A = H₁ + iH₂` with a factor `L_fac†L_fac = H₁`.
#[derive(Debug, Clone)]
pub struct CartesianPair {
    pub h1: CMat,
    pub h2: CMat,
    pub l_fac: DiscreteFactor,
    /// `‖[H₂,[H₂,H₁]]‖ + ‖[H₁,[H₁,H₂]]‖`.
    pub lambda: f64,
    pub normal: bool,
    /// `‖[H₁,H₂]‖`.
    pub commutator: f64,
}

impl CartesianPair {
    pub fn generator(&self) -> CMat {
        &self.h1 + &self.h2 * I
    }
}

fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn cartesian_split(a: &CMat) -> Result<CartesianPair> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::ShapeError {
            expected: a.nrows().max(1),
            got: a.ncols(),
        });
    }
    let h1 = (a + a.adjoint()) * re(0.5);
    let h2 = (a - a.adjoint()) * C64::new(0.0, -0.5);
    let scale = spectral_norm(a);
    let eig1 = HermitianEigen::new(&h1)?;
    if eig1.dim() > 0 && eig1.min() < -1e-10 * scale {
        return Err(Error::NotDissipative(eig1.min()));
    }
    let l = if eig1.min() > 1e-12 * eig1.max_abs() {
        cholesky_factor(&h1).map(|g| g.adjoint())
    } else {
        None
    };
    let l = match l {
        Some(l) => l,
        None => psd_sqrt(&h1)?,
    };
    let l_fac = DiscreteFactor::custom(l)?;
    let c12 = commutator(&h1, &h2);
    let comm = spectral_norm(&c12);
    let lambda = spectral_norm(&commutator(&h2, &commutator(&h2, &h1)))
        + spectral_norm(&commutator(&h1, &c12));
    let normal = comm <= 1e-10 * spectral_norm(&h1) * spectral_norm(&h2) || comm == 0.0;
    Ok(CartesianPair {
        h1,
        h2,
        l_fac,
        lambda,
        normal,
        commutator: comm,
    })
}

/// `e^{−iH₂T}` applied exactly.
fn unitary_part(h2: &CMat, t: f64, v: &CVec) -> Result<CVec> {
    let eig = HermitianEigen::new(h2)?;
    Ok(eig.apply_fn(v, |lam| C64::from_polar(1.0, -lam * t)))
}

/// `e^{−AT}u₀` for normal `A`: the exact unitary factor followed by the
/// Kannai pipeline on `H₁`.
pub fn simulate_normal(pair: &CartesianPair, u0: &CVec, t: f64, eps: f64) -> Result<CVec> {
    if !pair.normal {
        return Err(Error::NotNormal(pair.commutator));
    }
    let v = unitary_part(&pair.h2, t, u0)?;
    if v.norm() == 0.0 {
        return Ok(v);
    }
    let problem = SimulationProblem::homogeneous(&pair.l_fac, v, t, eps)?;
    Ok(run(&problem, Rule::TheoremGL)?.u_h)
}

/// The LCU realization of `e^{−L†Lτ}` as a fixed spectral multiplier.
#[derive(Debug, Clone)]
pub struct KannaiStep {
    dilation: DilationHamiltonian,
    multipliers: Vec<C64>,
}

impl KannaiStep {
    pub fn new(factor: &DiscreteFactor, tau: f64, eps: f64) -> Result<Self> {
        let dilation = hermitian_dilation(factor)?;
        let plan = select_parameters(tau, dilation.norm(), eps)?.plan()?;
        let coeffs = coefficients(&plan, tau, TimeProfile::LinearInS, None)?;
        let lam: Vec<f64> = dilation.spectrum().values().iter().copied().collect();
        let multipliers = transforms(&lam, &plan.nodes, &coeffs.c);
        Ok(Self {
            dilation,
            multipliers,
        })
    }

    /// `Π₁ Σ_j c_j U(s_j) (v, 0)`.
    pub fn apply(&self, v: &CVec) -> Result<CVec> {
        let cols = self.dilation.primary_dim();
        if v.len() != cols {
            return Err(Error::ShapeError {
                expected: cols,
                got: v.len(),
            });
        }
        let mut psi = CVec::zeros(self.dilation.dim());
        psi.rows_mut(0, cols).copy_from(v);
        let spec = self.dilation.spectrum();
        let mut c = spec.to_eigenbasis(&psi);
        for (ci, m) in c.iter_mut().zip(&self.multipliers) {
            *ci *= m;
        }
        Ok(spec.from_eigenbasis(&c).rows(0, cols).into_owned())
    }
}

#[derive(Debug, Clone)]
pub struct StrangResult {
    /// Normalized output state.
    pub state: CVec,
    /// Normalized `e^{−AT}u₀`.
    pub oracle: CVec,
    /// Distance between the two normalized states.
    pub error: f64,
    /// Same distance for the Strang product with exact sub-steps.
    pub splitting_error: f64,
    pub tau: f64,
}

fn normalized(v: CVec) -> Result<CVec> {
    let n = v.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::DegenerateOutput);
    }
    Ok(v / re(n))
}

/// `(e^{−iH₂τ/2} e^{−H₁τ} e^{−iH₂τ/2})^{N_t}` with the dissipative factor
/// realized by the LCU sum and the success branch renormalized every step.
pub fn strang_simulate(
    pair: &CartesianPair,
    u0: &CVec,
    t: f64,
    n_t: usize,
    eps_step: f64,
) -> Result<StrangResult> {
    if n_t == 0 {
        return Err(Error::InvalidArgument(
            "Strang splitting needs at least one step".into(),
        ));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidTime(t));
    }
    let n = pair.h1.nrows();
    if u0.len() != n {
        return Err(Error::ShapeError {
            expected: n,
            got: u0.len(),
        });
    }
    let tau = t / n_t as f64;
    let half =
        HermitianEigen::new(&pair.h2)?.matrix_fn(|lam| C64::from_polar(1.0, -lam * tau / 2.0));
    let step = KannaiStep::new(&pair.l_fac, tau, eps_step)?;
    let heat = expm(&(&pair.h1 * re(-tau)));

    let mut v = normalized(u0.clone())?;
    let mut exact = v.clone();
    for _ in 0..n_t {
        v = normalized(&half * step.apply(&(&half * &v))?)?;
        exact = &half * (&heat * (&half * &exact));
    }
    let oracle = normalized(expm(&(pair.generator() * re(-t))) * u0)?;
    let exact = normalized(exact)?;
    Ok(StrangResult {
        error: (&v - &oracle).norm(),
        splitting_error: (&exact - &oracle).norm(),
        state: v,
        oracle,
        tau,
    })
}

#[derive(Debug, Clone)]
pub struct SteadyResult {
    pub x: CVec,
    pub t_tilde: f64,
    pub gap: f64,
    pub c: f64,
    pub report: SimulationReport,
}

/// Smallest eigenvalue of `L†L`, rejected when not clearly positive.
fn spectral_gap(factor: &DiscreteFactor) -> Result<(f64, f64)> {
    let eig = HermitianEigen::new(&factor.generator())?;
    let (lo, hi) = (eig.min(), eig.max());
    if !(lo > 1e-12 * hi.max(f64::MIN_POSITIVE)) {
        return Err(Error::NoSpectralGap(lo));
    }
    Ok((lo, hi))
}

/// Fraction of `ε` handed to the pipeline; the rest covers the semigroup tail.
pub const STEADY_PIPELINE_SHARE: f64 = 0.125;

/// Steady state `A⁻¹f` by running the forced dynamics from rest up to
/// `T̃ = λ₀⁻¹ log(C/ε)`. `C` defaults to `max(‖A⁻¹f‖, 1)`, which bounds the
/// relative semigroup tail by `ε`; the pipeline runs at a fraction of `ε`.
pub fn longtime_steady(
    factor: &DiscreteFactor,
    f: &CVec,
    eps: f64,
    c: Option<f64>,
) -> Result<SteadyResult> {
    let (gap, _) = spectral_gap(factor)?;
    let c = match c {
        Some(c) => c,
        None => cholesky_solve(&factor.generator(), f)?.norm().max(1.0),
    };
    if f.norm() == 0.0 {
        return Err(Error::DegenerateOutput);
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "constant C must be positive, got {c}"
        )));
    }
    let t_tilde = (c / eps).ln().max(0.0) / gap;
    let t_tilde = if t_tilde > 0.0 { t_tilde } else { 1.0 / gap };
    let u0 = CVec::zeros(factor.cols());
    let problem = SimulationProblem::new(
        factor,
        u0,
        ForcingVector::interior(f.clone()),
        t_tilde,
        eps * STEADY_PIPELINE_SHARE,
    )?;
    let report = run(&problem, Rule::TheoremGL)?;
    Ok(SteadyResult {
        x: report.u_h.clone(),
        t_tilde,
        gap,
        c,
        report,
    })
}

/// Constant in `T̃ = κ log(C/ε)` for the normalized linear solve: half of the
/// budget goes to the semigroup tail, half to the discretization.
pub const LINEAR_SOLVE_C: f64 = 2.0;

#[derive(Debug, Clone)]
pub struct LinearSolveResult {
    pub x_out: CVec,
    pub x_ref: CVec,
    pub rel_error: f64,
    pub kappa: f64,
    pub t_tilde: f64,
    /// Normalization `α = ‖L‖²`.
    pub alpha: f64,
    pub queries: QueryCount,
}

/// Solves `L†L x = b` via the steady state of `(1/α)A` with `α = ‖L‖²`.
pub fn linear_solve_kannai(
    factor: &DiscreteFactor,
    b: &CVec,
    eps: f64,
) -> Result<LinearSolveResult> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidPrecision(eps));
    }
    let a = factor.generator();
    let x_ref = cholesky_solve(&a, b)?;
    let (lo, hi) = spectral_gap(factor).map_err(|_| Error::SingularSystem)?;
    let kappa = hi / lo;
    let norm_l = factor.spectral_norm();
    let alpha = norm_l * norm_l;
    let scaled = DiscreteFactor::custom(factor.matrix() / re(norm_l))?;
    let t_tilde = kappa * (LINEAR_SOLVE_C / eps).ln();
    let u0 = CVec::zeros(factor.cols());
    let forcing = ForcingVector::interior(b / re(alpha));
    let problem = SimulationProblem::new(&scaled, u0, forcing, t_tilde, eps / LINEAR_SOLVE_C)?;
    let report = run(&problem, Rule::TheoremGL)?;
    Ok(LinearSolveResult {
        rel_error: rel_error(&report.u_h, &x_ref),
        x_out: report.u_h,
        x_ref,
        kappa,
        t_tilde,
        alpha,
        queries: report.queries,
    })
}

/// Gauss–Chebyshev nodes `cos((2k−1)π/(2n))`; each weight is `π/n`.
fn chebyshev_nodes(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| ((2 * k - 1) as f64 * PI / (2 * n) as f64).cos())
        .collect()
}

/// Euler–Poisson–Darboux solution
/// `u(t) = c_d ∫_{−1}^{1} w(λt)(1−λ²)^{(d−3)/2} dλ` with `w(s) = cos(s√A)u₀`
/// taken from the wave evolution and `c_d = Γ(d/2)/(√π Γ((d−1)/2))`.
pub fn epd_solve(factor: &DiscreteFactor, u0: &CVec, t: f64, d: usize) -> Result<CVec> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidTime(t));
    }
    if u0.len() != factor.cols() {
        return Err(Error::ShapeError {
            expected: factor.cols(),
            got: u0.len(),
        });
    }
    let h = hermitian_dilation(factor)?;
    let mut psi = CVec::zeros(h.dim());
    psi.rows_mut(0, u0.len()).copy_from(u0);
    let wave =
        |s: f64| -> Result<CVec> { Ok(evolve(&h, s, &psi)?.vector.rows(0, u0.len()).into_owned()) };
    let c_d = half_gamma_ratio(d) / PI.sqrt();
    let phase = h.norm() * t;
    let mut acc = CVec::zeros(u0.len());

    if d.is_multiple_of(2) {
        // Chebyshev weight (1−λ²)^{−1/2} absorbs the singular factor.
        let n = (phase.ceil() as usize + 48).max(64);
        let w = PI / n as f64;
        for x in chebyshev_nodes(n) {
            let poly = (1.0 - x * x).powi(((d - 2) / 2) as i32);
            acc += wave(x * t)? * re(w * poly);
        }
    } else {
        let q = 24;
        let panels = ((phase / 10.0).ceil() as usize).max(2);
        let (xs, ws) = gauss_legendre_reference(q)?;
        let width = 2.0 / panels as f64;
        for p in 0..panels {
            let mid = -1.0 + (p as f64 + 0.5) * width;
            for (x, w) in xs.iter().zip(&ws) {
                let lam = mid + 0.5 * width * x;
                let poly = (1.0 - lam * lam).powi(((d - 3) / 2) as i32);
                acc += wave(lam * t)? * re(0.5 * width * w * poly);
            }
        }
    }
    Ok(acc * re(c_d))
}

/// Physicists' Gauss–Hermite rule (weight `e^{−x²}`) by Newton iteration on
/// the orthonormal three-term recurrence.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || n > 200 {
        return Err(Error::InvalidArgument(format!(
            "Gauss–Hermite order must be in 1..=200, got {n}"
        )));
    }
    let pim4 = PI.powf(-0.25);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut z = 0.0;
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut converged = false;
        let mut pp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (pim4, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::RootFindingFailure { q: n });
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    Ok((x, w))
}

/// Frequencies below this multiple of `√(2n)` are averaged to roundoff by
/// an `n`-point Hermite rule.
const HERMITE_RESOLUTION: f64 = 0.7;

/// `E[e^{−2πi k·α√(2T)}]` over a standard Gaussian `α`, one Hermite rule per
/// axis. High frequencies are split into `m` sub-averages of horizon `T/m`
/// using the semigroup property, so the node count per axis stays fixed.
pub fn transport_multiplier(k: &[i64], t: f64, nodes: usize) -> Result<C64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidTime(t));
    }
    let (x, w) = gauss_hermite(nodes)?;
    let omega: Vec<f64> = k
        .iter()
        .map(|&ki| 2.0 * PI * ki as f64 * (2.0 * t).sqrt())
        .collect();
    let limit = HERMITE_RESOLUTION * (2.0 * nodes as f64).sqrt();
    let peak = omega.iter().fold(0.0f64, |m, o| m.max(o.abs()));
    let m = ((peak / limit).powi(2).ceil() as i32).max(1);
    let scale = (m as f64).sqrt();
    let norm = PI.sqrt();
    let mut out = C64::new(1.0, 0.0);
    for &o in &omega {
        let avg: C64 = x
            .iter()
            .zip(&w)
            .map(|(xi, wi)| C64::from_polar(wi / norm, -o / scale * 2f64.sqrt() * xi))
            .sum();
        out *= avg.powi(m);
    }
    Ok(out)
}

/// Multi-index of grid entry `idx` on `n^d` modes in FFT order, axis 1 slowest.
pub fn multi_index(mut idx: usize, n: usize, d: usize) -> Vec<i64> {
    let mut k = vec![0; d];
    for a in (0..d).rev() {
        k[a] = fft_frequency(idx % n, n);
        idx /= n;
    }
    k
}

/// Applies the transport–heat average to Fourier coefficients on an `n^d`
/// periodic grid.
pub fn transport_heat_average(
    y0_hat: &CVec,
    n: usize,
    d: usize,
    t: f64,
    nodes: usize,
) -> Result<CVec> {
    let total = n.checked_pow(d as u32).ok_or(Error::SizeLimit {
        dim: usize::MAX,
        cap: crate::operators::size_cap(),
    })?;
    if y0_hat.len() != total {
        return Err(Error::ShapeError {
            expected: total,
            got: y0_hat.len(),
        });
    }
    let mut out = y0_hat.clone();
    for (i, v) in out.iter_mut().enumerate() {
        *v *= transport_multiplier(&multi_index(i, n, d), t, nodes)?;
    }
    Ok(out)
}

/// `S = −2ν log u` entrywise.
pub fn hopf_cole_recover(u: &[f64], nu: f64) -> Result<Vec<f64>> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "viscosity must be positive, got {nu}"
        )));
    }
    u.iter()
        .enumerate()
        .map(|(index, &value)| {
            if value > 0.0 && value.is_finite() {
                Ok(-2.0 * nu * value.ln())
            } else {
                Err(Error::LogDomainError { index, value })
            }
        })
        .collect()
}

/// `ũ(x) = u(x + shift)` on an `n^d` periodic grid via the Fourier phase
/// `e^{2πik·shift}`.
pub fn periodic_translate(u: &CVec, n: usize, d: usize, shift: &[f64]) -> Result<CVec> {
    if shift.len() != d {
        return Err(Error::ShapeError {
            expected: d,
            got: shift.len(),
        });
    }
    let f = unitary_dft(n, d)?;
    if u.len() != f.nrows() {
        return Err(Error::ShapeError {
            expected: f.nrows(),
            got: u.len(),
        });
    }
    let mut coeffs = &f * u;
    for (i, c) in coeffs.iter_mut().enumerate() {
        let k = multi_index(i, n, d);
        let phase: f64 = k
            .iter()
            .zip(shift)
            .map(|(&ki, s)| 2.0 * PI * ki as f64 * s)
            .sum();
        *c *= C64::from_polar(1.0, phase);
    }
    Ok(f.ad_mul(&coeffs))
}

/// Drift removal followed by the Hopf–Cole inverse. The translated field
/// must be real up to roundoff.
pub fn hopf_cole_recover_shifted(
    u: &CVec,
    n: usize,
    d: usize,
    shift: &[f64],
    nu: f64,
) -> Result<Vec<f64>> {
    let shifted = periodic_translate(u, n, d, shift)?;
    let scale = shifted.camax().max(f64::MIN_POSITIVE);
    let mut real = Vec::with_capacity(shifted.len());
    for (index, z) in shifted.iter().enumerate() {
        if z.im.abs() > 1e-10 * scale {
            return Err(Error::LogDomainError { index, value: z.im });
        }
        real.push(z.re);
    }
    hopf_cole_recover(&real, nu)
}
