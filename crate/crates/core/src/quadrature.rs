// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

//! Node sets on `[−R, R]` and the LCU coefficient tables built on them.

use std::f64::consts::{E, PI};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::kernels::{
    kappa, lambda_first_moment, lambda_zeroth_moment, truncation_radius, KernelNoise,
};
use crate::linalg::{re, C64};
use crate::operators::TimeProfile;

/// Highest supported Gauss order.
pub const MAX_GAUSS_ORDER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    GaussLegendre,
    Trapezoid { panels: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraturePlan {
    pub r: f64,
    pub h1: f64,
    pub q: usize,
    pub rule: QuadratureRule,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Set when `h1` was shrunk to make `R/h1` an integer.
    pub h1_adjusted: bool,
}

impl QuadraturePlan {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn s_max(&self) -> f64 {
        self.nodes.iter().map(|s| s.abs()).fold(0.0, f64::max)
    }
}

/// Gauss–Legendre nodes (ascending) and weights on `[−1, 1]`.
pub fn gauss_legendre_reference(q: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if q == 0 || q > MAX_GAUSS_ORDER {
        return Err(Error::InvalidArgument(format!(
            "Gauss order must lie in 1..={MAX_GAUSS_ORDER}, got {q}"
        )));
    }
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    let qf = q as f64;
    for i in 0..q.div_ceil(2) {
        // Tricomi initial guess for the i-th largest root.
        let mut x = (PI * (i as f64 + 0.75) / (qf + 0.5)).cos();
        let mut converged = false;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(q, x);
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-14 {
                // One polishing step past the tolerance.
                let (p, d) = legendre_with_derivative(q, x);
                x -= p / d;
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::RootFindingFailure { q });
        }
        let dp = legendre_with_derivative(q, x).1;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[q - 1 - i] = x;
        nodes[i] = -x;
        weights[q - 1 - i] = w;
        weights[i] = w;
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// `(P_q(x), P_q'(x))` by the three-term recurrence.
fn legendre_with_derivative(q: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=q {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if q == 0 { 1.0 } else { p1 };
    let d = q as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Composite Gauss–Legendre rule with panels `[m h1, (m+1) h1]`,
/// `m = −M_R … M_R − 1`. `h1` is shrunk to `R / ⌈R/h1⌉` when needed.
pub fn build_panel_grid(r: f64, h1: f64, q: usize) -> Result<QuadraturePlan> {
    if !(r > 0.0 && r.is_finite() && h1 > 0.0 && h1 <= r * (1.0 + 1e-12)) {
        return Err(Error::InvalidPanel { h1, r });
    }
    let ratio = r / h1;
    let rounded = ratio.round();
    let (m_r, adjusted) = if (ratio - rounded).abs() <= 1e-12 * ratio {
        (rounded as usize, false)
    } else {
        (ratio.ceil() as usize, true)
    };
    let m_r = m_r.max(1);
    let h = r / m_r as f64;
    let (x, w) = gauss_legendre_reference(q)?;
    let mut nodes = Vec::with_capacity(2 * m_r * q);
    let mut weights = Vec::with_capacity(2 * m_r * q);
    for m in -(m_r as i64)..(m_r as i64) {
        let center = (2 * m + 1) as f64 * h / 2.0;
        for (xq, wq) in x.iter().zip(&w) {
            nodes.push(h / 2.0 * xq + center);
            weights.push(h / 2.0 * wq);
        }
    }
    Ok(QuadraturePlan {
        r,
        h1: h,
        q,
        rule: QuadratureRule::GaussLegendre,
        nodes,
        weights,
        h1_adjusted: adjusted,
    })
}

/// Parameters from the fully discrete error theorem; `h1` is returned
/// before the integer-panel rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremParameters {
    pub r: f64,
    pub h1: f64,
    pub q: usize,
    pub delta_off: f64,
}

/// `R = 2√T√log(8/ε)`, `Q = ⌈log₂(8R/(ε√T))⌉`,
/// `h₁ = √T / (e(‖H‖ + 1/√(2T)))`, `δ_off = ε/4`.
pub fn select_parameters(t: f64, norm_h: f64, eps: f64) -> Result<TheoremParameters> {
    let r = truncation_radius(t, eps)?;
    if !(norm_h >= 0.0 && norm_h.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "invalid operator norm {norm_h}"
        )));
    }
    let sqrt_t = t.sqrt();
    let q = (8.0 * r / (eps * sqrt_t)).log2().ceil().max(1.0) as usize;
    if q > MAX_GAUSS_ORDER {
        return Err(Error::InvalidPrecision(eps));
    }
    let h1 = sqrt_t / (E * (norm_h + 1.0 / (2.0 * t).sqrt()));
    Ok(TheoremParameters {
        r,
        h1,
        q,
        delta_off: eps / 4.0,
    })
}

impl TheoremParameters {
    /// Panel grid for these parameters (`h1` capped at `R`).
    pub fn plan(&self) -> Result<QuadraturePlan> {
        build_panel_grid(self.r, self.h1.min(self.r), self.q)
    }
}

/// Trapezoid rule with `M` uniform panels on `[−R, R]`.
pub fn build_trapezoid_grid(r: f64, panels: usize) -> Result<QuadraturePlan> {
    if !(r > 0.0 && r.is_finite()) || panels == 0 {
        return Err(Error::InvalidPanel {
            h1: if panels == 0 {
                f64::INFINITY
            } else {
                2.0 * r / panels as f64
            },
            r,
        });
    }
    let ds = 2.0 * r / panels as f64;
    let nodes: Vec<f64> = (0..=panels).map(|m| -r + m as f64 * ds).collect();
    let mut weights = vec![ds; panels + 1];
    weights[0] = ds / 2.0;
    weights[panels] = ds / 2.0;
    Ok(QuadraturePlan {
        r,
        h1: ds,
        q: 1,
        rule: QuadratureRule::Trapezoid { panels },
        nodes,
        weights,
        h1_adjusted: false,
    })
}

/// LCU coefficients `c_j = w_j κ_T(s_j)` and `d_j = w_j Λ_T(s_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LcuCoefficients {
    pub c: Vec<C64>,
    pub d: Vec<C64>,
    pub alpha_c: f64,
    pub alpha_d: f64,
    pub t: f64,
    pub profile: TimeProfile,
}

/// Builds the coefficient table; `noise` injects relative kernel errors.
pub fn coefficients(
    plan: &QuadraturePlan,
    t: f64,
    profile: TimeProfile,
    noise: Option<&KernelNoise>,
) -> Result<LcuCoefficients> {
    let mut c = Vec::with_capacity(plan.len());
    let mut d = Vec::with_capacity(plan.len());
    for (j, (&s, &w)) in plan.nodes.iter().zip(&plan.weights).enumerate() {
        let mut k = kappa(t, s)?;
        let mut l = match profile {
            TimeProfile::LinearInS => lambda_first_moment(t, s)?,
            TimeProfile::ConstantInS => lambda_zeroth_moment(t, s)?,
        };
        if let Some(n) = noise {
            k = n.apply(k, j, 0);
            l = n.apply(l, j, 1);
        }
        c.push(re(w * k));
        d.push(re(w * l));
    }
    let alpha_c = c.iter().map(|z| z.norm()).sum();
    let alpha_d = d.iter().map(|z| z.norm()).sum();
    Ok(LcuCoefficients {
        c,
        d,
        alpha_c,
        alpha_d,
        t,
        profile,
    })
}

/// Audit table with header `node,weight,c_re,c_im,d_re,d_im`.
pub fn coefficients_csv(plan: &QuadraturePlan, coeffs: &LcuCoefficients) -> Result<String> {
    if coeffs.c.len() != plan.len() || coeffs.d.len() != plan.len() {
        return Err(Error::PlanMismatch(format!(
            "{} nodes but {} coefficients",
            plan.len(),
            coeffs.c.len()
        )));
    }
    let mut out = String::from("node,weight,c_re,c_im,d_re,d_im\n");
    for j in 0..plan.len() {
        let (c, d) = (coeffs.c[j], coeffs.d[j]);
        writeln!(
            out,
            "{:e},{:e},{:e},{:e},{:e},{:e}",
            plan.nodes[j], plan.weights[j], c.re, c.im, d.re, d.im
        )
        .expect("writing to a String cannot fail");
    }
    Ok(out)
}
