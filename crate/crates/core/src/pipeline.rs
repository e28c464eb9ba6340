// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end LCU pipeline: coefficients, assembly, projection onto the
//! physical block, postselection statistics and query accounting.

use std::fmt::Write as _;

use crate::bounds::{self, BudgetReport};
use crate::dilation::{hermitian_dilation, DilationHamiltonian};
use crate::error::{Error, Result};
use crate::kernels::KernelNoise;
use crate::linalg::{CVec, C64};
use crate::operators::{DiscreteFactor, ForcingVector, TimeProfile};
use crate::propagator::{evolve_coords, SelPerturbation};
use crate::quadrature::{
    build_trapezoid_grid, coefficients, select_parameters, LcuCoefficients, QuadraturePlan,
};
use crate::reference::physical_solution;

/// Precision of the low-accuracy run used to estimate `u_r`.
pub const BOOTSTRAP_EPS: f64 = 1e-2;

/// A dissipative problem `u' = −L†L u + f`, `u(0) = u₀`, together with its
/// factorized dilation.
#[derive(Debug, Clone)]
pub struct SimulationProblem {
    dilation: DilationHamiltonian,
    u0: CVec,
    forcing: ForcingVector,
    b: CVec,
    t: f64,
    eps: f64,
}

impl SimulationProblem {
    pub fn new(
        factor: &DiscreteFactor,
        u0: CVec,
        forcing: ForcingVector,
        t: f64,
        eps: f64,
    ) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidTime(t));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidPrecision(eps));
        }
        if u0.len() != factor.cols() {
            return Err(Error::ShapeError {
                expected: factor.cols(),
                got: u0.len(),
            });
        }
        let b = forcing.stacked(factor)?;
        let dilation = hermitian_dilation(factor)?;
        Ok(Self {
            dilation,
            u0,
            forcing,
            b,
            t,
            eps,
        })
    }

    /// Unforced problem.
    pub fn homogeneous(factor: &DiscreteFactor, u0: CVec, t: f64, eps: f64) -> Result<Self> {
        Self::new(factor, u0, ForcingVector::zero(factor), t, eps)
    }

    pub fn factor(&self) -> &DiscreteFactor {
        self.dilation.factor()
    }

    pub fn dilation(&self) -> &DilationHamiltonian {
        &self.dilation
    }

    pub fn u0(&self) -> &CVec {
        &self.u0
    }

    pub fn forcing(&self) -> &ForcingVector {
        &self.forcing
    }

    /// Stacked forcing `b` on the dilated space.
    pub fn b(&self) -> &CVec {
        &self.b
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn profile(&self) -> TimeProfile {
        self.forcing.time_profile
    }

    /// `ψ₀ = (u₀, 0)`.
    pub fn psi0(&self) -> CVec {
        let mut psi = CVec::zeros(self.dilation.dim());
        psi.rows_mut(0, self.u0.len()).copy_from(&self.u0);
        psi
    }

    /// Same problem at another precision.
    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidPrecision(eps));
        }
        Ok(Self {
            eps,
            ..self.clone()
        })
    }

    /// Exact solution of the physical equation on the same grid.
    pub fn reference_solution(&self) -> Result<CVec> {
        physical_solution(self.factor(), &self.u0, &self.forcing, self.t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    /// Panel Gauss–Legendre with parameters chosen from the target precision.
    TheoremGL,
    /// Uniform trapezoid rule on `[−r, r]`.
    Trapezoid { r: f64, panels: usize },
}

/// Query accounting with unit constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryCount {
    /// `⌈α_H s_max⌉ + ⌈log₂(1/δ₁)⌉`.
    pub per_sel: u64,
    pub repetitions: u64,
    pub total_matrix_queries: u64,
    pub state_prep_calls: u64,
    pub alpha_h: f64,
    pub s_max: f64,
    pub delta1: f64,
}

impl QueryCount {
    pub fn new(
        alpha_h: f64,
        s_max: f64,
        delta1: f64,
        repetitions: u64,
        forced: bool,
    ) -> Result<Self> {
        if !(delta1 > 0.0 && delta1 < 1.0) {
            return Err(Error::InvalidPerturbation(delta1));
        }
        let per_sel = (alpha_h * s_max).ceil() as u64 + (1.0 / delta1).log2().ceil() as u64;
        Ok(Self {
            per_sel,
            repetitions,
            total_matrix_queries: per_sel * repetitions,
            state_prep_calls: if forced { 2 * repetitions } else { repetitions },
            alpha_h,
            s_max,
            delta1,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub u_f: CVec,
    pub u_h: CVec,
    pub u_ref: CVec,
    pub abs_error: f64,
    pub rel_error: f64,
    pub u_r: f64,
    pub eta0: f64,
    /// `η₀/‖u_h‖` before rounding up.
    pub eta_ratio: f64,
    pub g: u64,
    pub queries: QueryCount,
    pub alpha_c: f64,
    pub alpha_d: f64,
    pub plan: QuadraturePlan,
    /// Precision the quadrature parameters were selected for.
    pub eps_disc: f64,
}

impl SimulationReport {
    /// Per-entry CSV in the [`state_csv`] schema.
    pub fn to_csv(&self) -> String {
        state_csv(&self.u_h, &self.u_ref)
    }

    /// Flat `key=value` summary, one pair per line.
    pub fn summary(&self) -> Vec<(String, String)> {
        let q = &self.queries;
        [
            ("rel_error", format!("{:e}", self.rel_error)),
            ("abs_error", format!("{:e}", self.abs_error)),
            ("u_r", format!("{:e}", self.u_r)),
            ("eta0", format!("{:e}", self.eta0)),
            ("g", self.g.to_string()),
            ("alpha_c", format!("{:e}", self.alpha_c)),
            ("alpha_d", format!("{:e}", self.alpha_d)),
            ("R", format!("{:e}", self.plan.r)),
            ("h1", format!("{:e}", self.plan.h1)),
            ("Q", self.plan.q.to_string()),
            ("nodes", self.plan.len().to_string()),
            ("delta1", format!("{:e}", q.delta1)),
            ("per_sel", q.per_sel.to_string()),
            ("total_queries", q.total_matrix_queries.to_string()),
            ("state_prep_calls", q.state_prep_calls.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}

/// CSV `x_index,u_kannai_re,u_kannai_im,u_ref_re,u_ref_im,abs_err`, one row
/// per entry of `u`. Rows beyond the shorter vector are not written.
pub fn state_csv(u: &CVec, reference: &CVec) -> String {
    let mut out = String::from("x_index,u_kannai_re,u_kannai_im,u_ref_re,u_ref_im,abs_err\n");
    for (i, (a, b)) in u.iter().zip(reference.iter()).enumerate() {
        let _ = writeln!(
            out,
            "{i},{:e},{:e},{:e},{:e},{:e}",
            a.re,
            a.im,
            b.re,
            b.im,
            (a - b).norm()
        );
    }
    out
}

/// Sums `f(lo..hi)` by recursive halving so the rounding pattern does not
/// depend on anything but the index range.
fn pairwise<T>(
    lo: usize,
    hi: usize,
    f: &impl Fn(usize) -> T,
    zero: &impl Fn() -> T,
    add: &impl Fn(T, T) -> T,
) -> T {
    const LEAF: usize = 16;
    if hi - lo <= LEAF {
        let mut acc = zero();
        for j in lo..hi {
            acc = add(acc, f(j));
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    let left = pairwise(lo, mid, f, zero, add);
    let right = pairwise(mid, hi, f, zero, add);
    add(left, right)
}

fn pairwise_scalar(n: usize, f: impl Fn(usize) -> C64) -> C64 {
    pairwise(0, n, &f, &|| C64::new(0.0, 0.0), &|a, b| a + b)
}

/// Quadrature transforms `Σ_j w_j k(s_j) e^{−iλ s_j}` of a coefficient table
/// at each eigenvalue.
pub(crate) fn transforms(lambdas: &[f64], nodes: &[f64], weights: &[C64]) -> Vec<C64> {
    lambdas
        .iter()
        .map(|&lam| {
            pairwise_scalar(nodes.len(), |j| {
                weights[j] * C64::from_polar(1.0, -lam * nodes[j])
            })
        })
        .collect()
}

fn check_plan(
    problem: &SimulationProblem,
    plan: &QuadraturePlan,
    coeffs: &LcuCoefficients,
) -> Result<()> {
    if plan.nodes.len() != plan.weights.len()
        || coeffs.c.len() != plan.len()
        || coeffs.d.len() != plan.len()
    {
        return Err(Error::PlanMismatch(format!(
            "{} nodes, {} weights, {} c, {} d",
            plan.nodes.len(),
            plan.weights.len(),
            coeffs.c.len(),
            coeffs.d.len()
        )));
    }
    if (coeffs.t - problem.t).abs() > 1e-14 * problem.t {
        return Err(Error::PlanMismatch(format!(
            "coefficients built for T = {} but problem has T = {}",
            coeffs.t, problem.t
        )));
    }
    if coeffs.profile != problem.profile() && !problem.forcing.is_zero() {
        return Err(Error::PlanMismatch(format!(
            "coefficients use {:?} but forcing is {:?}",
            coeffs.profile,
            problem.profile()
        )));
    }
    Ok(())
}

/// `u_f = Σ_j (c_j U(s_j) ψ₀ + d_j U(s_j) b)`, or with each `U(s_j)` followed
/// by an independent perturbation within `δ₁` of the identity.
pub fn assemble(
    problem: &SimulationProblem,
    plan: &QuadraturePlan,
    coeffs: &LcuCoefficients,
    delta1: Option<f64>,
    seed: Option<u64>,
) -> Result<CVec> {
    check_plan(problem, plan, coeffs)?;
    let h = &problem.dilation;
    let spec = h.spectrum();
    let cp = spec.to_eigenbasis(&problem.psi0());
    let cb = spec.to_eigenbasis(&problem.b);
    let dim = h.dim();

    match delta1 {
        Some(d1) if d1 != 0.0 => {
            if !(0.0..1.0).contains(&d1) {
                return Err(Error::InvalidPerturbation(d1));
            }
            let seed = seed.ok_or_else(|| {
                Error::InvalidArgument(
                    "a seed is required when a SEL perturbation is requested".into(),
                )
            })?;
            let term = |j: usize| -> CVec {
                let coords = &cp * coeffs.c[j] + &cb * coeffs.d[j];
                let exact = evolve_coords(h, plan.nodes[j], &coords);
                match SelPerturbation::draw(dim, d1, seed, j as u64).expect("δ₁ validated above")
                {
                    Some(p) => p.apply(&exact),
                    None => exact,
                }
            };
            Ok(pairwise(
                0,
                plan.len(),
                &term,
                &|| CVec::zeros(dim),
                &|a, b| a + b,
            ))
        }
        Some(d1) if !(0.0..1.0).contains(&d1) => Err(Error::InvalidPerturbation(d1)),
        _ => {
            let lam: Vec<f64> = spec.values().iter().copied().collect();
            let tc = transforms(&lam, &plan.nodes, &coeffs.c);
            let td = if problem.forcing.is_zero() {
                vec![C64::new(0.0, 0.0); lam.len()]
            } else {
                transforms(&lam, &plan.nodes, &coeffs.d)
            };
            let c = CVec::from_fn(dim, |k, _| tc[k] * cp[k] + td[k] * cb[k]);
            Ok(spec.from_eigenbasis(&c))
        }
    }
}

/// The `w` block: the first `cols(L)` entries of the stacked vector.
pub fn project_physical(u_f: &CVec, problem: &SimulationProblem) -> Result<CVec> {
    let dim = problem.dilation.dim();
    if u_f.len() != dim {
        return Err(Error::ShapeError {
            expected: dim,
            got: u_f.len(),
        });
    }
    Ok(u_f.rows(0, problem.factor().cols()).into_owned())
}

/// Panel plan and its coefficients for the problem at precision `eps`.
pub fn theorem_plan(
    problem: &SimulationProblem,
    eps: f64,
) -> Result<(QuadraturePlan, LcuCoefficients)> {
    let params = select_parameters(problem.t, problem.dilation.norm(), eps)?;
    let plan = params.plan()?;
    let coeffs = coefficients(&plan, problem.t, problem.profile(), None)?;
    Ok((plan, coeffs))
}

struct Pass {
    plan: QuadraturePlan,
    coeffs: LcuCoefficients,
    u_f: CVec,
    u_h: CVec,
}

fn pass(
    problem: &SimulationProblem,
    plan: QuadraturePlan,
    coeffs: LcuCoefficients,
) -> Result<Pass> {
    let u_f = assemble(problem, &plan, &coeffs, None, None)?;
    let u_h = project_physical(&u_f, problem)?;
    Ok(Pass {
        plan,
        coeffs,
        u_f,
        u_h,
    })
}

fn input_size(problem: &SimulationProblem) -> f64 {
    problem.u0.norm() + problem.t * problem.b.norm()
}

/// Full pipeline with query accounting at `δ₁ = ε/(8u_r)`.
///
/// For [`Rule::TheoremGL`], `u_r` is first estimated from a run at
/// [`BOOTSTRAP_EPS`]; the final parameters target `min(ε, ε/(8u_r))` so the
/// normalized output meets `ε` even when dissipation shrinks the solution.
pub fn run(problem: &SimulationProblem, rule: Rule) -> Result<SimulationReport> {
    let (result, eps_disc) = match rule {
        Rule::Trapezoid { r, panels } => {
            let plan = build_trapezoid_grid(r, panels)?;
            let coeffs = coefficients(&plan, problem.t, problem.profile(), None)?;
            (pass(problem, plan, coeffs)?, problem.eps)
        }
        Rule::TheoremGL => {
            let (plan, coeffs) = theorem_plan(problem, BOOTSTRAP_EPS.max(problem.eps))?;
            let boot = pass(problem, plan, coeffs)?;
            let boot_norm = boot.u_h.norm();
            if boot_norm == 0.0 {
                return Err(Error::DegenerateOutput);
            }
            let u_r = input_size(problem) / boot_norm;
            let eps_disc = problem.eps.min(problem.eps / (8.0 * u_r));
            let (plan, coeffs) = theorem_plan(problem, eps_disc)?;
            (pass(problem, plan, coeffs)?, eps_disc)
        }
    };
    let Pass {
        plan,
        coeffs,
        u_f,
        u_h,
    } = result;

    let norm_h = u_h.norm();
    if norm_h == 0.0 || !norm_h.is_finite() {
        return Err(Error::DegenerateOutput);
    }
    let u_ref = problem.reference_solution()?;
    let abs_error = (&u_h - &u_ref).norm();
    let ref_norm = u_ref.norm();
    let rel_error = if ref_norm > 0.0 {
        abs_error / ref_norm
    } else {
        abs_error
    };

    let u_r = input_size(problem) / norm_h;
    let eta0 = coeffs.alpha_c * problem.u0.norm() + coeffs.alpha_d * problem.b.norm();
    let eta_ratio = eta0 / norm_h;
    let g = eta_ratio.ceil().max(1.0) as u64;
    let delta1 = (problem.eps / (8.0 * u_r)).min(0.5);
    let queries = QueryCount::new(
        problem.dilation.norm(),
        plan.s_max(),
        delta1,
        g,
        !problem.forcing.is_zero(),
    )?;

    Ok(SimulationReport {
        u_f,
        u_h,
        u_ref,
        abs_error,
        rel_error,
        u_r,
        eta0,
        eta_ratio,
        g,
        queries,
        alpha_c: coeffs.alpha_c,
        alpha_d: coeffs.alpha_d,
        plan,
        eps_disc,
    })
}

/// Every error-budget inequality and the SEL error bound for one configuration,
/// whether or not they hold.
pub fn budget_report(
    problem: &SimulationProblem,
    plan: &QuadraturePlan,
    delta_off: f64,
    delta1: f64,
    seed: u64,
) -> Result<BudgetReport> {
    budget_report_injected(problem, plan, delta_off, delta_off, delta1, seed)
}

/// As [`budget_report`], with kernel noise of size `injected` checked
/// against the budget for `delta_off`. Any `injected > delta_off` is a
/// deliberate contract breach used to exercise the checker.
pub fn budget_report_injected(
    problem: &SimulationProblem,
    plan: &QuadraturePlan,
    delta_off: f64,
    injected: f64,
    delta1: f64,
    seed: u64,
) -> Result<BudgetReport> {
    if !problem.forcing.is_zero() && problem.profile() != TimeProfile::LinearInS {
        return Err(Error::InvalidArgument(
            "error budgets are stated for the first-moment kernel only".into(),
        ));
    }
    KernelNoise::new(delta_off, seed)?;
    let noise = KernelNoise::new(injected, seed)?;
    let clean = coefficients(plan, problem.t, TimeProfile::LinearInS, None)?;
    let noisy = coefficients(plan, problem.t, TimeProfile::LinearInS, Some(&noise))?;
    let h = &problem.dilation;
    let psi0 = problem.psi0();
    let b = &problem.b;
    let t = problem.t;

    let mut checks = Vec::new();
    checks.extend(bounds::truncation_checks(
        h.spectrum(),
        &psi0,
        b,
        t,
        plan.r,
    )?);
    checks.extend(bounds::quadrature_checks(h, &psi0, b, t, plan, &clean)?);
    checks.extend(bounds::coefficient_checks(plan, &noisy, t, delta_off)?);
    checks.extend(bounds::total_checks(
        h, &psi0, b, t, plan, &noisy, delta_off,
    )?);

    let mut noisy_problem = problem.clone();
    noisy_problem.forcing.time_profile = TimeProfile::LinearInS;
    let exact = assemble(&noisy_problem, plan, &noisy, None, None)?;
    let perturbed = assemble(&noisy_problem, plan, &noisy, Some(delta1), Some(seed))?;
    checks.push(bounds::lcu_check(
        (&perturbed - &exact).norm(),
        delta1,
        noisy.alpha_c * psi0.norm() + noisy.alpha_d * b.norm(),
    ));
    Ok(BudgetReport { checks })
}

/// As [`budget_report`], turning any violated inequality into
/// [`Error::BoundViolation`].
pub fn error_budget_check(
    problem: &SimulationProblem,
    plan: &QuadraturePlan,
    delta_off: f64,
    delta1: f64,
    seed: u64,
) -> Result<BudgetReport> {
    let report = budget_report(problem, plan, delta_off, delta1, seed)?;
    let failed: Vec<String> = report
        .violations()
        .map(|c| {
            format!(
                "{}: measured {:.3e} > bound {:.3e}",
                c.name, c.measured, c.bound
            )
        })
        .collect();
    if failed.is_empty() {
        Ok(report)
    } else {
        Err(Error::BoundViolation(failed.join("; ")))
    }
}
