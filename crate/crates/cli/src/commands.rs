// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;
use std::fmt::Write as _;

use kannai_core::blockenc::{
    build_ham_h, build_selector_blockenc, pad_square, position_phase, symmetric_dilation,
    unitary_completion,
};
use kannai_core::extensions::{
    epd_solve, hopf_cole_recover_shifted, linear_solve_kannai, multi_index, transport_heat_average,
};
use kannai_core::kernels::{min_truncation_radius, truncation_error_curve};
use kannai_core::linalg::{
    identity, kron, re, rel_error, spectral_norm, CMat, CVec, HermitianEigen, C64,
};
use kannai_core::operators::{
    build_biharmonic, build_heat_gradient_1d, build_heat_neumann_1d, build_hj_fourier_factor,
    dirichlet_boundary_forcing, lift_to_dimension, unitary_dft,
};
use kannai_core::pipeline::{budget_report_injected, run, state_csv};
use kannai_core::quadrature::{build_panel_grid, select_parameters};
use kannai_core::reference::epd_reference;
use kannai_core::{
    hermitian_dilation, DiscreteFactor, ForcingVector, KernelKind, KernelSpec, Rule,
    SimulationProblem, SimulationReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{RunConfig, Subcommand};
use crate::error::{CliError, CliResult};

/// What a subcommand produces: a CSV body, `key=value` summary pairs, and
/// the tolerance or bound failures that turn into exit code 1.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Output {
    pub csv: String,
    pub summary: Vec<(String, String)>,
    pub failures: Vec<String>,
}

impl Output {
    fn push(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }
}

pub fn dispatch(cfg: &RunConfig) -> CliResult<Output> {
    let mut out = match cfg.subcommand {
        Subcommand::Heat => heat(cfg),
        Subcommand::Biharmonic => biharmonic(cfg),
        Subcommand::Hj => hj(cfg),
        Subcommand::KernelCompare => kernel_compare(cfg),
        Subcommand::Linsolve => linsolve(cfg),
        Subcommand::Epd => epd(cfg),
        Subcommand::Transport => transport(cfg),
        Subcommand::VerifyBlockenc => verify_blockenc(cfg),
        Subcommand::BenchBounds => bench_bounds(cfg),
    }?;
    out.summary
        .insert(0, ("subcommand".into(), cfg.subcommand.name().into()));
    out.push(
        "status",
        if out.failures.is_empty() {
            "ok"
        } else {
            "fail"
        },
    );
    Ok(out)
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::usage(format!(
            "`{name}` must be positive, got {v}"
        )))
    }
}

/// Cartesian product of per-axis points, axis 1 slowest, mapped through `f`.
fn tensor_field(points: &[f64], d: usize, f: impl Fn(f64) -> f64) -> CVec {
    let m = points.len();
    let total = m.pow(d as u32);
    CVec::from_fn(total, |mut idx, _| {
        let mut v = 1.0;
        for _ in 0..d {
            v *= f(points[idx % m]);
            idx /= m;
        }
        re(v)
    })
}

fn dimension(cfg: &RunConfig) -> CliResult<usize> {
    let d: usize = cfg.get("d", 1)?;
    if d == 0 {
        return Err(CliError::usage("`d` must be at least 1"));
    }
    Ok(d)
}

fn lifted(base: DiscreteFactor, d: usize) -> CliResult<DiscreteFactor> {
    Ok(if d == 1 {
        base
    } else {
        lift_to_dimension(&base, d)?
    })
}

fn rule(cfg: &RunConfig) -> CliResult<Rule> {
    match cfg.choice("rule", "theorem", &["theorem", "trapezoid"])? {
        "theorem" => {
            if cfg.is_set("R") || cfg.is_set("M") {
                return Err(CliError::usage(
                    "`R` and `M` apply to the trapezoid rule only",
                ));
            }
            Ok(Rule::TheoremGL)
        }
        _ => Ok(Rule::Trapezoid {
            r: positive("R", cfg.get("R", 10.0)?)?,
            panels: cfg.get("M", 800)?,
        }),
    }
}

/// Runs the pipeline and applies the tolerance contract: an explicit `tol`
/// bounds the relative error; otherwise the theorem rule must meet its own
/// guarantee `‖u_h − u_ref‖ ≤ ε(‖u₀‖ + T‖b‖)`.
fn simulate(
    cfg: &RunConfig,
    problem: &SimulationProblem,
    rule: Rule,
    out: &mut Output,
) -> CliResult<SimulationReport> {
    let report = run(problem, rule)?;
    out.csv = report.to_csv();
    out.push("T", problem.t());
    out.push("eps", problem.eps());
    out.push("unknowns", problem.u0().len());
    out.push(
        "rule",
        if rule == Rule::TheoremGL {
            "theorem"
        } else {
            "trapezoid"
        },
    );
    for (k, v) in report.summary() {
        out.summary.push((k, v));
    }
    match cfg.get_opt::<f64>("tol")? {
        Some(tol) => {
            if report.rel_error > tol {
                out.failures.push(format!(
                    "rel_error {:e} exceeds tol {tol:e}",
                    report.rel_error
                ));
            }
        }
        None if rule == Rule::TheoremGL => {
            let budget = problem.eps() * (problem.u0().norm() + problem.t() * problem.b().norm());
            if report.abs_error > budget {
                out.failures.push(format!(
                    "abs_error {:e} exceeds the guaranteed {budget:e}",
                    report.abs_error
                ));
            }
        }
        None => {}
    }
    Ok(report)
}

fn heat(cfg: &RunConfig) -> CliResult<Output> {
    let n: usize = cfg.get("n", 50)?;
    let d = dimension(cfg)?;
    let t: f64 = cfg.get("T", 1.0)?;
    let eps: f64 = cfg.get("eps", 1e-6)?;
    let bc = cfg.choice("bc", "dirichlet", &["dirichlet", "neumann"])?;
    let dirichlet = bc == "dirichlet";
    let (base, points) = if dirichlet {
        let f = build_heat_gradient_1d(n)?;
        let h = f.grid().h;
        (f, (1..n).map(|i| i as f64 * h).collect::<Vec<_>>())
    } else {
        let f = build_heat_neumann_1d(n)?;
        let h = f.grid().h;
        (f, (0..n).map(|i| (i as f64 + 0.5) * h).collect())
    };
    let profile = cfg.choice(
        "u0",
        if dirichlet { "cos2pi" } else { "cospi" },
        &["cos2pi", "cospi", "sinpi"],
    )?;
    let u0 = tensor_field(&points, d, |x| match profile {
        "cos2pi" => (2.0 * PI * x).cos(),
        "cospi" => (PI * x).cos(),
        _ => (PI * x).sin(),
    });
    let boundary_default = if dirichlet && d == 1 { 1.0 } else { 0.0 };
    let left: f64 = cfg.get("left", boundary_default)?;
    let right: f64 = cfg.get("right", boundary_default)?;
    if (left != 0.0 || right != 0.0) && !(dirichlet && d == 1) {
        return Err(CliError::usage(
            "boundary values apply to one-dimensional Dirichlet runs only",
        ));
    }
    let factor = lifted(base, d)?;
    let forcing = if left != 0.0 || right != 0.0 {
        dirichlet_boundary_forcing(n, left, right)?
    } else {
        ForcingVector::zero(&factor)
    };
    let problem = SimulationProblem::new(&factor, u0, forcing, t, eps)?;
    let mut out = Output::default();
    out.push("bc", bc);
    out.push("n", n);
    out.push("d", d);
    simulate(cfg, &problem, rule(cfg)?, &mut out)?;
    Ok(out)
}

fn biharmonic(cfg: &RunConfig) -> CliResult<Output> {
    let n: usize = cfg.get("n", 8)?;
    let d = dimension(cfg)?;
    let factor = build_biharmonic(n, d)?;
    let h = factor.grid().h;
    let points: Vec<f64> = (1..n).map(|i| i as f64 * h).collect();
    let u0 = tensor_field(&points, d, |x| (PI * x).sin());
    let problem =
        SimulationProblem::homogeneous(&factor, u0, cfg.get("T", 1e-4)?, cfg.get("eps", 1e-6)?)?;
    let mut out = Output::default();
    out.push("n", n);
    out.push("d", d);
    simulate(cfg, &problem, rule(cfg)?, &mut out)?;
    Ok(out)
}

fn hj(cfg: &RunConfig) -> CliResult<Output> {
    let n: usize = cfg.get("n", 16)?;
    let d = dimension(cfg)?;
    let nu = positive("nu", cfg.get("nu", 0.1)?)?;
    let shift: f64 = cfg.get("shift", 0.0)?;
    let factor = build_hj_fourier_factor(n, d, nu)?;
    let points: Vec<f64> = (0..n).map(|j| j as f64 / n as f64).collect();
    // S₀ = Σ_k cos(2πx_k) enters through u₀ = e^{−S₀/(2ν)}.
    let u0 = tensor_field(&points, d, |x| (-(2.0 * PI * x).cos() / (2.0 * nu)).exp());
    let problem =
        SimulationProblem::homogeneous(&factor, u0, cfg.get("T", 0.1)?, cfg.get("eps", 1e-6)?)?;
    let mut out = Output::default();
    out.push("n", n);
    out.push("d", d);
    out.push("nu", nu);
    let report = simulate(cfg, &problem, rule(cfg)?, &mut out)?;
    let shifts = vec![shift; d];
    let s = hopf_cole_recover_shifted(&report.u_h, n, d, &shifts, nu)?;
    let s_ref = hopf_cole_recover_shifted(&report.u_ref, n, d, &shifts, nu)?;
    let err = s
        .iter()
        .zip(&s_ref)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    out.push("shift", shift);
    out.push("S_max_error", format!("{err:e}"));
    out.push(
        "S_min",
        format!("{:e}", s.iter().copied().fold(f64::INFINITY, f64::min)),
    );
    out.push(
        "S_max",
        format!("{:e}", s.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
    );
    Ok(out)
}

fn kernel_compare(cfg: &RunConfig) -> CliResult<Output> {
    let t: f64 = cfg.get("T", 1.0)?;
    let eps: f64 = cfg.get("eps", 1e-6)?;
    let beta: f64 = cfg.get("beta", 0.5)?;
    let r_max = positive("R", cfg.get("R", 40.0)?)?;
    let m: usize = cfg.get("M", 400)?;
    if m == 0 {
        return Err(CliError::usage("`M` must be at least 1"));
    }
    let grid: Vec<f64> = (1..=m).map(|k| r_max * k as f64 / m as f64).collect();
    let specs = [
        (KernelSpec::new(KernelKind::KannaiGaussian, t), None),
        (
            KernelSpec::new(KernelKind::OptLCHS, t).with_eps(eps),
            Some(eps),
        ),
        (
            KernelSpec::new(KernelKind::ImprovedLCHS, t).with_beta(beta),
            None,
        ),
        (
            KernelSpec::new(KernelKind::OptSchrodingerization, t).with_eps(eps),
            Some(eps),
        ),
    ];
    let mut out = Output {
        csv: String::from("kernel,T,eps_param,R,tail_eps\n"),
        ..Output::default()
    };
    out.push("T", t);
    out.push("eps", eps);
    out.push("beta", beta);
    for (spec, eps_param) in &specs {
        let param = eps_param.map(|e| format!("{e:e}")).unwrap_or_default();
        for (r, tail) in truncation_error_curve(spec, &grid)? {
            let _ = writeln!(out.csv, "{},{t:e},{param},{r:e},{tail:e}", spec.kind.name());
        }
        let key = format!("R_min_{}", spec.kind.name());
        out.push(&key, format!("{:.6}", min_truncation_radius(spec, eps)?));
    }
    Ok(out)
}

fn top_eigenvector(a: &CMat) -> CliResult<CVec> {
    let eig = HermitianEigen::new(a)?;
    let top = (0..eig.dim())
        .max_by(|&i, &j| eig.values()[i].total_cmp(&eig.values()[j]))
        .ok_or_else(|| CliError::usage("empty operator"))?;
    Ok(eig.vectors().column(top).into_owned())
}

fn linsolve(cfg: &RunConfig) -> CliResult<Output> {
    let n: usize = cfg.get("n", 16)?;
    let d = dimension(cfg)?;
    let eps: f64 = cfg.get("eps", 1e-4)?;
    let factor = lifted(build_heat_gradient_1d(n)?, d)?;
    let b = match cfg.choice("rhs", "ones", &["ones", "top"])? {
        "ones" => CVec::from_element(factor.cols(), re(1.0)),
        _ => top_eigenvector(&factor.generator())?,
    };
    let r = linear_solve_kannai(&factor, &b, eps)?;
    let mut out = Output {
        csv: state_csv(&r.x_out, &r.x_ref),
        ..Output::default()
    };
    out.push("n", n);
    out.push("d", d);
    out.push("eps", eps);
    out.push("kappa", format!("{:e}", r.kappa));
    out.push("T_tilde", format!("{:e}", r.t_tilde));
    out.push("alpha", format!("{:e}", r.alpha));
    out.push("rel_error", format!("{:e}", r.rel_error));
    out.push("g", r.queries.repetitions);
    out.push("per_sel", r.queries.per_sel);
    out.push("total_queries", r.queries.total_matrix_queries);
    if r.rel_error > eps {
        out.failures
            .push(format!("rel_error {:e} exceeds eps {eps:e}", r.rel_error));
    }
    Ok(out)
}

fn epd(cfg: &RunConfig) -> CliResult<Output> {
    let n: usize = cfg.get("n", 16)?;
    let t: f64 = cfg.get("T", 1.0)?;
    let d: usize = cfg.get("d", 3)?;
    let tol: f64 = cfg.get("tol", 1e-6)?;
    let factor = build_heat_gradient_1d(n)?;
    let h = factor.grid().h;
    let u0 = CVec::from_fn(n - 1, |i, _| re((PI * (i + 1) as f64 * h).sin()));
    let u = epd_solve(&factor, &u0, t, d)?;
    let u_ref = epd_reference(&factor.generator(), &u0, t, d)?;
    let rel = rel_error(&u, &u_ref);
    let mut out = Output {
        csv: state_csv(&u, &u_ref),
        ..Output::default()
    };
    out.push("n", n);
    out.push("d", d);
    out.push("T", t);
    out.push("rel_error", format!("{rel:e}"));
    if rel > tol {
        out.failures
            .push(format!("rel_error {rel:e} exceeds tol {tol:e}"));
    }
    Ok(out)
}

fn transport(cfg: &RunConfig) -> CliResult<Output> {
    let n: usize = cfg.get("n", 16)?;
    let d = dimension(cfg)?;
    let t: f64 = cfg.get("T", 0.1)?;
    let nodes: usize = cfg.get("nodes", 60)?;
    let tol: f64 = cfg.get("tol", 1e-8)?;
    let points: Vec<f64> = (0..n).map(|j| j as f64 / n as f64).collect();
    let y0 = tensor_field(&points, d, |x| (2.0 * PI * x).cos().exp());
    let y0_hat = unitary_dft(n, d)? * y0;
    let averaged = transport_heat_average(&y0_hat, n, d, t, nodes)?;
    let reference = CVec::from_fn(y0_hat.len(), |i, _| {
        let k2: i64 = multi_index(i, n, d).iter().map(|k| k * k).sum();
        y0_hat[i] * (-4.0 * PI * PI * k2 as f64 * t).exp()
    });
    let scale = y0_hat.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let err = (&averaged - &reference)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        / scale;
    let mut out = Output {
        csv: state_csv(&averaged, &reference),
        ..Output::default()
    };
    out.push("n", n);
    out.push("d", d);
    out.push("T", t);
    out.push("nodes", nodes);
    out.push("max_rel_error", format!("{err:e}"));
    if err > tol {
        out.failures
            .push(format!("max_rel_error {err:e} exceeds tol {tol:e}"));
    }
    Ok(out)
}

/// Block-encoding residuals must stay at roundoff level.
const BLOCKENC_TOL: f64 = 1e-10;

fn verify_blockenc(cfg: &RunConfig) -> CliResult<Output> {
    let n: usize = cfg.get("n", 4)?;
    let m: usize = cfg.get("M", 8)?;
    let seed: u64 = cfg.get("seed", 0)?;
    if n == 0 || m == 0 {
        return Err(CliError::usage("`n` and `M` must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = CMat::from_fn(n, n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let alpha = spectral_norm(&l) * 1.05;
    let be_l = unitary_completion(&l, alpha)?;
    let be_h = build_ham_h(&be_l)?;
    let nodes: Vec<f64> = if m == 1 {
        vec![1.0]
    } else {
        (0..m)
            .map(|j| -1.0 + 2.0 * j as f64 / (m - 1) as f64)
            .collect()
    };
    let sel = build_selector_blockenc(&nodes, &be_h)?;
    let p = kron(&position_phase(), &identity(n));
    let h = hermitian_dilation(&DiscreteFactor::custom(l.clone())?)?;
    let conj = (p.adjoint() * symmetric_dilation(&l) * &p - h.matrix()).norm() / alpha;
    let padded = hermitian_dilation(&DiscreteFactor::custom(pad_square(&l))?)?;
    let target = (&be_h.target - padded.matrix()).norm() / alpha;

    let mut out = Output {
        csv: String::from("component,block_residual,unitarity_residual,ancillas,dim\n"),
        ..Output::default()
    };
    let mut worst: f64 = 0.0;
    for (name, be) in [("completion", &be_l), ("ham_h", &be_h), ("selector", &sel)] {
        let (b, u) = (be.block_residual(), be.unitarity_residual());
        worst = worst.max(b).max(u);
        let _ = writeln!(
            out.csv,
            "{name},{b:e},{u:e},{},{}",
            be.ancilla_count,
            be.unitary.nrows()
        );
    }
    let _ = writeln!(out.csv, "phase_conjugation,{conj:e},0e0,0,{}", p.nrows());
    let _ = writeln!(
        out.csv,
        "ham_h_target,{target:e},0e0,0,{}",
        be_h.target.nrows()
    );
    worst = worst.max(conj).max(target);
    out.push("n", n);
    out.push("M", m);
    out.push("seed", seed);
    out.push("max_residual", format!("{worst:e}"));
    if worst > BLOCKENC_TOL {
        out.failures
            .push(format!("residual {worst:e} exceeds {BLOCKENC_TOL:e}"));
    }
    Ok(out)
}

fn bench_bounds(cfg: &RunConfig) -> CliResult<Output> {
    let n: usize = cfg.get("n", 8)?;
    let t: f64 = cfg.get("T", 1.0)?;
    let eps: f64 = cfg.get("eps", 1e-3)?;
    let delta_off: f64 = cfg.get("delta_off", 1e-3)?;
    let inject: f64 = cfg.get("inject", delta_off)?;
    let delta1: f64 = cfg.get("delta1", 1e-3)?;
    let seed: u64 = cfg.get("seed", 0)?;
    let factor = build_heat_gradient_1d(n)?;
    let h = factor.grid().h;
    let u0 = CVec::from_fn(factor.cols(), |i, _| re((PI * (i + 1) as f64 * h).sin()));
    let forcing = ForcingVector::interior(CVec::from_element(factor.cols(), re(1.0)));
    let problem = SimulationProblem::new(&factor, u0, forcing, t, eps)?;
    let params = select_parameters(t, problem.dilation().norm(), eps)?;
    let r = positive("R", cfg.get("R", 8.0 * t.sqrt())?)?;
    let q: usize = cfg.get("Q", params.q)?;
    let plan = build_panel_grid(r, params.h1.min(r), q)?;
    let report = budget_report_injected(&problem, &plan, delta_off, inject, delta1, seed)?;

    let mut out = Output {
        csv: String::from("check,measured,bound,floor,holds\n"),
        ..Output::default()
    };
    for c in &report.checks {
        let _ = writeln!(
            out.csv,
            "{},{:e},{:e},{:e},{}",
            c.name,
            c.measured,
            c.bound,
            c.floor,
            c.holds()
        );
    }
    out.push("n", n);
    out.push("T", t);
    out.push("R", format!("{r:e}"));
    out.push("h1", format!("{:e}", plan.h1));
    out.push("Q", q);
    out.push("delta_off", format!("{delta_off:e}"));
    out.push("inject", format!("{inject:e}"));
    out.push("delta1", format!("{delta1:e}"));
    out.push("checks", report.checks.len());
    let violations: Vec<String> = report.violations().map(|c| c.name.clone()).collect();
    out.push("violations", violations.len());
    for v in violations {
        out.failures.push(format!("bound violated: {v}"));
    }
    Ok(out)
}
