// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the simulator.
///
/// Variants map one-to-one onto the failure modes of the individual
/// operations; the CLI translates them into exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate grid: n_cells = {n_cells} leaves no interior unknowns (need >= 2)")]
    DegenerateGrid { n_cells: usize },

    #[error("dense dimension {dim} exceeds the size cap {cap}")]
    SizeLimit { dim: usize, cap: usize },

    #[error("unsupported grid: {0}")]
    UnsupportedGrid(String),

    #[error("normalization {alpha} is smaller than the operator norm {norm}")]
    NormalizationTooSmall { alpha: f64, norm: f64 },

    #[error("selector nodes are all zero")]
    DegenerateSelector,

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("invalid time {0}: must be positive and finite")]
    InvalidTime(f64),

    #[error("invalid precision {0}")]
    InvalidPrecision(f64),

    #[error("missing kernel parameter `{0}`")]
    MissingParameter(&'static str),

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("Legendre root finding did not converge for Q = {q}")]
    RootFindingFailure { q: usize },

    #[error("invalid panel: h1 = {h1}, R = {r}")]
    InvalidPanel { h1: f64, r: f64 },

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeError { expected: usize, got: usize },

    #[error("invalid perturbation size {0}: must lie in [0, 1)")]
    InvalidPerturbation(f64),

    #[error("plan/coefficient mismatch: {0}")]
    PlanMismatch(String),

    #[error("projected output has zero norm; u_r is undefined")]
    DegenerateOutput,

    #[error("bound violation: {0}")]
    BoundViolation(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("time march unstable: norm grew from {initial} to {current}")]
    UnstableMarch { initial: f64, current: f64 },

    #[error("linear system is singular")]
    SingularSystem,

    #[error("generator is not dissipative: min eigenvalue of the Hermitian part is {0}")]
    NotDissipative(f64),

    #[error("generator is not normal: commutator residual {0}")]
    NotNormal(f64),

    #[error("no spectral gap: smallest eigenvalue {0}")]
    NoSpectralGap(f64),

    #[error("unsupported dimension d = {0}")]
    UnsupportedDimension(usize),

    #[error("log of nonpositive entry {value} at index {index}")]
    LogDomainError { index: usize, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
