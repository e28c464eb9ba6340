// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

//! Desk-scale classical simulator for the Kannai-transform LCU algorithm for
//! dissipative dynamics `u' = −Au + f` with `A = L†L`.
//!
//! The crate reproduces the discrete pipeline end to end: factor
//! construction, Hermitian dilation, Gaussian-kernel quadrature, LCU
//! assembly, postselection statistics and query accounting. Independent
//! oracles in [`reference`] back every numerical claim.

pub mod blockenc;
pub mod bounds;
pub mod dilation;
pub mod error;
pub mod extensions;
pub mod integrate;
pub mod kernels;
pub mod linalg;
pub mod operators;
pub mod pipeline;
pub mod propagator;
pub mod quadrature;
pub mod reference;
pub mod special;

pub use dilation::{hermitian_dilation, DilationHamiltonian};
pub use error::{Error, Result};
pub use kernels::{KernelKind, KernelSpec};
pub use operators::{DiscreteFactor, FactorKind, ForcingSlot, ForcingVector, Grid, TimeProfile};

pub use pipeline::{QueryCount, Rule, SimulationProblem, SimulationReport};
pub use quadrature::{LcuCoefficients, QuadraturePlan, QuadratureRule};
