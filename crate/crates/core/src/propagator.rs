// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

//! Exact evolution `U(s) = exp(−iHs)` through the cached spectrum, plus a
//! reproducible δ₁-perturbed variant standing in for an imperfect SEL.

use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dilation::DilationHamiltonian;
use crate::error::{Error, Result};
use crate::linalg::{CVec, C64, I};

#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedState {
    pub vector: CVec,
    pub s: f64,
}

fn check_dim(h: &DilationHamiltonian, psi: &CVec) -> Result<()> {
    if psi.len() != h.dim() {
        return Err(Error::ShapeError {
            expected: h.dim(),
            got: psi.len(),
        });
    }
    Ok(())
}

/// Eigenbasis phases `e^{−iλs}`.
fn phases(h: &DilationHamiltonian, s: f64) -> impl Iterator<Item = C64> + '_ {
    h.spectrum()
        .values()
        .iter()
        .map(move |&lam| C64::from_polar(1.0, -lam * s))
}

/// `V diag(e^{−iλs}) V† ψ`.
pub fn evolve(h: &DilationHamiltonian, s: f64, psi: &CVec) -> Result<EvolvedState> {
    check_dim(h, psi)?;
    let coords = h.spectrum().to_eigenbasis(psi);
    Ok(EvolvedState {
        vector: evolve_coords(h, s, &coords),
        s,
    })
}

/// Evolves eigenbasis coordinates and maps back.
pub(crate) fn evolve_coords(h: &DilationHamiltonian, s: f64, coords: &CVec) -> CVec {
    let mut c = coords.clone();
    for (ci, p) in c.iter_mut().zip(phases(h, s)) {
        *ci *= p;
    }
    h.spectrum().from_eigenbasis(&c)
}

/// One evolved state per node, sharing a single change of basis.
pub fn evolve_batch(
    h: &DilationHamiltonian,
    nodes: &[f64],
    psi: &CVec,
) -> Result<Vec<EvolvedState>> {
    check_dim(h, psi)?;
    let coords = h.spectrum().to_eigenbasis(psi);
    Ok(nodes
        .iter()
        .map(|&s| EvolvedState {
            vector: evolve_coords(h, s, &coords),
            s,
        })
        .collect())
}

/// A unitary `V` with `‖V − I‖ = δ₁`, acting on a random two-dimensional
/// subspace: `V = (I + K/2)(I − K/2)^{-1}` with `K = iθG`, `‖G‖ = 1`.
#[derive(Debug, Clone)]
pub struct SelPerturbation {
    x: CVec,
    y: CVec,
    /// `V − I` restricted to `span{x, y}`.
    delta: Matrix2<C64>,
}

impl SelPerturbation {
    /// Draws the perturbation for node `stream` of run `seed`.
    pub fn draw(dim: usize, delta1: f64, seed: u64, stream: u64) -> Result<Option<Self>> {
        if !(0.0..1.0).contains(&delta1) {
            return Err(Error::InvalidPerturbation(delta1));
        }
        if delta1 == 0.0 {
            return Ok(None);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut gaussian = |n: usize| {
            CVec::from_fn(n, |_, _| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(re, im)
            })
        };
        let theta = delta1 / (1.0 - delta1 * delta1 / 4.0).sqrt();
        if dim == 1 {
            // G = ±1: V is the scalar Cayley phase.
            let k = I * theta;
            let v = (C64::new(1.0, 0.0) + k / 2.0) / (C64::new(1.0, 0.0) - k / 2.0);
            let x = CVec::from_element(1, C64::new(1.0, 0.0));
            let mut delta = Matrix2::zeros();
            delta[(0, 0)] = v - C64::new(1.0, 0.0);
            return Ok(Some(Self {
                x: x.clone(),
                y: CVec::zeros(1),
                delta,
            }));
        }
        let mut x = gaussian(dim);
        x /= C64::new(x.norm(), 0.0);
        let mut y = gaussian(dim);
        let overlap = x.dotc(&y);
        y -= &x * overlap;
        y /= C64::new(y.norm(), 0.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        // G on span{x, y} is [[0, e^{iφ}], [e^{−iφ}, 0]] with eigenvalues ±1.
        let g = Matrix2::new(
            C64::new(0.0, 0.0),
            C64::from_polar(1.0, phi),
            C64::from_polar(1.0, -phi),
            C64::new(0.0, 0.0),
        );
        let k = g * (I * theta);
        let id = Matrix2::identity();
        let inv = (id - k / C64::new(2.0, 0.0))
            .try_inverse()
            .ok_or_else(|| Error::NumericalBreakdown("Cayley denominator singular".into()))?;
        let v = (id + k / C64::new(2.0, 0.0)) * inv;
        Ok(Some(Self {
            x,
            y,
            delta: v - id,
        }))
    }

    /// `V ψ = ψ + [x y](V₂ − I)[x†ψ; y†ψ]`.
    pub fn apply(&self, psi: &CVec) -> CVec {
        let a = self.x.dotc(psi);
        let b = self.y.dotc(psi);
        let ca = self.delta[(0, 0)] * a + self.delta[(0, 1)] * b;
        let cb = self.delta[(1, 0)] * a + self.delta[(1, 1)] * b;
        psi + &self.x * ca + &self.y * cb
    }
}

/// `V · U(s) ψ` with `V` drawn from `seed`.
pub fn perturbed_evolve(
    h: &DilationHamiltonian,
    s: f64,
    psi: &CVec,
    delta1: f64,
    seed: u64,
) -> Result<EvolvedState> {
    perturbed_evolve_stream(h, s, psi, delta1, seed, 0)
}

/// As [`perturbed_evolve`], selecting an independent random stream.
pub fn perturbed_evolve_stream(
    h: &DilationHamiltonian,
    s: f64,
    psi: &CVec,
    delta1: f64,
    seed: u64,
    stream: u64,
) -> Result<EvolvedState> {
    let pert = SelPerturbation::draw(h.dim(), delta1, seed, stream)?;
    let mut out = evolve(h, s, psi)?;
    if let Some(p) = pert {
        out.vector = p.apply(&out.vector);
    }
    Ok(out)
}
