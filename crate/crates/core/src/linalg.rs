// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra helpers on top of `nalgebra`.
//!
//! Everything in this crate is desk scale, so matrices are stored densely and
//! spectral factorizations are computed exactly once and reused.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Imaginary unit.
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn real_vector(values: &[f64]) -> CVec {
    CVec::from_iterator(values.len(), values.iter().map(|&x| re(x)))
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Kronecker product `a ⊗ b` with `a` as the slow index.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMat::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    if m.iter().all(|z| z.norm() == 0.0) {
        return 0.0;
    }
    let svd = m.clone().svd(false, false);
    svd.singular_values.iter().copied().fold(0.0, f64::max)
}

/// Frobenius norm of `m - m†`.
pub fn hermitian_residual(m: &CMat) -> f64 {
    (m - m.adjoint()).norm()
}

/// Frobenius norm of `u†u - I`.
pub fn unitarity_residual(u: &CMat) -> f64 {
    let n = u.ncols();
    (u.adjoint() * u - identity(n)).norm()
}

/// Spectral factorization `M = V diag(λ) V†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    values: DVector<f64>,
    vectors: CMat,
}

impl HermitianEigen {
    /// Factorizes `m`, rejecting inputs whose anti-Hermitian part exceeds
    /// `1e-10` relative to `‖m‖_F`.
    pub fn new(m: &CMat) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::ShapeError {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let scale = m.norm().max(f64::MIN_POSITIVE);
        let resid = hermitian_residual(m);
        if resid > 1e-10 * scale {
            return Err(Error::InvalidOperator(format!(
                "matrix is not Hermitian (residual {resid:.3e})"
            )));
        }
        let n = m.nrows();
        if n == 0 {
            return Ok(Self {
                values: DVector::zeros(0),
                vectors: CMat::zeros(0, 0),
            });
        }
        // Symmetrize so the solver sees an exactly Hermitian input.
        let sym = (m + m.adjoint()) * re(0.5);
        let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0).ok_or_else(|| {
            Error::NumericalBreakdown("Hermitian eigensolver did not converge".into())
        })?;
        Ok(Self {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn vectors(&self) -> &CMat {
        &self.vectors
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Coordinates of `v` in the eigenbasis, `V† v`.
    pub fn to_eigenbasis(&self, v: &CVec) -> CVec {
        self.vectors.ad_mul(v)
    }

    /// Inverse of [`Self::to_eigenbasis`].
    pub fn from_eigenbasis(&self, c: &CVec) -> CVec {
        &self.vectors * c
    }

    /// `f(M) v` evaluated spectrally.
    pub fn apply_fn(&self, v: &CVec, f: impl Fn(f64) -> C64) -> CVec {
        let mut c = self.to_eigenbasis(v);
        for (ci, &lam) in c.iter_mut().zip(self.values.iter()) {
            *ci *= f(lam);
        }
        self.from_eigenbasis(&c)
    }

    /// `f(M)` as a dense matrix.
    pub fn matrix_fn(&self, f: impl Fn(f64) -> C64) -> CMat {
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let fj = f(lam);
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMat {
        self.matrix_fn(re)
    }
}

/// Principal square root of a Hermitian positive semidefinite matrix.
/// Eigenvalues in `[-tol, 0)` are clamped to zero.
pub fn psd_sqrt(m: &CMat) -> Result<CMat> {
    let eig = HermitianEigen::new(m)?;
    let tol = 1e-10 * eig.max_abs().max(1.0);
    if eig.min() < -tol {
        return Err(Error::InvalidOperator(format!(
            "matrix is not positive semidefinite (min eigenvalue {:.3e})",
            eig.min()
        )));
    }
    Ok(eig.matrix_fn(|lam| re(lam.max(0.0).sqrt())))
}

/// Dense matrix exponential by scaling and squaring (Padé). Used only as an
/// independent oracle for the spectral propagator.
pub fn expm(m: &CMat) -> CMat {
    m.exp()
}

/// Solves `a x = b` for Hermitian positive definite `a` by Cholesky.
pub fn cholesky_solve(a: &CMat, b: &CVec) -> Result<CVec> {
    if a.nrows() != b.len() {
        return Err(Error::ShapeError {
            expected: a.nrows(),
            got: b.len(),
        });
    }
    let eig = HermitianEigen::new(a)?;
    let scale = eig.max_abs().max(f64::MIN_POSITIVE);
    if eig.min() <= 1e-12 * scale {
        return Err(Error::SingularSystem);
    }
    let chol = a.clone().cholesky().ok_or(Error::SingularSystem)?;
    Ok(chol.solve(b))
}

/// Lower-triangular Cholesky factor `G` with `a = G G†`, or `None` when `a`
/// is not numerically positive definite.
pub fn cholesky_factor(a: &CMat) -> Option<CMat> {
    a.clone().cholesky().map(|c| c.l())
}

/// `‖a - b‖ / ‖b‖` in the Euclidean norm; falls back to the absolute error
/// when `b` vanishes.
pub fn rel_error(a: &CVec, b: &CVec) -> f64 {
    let nb = b.norm();
    let diff = (a - b).norm();
    if nb == 0.0 {
        diff
    } else {
        diff / nb
    }
}
