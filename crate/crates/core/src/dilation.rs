// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

//! Hermitian dilation `H = iL̃` of a factor `L`.

use crate::error::Result;
use crate::linalg::{CMat, HermitianEigen, I};
use crate::operators::{check_cap, DiscreteFactor};

/// `H = i·[[0, L†], [−L, 0]]` on the stacked `(w, v)` space with its cached
/// eigendecomposition.
#[derive(Debug, Clone)]
pub struct DilationHamiltonian {
    h: CMat,
    factor: DiscreteFactor,
    spectrum: HermitianEigen,
}

/// Anti-Hermitian generator `L̃` of the first-order wave system.
pub fn skew_generator(factor: &DiscreteFactor) -> CMat {
    let (r, c) = (factor.rows(), factor.cols());
    let l = factor.matrix();
    let mut out = CMat::zeros(r + c, r + c);
    out.view_mut((0, c), (c, r)).copy_from(&l.adjoint());
    out.view_mut((c, 0), (r, c)).copy_from(&(-l));
    out
}

/// Builds `H` and factorizes it once.
pub fn hermitian_dilation(factor: &DiscreteFactor) -> Result<DilationHamiltonian> {
    check_cap(factor.dilated_dim())?;
    let h = skew_generator(factor) * I;
    let spectrum = HermitianEigen::new(&h)?;
    Ok(DilationHamiltonian {
        h,
        factor: factor.clone(),
        spectrum,
    })
}

impl DilationHamiltonian {
    pub fn matrix(&self) -> &CMat {
        &self.h
    }

    pub fn factor(&self) -> &DiscreteFactor {
        &self.factor
    }

    pub fn spectrum(&self) -> &HermitianEigen {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    /// `‖H‖`, equal to `‖L‖` because the spectrum is `± σ(L)` plus zeros.
    pub fn norm(&self) -> f64 {
        self.factor.spectral_norm()
    }

    /// Size of the primary (`w`) block.
    pub fn primary_dim(&self) -> usize {
        self.factor.cols()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_residual, re};
    use crate::operators::build_heat_gradient_1d;

    #[test]
    fn scalar_dilation() {
        let d = hermitian_dilation(&DiscreteFactor::scalar(2.0)).unwrap();
        let h = d.matrix();
        assert_eq!(h[(0, 1)], I * 2.0);
        assert_eq!(h[(1, 0)], -I * 2.0);
        assert_eq!(h[(0, 0)], re(0.0));
        let mut ev: Vec<f64> = d.spectrum().values().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] + 2.0).abs() < 1e-14 && (ev[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_factor_gives_zero_hamiltonian() {
        let d = hermitian_dilation(&DiscreteFactor::scalar(0.0)).unwrap();
        assert_eq!(d.matrix().norm(), 0.0);
        assert_eq!(d.norm(), 0.0);
    }

    #[test]
    fn dirichlet_norm_and_reconstruction() {
        let f = build_heat_gradient_1d(4).unwrap();
        let d = hermitian_dilation(&f).unwrap();
        assert_eq!(d.dim(), 7);
        assert!((d.spectrum().max_abs() - 7.391036).abs() < 1e-6);
        assert!(hermitian_residual(d.matrix()) <= 1e-12 * d.norm());
        let rec = d.spectrum().reconstruct();
        assert!((rec - d.matrix()).norm() <= 1e-11 * d.matrix().norm());
    }
}
