// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

//! Discrete factors `L` with `A = L†L` for the supported PDE instances.
//!
//! The dilated state is stored as `ψ = (w, v)` with `w ∈ C^cols` (primary
//! unknowns) followed by `v ∈ C^rows` (flux unknowns). Rectangular factors
//! therefore need no padding: `L̃ = [[0, L†], [−L, 0]]` is already square.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{identity, kron, re, spectral_norm, CMat, CVec, C64};

/// Default cap on any dense dimension built by this crate.
pub const DEFAULT_SIZE_CAP: usize = 1 << 14;

/// Dense-dimension cap, overridable through `KANNAI_SIZE_CAP`.
pub fn size_cap() -> usize {
    std::env::var("KANNAI_SIZE_CAP")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_SIZE_CAP)
}

pub(crate) fn check_cap(dim: usize) -> Result<()> {
    let cap = size_cap();
    if dim > cap {
        Err(Error::SizeLimit { dim, cap })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    HeatDirichlet,
    HeatNeumann,
    Biharmonic,
    HJFourier,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub dim: usize,
    pub n_cells: usize,
    pub h: f64,
}

impl Grid {
    fn unit(n_cells: usize) -> Self {
        Self {
            dim: 1,
            n_cells,
            h: 1.0 / n_cells as f64,
        }
    }
}

/// A factor `L` together with its grid and cached spectral norm.
#[derive(Debug, Clone)]
pub struct DiscreteFactor {
    matrix: CMat,
    grid: Grid,
    kind: FactorKind,
    spectral_norm: f64,
}

impl DiscreteFactor {
    fn from_parts(matrix: CMat, grid: Grid, kind: FactorKind) -> Result<Self> {
        check_cap(matrix.nrows().max(matrix.ncols()))?;
        let spectral_norm = spectral_norm(&matrix);
        Ok(Self {
            matrix,
            grid,
            kind,
            spectral_norm,
        })
    }

    /// Wraps an arbitrary nonempty matrix.
    pub fn custom(matrix: CMat) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::InvalidOperator("factor must be nonempty".into()));
        }
        let n = matrix.ncols();
        Self::from_parts(
            matrix,
            Grid {
                dim: 1,
                n_cells: n,
                h: 1.0,
            },
            FactorKind::Custom,
        )
    }

    /// Real scalar factor `L = [l]`, handy for closed-form checks.
    pub fn scalar(l: f64) -> Self {
        Self::custom(CMat::from_element(1, 1, re(l))).expect("1x1 factor is always valid")
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn kind(&self) -> FactorKind {
        self.kind
    }

    pub fn spectral_norm(&self) -> f64 {
        self.spectral_norm
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Dimension of the dilated space, `rows + cols`.
    pub fn dilated_dim(&self) -> usize {
        self.rows() + self.cols()
    }

    /// The generator `A = L†L`.
    pub fn generator(&self) -> CMat {
        self.matrix.ad_mul(&self.matrix)
    }
}

/// Largest singular value of `m`.
pub fn operator_norm(m: &CMat) -> f64 {
    spectral_norm(m)
}

fn check_cells(n_cells: usize) -> Result<()> {
    if n_cells < 2 {
        Err(Error::DegenerateGrid { n_cells })
    } else {
        Ok(())
    }
}

/// Staggered Dirichlet gradient: `N_x × (N_x − 1)` with
/// `(L w)_{i+1/2} = −(w_{i+1} − w_i)/h` and zero boundary values.
pub fn build_heat_gradient_1d(n_cells: usize) -> Result<DiscreteFactor> {
    check_cells(n_cells)?;
    let grid = Grid::unit(n_cells);
    let inv_h = re(1.0 / grid.h);
    let mut l = CMat::zeros(n_cells, n_cells - 1);
    for i in 0..n_cells - 1 {
        l[(i, i)] = -inv_h;
        l[(i + 1, i)] = inv_h;
    }
    DiscreteFactor::from_parts(l, grid, FactorKind::HeatDirichlet)
}

/// Neumann gradient with `w` at cell centers and the flux on interior nodes:
/// an `(N_x − 1) × N_x` matrix whose kernel is the constant vector.
pub fn build_heat_neumann_1d(n_cells: usize) -> Result<DiscreteFactor> {
    check_cells(n_cells)?;
    let grid = Grid::unit(n_cells);
    let inv_h = re(1.0 / grid.h);
    let mut l = CMat::zeros(n_cells - 1, n_cells);
    for j in 0..n_cells - 1 {
        l[(j, j)] = inv_h;
        l[(j, j + 1)] = -inv_h;
    }
    DiscreteFactor::from_parts(l, grid, FactorKind::HeatNeumann)
}

/// Stacks the directional lifts `I^{⊗(k−1)} ⊗ L1 ⊗ I^{⊗(d−k)}`, direction 1
/// slowest. The identities act on the primary unknowns of `base`.
pub fn lift_to_dimension(base: &DiscreteFactor, d: usize) -> Result<DiscreteFactor> {
    if base.grid.dim != 1 {
        return Err(Error::InvalidArgument(
            "lift expects a 1D base factor".into(),
        ));
    }
    if d == 0 {
        return Err(Error::UnsupportedDimension(0));
    }
    if d == 1 {
        return Ok(base.clone());
    }
    let (r, c) = (base.rows(), base.cols());
    let cols = checked_pow(c, d)?;
    let block_rows = r
        .checked_mul(checked_pow(c, d - 1)?)
        .ok_or(Error::SizeLimit {
            dim: usize::MAX,
            cap: size_cap(),
        })?;
    let rows = block_rows.saturating_mul(d);
    check_cap(rows.max(cols))?;

    let mut out = CMat::zeros(rows, cols);
    for k in 0..d {
        let before = identity(c.pow(k as u32));
        let after = identity(c.pow((d - 1 - k) as u32));
        let lk = kron(&kron(&before, base.matrix()), &after);
        out.view_mut((k * block_rows, 0), (block_rows, cols))
            .copy_from(&lk);
    }
    let grid = Grid {
        dim: d,
        ..base.grid
    };
    DiscreteFactor::from_parts(out, grid, base.kind)
}

fn checked_pow(base: usize, exp: usize) -> Result<usize> {
    base.checked_pow(exp as u32).ok_or(Error::SizeLimit {
        dim: usize::MAX,
        cap: size_cap(),
    })
}

/// Symmetric positive definite `(1/h²) tridiag(−1, 2, −1)` on the
/// `N_x − 1` interior nodes; `A = L²` is the discrete biharmonic.
pub fn build_biharmonic_1d(n_cells: usize) -> Result<DiscreteFactor> {
    check_cells(n_cells)?;
    let grid = Grid::unit(n_cells);
    let n = n_cells - 1;
    let s = 1.0 / (grid.h * grid.h);
    let l = CMat::from_fn(n, n, |i, j| {
        if i == j {
            re(2.0 * s)
        } else if i.abs_diff(j) == 1 {
            re(-s)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    DiscreteFactor::from_parts(l, grid, FactorKind::Biharmonic)
}

/// Kronecker-sum Laplacian `Σ_k I ⊗ … ⊗ L1 ⊗ … ⊗ I` of a square 1D factor.
pub fn kronecker_sum(base: &DiscreteFactor, d: usize) -> Result<DiscreteFactor> {
    if base.rows() != base.cols() {
        return Err(Error::InvalidArgument(
            "Kronecker sum needs a square factor".into(),
        ));
    }
    if d == 0 {
        return Err(Error::UnsupportedDimension(0));
    }
    let n = base.cols();
    let total = checked_pow(n, d)?;
    check_cap(total)?;
    let mut out = CMat::zeros(total, total);
    for k in 0..d {
        let before = identity(n.pow(k as u32));
        let after = identity(n.pow((d - 1 - k) as u32));
        out += kron(&kron(&before, base.matrix()), &after);
    }
    let grid = Grid {
        dim: d,
        ..base.grid
    };
    DiscreteFactor::from_parts(out, grid, base.kind)
}

/// Discrete biharmonic factor in `d` dimensions.
pub fn build_biharmonic(n_cells: usize, d: usize) -> Result<DiscreteFactor> {
    kronecker_sum(&build_biharmonic_1d(n_cells)?, d)
}

/// Integer frequency in FFT order: `0, 1, …, N/2 − 1, −N/2, …, −1`.
pub fn fft_frequency(index: usize, n: usize) -> i64 {
    if index < n / 2 {
        index as i64
    } else {
        index as i64 - n as i64
    }
}

/// Unitary DFT on `N^d` points, axis 1 slowest.
pub fn unitary_dft(n: usize, d: usize) -> Result<CMat> {
    let total = checked_pow(n, d)?;
    check_cap(total)?;
    let scale = 1.0 / (n as f64).sqrt();
    let f1 = CMat::from_fn(n, n, |k, x| {
        let phase = -2.0 * PI * fft_frequency(k, n) as f64 * x as f64 / n as f64;
        C64::from_polar(scale, phase)
    });
    let mut out = CMat::identity(1, 1);
    for _ in 0..d {
        out = kron(&out, &f1);
    }
    Ok(out)
}

/// Fourier symbol `D(k) = ν (2π)² ‖k‖²` for each multi-index, FFT order.
pub fn hj_symbol(n_modes: usize, d: usize, nu: f64) -> Vec<f64> {
    let total = n_modes.pow(d as u32);
    (0..total)
        .map(|mut idx| {
            let mut k2 = 0.0;
            for _ in 0..d {
                let k = fft_frequency(idx % n_modes, n_modes) as f64;
                k2 += k * k;
                idx /= n_modes;
            }
            nu * 4.0 * PI * PI * k2
        })
        .collect()
}

/// Fourier surrogate factor `L_HJ = D^{1/2} U_F` on a periodic grid with an
/// even number of modes per axis.
pub fn build_hj_fourier_factor(n_modes: usize, d: usize, nu: f64) -> Result<DiscreteFactor> {
    if n_modes == 0 || !n_modes.is_multiple_of(2) {
        return Err(Error::UnsupportedGrid(format!(
            "Fourier grid needs an even number of modes, got {n_modes}"
        )));
    }
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "viscosity must be positive, got {nu}"
        )));
    }
    if d == 0 {
        return Err(Error::UnsupportedDimension(0));
    }
    let uf = unitary_dft(n_modes, d)?;
    let symbol = hj_symbol(n_modes, d, nu);
    let mut l = uf;
    for (i, dk) in symbol.iter().enumerate() {
        let s = re(dk.sqrt());
        for j in 0..l.ncols() {
            l[(i, j)] *= s;
        }
    }
    let grid = Grid {
        dim: d,
        n_cells: n_modes,
        h: 1.0 / n_modes as f64,
    };
    DiscreteFactor::from_parts(l, grid, FactorKind::HJFourier)
}

/// Which block of the dilated state a forcing vector lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcingSlot {
    WSlot,
    VSlot,
}

/// How the forcing enters the first-order wave system as a function of `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeProfile {
    LinearInS,
    ConstantInS,
}

/// Forcing values local to their slot (length `cols` for `WSlot`, `rows`
/// for `VSlot`).
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingVector {
    pub values: CVec,
    pub slot: ForcingSlot,
    pub time_profile: TimeProfile,
}

impl ForcingVector {
    /// Interior source `f` entering as `b = (f, 0)`.
    pub fn interior(values: CVec) -> Self {
        Self {
            values,
            slot: ForcingSlot::WSlot,
            time_profile: TimeProfile::LinearInS,
        }
    }

    pub fn zero(factor: &DiscreteFactor) -> Self {
        Self::interior(CVec::zeros(factor.cols()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.norm() == 0.0)
    }

    fn check(&self, factor: &DiscreteFactor) -> Result<()> {
        let expected = match self.slot {
            ForcingSlot::WSlot => factor.cols(),
            ForcingSlot::VSlot => factor.rows(),
        };
        if self.values.len() != expected {
            return Err(Error::ShapeError {
                expected,
                got: self.values.len(),
            });
        }
        Ok(())
    }

    /// The stacked dilated vector `b`.
    pub fn stacked(&self, factor: &DiscreteFactor) -> Result<CVec> {
        self.check(factor)?;
        let mut b = CVec::zeros(factor.dilated_dim());
        let offset = match self.slot {
            ForcingSlot::WSlot => 0,
            ForcingSlot::VSlot => factor.cols(),
        };
        b.rows_mut(offset, self.values.len())
            .copy_from(&self.values);
        Ok(b)
    }

    /// Source `g` seen by the physical equation `u' = −Au + g`.
    ///
    /// An interior source with the linear profile acts directly; a flux-slot
    /// source with the constant profile acts through `L†`. The two remaining
    /// combinations do not reach the primary component.
    pub fn effective_source(&self, factor: &DiscreteFactor) -> Result<CVec> {
        self.check(factor)?;
        Ok(match (self.slot, self.time_profile) {
            (ForcingSlot::WSlot, TimeProfile::LinearInS) => self.values.clone(),
            (ForcingSlot::VSlot, TimeProfile::ConstantInS) => factor.matrix().ad_mul(&self.values),
            _ => CVec::zeros(factor.cols()),
        })
    }
}

/// Constant Dirichlet data entering through the flux slot:
/// `(1/h)(−left·e_first + right·e_last)` on the `v` block.
pub fn dirichlet_boundary_forcing(n_cells: usize, left: f64, right: f64) -> Result<ForcingVector> {
    check_cells(n_cells)?;
    let inv_h = n_cells as f64;
    let mut v = CVec::zeros(n_cells);
    v[0] += re(-left * inv_h);
    v[n_cells - 1] += re(right * inv_h);
    Ok(ForcingVector {
        values: v,
        slot: ForcingSlot::VSlot,
        time_profile: TimeProfile::ConstantInS,
    })
}
