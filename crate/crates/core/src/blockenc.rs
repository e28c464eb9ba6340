// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

//! Explicit block-encoding unitaries for small instances.
//!
//! Registers are ordered with ancillas most significant, so the
//! `⟨0^a| · |0^a⟩` projection is the leading principal block. Encodings are
//! materialized only to check the algebra; the simulation pipeline itself uses
//! exact exponentials.

use crate::error::{Error, Result};
use crate::linalg::{identity, kron, psd_sqrt, re, spectral_norm, CMat, C64, I};
use crate::operators::check_cap;

/// Largest system dimension for which encodings are materialized.
pub const MAX_ENCODED_DIM: usize = 64;

#[derive(Debug, Clone)]
pub struct BlockEncoding {
    pub unitary: CMat,
    pub ancilla_count: usize,
    pub normalization: f64,
    pub target: CMat,
}

impl BlockEncoding {
    pub fn system_dim(&self) -> usize {
        self.target.nrows()
    }

    /// `(⟨0^a| ⊗ I) U (|0^a⟩ ⊗ I)`.
    pub fn projected_block(&self) -> CMat {
        let n = self.system_dim();
        self.unitary.view((0, 0), (n, n)).into_owned()
    }

    /// Frobenius distance between the projected block and `target/α`.
    pub fn block_residual(&self) -> f64 {
        let scaled = &self.target * re(1.0 / self.normalization);
        (self.projected_block() - scaled).norm()
    }

    pub fn unitarity_residual(&self) -> f64 {
        crate::linalg::unitarity_residual(&self.unitary)
    }
}

/// Zero-pads `m` to a square matrix.
pub fn pad_square(m: &CMat) -> CMat {
    let n = m.nrows().max(m.ncols());
    let mut out = CMat::zeros(n, n);
    out.view_mut((0, 0), m.shape()).copy_from(m);
    out
}

/// One-ancilla unitary `[[A, √(I−AA†)], [√(I−A†A), −A†]]` with `A = L/α`,
/// after zero-padding `L` to square.
pub fn unitary_completion(l: &CMat, alpha: f64) -> Result<BlockEncoding> {
    let norm = spectral_norm(l);
    if !(alpha > 0.0) || alpha < norm * (1.0 - 1e-12) {
        return Err(Error::NormalizationTooSmall { alpha, norm });
    }
    let target = pad_square(l);
    let n = target.nrows();
    if n > MAX_ENCODED_DIM {
        return Err(Error::SizeLimit {
            dim: n,
            cap: MAX_ENCODED_DIM,
        });
    }
    let a = &target * re(1.0 / alpha);
    let id = identity(n);
    let top_right = psd_sqrt(&(&id - &a * a.adjoint()))?;
    let bottom_left = psd_sqrt(&(&id - a.adjoint() * &a))?;
    let mut u = CMat::zeros(2 * n, 2 * n);
    u.view_mut((0, 0), (n, n)).copy_from(&a);
    u.view_mut((0, n), (n, n)).copy_from(&top_right);
    u.view_mut((n, 0), (n, n)).copy_from(&bottom_left);
    u.view_mut((n, n), (n, n)).copy_from(&(-a.adjoint()));
    Ok(BlockEncoding {
        unitary: u,
        ancilla_count: 1,
        normalization: alpha,
        target,
    })
}

/// Phase gate `diag(1, i)` on the position qubit.
pub fn position_phase() -> CMat {
    CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![re(1.0), I]))
}

/// Reorders `(a, pos, x)` into the block index of an `(pos, a, x)` operator.
fn swap_leading(m_pos_first: &CMat, anc: usize, sys: usize) -> CMat {
    // Input is indexed (pos, a, x); output is indexed (a, pos, x).
    let dim = 2 * anc * sys;
    let idx = |a: usize, p: usize, x: usize| (a * 2 + p) * sys + x;
    let src = |a: usize, p: usize, x: usize| (p * anc + a) * sys + x;
    let mut out = CMat::zeros(dim, dim);
    for a1 in 0..anc {
        for p1 in 0..2 {
            for x1 in 0..sys {
                for a2 in 0..anc {
                    for p2 in 0..2 {
                        for x2 in 0..sys {
                            out[(idx(a1, p1, x1), idx(a2, p2, x2))] =
                                m_pos_first[(src(a1, p1, x1), src(a2, p2, x2))];
                        }
                    }
                }
            }
        }
    }
    out
}

/// Block-encoding of the dilation `H = [[0, iL†], [−iL, 0]]` from one of `L`.
///
/// `W = |0⟩⟨1| ⊗ U_L† + |1⟩⟨0| ⊗ U_L` on `(pos, a, x)` encodes
/// `H̃₀ = |0⟩⟨1| ⊗ L† + |1⟩⟨0| ⊗ L`; conjugating by `P† · P` on the position
/// qubit turns it into `H`. An idle qubit is prepended so that the selector
/// can flag its unwanted branch, giving `a_H = a_L + 1`.
pub fn build_ham_h(be_l: &BlockEncoding) -> Result<BlockEncoding> {
    let sys = be_l.system_dim();
    let anc = 1usize << be_l.ancilla_count;
    let u = &be_l.unitary;
    let n = u.nrows();
    if n != anc * sys {
        return Err(Error::ShapeError {
            expected: anc * sys,
            got: n,
        });
    }
    let mut w = CMat::zeros(2 * n, 2 * n);
    w.view_mut((0, n), (n, n)).copy_from(&u.adjoint());
    w.view_mut((n, 0), (n, n)).copy_from(u);
    let p = kron(&position_phase(), &identity(n));
    let conj = p.adjoint() * w * p;
    let ham = swap_leading(&conj, anc, sys);
    let unitary = kron(&identity(2), &ham);

    let l = &be_l.target;
    let mut h = CMat::zeros(2 * sys, 2 * sys);
    h.view_mut((0, sys), (sys, sys))
        .copy_from(&(l.adjoint() * I));
    h.view_mut((sys, 0), (sys, sys)).copy_from(&(l * (-I)));
    Ok(BlockEncoding {
        unitary,
        ancilla_count: be_l.ancilla_count + 1,
        normalization: be_l.normalization,
        target: h,
    })
}

/// `H̃₀ = |0⟩⟨1| ⊗ L† + |1⟩⟨0| ⊗ L` for a square `L`.
pub fn symmetric_dilation(l: &CMat) -> CMat {
    let n = l.nrows();
    let mut h = CMat::zeros(2 * n, 2 * n);
    h.view_mut((0, n), (n, n)).copy_from(&l.adjoint());
    h.view_mut((n, 0), (n, n)).copy_from(l);
    h
}

/// Block-encoding of `H_S = Σ_j s_j |j⟩⟨j| ⊗ H` with normalization
/// `α_H · max|s_j|` and one additional γ qubit.
///
/// Per node, `O_R = [[e^{iθ}a, −b], [b, e^{−iθ}a]]` and
/// `O_L = [[a, −b], [b, a]]` with `a = √|γ|`, `b = √(1−|γ|)`, `γ = s/s_max`
/// and `θ ∈ {0, π}` carrying the sign. The γ = 1 branch flips the idle
/// ancilla of `be_h` so it drops out of the projection.
pub fn build_selector_blockenc(nodes: &[f64], be_h: &BlockEncoding) -> Result<BlockEncoding> {
    let m = nodes.len();
    let s_max = nodes.iter().map(|s| s.abs()).fold(0.0, f64::max);
    if m == 0 || s_max == 0.0 {
        return Err(Error::DegenerateSelector);
    }
    if be_h.ancilla_count == 0 {
        return Err(Error::InvalidArgument(
            "selector needs an encoding with an idle ancilla".into(),
        ));
    }
    let sys = be_h.system_dim();
    let anc = 1usize << be_h.ancilla_count;
    let inner = anc * sys;
    let total = 2 * inner * m;
    check_cap(total)?;

    // Second branch: X on the idle (most significant) ancilla of be_h.
    let half = inner / 2;
    let mut flip = CMat::zeros(inner, inner);
    for i in 0..half {
        flip[(i, i + half)] = re(1.0);
        flip[(i + half, i)] = re(1.0);
    }
    let branches = [&be_h.unitary, &flip];

    // Index (γ, ancillas, j, signal) with ancillas of be_h split from signal.
    let index = |g: usize, a: usize, j: usize, x: usize| ((g * anc + a) * m + j) * sys + x;
    let mut u = CMat::zeros(total, total);
    for (j, &s) in nodes.iter().enumerate() {
        let gamma = s / s_max;
        let a = gamma.abs().sqrt();
        let b = (1.0 - gamma.abs()).max(0.0).sqrt();
        let phase = if gamma < 0.0 { re(-1.0) } else { re(1.0) };
        let o_r = [[phase * a, re(-b)], [re(b), phase.conj() * a]];
        let o_l = [[re(a), re(-b)], [re(b), re(a)]];
        for g1 in 0..2 {
            for g2 in 0..2 {
                // (O_L† C O_R)[g1, g2] = Σ_k conj(O_L[k][g1]) · M_k · O_R[k][g2]
                let coeffs: Vec<C64> = (0..2).map(|k| o_l[k][g1].conj() * o_r[k][g2]).collect();
                for r in 0..inner {
                    for c in 0..inner {
                        let val = coeffs[0] * branches[0][(r, c)] + coeffs[1] * branches[1][(r, c)];
                        if val == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let (a1, x1) = (r / sys, r % sys);
                        let (a2, x2) = (c / sys, c % sys);
                        u[(index(g1, a1, j, x1), index(g2, a2, j, x2))] = val;
                    }
                }
            }
        }
    }

    let mut target = CMat::zeros(m * sys, m * sys);
    for (j, &s) in nodes.iter().enumerate() {
        target
            .view_mut((j * sys, j * sys), (sys, sys))
            .copy_from(&(&be_h.target * re(s)));
    }
    Ok(BlockEncoding {
        unitary: u,
        ancilla_count: be_h.ancilla_count + 1,
        normalization: be_h.normalization * s_max,
        target,
    })
}
