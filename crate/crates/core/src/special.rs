// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

//! Error function family.
//!
//! Implemented in-crate so that the offline-kernel accuracy contract can be
//! certified without relying on a platform libm. For `|x| <= 2` the
//! all-positive series
//!
//! ```text
//! erf(x) = 2/sqrt(pi) * exp(-x^2) * sum_n 2^n x^(2n+1) / (1*3*...*(2n+1))
//! ```
//!
//! is used; beyond that the Laplace continued fraction for `erfc` is evaluated
//! with the modified Lentz algorithm.

use std::f64::consts::PI;

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const SERIES_LIMIT: f64 = 2.0;

/// `exp(-x^2)` with the rounding error of `x*x` compensated.
pub fn exp_neg_sq(x: f64) -> f64 {
    let p = x * x;
    let tail = x.mul_add(x, -p);
    let base = (-p).exp();
    base - base * tail
}

fn erf_series(x: f64) -> f64 {
    let two_x2 = 2.0 * x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0u32;
    loop {
        n += 1;
        term *= two_x2 / f64::from(2 * n + 1);
        sum += term;
        if term < 1e-17 * sum || n > 200 {
            break;
        }
    }
    FRAC_2_SQRT_PI * exp_neg_sq(x) * sum
}

fn erfc_continued_fraction(x: f64) -> f64 {
    // erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..5000 {
        let a = f64::from(n) / 2.0;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    exp_neg_sq(x) / (PI.sqrt() * f)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x <= SERIES_LIMIT {
        1.0 - erf_series(x)
    } else if x < 27.3 {
        erfc_continued_fraction(x)
    } else {
        0.0
    }
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return -erf(-x);
    }
    if x <= SERIES_LIMIT {
        erf_series(x)
    } else {
        1.0 - erfc(x)
    }
}

/// `Γ(d/2) / Γ((d-1)/2)` for integer `d >= 2`, by the half-integer
/// recurrence `r(d+2) = r(d) * d / (d-1)`.
pub fn half_gamma_ratio(d: usize) -> f64 {
    assert!(d >= 2, "half_gamma_ratio needs d >= 2");
    let sqrt_pi = PI.sqrt();
    let (mut r, mut k) = if d.is_multiple_of(2) {
        (1.0 / sqrt_pi, 2usize)
    } else {
        (sqrt_pi / 2.0, 3usize)
    };
    while k < d {
        r *= k as f64 / (k as f64 - 1.0);
        k += 2;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erfc_symmetry_and_limits() {
        assert_eq!(erfc(0.0), 1.0);
        assert!((erfc(-3.0) - (2.0 - erfc(3.0))).abs() < 1e-16);
        assert_eq!(erfc(40.0), 0.0);
        assert!((erfc(-40.0) - 2.0).abs() < 1e-16);
        assert!(erfc(f64::NAN).is_nan());
    }

    #[test]
    fn erf_is_odd() {
        for x in [0.1, 0.7, 1.9, 2.1, 4.0] {
            assert!((erf(-x) + erf(x)).abs() < 1e-16);
        }
    }

    #[test]
    fn branches_agree_at_switch_point() {
        let below = 1.0 - erf_series(SERIES_LIMIT);
        let above = erfc_continued_fraction(SERIES_LIMIT);
        assert!(((below - above) / above).abs() < 1e-13);
    }

    #[test]
    fn gamma_ratio_small_cases() {
        // d = 2: 1/sqrt(pi); d = 3: sqrt(pi)/2; d = 4: Γ(2)/Γ(3/2) = 2/sqrt(pi).
        let sp = PI.sqrt();
        assert!((half_gamma_ratio(2) - 1.0 / sp).abs() < 1e-15);
        assert!((half_gamma_ratio(3) - sp / 2.0).abs() < 1e-15);
        assert!((half_gamma_ratio(4) - 2.0 / sp).abs() < 1e-15);
        assert!((half_gamma_ratio(5) - 3.0 * sp / 4.0).abs() < 1e-15);
    }
}
