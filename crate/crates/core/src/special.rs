//! Complementary error function and the standard-normal upper tail.
//!
//! `erfc` uses the non-alternating series of `erf` below [`SERIES_CUTOFF`]
//! and the Laplace continued fraction above it, so relative accuracy holds
//! far out in the tail (≈1e-14 up to z = 26, where erfc underflows).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

const SERIES_CUTOFF: f64 = 2.0;
const MAX_TERMS: usize = 5000;
const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// `exp(-z²)` with the rounding error of `z²` folded back in.
fn exp_neg_square(z: f64) -> f64 {
    let hi = z * z;
    let lo = z.mul_add(z, -hi);
    (-hi).exp() * (-lo).exp()
}

/// `erf(z)` for `0 ≤ z < SERIES_CUTOFF`:
/// `erf z = 2/√π · e^{-z²} · Σ 2ⁿ z^{2n+1} / (2n+1)!!`
fn erf_series(z: f64) -> f64 {
    let two_z2 = 2.0 * z * z;
    let mut term = z;
    let mut sum = z;
    for n in 1..MAX_TERMS {
        term *= two_z2 / (2 * n + 1) as f64;
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    FRAC_2_SQRT_PI * exp_neg_square(z) * sum
}

/// `erfc(z)` for `z ≥ SERIES_CUTOFF` by modified Lentz evaluation of
/// `erfc z = e^{-z²}/√π · 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + …))))`.
fn erfc_continued_fraction(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for n in 1..MAX_TERMS {
        let a = n as f64 * 0.5;
        d = z + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = z + a / c;
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
    exp_neg_square(z) / (PI.sqrt() * f)
}

pub fn erfc(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z < 0.0 {
        return 2.0 - erfc(-z);
    }
    if z < SERIES_CUTOFF {
        1.0 - erf_series(z)
    } else if z < 27.3 {
        erfc_continued_fraction(z)
    } else {
        0.0
    }
}

pub fn erf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z < 0.0 {
        -erf(-z)
    } else if z < SERIES_CUTOFF {
        erf_series(z)
    } else {
        1.0 - erfc(z)
    }
}

/// Standard-normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `Φ̄(x) = P(Z > x)` for a standard normal `Z`.
pub fn upper_tail(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Standard-normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    upper_tail(-x)
}

/// Inverse of [`upper_tail`]: the `x` with `Φ̄(x) = p`, for `p ∈ (0, 1)`.
/// Returns `+∞` at 0, `−∞` at 1 and NaN outside `[0, 1]`.
pub fn inverse_upper_tail(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::INFINITY;
    }
    if p == 1.0 {
        return f64::NEG_INFINITY;
    }
    if p == 0.5 {
        return 0.0;
    }
    if p > 0.5 {
        return -inverse_upper_tail(1.0 - p);
    }

    // Abramowitz & Stegun 26.2.23 starting point, |error| < 4.5e-4.
    let t = (-2.0 * p.ln()).sqrt();
    let mut x = t
        - (2.515517 + t * (0.802853 + t * 0.010328))
            / (1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308)));

    // Halley refinement on Φ̄(x) − p.
    for _ in 0..50 {
        let u = (upper_tail(x) - p) / normal_pdf(x);
        let step = u / (1.0 - 0.5 * x * u);
        x += step;
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    x
}
