//! Bessel functions of the first kind for the orders and arguments used by
//! the renormalized-frame machinery.
//!
//! The argument in this crate is always Z = Aξ/ω, which stays well below 2
//! for the parameter ranges of interest; the series branch is the hot path
//! and the Miller branch is a guarded fallback.

use crate::error::Error;

/// Highest supported order.
pub const MAX_ORDER: u32 = 16;
/// Largest supported |z|.
pub const MAX_ARG: f64 = 20.0;

const SERIES_CUTOFF: f64 = 2.0;
const SERIES_TERMS: usize = 25;

/// Jₙ(z) with absolute error below 1e-12 on the supported domain.
///
/// Ascending power series for |z| ≤ 2, downward Miller recurrence
/// normalized by the Neumann sum J₀ + 2·ΣJ₂ₖ = 1 for larger arguments.
pub fn bessel_j(n: u32, z: f64) -> Result<f64, Error> {
    if n > MAX_ORDER {
        return Err(Error::domain(
            "bessel_j",
            format!("order {n} exceeds supported maximum {MAX_ORDER}"),
        ));
    }
    if !z.is_finite() || z.abs() > MAX_ARG {
        return Err(Error::domain(
            "bessel_j",
            format!("argument {z} outside |z| <= {MAX_ARG}"),
        ));
    }
    // J_n(-z) = (-1)^n J_n(z)
    let sign = if z < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    let z = z.abs();
    let value = if z <= SERIES_CUTOFF {
        series(n, z)
    } else {
        miller(n, z)
    };
    Ok(sign * value)
}

/// Truncated small-argument expansions J₀ ≈ 1−(z/2)², J₁ ≈ z/2,
/// J₂ ≈ (1/2)(z/2)², J₃ ≈ (1/6)(z/2)³, valid for |z| ≤ 1.
///
/// These are the leading-order forms the closed-form resonance laws are
/// built from; they are intentionally *not* full-accuracy evaluations.
pub fn bessel_j_small_z(n: u32, z: f64) -> Result<f64, Error> {
    if n > 3 {
        return Err(Error::domain(
            "bessel_j_small_z",
            format!("order {n} outside 0..=3"),
        ));
    }
    if !z.is_finite() || z.abs() > 1.0 {
        return Err(Error::domain(
            "bessel_j_small_z",
            format!("argument {z} outside |z| <= 1"),
        ));
    }
    let h = z / 2.0;
    Ok(match n {
        0 => 1.0 - h * h,
        1 => h,
        2 => 0.5 * h * h,
        _ => h * h * h / 6.0,
    })
}

fn series(n: u32, z: f64) -> f64 {
    let half = z / 2.0;
    // leading term (z/2)^n / n!
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let mut sum = term;
    let hh = half * half;
    for k in 1..SERIES_TERMS {
        term *= -hh / (k as f64 * (k as f64 + n as f64));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-30) {
            break;
        }
    }
    sum
}

fn miller(n: u32, z: f64) -> f64 {
    let start = (z.ceil() as u32).max(n) + 34;
    let mut fp = 0.0_f64; // f_{m+1}
    let mut fc = 1e-30_f64; // f_m
    let mut target = 0.0;
    let mut neumann = 0.0;
    for m in (0..=start).rev() {
        let fm = (2.0 * (m as f64 + 1.0) / z) * fc - fp;
        fp = fc;
        fc = fm;
        // fc now holds f_m (the candidate J_m up to normalization)
        if m == n {
            target = fc;
        }
        if m > 0 && m % 2 == 0 {
            neumann += 2.0 * fc;
        }
        if fc.abs() > 1e250 {
            fp /= 1e250;
            fc /= 1e250;
            target /= 1e250;
            neumann /= 1e250;
        }
    }
    neumann += fc; // J_0 term
    target / neumann
}
