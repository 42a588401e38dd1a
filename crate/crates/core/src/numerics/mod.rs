//! Complex 2×2 primitives, Bessel functions of the first kind and a
//! robust eigensolver for unitaries near degeneracy.
//!
//! Everything here is a pure value type; operations never mutate shared
//! state and are safe to call concurrently.

mod bessel;
mod eigen;
mod matrix;
mod spinor;

pub use bessel::{bessel_j, bessel_j_small_z};
pub use eigen::{eigensystem_unitary2, EigenPair};
pub use matrix::{Matrix2, PauliDecomp};
pub use spinor::Spinor2;

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

/// The imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);

/// Fold an angle into `[0, 2π)`.
pub fn fold_two_pi(x: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut y = x.rem_euclid(tau);
    // rem_euclid can return tau itself when x is a tiny negative number.
    if y >= tau {
        y -= tau;
    }
    y
}

/// Fold `x` into the principal interval `(-half, half]`.
pub fn fold_principal(x: f64, period: f64) -> f64 {
    let n = (x / period - 0.5).ceil();
    x - period * n
}

/// Distance between two angles on a circle of circumference `period`.
pub fn circle_distance(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}
