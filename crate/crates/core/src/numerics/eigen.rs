//! Eigendecomposition of 2×2 unitaries via the SU(2) axis method.
//!
//! Near a harmonic resonance the one-period propagator approaches −I and
//! generic eigensolvers lose every digit of the eigenvectors. Factoring
//! the global phase and reading the rotation axis off the traceless part
//! keeps the eigenvectors well conditioned whenever that part is above a
//! caller-chosen degeneracy tolerance.

use super::{Matrix2, Spinor2, C64};
use crate::error::Error;

/// One eigenvalue/eigenvector pair of a unitary.
#[derive(Debug, Clone, Copy)]
pub struct EigenPair {
    pub value: C64,
    pub vector: Spinor2,
}

/// Both eigenpairs of a unitary `u`, ordered by eigenvalue argument in
/// (−π, π].
///
/// Writes u = e^{iφ}[cos(χ)·I + i·sin(χ)·(n̂·σ)] with φ = arg(det u)/2 and
/// returns the eigenvectors of n̂·σ with eigenvalues e^{i(φ±χ)}. The
/// returned vectors are orthonormal by construction.
///
/// Fails with [`Error::NotUnitary`] when u strays from unitarity by more
/// than 1e-8 entrywise, and with [`Error::Degenerate`] when the traceless
/// part is below `degeneracy_tol` (u ∝ I: every state is cyclic).
pub fn eigensystem_unitary2(u: &Matrix2, degeneracy_tol: f64) -> Result<[EigenPair; 2], Error> {
    let deviation = u.unitarity_deviation();
    const UNITARITY_TOL: f64 = 1e-8;
    if deviation > UNITARITY_TOL {
        return Err(Error::NotUnitary {
            deviation,
            tolerance: UNITARITY_TOL,
        });
    }

    let phi = 0.5 * u.det().arg();
    let v = u.scale(C64::from_polar(1.0, -phi));
    // v ∈ SU(2) up to numerical noise: v = x0·I + i(x·σ) with real x.
    let p = v.pauli_decompose();
    let x0 = p.a0.re;
    let (nx, ny, nz) = (p.ax.im, p.ay.im, p.az.im);
    let r = (nx * nx + ny * ny + nz * nz).sqrt();

    if r < degeneracy_tol {
        return Err(Error::Degenerate {
            magnitude: r,
            tolerance: degeneracy_tol,
        });
    }

    let (nx, ny, nz) = (nx / r, ny / r, nz / r);
    let chi = r.atan2(x0);

    // +1 eigenvector of n̂·σ, using whichever closed form is well
    // conditioned for this hemisphere.
    let plus = if nz >= 0.0 {
        Spinor2::new(C64::new(1.0 + nz, 0.0), C64::new(nx, ny))
    } else {
        Spinor2::new(C64::new(nx, -ny), C64::new(1.0 - nz, 0.0))
    }
    .normalized();
    let minus = plus.orthogonal();

    let pair_plus = EigenPair {
        value: C64::from_polar(1.0, phi + chi),
        vector: plus,
    };
    let pair_minus = EigenPair {
        value: C64::from_polar(1.0, phi - chi),
        vector: minus,
    };

    // order by arg in (−π, π]
    if wrap_pi(pair_plus.value.arg()) <= wrap_pi(pair_minus.value.arg()) {
        Ok([pair_plus, pair_minus])
    } else {
        Ok([pair_minus, pair_plus])
    }
}

fn wrap_pi(x: f64) -> f64 {
    super::fold_principal(x, std::f64::consts::TAU)
}
