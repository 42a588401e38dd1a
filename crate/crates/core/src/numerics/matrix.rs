//! Complex 2×2 matrices with the checks needed for evolution operators:
//! unitarity and hermiticity diagnostics, Pauli decomposition and polar
//! projection onto the closest unitary.

use super::{Spinor2, C64};

/// Row-major complex 2×2 matrix [[a, b], [c, d]].
///
/// Used both for unitaries (propagators) and for Hermitian generators;
/// `is_unitary` / `unitarity_error` check the former invariant at a
/// caller-specified tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

/// Coefficients of M = a0·I + ax·σx + ay·σy + az·σz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliDecomp {
    pub a0: C64,
    pub ax: C64,
    pub ay: C64,
    pub az: C64,
}

impl Matrix2 {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { a, b, c, d }
    }

    pub fn zero() -> Self {
        let z = C64::new(0.0, 0.0);
        Self::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        Self::new(
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        )
    }

    pub fn sigma_x() -> Self {
        Self::new(
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        )
    }

    pub fn sigma_y() -> Self {
        Self::new(
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        )
    }

    pub fn sigma_z() -> Self {
        Self::new(
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-1.0, 0.0),
        )
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Self::new(a, C64::new(0.0, 0.0), C64::new(0.0, 0.0), d)
    }

    /// Real linear combination rx·σx + ry·σy + rz·σz.
    pub fn from_pauli_vector(rx: f64, ry: f64, rz: f64) -> Self {
        Self::new(
            C64::new(rz, 0.0),
            C64::new(rx, -ry),
            C64::new(rx, ry),
            C64::new(-rz, 0.0),
        )
    }

    pub fn add(&self, o: &Matrix2) -> Matrix2 {
        Matrix2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }

    pub fn sub(&self, o: &Matrix2) -> Matrix2 {
        Matrix2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }

    pub fn scale(&self, s: C64) -> Matrix2 {
        Matrix2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn scale_re(&self, s: f64) -> Matrix2 {
        self.scale(C64::new(s, 0.0))
    }

    pub fn mul(&self, o: &Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn adjoint(&self) -> Matrix2 {
        Matrix2::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, v: &Spinor2) -> Spinor2 {
        Spinor2::new(self.a * v.c1 + self.b * v.c2, self.c * v.c1 + self.d * v.c2)
    }

    /// Max entry modulus.
    pub fn norm_inf(&self) -> f64 {
        self.a
            .norm()
            .max(self.b.norm())
            .max(self.c.norm())
            .max(self.d.norm())
    }

    pub fn norm_frobenius(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()).sqrt()
    }

    /// Max entrywise deviation of U†U from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        self.adjoint()
            .mul(self)
            .sub(&Matrix2::identity())
            .norm_inf()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    /// |det(U†U) − 1|, the unitarity figure of merit reported by the
    /// propagator.
    pub fn unitarity_error(&self) -> f64 {
        (self.adjoint().mul(self).det() - C64::new(1.0, 0.0)).norm()
    }

    /// Max entrywise deviation from hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.sub(&self.adjoint()).norm_inf()
    }

    /// Pauli decomposition a0 = tr(M)/2, ak = tr(σk·M)/2.
    pub fn pauli_decompose(&self) -> PauliDecomp {
        let half = C64::new(0.5, 0.0);
        PauliDecomp {
            a0: (self.a + self.d) * half,
            ax: (self.b + self.c) * half,
            ay: (self.b - self.c) * half * C64::new(0.0, 1.0),
            az: (self.a - self.d) * half,
        }
    }

    /// Closest unitary in Frobenius norm (polar factor), together with the
    /// Frobenius distance ‖M − U‖ to it.
    ///
    /// Computed as U = M·(M†M)^{-1/2} with the Hermitian inverse square
    /// root in closed form. Fails only for singular M.
    pub fn polar_unitary(&self) -> Option<(Matrix2, f64)> {
        let h = self.adjoint().mul(self);
        // h is Hermitian positive semi-definite: [[p, q], [q̄, r]].
        let p = h.a.re;
        let r = h.d.re;
        let q = h.b;
        let tr = p + r;
        let det = (h.det()).re;
        let disc = (0.25 * (p - r) * (p - r) + q.norm_sqr()).sqrt();
        let l1 = 0.5 * tr + disc;
        let l2 = 0.5 * tr - disc;
        if l1 <= 0.0 || l2 <= 0.0 || det <= 0.0 {
            return None;
        }
        // (M†M)^{-1/2} = (h + sqrt(l1 l2) I) / (sqrt(l1 l2) (sqrt(l1)+sqrt(l2))) ... derived from
        // f(h) = alpha h + beta I with f(l_i) = 1/sqrt(l_i).
        let (s1, s2) = (l1.sqrt(), l2.sqrt());
        let (alpha, beta) = if (l1 - l2).abs() > 1e-30 * tr {
            let a = (1.0 / s1 - 1.0 / s2) / (l1 - l2);
            let b = 1.0 / s1 - a * l1;
            (a, b)
        } else {
            (0.0, 1.0 / s1)
        };
        let inv_sqrt = h
            .scale_re(alpha)
            .add(&Matrix2::identity().scale_re(beta));
        let u = self.mul(&inv_sqrt);
        let dist = self.sub(&u).norm_frobenius();
        Some((u, dist))
    }
}

impl PauliDecomp {
    /// Rebuild a0·I + ax·σx + ay·σy + az·σz.
    pub fn reconstruct(&self) -> Matrix2 {
        let i = C64::new(0.0, 1.0);
        Matrix2::new(
            self.a0 + self.az,
            self.ax - i * self.ay,
            self.ax + i * self.ay,
            self.a0 - self.az,
        )
    }
}
