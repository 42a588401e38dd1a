//! Two-component complex state vectors.

use super::C64;

/// A complex 2-vector (qubit amplitude pair).
///
/// Normalization is always explicit: constructors never rescale, and
/// [`Spinor2::normalized`] returns a fresh value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor2 {
    pub c1: C64,
    pub c2: C64,
}

impl Spinor2 {
    pub fn new(c1: C64, c2: C64) -> Self {
        Self { c1, c2 }
    }

    pub fn from_re(c1: f64, c2: f64) -> Self {
        Self::new(C64::new(c1, 0.0), C64::new(c2, 0.0))
    }

    /// Basis state (1, 0).
    pub fn up() -> Self {
        Self::from_re(1.0, 0.0)
    }

    /// Basis state (0, 1).
    pub fn down() -> Self {
        Self::from_re(0.0, 1.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self::new(self.c1 / n, self.c2 / n)
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// Inner product ⟨self|other⟩ (conjugate-linear in `self`).
    pub fn dot(&self, other: &Spinor2) -> C64 {
        self.c1.conj() * other.c1 + self.c2.conj() * other.c2
    }

    /// |⟨self|other⟩|.
    pub fn overlap(&self, other: &Spinor2) -> f64 {
        self.dot(other).norm()
    }

    /// The orthogonal complement (-b̄, ā) of (a, b); unit norm if `self` is.
    pub fn orthogonal(&self) -> Spinor2 {
        Spinor2::new(-self.c2.conj(), self.c1.conj())
    }

    pub fn scale(&self, s: C64) -> Spinor2 {
        Spinor2::new(self.c1 * s, self.c2 * s)
    }

    /// Bloch vector (⟨σx⟩, ⟨σy⟩, ⟨σz⟩) of the (assumed unit-norm) state.
    pub fn bloch(&self) -> (f64, f64, f64) {
        let cross = self.c1.conj() * self.c2;
        (
            2.0 * cross.re,
            2.0 * cross.im,
            self.c1.norm_sqr() - self.c2.norm_sqr(),
        )
    }

    /// Squared moduli (|c1|², |c2|²).
    pub fn moduli_sqr(&self) -> (f64, f64) {
        (self.c1.norm_sqr(), self.c2.norm_sqr())
    }

    /// Maximum componentwise distance to `other` after aligning global
    /// phase so that ⟨self|other⟩ becomes real non-negative.
    pub fn distance_up_to_phase(&self, other: &Spinor2) -> f64 {
        let d = self.dot(other);
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let a = other.scale(phase.conj());
        ((self.c1 - a.c1).norm()).max((self.c2 - a.c2).norm())
    }
}
