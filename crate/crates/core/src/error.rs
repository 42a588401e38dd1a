//! Error type shared across the crate.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the supported domain of an operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// The self-consistency equation has no root in the search interval.
    #[error("no root of the renormalization equation in [0,1] (A/omega = {a_over_omega})")]
    NoRoot { a_over_omega: f64 },

    /// The self-consistency equation has more than one root; refusing to
    /// pick one silently.
    #[error("renormalization equation has {} roots in [0,1]: {roots:?}", roots.len())]
    MultipleRoots { roots: Vec<f64> },

    /// A matrix expected to be unitary was not, beyond tolerance.
    #[error("matrix is not unitary: deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    NotUnitary { deviation: f64, tolerance: f64 },

    /// The one-period propagator is proportional to the identity; every
    /// state is cyclic and no eigenbasis is preferred.
    #[error("degenerate operator: traceless part {magnitude:.3e} below tolerance {tolerance:.3e}")]
    Degenerate { magnitude: f64, tolerance: f64 },

    /// The integrator accumulated more unitarity drift than its budget.
    #[error("integration diverged: unitarity error {error:.3e} exceeds budget {budget:.3e}")]
    Diverged { error: f64, budget: f64 },

    /// A bracketing search failed to enclose a root.
    #[error("no root of {what} in [{lo}, {hi}]")]
    BracketFailed { what: &'static str, lo: f64, hi: f64 },

    /// Evaluation requested exactly at a resonance pole that the closed
    /// form cannot represent; the caller must use the residue limit.
    #[error("pole at the harmonic resonance: |rabi_tilde - {pole:.1}*omega| < {window:.1e}*omega")]
    ResonancePole { pole: f64, window: f64 },
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }
}
