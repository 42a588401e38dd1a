//! The driven two-level Hamiltonian, its renormalized-frame decomposition
//! and the self-consistent solver for the transformation parameter ξ.
//!
//! The unitary frame change with generator S(t) = i(A/2ω)ξ sin(ωt)σx turns
//!
//! ```text
//! H(t) = (Δ/2)σz + (A/2)cos(ωt)σx
//! ```
//!
//! into a renormalized rotating-wave part plus a ladder of harmonic terms
//! with Bessel-function coefficients. Choosing ξ so that the first
//! harmonic's counter-rotating component vanishes,
//!
//! ```text
//! J₁(Aξ/ω)·Δ = A(1−ξ)/2 ≡ Ã/4,
//! ```
//!
//! makes the leading part exactly solvable with renormalized transition
//! frequency Δ̃ = Δ·J₀(Aξ/ω) and drive Ã.

use crate::error::Error;
use crate::numerics::{bessel_j, Matrix2, C64};

/// Physical drive parameters (Δ, A, ω); the single source of truth for a
/// computation. Frequencies are angular and share one arbitrary unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    pub delta: f64,
    pub amplitude: f64,
    pub omega: f64,
}

impl DriveParams {
    pub fn new(delta: f64, amplitude: f64, omega: f64) -> Result<Self, Error> {
        if !(delta.is_finite() && amplitude.is_finite() && omega.is_finite()) {
            return Err(Error::domain("DriveParams", "non-finite parameter"));
        }
        if delta <= 0.0 {
            return Err(Error::domain("DriveParams", format!("delta must be > 0, got {delta}")));
        }
        if amplitude < 0.0 {
            return Err(Error::domain(
                "DriveParams",
                format!("amplitude must be >= 0, got {amplitude}"),
            ));
        }
        if omega <= 0.0 {
            return Err(Error::domain("DriveParams", format!("omega must be > 0, got {omega}")));
        }
        Ok(Self { delta, amplitude, omega })
    }

    /// Convenience constructor with ω = 1.
    pub fn in_omega_units(delta_over_omega: f64, a_over_omega: f64) -> Result<Self, Error> {
        Self::new(delta_over_omega, a_over_omega, 1.0)
    }

    /// Drive period T = 2π/ω.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }
}

/// Quantities of the renormalized frame produced by [`solve_xi`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenormParams {
    /// Transformation parameter ξ ∈ [0, 1].
    pub xi: f64,
    /// Bessel argument Z = Aξ/ω.
    pub z: f64,
    /// Renormalized drive Ã = 2A(1−ξ).
    pub a_tilde: f64,
    /// Renormalized transition frequency Δ̃ = Δ·J₀(Z).
    pub delta_tilde: f64,
    /// Renormalized detuning δ̃ = Δ̃ − ω.
    pub detuning_tilde: f64,
    /// Renormalized Rabi frequency Ω̃ = √(δ̃² + Ã²/4).
    pub rabi_tilde: f64,
}

impl RenormParams {
    /// Assemble the derived quantities from a given ξ. Does not check that
    /// ξ solves the self-consistency equation; [`solve_xi`] is the
    /// canonical constructor.
    pub fn from_xi(p: &DriveParams, xi: f64) -> Result<Self, Error> {
        let z = p.amplitude * xi / p.omega;
        let a_tilde = 2.0 * p.amplitude * (1.0 - xi);
        let delta_tilde = p.delta * bessel_j(0, z)?;
        let detuning_tilde = delta_tilde - p.omega;
        let rabi_tilde = (detuning_tilde * detuning_tilde + 0.25 * a_tilde * a_tilde).sqrt();
        Ok(Self {
            xi,
            z,
            a_tilde,
            delta_tilde,
            detuning_tilde,
            rabi_tilde,
        })
    }

    /// Residual of the self-consistency equation at these parameters.
    pub fn residual(&self, p: &DriveParams) -> f64 {
        let j1 = bessel_j(1, self.z).unwrap_or(f64::NAN);
        j1 * p.delta - 0.5 * p.amplitude * (1.0 - self.xi)
    }
}

/// One higher-harmonic term of the transformed Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicTerm {
    /// Harmonic order n ≥ 2.
    pub order: u32,
    /// Coefficient Δ·Jₙ(Z).
    pub coefficient: f64,
    pub axis: HarmonicAxis,
}

/// Pauli axis carried by a harmonic term: even orders ride on σz with
/// cos(nωt), odd orders on σy with sin(nωt).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HarmonicAxis {
    Z,
    Y,
}

impl HarmonicTerm {
    pub fn new(p: &DriveParams, r: &RenormParams, order: u32) -> Result<Self, Error> {
        if order < 2 {
            return Err(Error::domain(
                "harmonic_term",
                format!("order {order} belongs to the leading part, need n >= 2"),
            ));
        }
        Ok(Self {
            order,
            coefficient: p.delta * bessel_j(order, r.z)?,
            axis: if order.is_multiple_of(2) { HarmonicAxis::Z } else { HarmonicAxis::Y },
        })
    }

    /// The term's matrix at time t.
    pub fn at(&self, p: &DriveParams, t: f64) -> Matrix2 {
        let phase = self.order as f64 * p.omega * t;
        match self.axis {
            HarmonicAxis::Z => Matrix2::sigma_z().scale_re(self.coefficient * phase.cos()),
            HarmonicAxis::Y => Matrix2::sigma_y().scale_re(self.coefficient * phase.sin()),
        }
    }
}

/// Number of scan cells used to verify the root of the self-consistency
/// equation is unique before bisecting.
const XI_SCAN_CELLS: usize = 1024;
const XI_MAX_BISECTIONS: usize = 200;

/// Solve J₁(Aξ/ω)·Δ = A(1−ξ)/2 for ξ ∈ [0, 1] by bisection.
///
/// At A = 0 the equation degenerates to 0 = 0 and the continuum limit
/// ξ = ω/(ω+Δ) is returned so sweeps pass smoothly through zero drive.
/// If the scan finds more than one root the call refuses to pick one and
/// returns them all in the error.
pub fn solve_xi(p: &DriveParams, tol: f64) -> Result<RenormParams, Error> {
    if tol.is_nan() || tol < 1e-14 {
        return Err(Error::domain(
            "solve_xi",
            format!("tolerance {tol} below supported 1e-14"),
        ));
    }
    if p.amplitude == 0.0 {
        let xi = p.omega / (p.omega + p.delta);
        return RenormParams::from_xi(p, xi);
    }

    let f = |xi: f64| -> Result<f64, Error> {
        let z = p.amplitude * xi / p.omega;
        Ok(bessel_j(1, z)? * p.delta - 0.5 * p.amplitude * (1.0 - xi))
    };

    // sign scan: collect every bracketing cell
    let mut brackets = Vec::new();
    let mut prev_x = 0.0;
    let mut prev_f = f(prev_x)?;
    for i in 1..=XI_SCAN_CELLS {
        let x = i as f64 / XI_SCAN_CELLS as f64;
        let fx = f(x)?;
        if prev_f == 0.0 {
            brackets.push((prev_x, prev_x));
        } else if prev_f * fx < 0.0 {
            brackets.push((prev_x, x));
        }
        prev_x = x;
        prev_f = fx;
    }
    if prev_f == 0.0 {
        brackets.push((1.0, 1.0));
    }

    match brackets.len() {
        0 => Err(Error::NoRoot {
            a_over_omega: p.amplitude / p.omega,
        }),
        1 => {
            let (mut lo, mut hi) = brackets[0];
            // a zero-width bracket marks an exact zero hit by the scan
            if hi - lo == 0.0 {
                return RenormParams::from_xi(p, lo);
            }
            let mut flo = f(lo)?;
            for _ in 0..XI_MAX_BISECTIONS {
                let mid = 0.5 * (lo + hi);
                let fmid = f(mid)?;
                if fmid.abs() <= tol || (hi - lo).abs() < f64::EPSILON {
                    return RenormParams::from_xi(p, mid);
                }
                if flo * fmid < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fmid;
                }
            }
            let mid = 0.5 * (lo + hi);
            let res = f(mid)?;
            if res.abs() <= tol {
                RenormParams::from_xi(p, mid)
            } else {
                Err(Error::domain(
                    "solve_xi",
                    format!("bisection stalled with residual {res:.3e} > tol {tol:.1e}"),
                ))
            }
        }
        _ => {
            let mut roots = Vec::new();
            for (lo, hi) in brackets {
                roots.push(0.5 * (lo + hi));
            }
            Err(Error::MultipleRoots { roots })
        }
    }
}

/// Laboratory-frame Hamiltonian (Δ/2)σz + (A/2)cos(ωt)σx.
pub fn hamiltonian_lab(p: &DriveParams, t: f64) -> Matrix2 {
    Matrix2::sigma_z()
        .scale_re(0.5 * p.delta)
        .add(&Matrix2::sigma_x().scale_re(0.5 * p.amplitude * (p.omega * t).cos()))
}

/// dH/dt of the laboratory frame, −(Aω/2)sin(ωt)σx.
pub fn hamiltonian_lab_dot(p: &DriveParams, t: f64) -> Matrix2 {
    Matrix2::sigma_x().scale_re(-0.5 * p.amplitude * p.omega * (p.omega * t).sin())
}

/// Fully transformed Hamiltonian
/// (Δ/2){cos[Z sin ωt]σz + sin[Z sin ωt]σy} + (A/2)(1−ξ)cos(ωt)σx.
pub fn hamiltonian_transformed(p: &DriveParams, r: &RenormParams, t: f64) -> Matrix2 {
    let phase = r.z * (p.omega * t).sin();
    Matrix2::sigma_z()
        .scale_re(0.5 * p.delta * phase.cos())
        .add(&Matrix2::sigma_y().scale_re(0.5 * p.delta * phase.sin()))
        .add(&Matrix2::sigma_x().scale_re(0.5 * p.amplitude * (1.0 - r.xi) * (p.omega * t).cos()))
}

/// The conjugated laboratory Hamiltonian e^{S}·H·e^{−S} (no frame-velocity
/// term): (Δ/2){cos[Z sin ωt]σz + sin[Z sin ωt]σy} + (A/2)cos(ωt)σx.
///
/// This is the operator whose expectation along transformed-frame states
/// equals ⟨H⟩ along laboratory-frame states, pointwise in t.
pub fn hamiltonian_conjugated(p: &DriveParams, r: &RenormParams, t: f64) -> Matrix2 {
    let phase = r.z * (p.omega * t).sin();
    Matrix2::sigma_z()
        .scale_re(0.5 * p.delta * phase.cos())
        .add(&Matrix2::sigma_y().scale_re(0.5 * p.delta * phase.sin()))
        .add(&Matrix2::sigma_x().scale_re(0.5 * p.amplitude * (p.omega * t).cos()))
}

/// First-harmonic truncation of [`hamiltonian_conjugated`]:
/// (Δ̃/2)σz + (Ã/4)sin(ωt)σy + (A/2)cos(ωt)σx.
///
/// The analytic dynamic phases are exact integrals of this operator along
/// the leading-order evolution.
pub fn hamiltonian_conjugated_truncated(p: &DriveParams, r: &RenormParams, t: f64) -> Matrix2 {
    Matrix2::sigma_z()
        .scale_re(0.5 * r.delta_tilde)
        .add(&Matrix2::sigma_y().scale_re(0.25 * r.a_tilde * (p.omega * t).sin()))
        .add(&Matrix2::sigma_x().scale_re(0.5 * p.amplitude * (p.omega * t).cos()))
}

/// Leading (rotating-wave-form) part of the transformed Hamiltonian:
/// (Δ̃/2)σz + (Ã/4)[cos(ωt)σx + sin(ωt)σy].
pub fn hamiltonian_chrw(p: &DriveParams, r: &RenormParams, t: f64) -> Matrix2 {
    let quarter = 0.25 * r.a_tilde;
    Matrix2::sigma_z()
        .scale_re(0.5 * r.delta_tilde)
        .add(&Matrix2::sigma_x().scale_re(quarter * (p.omega * t).cos()))
        .add(&Matrix2::sigma_y().scale_re(quarter * (p.omega * t).sin()))
}

/// One harmonic term's matrix at time t; n ≥ 2.
pub fn harmonic_term(p: &DriveParams, r: &RenormParams, n: u32, t: f64) -> Result<Matrix2, Error> {
    Ok(HarmonicTerm::new(p, r, n)?.at(p, t))
}

/// Frame generator S(t) = i(A/2ω)ξ sin(ωt)σx; anti-Hermitian, vanishing
/// at t = 0 and t = T.
pub fn generator_s(p: &DriveParams, r: &RenormParams, t: f64) -> Matrix2 {
    let coeff = 0.5 * p.amplitude / p.omega * r.xi * (p.omega * t).sin();
    Matrix2::sigma_x().scale(C64::new(0.0, coeff))
}

/// e^{−S(t)} in closed form (S ∝ iσx): cos(φ)·I − i·sin(φ)·σx with
/// φ = (A/2ω)ξ sin(ωt).
pub fn exp_minus_s(p: &DriveParams, r: &RenormParams, t: f64) -> Matrix2 {
    let phi = 0.5 * p.amplitude / p.omega * r.xi * (p.omega * t).sin();
    Matrix2::identity()
        .scale_re(phi.cos())
        .add(&Matrix2::sigma_x().scale(C64::new(0.0, -phi.sin())))
}

/// Default truncation order for reconstructing the transformed
/// Hamiltonian from its harmonic ladder; J₉(Z) is below 1e-12 for the
/// parameter ranges this crate targets.
pub const HARMONIC_TRUNCATION: u32 = 8;
