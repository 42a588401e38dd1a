//! Closed-form engine for the renormalized rotating-wave Hamiltonian:
//! analytic one-period propagator, cyclic states, quasienergies and
//! total/dynamic/geometric phases, plus the plain rotating-wave forms for
//! comparison.
//!
//! Both engines are specializations of one structure: a Hamiltonian
//! (P/2)σz + (B/4)(e^{−iωt}σ₊ + e^{iωt}σ₋) whose propagator is exactly
//! solvable, paired with a dynamic-phase integrand
//! (P/2)σz + (Q/2)sin(ωt)σy + (R/2)cos(ωt)σx. Along a cyclic state the
//! Bloch vector is static in the rotating frame, which collapses the
//! dynamic phase to
//!
//! ```text
//! α₊ = (T/2Ω)[P·δ + (Q+R)·B/4],   δ = P − ω,  Ω = √(δ² + B²/4).
//! ```

use crate::error::Error;
use crate::model::{DriveParams, RenormParams};
use crate::numerics::{bessel_j, fold_principal, fold_two_pi, Matrix2, Spinor2, C64};

/// Total, dynamic and geometric phase of one branch, with the quasienergy.
///
/// `theta`, `alpha` and `gamma_unfolded` are raw radians satisfying
/// γ = θ − α exactly; `gamma` is folded to [0, 2π) and `q` to the
/// principal branch (−ω/2, ω/2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPhases {
    pub theta: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub gamma_unfolded: f64,
    pub q: f64,
}

/// Phase bundle for both branches; the minus branch is the sign mirror of
/// the plus branch before folding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChrwPhases {
    pub plus: BranchPhases,
    pub minus: BranchPhases,
}

impl ChrwPhases {
    pub(crate) fn from_plus_parts(theta: f64, alpha: f64, omega: f64) -> Self {
        let period = std::f64::consts::TAU / omega;
        let make = |theta: f64, alpha: f64| {
            let gamma_unfolded = theta - alpha;
            BranchPhases {
                theta,
                alpha,
                gamma: fold_two_pi(gamma_unfolded),
                gamma_unfolded,
                q: fold_principal(-theta / period, omega),
            }
        };
        ChrwPhases {
            plus: make(theta, alpha),
            minus: make(-theta, -alpha),
        }
    }
}

/// Internal parametrization shared by the renormalized and plain
/// rotating-wave closed forms.
struct RwaLike {
    /// σz coefficient (×2) of both the Hamiltonian and the integrand.
    p_eff: f64,
    /// Coupling B: the solvable part reads (B/4)(e^{−iωt}σ₊ + h.c.).
    b: f64,
    /// σy integrand coefficient (×2).
    q_weight: f64,
    /// σx integrand coefficient (×2).
    r_weight: f64,
    omega: f64,
}

impl RwaLike {
    fn detuning(&self) -> f64 {
        self.p_eff - self.omega
    }

    fn rabi(&self) -> f64 {
        let d = self.detuning();
        (d * d + 0.25 * self.b * self.b).sqrt()
    }

    fn phases(&self) -> ChrwPhases {
        let period = std::f64::consts::TAU / self.omega;
        let d = self.detuning();
        let rabi = self.rabi();
        let theta = 0.5 * (rabi - self.omega) * period;
        let alpha =
            0.5 * period / rabi * (self.p_eff * d + 0.25 * (self.q_weight + self.r_weight) * self.b);
        ChrwPhases::from_plus_parts(theta, alpha, self.omega)
    }
}

fn chrw_rwa_like(p: &DriveParams, r: &RenormParams) -> RwaLike {
    RwaLike {
        p_eff: r.delta_tilde,
        b: r.a_tilde,
        q_weight: 0.5 * r.a_tilde,
        r_weight: p.amplitude,
        omega: p.omega,
    }
}

/// Analytic propagator of the leading (rotating-wave-form) Hamiltonian at
/// time t; unitary to machine precision.
pub fn u0_analytic(r: &RenormParams, p: &DriveParams, t: f64) -> Matrix2 {
    u0_rwa_like(r.detuning_tilde, r.a_tilde, p.omega, t)
}

/// Propagator of (P/2)σz + (B/4)(e^{−iωt}σ₊ + e^{iωt}σ₋), written with
/// detuning δ = P − ω.
pub(crate) fn u0_rwa_like(detuning: f64, b: f64, omega: f64, t: f64) -> Matrix2 {
    let rabi = (detuning * detuning + 0.25 * b * b).sqrt();
    let half = 0.5 * rabi * t;
    let cos = half.cos();
    // sin(Ωt/2)/Ω with a series guard at Ω → 0
    let sin_over = if rabi * t.abs() > 1e-150 {
        half.sin() / rabi
    } else {
        0.5 * t
    };
    let ep = C64::from_polar(1.0, 0.5 * omega * t);
    let em = ep.conj();
    let i = C64::new(0.0, 1.0);
    let diag = C64::new(cos, 0.0);
    let off = -i * C64::new(0.5 * b * sin_over, 0.0);
    let dphase = i * C64::new(detuning * sin_over, 0.0);
    Matrix2::new(
        em * (diag - dphase),
        em * off,
        ep * off,
        ep * (diag + dphase),
    )
}

/// Cyclic initial states |±⟩ of the leading propagator, normalized and
/// orthogonal.
///
/// |+⟩ ∝ (Ω̃ − δ̃, −Ã/2); when that form hits its pole (Ω̃ = δ̃) the minus
/// state ∝ (Ω̃ + δ̃, Ã/2) is built first and |+⟩ is taken as its orthogonal
/// complement, so the pair is well conditioned for every δ̃.
pub fn chrw_cyclic_states(r: &RenormParams) -> Result<(Spinor2, Spinor2), Error> {
    cyclic_pair(r.detuning_tilde, r.a_tilde, r.rabi_tilde)
}

pub(crate) fn cyclic_pair(
    detuning: f64,
    b: f64,
    rabi: f64,
) -> Result<(Spinor2, Spinor2), Error> {
    if rabi <= 0.0 {
        return Err(Error::Degenerate {
            magnitude: rabi,
            tolerance: f64::MIN_POSITIVE,
        });
    }
    if detuning <= 0.0 {
        let plus = Spinor2::from_re(rabi - detuning, -0.5 * b).normalized();
        let minus = plus.orthogonal();
        Ok((plus, minus))
    } else {
        let minus = Spinor2::from_re(rabi + detuning, 0.5 * b).normalized();
        // complement of |−⟩ is −|+⟩; flip the sign to keep real components
        // matching the direct form
        let plus = minus.orthogonal().scale(C64::new(-1.0, 0.0));
        Ok((plus, minus))
    }
}

/// Closed-form phases and quasienergies of the renormalized engine.
///
/// θ± = ±(Ω̃−ω)T/2, α± = ±(Ã/2Ω̃)(Δ̃δ̃/Ã + A/4 + Ã/8)T, γ = θ − α.
pub fn chrw_phases(p: &DriveParams, r: &RenormParams) -> ChrwPhases {
    chrw_rwa_like(p, r).phases()
}

/// The renormalized engine evaluated at an arbitrary transformation
/// parameter ξ, not necessarily the self-consistent root: the first
/// harmonic's counter-rotating component is dropped and the co-rotating
/// coupling A(1−ξ) + 2ΔJ₁(Aξ/ω) kept.
///
/// At the self-consistent ξ this coincides with [`chrw_phases`]; at ξ = 0
/// it is exactly the plain rotating-wave approximation.
pub fn chrw_phases_at_xi(p: &DriveParams, xi: f64) -> Result<ChrwPhases, Error> {
    let z = p.amplitude * xi / p.omega;
    let j1 = bessel_j(1, z)?;
    let like = RwaLike {
        p_eff: p.delta * bessel_j(0, z)?,
        b: p.amplitude * (1.0 - xi) + 2.0 * p.delta * j1,
        q_weight: 2.0 * p.delta * j1,
        r_weight: p.amplitude,
        omega: p.omega,
    };
    Ok(like.phases())
}

/// Plain rotating-wave phases: γ± = ±(1 − δ/Ω)π after folding, with
/// δ = Δ − ω and Ω = √(δ² + A²/4); θ and q from the same closed form with
/// unrenormalized symbols.
pub fn rwa_phases(p: &DriveParams) -> ChrwPhases {
    let period = p.period();
    let d = p.delta - p.omega;
    let rabi = (d * d + 0.25 * p.amplitude * p.amplitude).sqrt();
    let theta = 0.5 * (rabi - p.omega) * period;
    let gamma_unfolded = -std::f64::consts::PI * (1.0 + d / rabi);
    let alpha = theta - gamma_unfolded;
    ChrwPhases::from_plus_parts(theta, alpha, p.omega)
}

/// Cyclic states of the plain rotating-wave propagator.
pub fn rwa_cyclic_states(p: &DriveParams) -> Result<(Spinor2, Spinor2), Error> {
    let d = p.delta - p.omega;
    let rabi = (d * d + 0.25 * p.amplitude * p.amplitude).sqrt();
    cyclic_pair(d, p.amplitude, rabi)
}

/// One-period rotating-wave propagator (for oracle tests and the exact
/// engine's reference states).
pub fn u0_rwa(p: &DriveParams, t: f64) -> Matrix2 {
    u0_rwa_like(p.delta - p.omega, p.amplitude, p.omega, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::solve_xi;
    use crate::numerics::eigensystem_unitary2;
    use std::f64::consts::PI;

    const TOL: f64 = 1e-14;

    fn setup(delta: f64, a: f64) -> (DriveParams, RenormParams) {
        let p = DriveParams::in_omega_units(delta, a).unwrap();
        let r = solve_xi(&p, TOL).unwrap();
        (p, r)
    }

    #[test]
    fn u0_identity_at_zero_and_unitary() {
        let (p, r) = setup(1.0, 1.0);
        let u = u0_analytic(&r, &p, 0.0);
        assert!(u.sub(&Matrix2::identity()).norm_inf() < 1e-15);
        for k in 1..12 {
            let u = u0_analytic(&r, &p, 0.37 * k as f64);
            assert!(u.unitarity_deviation() < 1e-14);
        }
    }

    #[test]
    fn u0_minus_identity_at_double_resonance() {
        // Ω̃ = 2ω makes U0(T) = −I exactly
        let p = DriveParams::in_omega_units(3.0, 0.5).unwrap();
        let mut r = solve_xi(&p, TOL).unwrap();
        // synthesize Ω̃ = 2 keeping δ̃, Ã consistent
        let d = r.detuning_tilde;
        let b = 2.0 * (4.0 - d * d).sqrt();
        r.a_tilde = b;
        r.rabi_tilde = (d * d + 0.25 * b * b).sqrt();
        assert!((r.rabi_tilde - 2.0).abs() < 1e-12);
        let u = u0_analytic(&r, &p, p.period());
        assert!(u.add(&Matrix2::identity()).norm_inf() < 1e-12);
        // Pauli view: a0 = −1, traceless part zero
        let d = u.pauli_decompose();
        assert!((d.a0 + C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(d.ax.norm() < 1e-12 && d.ay.norm() < 1e-12 && d.az.norm() < 1e-12);
    }

    #[test]
    fn u0_satisfies_schrodinger_equation() {
        // finite-difference check of i dU0/dt = H_chrw U0
        let (p, r) = setup(1.3, 0.9);
        let h = 1e-6;
        let mut worst = 0.0_f64;
        for k in 0..1000 {
            let t = 1e-3 + k as f64 * (p.period() - 2e-3) / 999.0;
            let du = u0_analytic(&r, &p, t + h)
                .sub(&u0_analytic(&r, &p, t - h))
                .scale_re(1.0 / (2.0 * h));
            let lhs = du.scale(C64::new(0.0, 1.0));
            let rhs = crate::model::hamiltonian_chrw(&p, &r, t).mul(&u0_analytic(&r, &p, t));
            worst = worst.max(lhs.sub(&rhs).norm_inf());
        }
        assert!(worst < 1e-6, "max Schrodinger residual {worst}");
    }

    #[test]
    fn cyclic_states_zero_detuning() {
        // δ̃ = 0 → (1, ∓1)/√2 up to global phase
        let r = RenormParams {
            xi: 0.3,
            z: 0.3,
            a_tilde: 1.4,
            delta_tilde: 1.0,
            detuning_tilde: 0.0,
            rabi_tilde: 0.7,
        };
        let (plus, minus) = chrw_cyclic_states(&r).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        assert!(plus.distance_up_to_phase(&Spinor2::from_re(s, -s)) < 1e-14);
        assert!(minus.distance_up_to_phase(&Spinor2::from_re(s, s)) < 1e-14);
    }

    #[test]
    fn cyclic_states_sigma_z_limit() {
        // Ã → 0 with δ̃ > 0: states collapse onto the poles
        let r = RenormParams {
            xi: 0.2,
            z: 0.0,
            a_tilde: 0.0,
            delta_tilde: 3.0,
            detuning_tilde: 2.0,
            rabi_tilde: 2.0,
        };
        let (plus, minus) = chrw_cyclic_states(&r).unwrap();
        assert!(plus.distance_up_to_phase(&Spinor2::down()) < 1e-14);
        assert!(minus.distance_up_to_phase(&Spinor2::up()) < 1e-14);
        // and with δ̃ < 0 the roles swap
        let r = RenormParams {
            detuning_tilde: -2.0,
            delta_tilde: -1.0,
            ..r
        };
        let (plus, minus) = chrw_cyclic_states(&r).unwrap();
        assert!(plus.distance_up_to_phase(&Spinor2::up()) < 1e-14);
        assert!(minus.distance_up_to_phase(&Spinor2::down()) < 1e-14);
    }

    #[test]
    fn cyclic_states_match_eigensystem() {
        let (p, r) = setup(1.0, 1.0);
        let u_t = u0_analytic(&r, &p, p.period());
        let pairs = eigensystem_unitary2(&u_t, 1e-12).unwrap();
        let (plus, minus) = chrw_cyclic_states(&r).unwrap();
        for state in [plus, minus] {
            let matched = pairs
                .iter()
                .any(|pr| pr.vector.distance_up_to_phase(&state) < 1e-10);
            assert!(matched, "closed-form cyclic state missing from eigensystem");
        }
    }

    #[test]
    fn cyclic_states_are_fixed_points() {
        for (d, a) in [(1.0, 1.0), (2.9, 1.0), (0.5, 2.0), (4.0, 1.5)] {
            let (p, r) = setup(d, a);
            let u_t = u0_analytic(&r, &p, p.period());
            let phases = chrw_phases(&p, &r);
            let (plus, minus) = chrw_cyclic_states(&r).unwrap();
            for (state, q) in [(plus, phases.plus.q), (minus, phases.minus.q)] {
                let evolved = u_t.apply(&state);
                let expect = state.scale(C64::from_polar(1.0, -q * p.period()));
                let err = (evolved.c1 - expect.c1).norm().max((evolved.c2 - expect.c2).norm());
                assert!(err < 1e-10, "fixed point violated at ({d},{a}): {err}");
            }
        }
    }

    #[test]
    fn phases_zero_drive() {
        // A = 0: no drive, γ = 0 mod 2π
        let p = DriveParams::in_omega_units(2.3, 0.0).unwrap();
        let r = solve_xi(&p, TOL).unwrap();
        let ph = chrw_phases(&p, &r);
        let g = ph.plus.gamma.min(2.0 * PI - ph.plus.gamma);
        assert!(g < 1e-10, "gamma = {}", ph.plus.gamma);
    }

    #[test]
    fn quasienergy_at_double_resonance() {
        // Ω̃ = 2ω puts |q±| at ω/2 on the principal branch
        let p = DriveParams::in_omega_units(3.0, 0.5).unwrap();
        let r = solve_xi(&p, TOL).unwrap();
        let d = r.detuning_tilde;
        let b = 2.0 * (4.0 - d * d).sqrt();
        let r = RenormParams {
            a_tilde: b,
            rabi_tilde: (d * d + 0.25 * b * b).sqrt(),
            ..r
        };
        let ph = chrw_phases(&p, &r);
        assert!((ph.plus.q.abs() - 0.5).abs() < 1e-12);
        assert!((ph.minus.q.abs() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn decomposition_and_antisymmetry() {
        for (d, a) in [(0.7, 1.0), (1.0, 2.0), (2.9, 1.0), (5.1, 0.4)] {
            let (p, r) = setup(d, a);
            let ph = chrw_phases(&p, &r);
            assert!((ph.plus.gamma_unfolded - (ph.plus.theta - ph.plus.alpha)).abs() < 1e-12);
            assert!((ph.minus.theta + ph.plus.theta).abs() < 1e-12);
            assert!((ph.minus.alpha + ph.plus.alpha).abs() < 1e-12);
            assert!((ph.minus.gamma_unfolded + ph.plus.gamma_unfolded).abs() < 1e-12);
            // complementarity after folding (away from γ ≡ 0)
            if ph.plus.gamma > 1e-6 {
                assert!((ph.plus.gamma + ph.minus.gamma - 2.0 * PI).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rwa_values() {
        // δ = 0 → γ± = ±π (folded: both π)
        let p = DriveParams::in_omega_units(1.0, 0.8).unwrap();
        let ph = rwa_phases(&p);
        assert!((ph.plus.gamma - PI).abs() < 1e-12);
        assert!((ph.minus.gamma - PI).abs() < 1e-12);
        // A → 0 with Δ > ω: γ₊ → 0 (mod 2π)
        let p = DriveParams::in_omega_units(2.0, 1e-6).unwrap();
        let ph = rwa_phases(&p);
        let g = ph.plus.gamma.min(2.0 * PI - ph.plus.gamma);
        assert!(g < 1e-3);
        // literal closed form
        let p = DriveParams::in_omega_units(1.7, 1.2).unwrap();
        let d = 0.7;
        let rabi = (d * d + 0.36_f64).sqrt();
        let want = (1.0 - d / rabi) * PI;
        assert!((rwa_phases(&p).plus.gamma - want).abs() < 1e-12);
    }

    #[test]
    fn rwa_reduction_identity() {
        // the engine at ξ = 0 reproduces the independent rotating-wave
        // closed forms to machine precision
        for i in 0..100 {
            let delta = 0.1 + 5.9 * i as f64 / 99.0;
            for a in [0.5, 1.0, 2.0] {
                let p = DriveParams::in_omega_units(delta, a).unwrap();
                let via_xi = chrw_phases_at_xi(&p, 0.0).unwrap();
                let direct = rwa_phases(&p);
                assert!(
                    (via_xi.plus.gamma - direct.plus.gamma).abs() < 1e-12,
                    "gamma mismatch at delta={delta}, A={a}: {} vs {}",
                    via_xi.plus.gamma,
                    direct.plus.gamma
                );
                assert!((via_xi.plus.theta - direct.plus.theta).abs() < 1e-12);
                assert!((via_xi.plus.alpha - direct.plus.alpha).abs() < 1e-12);
                assert!((via_xi.plus.q - direct.plus.q).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn chrw_phases_at_self_consistent_xi_match() {
        let (p, r) = setup(1.7, 1.1);
        let a = chrw_phases(&p, &r);
        let b = chrw_phases_at_xi(&p, r.xi).unwrap();
        // identical up to the solve tolerance entering through Ã
        assert!((a.plus.gamma - b.plus.gamma).abs() < 1e-10);
        assert!((a.plus.theta - b.plus.theta).abs() < 1e-10);
    }
}
