//! Perturbation theory on top of the renormalized frame.
//!
//! Treating the harmonic ladder of the transformed Hamiltonian as a
//! perturbation of the solvable leading part gives closed-form first-order
//! corrections at one period,
//!
//! ```text
//! U₁(T) = i·k·sin(Ω̃T/2)·(−(δ̃/Ω̃)σx + (Ã/2Ω̃)σz),
//! k     = Δ[J₂(Z)Ã − J₃(Z)(Ω̃+δ̃)] / (Ω̃² − 4ω²),
//! ```
//!
//! modified cyclic states, geometric phases and quasienergies that resolve
//! the 3rd-harmonic resonance (Ω̃ = 2ω), together with the closed-form
//! resonance laws (resonance point, slope of the geometric phase, avoided
//! crossing gap) and a numerically integrated series of first- and
//! second-order harmonic corrections for the 5th-harmonic regime.
//!
//! k diverges at the resonance point while k₀ = k·(Ω̃−2ω) stays finite;
//! every closed form here is evaluated through the (k₀, Ω̃−2ω)
//! parametrization, which is exact and smooth across the pole.

use crate::chrw::{u0_analytic, ChrwPhases};
use crate::error::Error;
use crate::model::{harmonic_term, solve_xi, DriveParams, RenormParams};
use crate::numerics::{bessel_j, circle_distance, fold_principal, Matrix2, Spinor2, C64};

/// |Ω̃ − 2ω| window (in units of ω) inside which the bare closed forms for
/// the single-harmonic corrections refuse to evaluate.
pub const POLE_WINDOW: f64 = 1e-10;

/// Default quadrature grid for the harmonic-correction series.
pub const DEFAULT_W_GRID: usize = 50_000;
/// Minimum allowed grid for the series quadrature.
pub const MIN_W_GRID: usize = 20_000;

/// First-order perturbation strength and its finite residue at resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationK {
    /// k of the combined first-order correction; ±∞ at the resonance point.
    pub k: f64,
    /// k₀ = k·(Ω̃ − 2ω), finite everywhere; equals the quasienergy gap at
    /// the resonance point.
    pub k0: f64,
    pub includes_h3: bool,
}

/// Resonance characterization, in units of ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceReport {
    /// Harmonic order n of the resonance Ω̃ = 2nω.
    pub harmonic_order: u32,
    /// Resonance point Δres/ω.
    pub delta_res: f64,
    /// Quasienergy gap Ξ/ω at the resonance point.
    pub gap: f64,
    /// |dγ/d(Δ/ω)| at the resonance point.
    pub slope: f64,
    /// The small expansion quantity x = 3A²/(32ω²).
    pub x: f64,
    pub engine: ResonanceEngine,
}

/// Where a resonance report came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResonanceEngine {
    ClosedForm,
    ExactNumeric,
}

impl std::fmt::Display for ResonanceEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ResonanceEngine::ClosedForm => write!(f, "closed_form"),
            ResonanceEngine::ExactNumeric => write!(f, "exact_numeric"),
        }
    }
}

/// sin(x·s)/x with the removable singularity filled in.
fn sin_over(x: f64, s: f64) -> f64 {
    let arg = x * s;
    if arg.abs() < 1e-8 {
        s * (1.0 - arg * arg / 6.0)
    } else {
        arg.sin() / x
    }
}

fn sign_or_plus(u: f64) -> f64 {
    if u < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// The combined first-order coefficient k (and its residue k₀) built from
/// the 2nd and, optionally, 3rd harmonic corrections.
pub fn combined_k(
    p: &DriveParams,
    r: &RenormParams,
    include_h3: bool,
) -> Result<PerturbationK, Error> {
    let j2 = bessel_j(2, r.z)?;
    let mut numerator = j2 * r.a_tilde;
    if include_h3 {
        let j3 = bessel_j(3, r.z)?;
        numerator -= j3 * (r.rabi_tilde + r.detuning_tilde);
    }
    let k0 = p.delta * numerator / (r.rabi_tilde + 2.0 * p.omega);
    let u = r.rabi_tilde - 2.0 * p.omega;
    let k = if u == 0.0 {
        // signed infinity marker; the residue carries the physics
        f64::INFINITY.copysign(k0)
    } else {
        k0 / u
    };
    Ok(PerturbationK {
        k,
        k0,
        includes_h3: include_h3,
    })
}

fn pole_guard(p: &DriveParams, r: &RenormParams) -> Result<f64, Error> {
    let u = r.rabi_tilde - 2.0 * p.omega;
    if u.abs() < POLE_WINDOW * p.omega {
        Err(Error::ResonancePole {
            pole: 2.0,
            window: POLE_WINDOW,
        })
    } else {
        Ok(u)
    }
}

/// Axis matrix −(δ̃/Ω̃)σx + (Ã/2Ω̃)σz shared by the one-period corrections.
fn correction_axis(r: &RenormParams) -> Matrix2 {
    Matrix2::sigma_x()
        .scale_re(-r.detuning_tilde / r.rabi_tilde)
        .add(&Matrix2::sigma_z().scale_re(0.5 * r.a_tilde / r.rabi_tilde))
}

/// One-period first-order correction from the 2nd harmonic term:
/// U₁z(T) = i·ΔJ₂(Z)Ã·sin(Ω̃T/2)/(Ω̃²−4ω²)·(−(δ̃/Ω̃)σx + (Ã/2Ω̃)σz).
pub fn u1z_at_period(p: &DriveParams, r: &RenormParams) -> Result<Matrix2, Error> {
    let u = pole_guard(p, r)?;
    let coeff = p.delta * bessel_j(2, r.z)? * r.a_tilde * (0.5 * r.rabi_tilde * p.period()).sin()
        / (u * (r.rabi_tilde + 2.0 * p.omega));
    Ok(correction_axis(r).scale(C64::new(0.0, coeff)))
}

/// One-period first-order correction from the 3rd harmonic term (closed
/// form valid near Ω̃ ≈ 2ω):
/// U₁y(T) = −i·ΔJ₃(Z)(Ω̃+δ̃)·sin(Ω̃T/2)/(Ω̃²−4ω²)·(−(δ̃/Ω̃)σx + (Ã/2Ω̃)σz).
pub fn u1y_at_period(p: &DriveParams, r: &RenormParams) -> Result<Matrix2, Error> {
    let u = pole_guard(p, r)?;
    let coeff = -p.delta
        * bessel_j(3, r.z)?
        * (r.rabi_tilde + r.detuning_tilde)
        * (0.5 * r.rabi_tilde * p.period()).sin()
        / (u * (r.rabi_tilde + 2.0 * p.omega));
    Ok(correction_axis(r).scale(C64::new(0.0, coeff)))
}

/// Perturbed one-period evolution operator and its polar projection.
#[derive(Debug, Clone)]
pub struct PerturbedU {
    /// Closest unitary to the truncated operator.
    pub u: Matrix2,
    /// The truncated operator itself (not exactly unitary).
    pub raw: Matrix2,
    /// Frobenius distance between the two; a perturbation-quality metric.
    pub projection_distance: f64,
}

/// Ũ(T) = −cos(Ω̃T/2) + (i/Ω̃)sin(Ω̃T/2)[(Ã/2 − kδ̃)σx + (δ̃ + kÃ/2)σz],
/// evaluated through the residue parametrization
/// k·sin(Ω̃T/2) = k₀·sin((Ω̃−2ω)T/2)/(Ω̃−2ω), which is exact for every Ω̃
/// and finite at the resonance point.
pub fn perturbed_u_at_period(
    p: &DriveParams,
    r: &RenormParams,
    include_h3: bool,
) -> Result<PerturbedU, Error> {
    let pk = combined_k(p, r, include_h3)?;
    let period = p.period();
    let u = r.rabi_tilde - 2.0 * p.omega;
    // sin(Ω̃T/2) = sin((Ω̃−2ω)T/2) and cos likewise, since ωT = 2π
    let half = 0.5 * u * period;
    let sin_half = half.sin();
    let cos_half = half.cos();
    let k_sin = pk.k0 * sin_over(u, 0.5 * period);

    let sx = 0.5 * r.a_tilde * sin_half - k_sin * r.detuning_tilde;
    let sz = r.detuning_tilde * sin_half + 0.5 * k_sin * r.a_tilde;
    let raw = Matrix2::identity().scale_re(-cos_half).add(
        &Matrix2::sigma_x()
            .scale_re(sx / r.rabi_tilde)
            .add(&Matrix2::sigma_z().scale_re(sz / r.rabi_tilde))
            .scale(C64::new(0.0, 1.0)),
    );
    let (unitary, projection_distance) = raw
        .polar_unitary()
        .ok_or_else(|| Error::domain("perturbed_u_at_period", "singular truncated operator"))?;
    Ok(PerturbedU {
        u: unitary,
        raw,
        projection_distance,
    })
}

/// Cyclic states of the perturbed one-period operator, normalized and
/// orthogonal.
///
/// The plus state is ∝ (−δ̃ + √(1+k²)Ω̃ − kÃ/2, −Ã/2 + kδ̃); multiplying
/// through by (Ω̃−2ω) turns it into a residue form regular at the
/// resonance point, where the states become the |k| → ∞ limit pair (the
/// limit taken from the Ω̃ > 2ω side).
pub fn perturbed_cyclic_states(
    p: &DriveParams,
    r: &RenormParams,
    include_h3: bool,
) -> Result<(Spinor2, Spinor2), Error> {
    let pk = combined_k(p, r, include_h3)?;
    let u = r.rabi_tilde - 2.0 * p.omega;
    if pk.k0 == 0.0 && u == 0.0 {
        return crate::chrw::chrw_cyclic_states(r);
    }
    let root = (u * u + pk.k0 * pk.k0).sqrt() * sign_or_plus(u);
    let c1 = -r.detuning_tilde * u + root * r.rabi_tilde - 0.5 * pk.k0 * r.a_tilde;
    let c2 = -0.5 * r.a_tilde * u + pk.k0 * r.detuning_tilde;
    let mut plus = Spinor2::from_re(c1, c2).normalized();
    if u < 0.0 {
        // undo the sign flip introduced by scaling with a negative u
        plus = plus.scale(C64::new(-1.0, 0.0));
    }
    Ok((plus, plus.orthogonal()))
}

/// Geometric phases with the first-order harmonic corrections:
///
/// γ± = ±[ θ  −  (1/√(1+k²))(Δ̃δ̃/Ã + Ã/8 + A/4)(ÃT/2Ω̃)
///           −  (k/√(1+k²))(A/4 − Ã/8)(2ω − δ̃)·sin(Ω̃T)/(Ω̃²−4ω²) ],
///
/// with θ = (Ω̃−ω)T/2 unchanged from the uncorrected engine. Exactly at
/// the resonance point both correction factors vanish and γ± = ±π mod 2π.
pub fn perturbed_phases(
    p: &DriveParams,
    r: &RenormParams,
    include_h3: bool,
) -> Result<ChrwPhases, Error> {
    let pk = combined_k(p, r, include_h3)?;
    let u = r.rabi_tilde - 2.0 * p.omega;
    let denom = (u * u + pk.k0 * pk.k0).sqrt();
    let (inv_kappa, kappa_frac) = if denom == 0.0 {
        (1.0, 0.0)
    } else if u == 0.0 {
        // resonance point: crossing center
        (0.0, 0.0)
    } else {
        (u.abs() / denom, sign_or_plus(u) * pk.k0 / denom)
    };
    Ok(phases_from_kappa(p, r, inv_kappa, kappa_frac, u))
}

/// The same closed form with the perturbation strength injected directly;
/// at k = 0 this reduces exactly to the uncorrected engine's phases.
pub fn perturbed_phases_at_k(p: &DriveParams, r: &RenormParams, k: f64) -> ChrwPhases {
    let u = r.rabi_tilde - 2.0 * p.omega;
    let kappa = (1.0 + k * k).sqrt();
    phases_from_kappa(p, r, 1.0 / kappa, k / kappa, u)
}

fn phases_from_kappa(
    p: &DriveParams,
    r: &RenormParams,
    inv_kappa: f64,
    kappa_frac: f64,
    u: f64,
) -> ChrwPhases {
    let period = p.period();
    let theta = 0.5 * (r.rabi_tilde - p.omega) * period;
    // (Δ̃δ̃/Ã + Ã/8 + A/4)·(ÃT/2Ω̃) written without the Ã pole
    let smooth = (r.delta_tilde * r.detuning_tilde
        + (0.125 * r.a_tilde + 0.25 * p.amplitude) * r.a_tilde)
        * period
        / (2.0 * r.rabi_tilde);
    // sin(Ω̃T)/(Ω̃²−4ω²) = [sin((Ω̃−2ω)T)/(Ω̃−2ω)] / (Ω̃+2ω), exact
    let resonant = (0.25 * p.amplitude - 0.125 * r.a_tilde)
        * (2.0 * p.omega - r.detuning_tilde)
        * sin_over(u, period)
        / (r.rabi_tilde + 2.0 * p.omega);
    let alpha = inv_kappa * smooth + kappa_frac * resonant;
    ChrwPhases::from_plus_parts(theta, alpha, p.omega)
}

/// Quasienergies and modified Rabi frequency with the avoided crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbedQuasienergies {
    pub q_plus: f64,
    pub q_minus: f64,
    /// Modified Rabi frequency Ω̃p = √(k²+1)(Ω̃−2ω) + 2ω.
    pub rabi_p: f64,
    /// Quasienergy gap on the circle of circumference ω.
    pub gap: f64,
}

/// q± = ∓√(k²+1)(Ω̃−2ω)/2 + (2n+1)ω/2 folded to the principal branch;
/// exactly at the resonance point q± = ∓k₀/2 + (2n+1)ω/2, so the gap
/// equals k₀ there.
pub fn perturbed_quasienergies(
    p: &DriveParams,
    r: &RenormParams,
    include_h3: bool,
) -> Result<PerturbedQuasienergies, Error> {
    let pk = combined_k(p, r, include_h3)?;
    let u = r.rabi_tilde - 2.0 * p.omega;
    // √(k²+1)·(Ω̃−2ω) = sign(u)·√(u² + k₀²); continued to +k₀ at u = 0
    let s = sign_or_plus(u) * (u * u + pk.k0 * pk.k0).sqrt();
    let zone = 1.5 * p.omega; // (2n+1)ω/2 for the n = 1 resonance
    let q_plus = fold_principal(-0.5 * s + zone, p.omega);
    let q_minus = fold_principal(0.5 * s + zone, p.omega);
    Ok(PerturbedQuasienergies {
        q_plus,
        q_minus,
        rabi_p: s + 2.0 * p.omega,
        gap: circle_distance(q_plus, q_minus, p.omega),
    })
}

/// 3rd-harmonic resonance point expanded to second order in A/ω:
/// Δres = (3 − 3A²/(32ω²))·ω. Returned in absolute frequency units.
pub fn resonance_point_closed_form(p: &DriveParams) -> f64 {
    let a = p.amplitude / p.omega;
    (3.0 - 3.0 * a * a / 32.0) * p.omega
}

/// The small expansion quantity x = 3A²/(32ω²).
pub fn resonance_x(p: &DriveParams) -> f64 {
    let a = p.amplitude / p.omega;
    3.0 * a * a / 32.0
}

/// Solve the resonance condition Ω̃(Δ) = 2nω for Δ by bisection over
/// ((2n+1)ω − ω/2, (2n+1)ω + ω/2), re-solving the frame parameter at
/// every trial point. Residual below 1e-12·ω.
pub fn resonance_point_solve(p: &DriveParams, n: u32) -> Result<f64, Error> {
    if n < 1 {
        return Err(Error::domain(
            "resonance_point_solve",
            "harmonic order must be >= 1",
        ));
    }
    let target = 2.0 * n as f64 * p.omega;
    let g = |delta: f64| -> Result<f64, Error> {
        let trial = DriveParams::new(delta, p.amplitude, p.omega)?;
        Ok(solve_xi(&trial, 1e-14)?.rabi_tilde - target)
    };
    let center = (2 * n + 1) as f64 * p.omega;
    let (mut lo, mut hi) = (center - 0.5 * p.omega, center + 0.5 * p.omega);
    let mut glo = g(lo)?;
    let ghi = g(hi)?;
    if glo * ghi > 0.0 {
        return Err(Error::BracketFailed {
            what: "resonance condition",
            lo,
            hi,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let gmid = g(mid)?;
        if gmid.abs() <= 1e-12 * p.omega {
            return Ok(mid);
        }
        if glo * gmid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            glo = gmid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// |dγ/d(Δ/ω)| at the 3rd-harmonic resonance point, expanded to third
/// order in ω/A: 3π[128(ω/A)³ − (63/8)(ω/A)].
pub fn slope_closed_form(p: &DriveParams) -> Result<f64, Error> {
    if p.amplitude <= 0.0 {
        return Err(Error::domain("slope_closed_form", "needs a nonzero drive"));
    }
    let w_over_a = p.omega / p.amplitude;
    Ok(3.0 * std::f64::consts::PI * (128.0 * w_over_a.powi(3) - 63.0 / 8.0 * w_over_a))
}

/// Dimensionless avoided-crossing gap Ξ/ω at the 3rd-harmonic resonance
/// point, expanded to fifth order in A/ω: (A³/128ω³)(1 + 17A²/(2048ω²)).
pub fn gap_closed_form(p: &DriveParams) -> f64 {
    let a = p.amplitude / p.omega;
    a.powi(3) / 128.0 * (1.0 + 17.0 * a * a / 2048.0)
}

/// Closed-form resonance report for the 3rd harmonic.
pub fn closed_form_resonance_report(p: &DriveParams) -> Result<ResonanceReport, Error> {
    Ok(ResonanceReport {
        harmonic_order: 1,
        delta_res: resonance_point_closed_form(p) / p.omega,
        gap: gap_closed_form(p),
        slope: slope_closed_form(p)?,
        x: resonance_x(p),
        engine: ResonanceEngine::ClosedForm,
    })
}

/// Result of the numerically integrated harmonic-correction series.
#[derive(Debug, Clone)]
pub struct WSeries {
    /// U₀(T)·W(T) projected onto the closest unitary.
    pub u_at_period: Matrix2,
    /// Raw W(T) before projection.
    pub w_raw: Matrix2,
    pub projection_distance: f64,
}

/// First-order series term Wₙ(T) = −i∫₀ᵀ U₀⁻¹HₙU₀ dτ by trapezoid on
/// `grid_points` intervals.
pub fn w_first_order_term(
    p: &DriveParams,
    r: &RenormParams,
    n: u32,
    grid_points: usize,
) -> Result<Matrix2, Error> {
    let g = sample_interaction(p, r, n, grid_points)?;
    Ok(trapezoid(&g, p.period() / grid_points as f64).scale(C64::new(0.0, -1.0)))
}

/// Second-order series term
/// Wₙₘ(T) = (−i)²∫₀ᵀ dτ₁ U₀⁻¹HₙU₀(τ₁) ∫₀^{τ₁} dτ₂ U₀⁻¹HₘU₀(τ₂),
/// cumulative trapezoid inside, trapezoid outside.
pub fn w_second_order_term(
    p: &DriveParams,
    r: &RenormParams,
    n: u32,
    m: u32,
    grid_points: usize,
) -> Result<Matrix2, Error> {
    let dt = p.period() / grid_points as f64;
    let gn = sample_interaction(p, r, n, grid_points)?;
    let gm = sample_interaction(p, r, m, grid_points)?;
    let inner = cumulative_trapezoid(&gm, dt);
    let products: Vec<Matrix2> = gn.iter().zip(&inner).map(|(a, b)| a.mul(b)).collect();
    // (−i)·outer ∘ (−i)·inner; the inner −i is folded into `inner`
    Ok(trapezoid(&products, dt).scale(C64::new(0.0, -1.0)))
}

/// W(T) ≈ I + W₂₂ + W₃ + W₄ + W₂₃ + W₃₂ and the resulting one-period
/// operator U₀(T)·W(T), polar-projected; the term list is the one that
/// resolves the 5th-harmonic resonance.
pub fn w_series_at_period(
    p: &DriveParams,
    r: &RenormParams,
    grid_points: usize,
) -> Result<WSeries, Error> {
    w_series_with_terms(p, r, grid_points, &[3, 4], &[(2, 2), (2, 3), (3, 2)])
}

/// The series with an explicit term list, for diagnostics and regimes
/// beyond the default.
pub fn w_series_with_terms(
    p: &DriveParams,
    r: &RenormParams,
    grid_points: usize,
    first_order: &[u32],
    second_order: &[(u32, u32)],
) -> Result<WSeries, Error> {
    if grid_points < MIN_W_GRID {
        return Err(Error::domain(
            "w_series",
            format!("grid_points {grid_points} below minimum {MIN_W_GRID}"),
        ));
    }
    let mut w = Matrix2::identity();
    for &n in first_order {
        w = w.add(&w_first_order_term(p, r, n, grid_points)?);
    }
    for &(n, m) in second_order {
        w = w.add(&w_second_order_term(p, r, n, m, grid_points)?);
    }
    let raw = w;
    let u_raw = u0_analytic(r, p, p.period()).mul(&raw);
    let (u, projection_distance) = u_raw
        .polar_unitary()
        .ok_or_else(|| Error::domain("w_series", "series sum is singular"))?;
    Ok(WSeries {
        u_at_period: u,
        w_raw: raw,
        projection_distance,
    })
}

/// Sample U₀⁻¹(τ)Hₙ(τ)U₀(τ) on grid_points+1 uniform times over one
/// period.
fn sample_interaction(
    p: &DriveParams,
    r: &RenormParams,
    n: u32,
    grid_points: usize,
) -> Result<Vec<Matrix2>, Error> {
    let dt = p.period() / grid_points as f64;
    let mut out = Vec::with_capacity(grid_points + 1);
    for j in 0..=grid_points {
        let t = j as f64 * dt;
        let u0 = u0_analytic(r, p, t);
        let h = harmonic_term(p, r, n, t)?;
        out.push(u0.adjoint().mul(&h).mul(&u0));
    }
    Ok(out)
}

fn trapezoid(samples: &[Matrix2], dt: f64) -> Matrix2 {
    let n = samples.len();
    let mut acc = samples[0].add(&samples[n - 1]).scale_re(0.5);
    for s in &samples[1..n - 1] {
        acc = acc.add(s);
    }
    acc.scale_re(dt)
}

/// Running integral with the −i series prefactor folded in.
fn cumulative_trapezoid(samples: &[Matrix2], dt: f64) -> Vec<Matrix2> {
    let minus_i = C64::new(0.0, -1.0);
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = Matrix2::zero();
    out.push(acc.scale(minus_i));
    for pair in samples.windows(2) {
        acc = acc.add(&pair[0].add(&pair[1]).scale_re(0.5 * dt));
        out.push(acc.scale(minus_i));
    }
    out
}
