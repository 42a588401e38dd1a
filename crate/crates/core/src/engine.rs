//! Uniform front over the four computation routes, plus the exact-engine
//! resonance characterization (quasienergy-gap minimum search and
//! finite-difference slopes) used by the command-line tool and the
//! acceptance suite.

use crate::chrw::{
    chrw_cyclic_states, chrw_phases, rwa_cyclic_states, rwa_phases, u0_analytic, BranchPhases,
};
use crate::error::Error;
use crate::model::{hamiltonian_conjugated, hamiltonian_lab, solve_xi, DriveParams};
use crate::numerics::{circle_distance, eigensystem_unitary2, fold_principal, Spinor2};
use crate::perturbation::{
    combined_k, perturbed_cyclic_states, perturbed_phases, perturbed_quasienergies,
    perturbed_u_at_period, resonance_point_solve, resonance_x, w_series_at_period,
    ResonanceEngine, ResonanceReport, DEFAULT_W_GRID,
};
use crate::phase_extraction::{extract, PhaseResult, Quality, DEFAULT_QUAD_POINTS};
use crate::propagator::{evolve_state, propagate_lab, RecordSpec};
use crate::{Branch, Engine};

/// Numerical knobs shared by every engine invocation.
#[derive(Debug, Clone, Copy)]
pub struct EngineOpts {
    /// Dimensionless integrator step for the exact engine.
    pub dt_omega: f64,
    /// Samples for the dynamic-phase quadrature.
    pub quad_points: usize,
    /// Grid for the harmonic-correction series quadrature.
    pub w_grid_points: usize,
    /// Keep the 3rd-harmonic term in the first-order correction.
    pub include_h3: bool,
}

impl Default for EngineOpts {
    fn default() -> Self {
        Self {
            dt_omega: 1e-4,
            quad_points: DEFAULT_QUAD_POINTS,
            w_grid_points: DEFAULT_W_GRID,
            include_h3: true,
        }
    }
}

/// One engine evaluated at one parameter point.
#[derive(Debug, Clone)]
pub struct PointResult {
    pub delta_over_omega: f64,
    pub a_over_omega: f64,
    pub engine: Engine,
    /// Frame parameter ξ (0 for the plain rotating-wave engine).
    pub xi: f64,
    /// First-order perturbation strength (0 where not applicable; ±∞ at
    /// the resonance point).
    pub k: f64,
    /// Renormalized (or plain, for rwa) Rabi frequency over ω.
    pub rabi_tilde_over_omega: f64,
    pub plus: PhaseResult,
    pub minus: PhaseResult,
    /// Quality figure of the one-period operator: integrator drift for
    /// the exact engine, polar-projection distance for the perturbative
    /// ones, construction error for the closed forms.
    pub unitarity_error: f64,
    /// Integrator step actually used (0 for closed-form engines).
    pub dt_omega: f64,
}

impl PointResult {
    pub fn branch(&self, b: Branch) -> &PhaseResult {
        match b {
            Branch::Plus => &self.plus,
            Branch::Minus => &self.minus,
        }
    }
}

fn result_from_branch(
    engine: Engine,
    branch: Branch,
    ph: &BranchPhases,
    state: Spinor2,
    unitarity_error: f64,
) -> PhaseResult {
    PhaseResult {
        engine,
        branch,
        cyclic_state: state,
        q: ph.q,
        theta: ph.theta,
        alpha: ph.alpha,
        gamma: ph.gamma,
        gamma_unfolded: ph.gamma_unfolded,
        quality: Quality {
            unitarity_error,
            quadrature_error_estimate: 0.0,
            low_accuracy: false,
        },
    }
}

/// Evaluate one engine at one parameter point.
pub fn run_point(engine: Engine, p: &DriveParams, opts: &EngineOpts) -> Result<PointResult, Error> {
    let delta_over_omega = p.delta / p.omega;
    let a_over_omega = p.amplitude / p.omega;
    match engine {
        Engine::Rwa => {
            let ph = rwa_phases(p);
            let (sp, sm) = rwa_cyclic_states(p)?;
            let d = p.delta - p.omega;
            let rabi = (d * d + 0.25 * p.amplitude * p.amplitude).sqrt();
            Ok(PointResult {
                delta_over_omega,
                a_over_omega,
                engine,
                xi: 0.0,
                k: 0.0,
                rabi_tilde_over_omega: rabi / p.omega,
                plus: result_from_branch(engine, Branch::Plus, &ph.plus, sp, 0.0),
                minus: result_from_branch(engine, Branch::Minus, &ph.minus, sm, 0.0),
                unitarity_error: 0.0,
                dt_omega: 0.0,
            })
        }
        Engine::Chrw => {
            let r = solve_xi(p, 1e-14)?;
            let ph = chrw_phases(p, &r);
            let (sp, sm) = chrw_cyclic_states(&r)?;
            let u_err = u0_analytic(&r, p, p.period()).unitarity_error();
            Ok(PointResult {
                delta_over_omega,
                a_over_omega,
                engine,
                xi: r.xi,
                k: 0.0,
                rabi_tilde_over_omega: r.rabi_tilde / p.omega,
                plus: result_from_branch(engine, Branch::Plus, &ph.plus, sp, u_err),
                minus: result_from_branch(engine, Branch::Minus, &ph.minus, sm, u_err),
                unitarity_error: u_err,
                dt_omega: 0.0,
            })
        }
        Engine::Pt3 => {
            let r = solve_xi(p, 1e-14)?;
            let pk = combined_k(p, &r, opts.include_h3)?;
            let ph = perturbed_phases(p, &r, opts.include_h3)?;
            let (sp, sm) = perturbed_cyclic_states(p, &r, opts.include_h3)?;
            let pq = perturbed_quasienergies(p, &r, opts.include_h3)?;
            let pu = perturbed_u_at_period(p, &r, opts.include_h3)?;
            let mut plus = result_from_branch(engine, Branch::Plus, &ph.plus, sp, pu.projection_distance);
            let mut minus =
                result_from_branch(engine, Branch::Minus, &ph.minus, sm, pu.projection_distance);
            // quasienergies carry the avoided crossing, unlike the bare
            // −θ/T of the uncorrected total phase
            plus.q = pq.q_plus;
            minus.q = pq.q_minus;
            Ok(PointResult {
                delta_over_omega,
                a_over_omega,
                engine,
                xi: r.xi,
                k: pk.k,
                rabi_tilde_over_omega: r.rabi_tilde / p.omega,
                plus,
                minus,
                unitarity_error: pu.projection_distance,
                dt_omega: 0.0,
            })
        }
        Engine::Pt5 => {
            let r = solve_xi(p, 1e-14)?;
            let ws = w_series_at_period(p, &r, opts.w_grid_points)?;
            let traj = |psi0: &Spinor2, n: usize| -> Result<Vec<Spinor2>, Error> {
                Ok((0..=n)
                    .map(|j| u0_analytic(&r, p, p.period() * j as f64 / n as f64).apply(psi0))
                    .collect())
            };
            let (plus, minus) = extract(
                &ws.u_at_period,
                traj,
                |t| hamiltonian_conjugated(p, &r, t),
                p,
                opts.quad_points,
                engine,
            )?;
            Ok(PointResult {
                delta_over_omega,
                a_over_omega,
                engine,
                xi: r.xi,
                k: 0.0,
                rabi_tilde_over_omega: r.rabi_tilde / p.omega,
                plus,
                minus,
                unitarity_error: ws.projection_distance,
                dt_omega: 0.0,
            })
        }
        Engine::Exact => {
            let r = solve_xi(p, 1e-14)?;
            let n = opts.quad_points.div_ceil(4) * 4;
            let grid = propagate_lab(p, opts.dt_omega, 1, RecordSpec::Uniform(n))?;
            let u_t = *grid.final_u();
            let traj = |psi0: &Spinor2, m: usize| -> Result<Vec<Spinor2>, Error> {
                if m != n {
                    return Err(Error::domain(
                        "run_point",
                        format!("trajectory resolution {m} does not match the grid ({n})"),
                    ));
                }
                Ok(evolve_state(&grid, psi0))
            };
            let (plus, minus) = extract(
                &u_t,
                traj,
                |t| hamiltonian_lab(p, t),
                p,
                n,
                engine,
            )?;
            Ok(PointResult {
                delta_over_omega,
                a_over_omega,
                engine,
                xi: r.xi,
                k: 0.0,
                rabi_tilde_over_omega: r.rabi_tilde / p.omega,
                plus,
                minus,
                unitarity_error: grid.unitarity_error,
                dt_omega: grid.dt_omega,
            })
        }
    }
}

/// Quasienergy pair of the exact one-period propagator (no branch
/// labeling), on the principal branch.
pub fn exact_quasienergy_pair(p: &DriveParams, dt_omega: f64) -> Result<(f64, f64), Error> {
    let grid = propagate_lab(p, dt_omega, 1, RecordSpec::Uniform(1))?;
    let pairs = eigensystem_unitary2(grid.final_u(), 1e-13)?;
    let period = p.period();
    Ok((
        fold_principal(-pairs[0].value.arg() / period, p.omega),
        fold_principal(-pairs[1].value.arg() / period, p.omega),
    ))
}

/// Quasienergy gap of the exact propagator, measured on the circle of
/// circumference ω (absolute units).
pub fn exact_gap(p: &DriveParams, dt_omega: f64) -> Result<f64, Error> {
    let (qa, qb) = exact_quasienergy_pair(p, dt_omega)?;
    Ok(circle_distance(qa, qb, p.omega))
}

/// Location and value of a quasienergy-gap minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapMinimum {
    /// Δ at the minimum (absolute units).
    pub delta_res: f64,
    /// Gap at the minimum (absolute units).
    pub gap: f64,
}

/// Find the exact engine's n-th harmonic resonance point, defined as the
/// quasienergy-gap minimum, by golden-section search around the
/// renormalized-frame resonance solution.
pub fn exact_resonance_search(
    p: &DriveParams,
    n: u32,
    dt_omega: f64,
) -> Result<GapMinimum, Error> {
    let center = resonance_point_solve(p, n)?;
    let half_width = p.omega * (0.04 + 0.04 * (p.amplitude / p.omega).powi(2));
    let gap_at = |delta: f64| -> Result<f64, Error> {
        let trial = DriveParams::new(delta, p.amplitude, p.omega)?;
        exact_gap(&trial, dt_omega)
    };
    golden_section_min(center - half_width, center + half_width, 1e-5 * p.omega, gap_at)
}

fn golden_section_min(
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    f: impl Fn(f64) -> Result<f64, Error>,
) -> Result<GapMinimum, Error> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let (delta_res, gap) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Ok(GapMinimum { delta_res, gap })
}

/// Finite-difference estimate of |dγ₊/d(Δ/ω)| at a resonance crossing.
///
/// With overlap-based branch labels the γ₊ curve folds into a vee whose
/// apex sits at the crossing, so a plain central difference across the
/// apex cancels the linear arms (and picks up the sharp sign flip of the
/// resonant dynamic-phase term instead). Secants taken on each arm,
///
/// ```text
/// (|γ(Δ+2h) − γ(Δ+h)| + |γ(Δ−2h) − γ(Δ−h)|) / (2h/ω),
/// ```
///
/// measure the arm slope directly and are immune to both artifacts.
/// `h_over_omega` must keep 2h inside the linear region (roughly a tenth
/// of the gap divided by dΩ̃/dΔ).
pub fn resonance_slope_fd(
    engine: Engine,
    p: &DriveParams,
    delta_center: f64,
    h_over_omega: f64,
    opts: &EngineOpts,
) -> Result<f64, Error> {
    let h = h_over_omega * p.omega;
    let gamma_at = |delta: f64| -> Result<f64, Error> {
        let trial = DriveParams::new(delta, p.amplitude, p.omega)?;
        Ok(run_point(engine, &trial, opts)?.plus.gamma)
    };
    let up = gamma_at(delta_center + 2.0 * h)? - gamma_at(delta_center + h)?;
    let down = gamma_at(delta_center - 2.0 * h)? - gamma_at(delta_center - h)?;
    Ok((up.abs() + down.abs()) / (2.0 * h_over_omega))
}

/// Exact-engine resonance report: gap-minimum location, gap, and the
/// finite-difference slope of the exact geometric phase at the minimum.
pub fn exact_resonance_report(
    p: &DriveParams,
    n: u32,
    opts: &EngineOpts,
) -> Result<ResonanceReport, Error> {
    let found = exact_resonance_search(p, n, opts.dt_omega)?;
    // half-step an order below the expected linear-regime width
    let slope_guess = crate::perturbation::slope_closed_form(p).unwrap_or(1e4);
    let h = (0.2 * std::f64::consts::PI / slope_guess).min(1e-3);
    let slope = resonance_slope_fd(Engine::Exact, p, found.delta_res, h, opts)?;
    Ok(ResonanceReport {
        harmonic_order: n,
        delta_res: found.delta_res / p.omega,
        gap: found.gap / p.omega,
        slope,
        x: resonance_x(p),
        engine: ResonanceEngine::ExactNumeric,
    })
}

/// |⟨ψ0|ψ(mT)⟩| for m = 1..=n_periods under the exact evolution.
pub fn exact_cyclicity(
    p: &DriveParams,
    dt_omega: f64,
    psi0: &Spinor2,
    n_periods: u32,
) -> Result<Vec<f64>, Error> {
    let grid = propagate_lab(p, dt_omega, n_periods, RecordSpec::Uniform(n_periods as usize))?;
    let states = evolve_state(&grid, psi0);
    Ok(crate::phase_extraction::cyclicity_check(&states[1..], psi0))
}

/// The exact engine's cyclic state for one branch: the eigenvector of the
/// exact U(T) matched against the renormalized-frame reference.
pub fn exact_cyclic_state(
    p: &DriveParams,
    dt_omega: f64,
    branch: Branch,
) -> Result<Spinor2, Error> {
    let grid = propagate_lab(p, dt_omega, 1, RecordSpec::Uniform(1))?;
    let pairs = eigensystem_unitary2(grid.final_u(), 1e-13)?;
    let r = solve_xi(p, 1e-14)?;
    let (ref_plus, _) = chrw_cyclic_states(&r)?;
    let assignment = crate::phase_extraction::branch_label(
        (&pairs[0].vector, &pairs[1].vector),
        (&ref_plus, &ref_plus.orthogonal()),
    );
    let idx_plus = usize::from(assignment.swapped);
    Ok(match branch {
        Branch::Plus => pairs[idx_plus].vector,
        Branch::Minus => pairs[1 - idx_plus].vector,
    })
}
