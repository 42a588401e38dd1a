//! The five subcommands: sweep, resonance, bloch, slopes-gaps, xi.

use crate::config::{
    BlochConfig, InitialState, ResonanceConfig, SlopesGapsConfig, SweepConfig,
};
use crate::csvio::{csv_safe, sig12, CsvDoc};
use crate::{CliError, RunStatus};
use rabi_aa::engine::{
    exact_cyclic_state, exact_resonance_report, resonance_slope_fd, run_point, EngineOpts,
    PointResult,
};
use rabi_aa::model::{solve_xi, DriveParams};
use rabi_aa::perturbation::{
    closed_form_resonance_report, combined_k, gap_closed_form, perturbed_quasienergies,
    resonance_point_solve, slope_closed_form,
};
use rabi_aa::propagator::{bloch_trajectory, evolve_state, propagate_lab, RecordSpec};
use rabi_aa::{Branch, Engine, Spinor2};
use std::sync::atomic::{AtomicUsize, Ordering};

pub const SWEEP_HEADER: [&str; 17] = [
    "delta_over_omega",
    "A_over_omega",
    "engine",
    "xi",
    "k",
    "rabi_tilde_over_omega",
    "q_plus_over_omega",
    "q_minus_over_omega",
    "theta_plus",
    "alpha_plus",
    "gamma_plus_over_pi",
    "gamma_minus_over_pi",
    "c1_sq",
    "c2_sq",
    "unitarity_error",
    "dt_omega",
    "error",
];

fn engine_opts(dt_omega: f64, quad_points: usize) -> EngineOpts {
    EngineOpts {
        dt_omega,
        quad_points,
        ..EngineOpts::default()
    }
}

fn sweep_row(delta: f64, a: f64, engine: Engine, res: &Result<PointResult, rabi_aa::Error>) -> Vec<String> {
    match res {
        Ok(point) => {
            let (c1, c2) = point.plus.cyclic_state.moduli_sqr();
            vec![
                sig12(point.delta_over_omega),
                sig12(point.a_over_omega),
                engine.to_string(),
                sig12(point.xi),
                sig12(point.k),
                sig12(point.rabi_tilde_over_omega),
                sig12(point.plus.q),
                sig12(point.minus.q),
                sig12(point.plus.theta),
                sig12(point.plus.alpha),
                sig12(point.plus.gamma / std::f64::consts::PI),
                sig12(point.minus.gamma / std::f64::consts::PI),
                sig12(c1),
                sig12(c2),
                sig12(point.unitarity_error),
                sig12(point.dt_omega),
                String::new(),
            ]
        }
        Err(e) => {
            let mut row = vec![sig12(delta), sig12(a), engine.to_string()];
            row.extend(std::iter::repeat_n(String::new(), SWEEP_HEADER.len() - 4));
            row.push(csv_safe(&e.to_string()));
            row
        }
    }
}

/// Geometric phases, quasienergies and cyclic-state moduli for every
/// (Δ/ω, engine) pair on the grid; one CSV row per pair.
pub fn run_sweep(cfg: &SweepConfig) -> Result<RunStatus, CliError> {
    cfg.validate()?;
    let deltas: Vec<f64> = (0..cfg.steps)
        .map(|i| {
            cfg.delta_min + (cfg.delta_max - cfg.delta_min) * i as f64 / (cfg.steps - 1) as f64
        })
        .collect();
    let mut tasks = Vec::with_capacity(deltas.len() * cfg.engines.len());
    for &delta in &deltas {
        for &engine in &cfg.engines {
            tasks.push((delta, engine));
        }
    }

    let opts = engine_opts(cfg.dt_omega, cfg.quad_points);
    let results = parallel_map(&tasks, cfg.jobs, |&(delta, engine)| {
        DriveParams::in_omega_units(delta, cfg.a_over_omega)
            .and_then(|p| run_point(engine, &p, &opts))
    });

    // deterministic order: by Δ then by engine rank
    let mut indexed: Vec<usize> = (0..tasks.len()).collect();
    indexed.sort_by(|&i, &j| {
        tasks[i]
            .0
            .total_cmp(&tasks[j].0)
            .then(tasks[i].1.cmp(&tasks[j].1))
    });

    let mut doc = CsvDoc::new(
        vec![cfg.echo()],
        SWEEP_HEADER.iter().map(|s| s.to_string()).collect(),
    );
    let mut failures = 0;
    for i in indexed {
        let (delta, engine) = tasks[i];
        if results[i].is_err() {
            failures += 1;
        }
        doc.push_row(sweep_row(delta, cfg.a_over_omega, engine, &results[i]));
    }
    doc.write_to(&cfg.out)?;
    Ok(RunStatus {
        rows_written: doc.rows.len(),
        failures,
    })
}

/// Bounded worker pool over an indexed task list; output order matches
/// input order regardless of scheduling.
fn parallel_map<T: Sync, R: Send>(
    tasks: &[T],
    jobs: usize,
    f: impl Fn(&T) -> R + Sync,
) -> Vec<R> {
    let workers = jobs.max(1).min(tasks.len().max(1));
    let mut slots: Vec<Option<R>> = (0..tasks.len()).map(|_| None).collect();
    let counter = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let i = counter.fetch_add(1, Ordering::Relaxed);
                        if i >= tasks.len() {
                            break;
                        }
                        local.push((i, f(&tasks[i])));
                    }
                    local
                })
            })
            .collect();
        for handle in handles {
            for (i, r) in handle.join().expect("worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots.into_iter().map(|s| s.expect("slot filled")).collect()
}

pub const RESONANCE_HEADER: [&str; 8] = [
    "harmonic_n",
    "engine",
    "delta_res_over_omega",
    "delta_res_solver_over_omega",
    "gap_over_omega",
    "slope_abs",
    "x",
    "error",
];

/// Resonance point, gap and slope: closed forms and the numerically exact
/// gap minimum side by side with the resonance-condition solver value.
pub fn run_resonance(cfg: &ResonanceConfig) -> Result<RunStatus, CliError> {
    cfg.validate()?;
    let p = DriveParams::in_omega_units(3.0, cfg.a_over_omega)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let solver = resonance_point_solve(&p, cfg.harmonic_n);
    let solver_col = match &solver {
        Ok(d) => sig12(*d),
        Err(_) => String::new(),
    };

    let mut doc = CsvDoc::new(
        vec![cfg.echo()],
        RESONANCE_HEADER.iter().map(|s| s.to_string()).collect(),
    );
    let mut failures = 0;

    if cfg.closed_form {
        // the closed-form laws are expansions around the 3rd harmonic
        if cfg.harmonic_n == 1 {
            match closed_form_resonance_report(&p) {
                Ok(rep) => doc.push_row(vec![
                    cfg.harmonic_n.to_string(),
                    rep.engine.to_string(),
                    sig12(rep.delta_res),
                    solver_col.clone(),
                    sig12(rep.gap),
                    sig12(rep.slope),
                    sig12(rep.x),
                    String::new(),
                ]),
                Err(e) => {
                    failures += 1;
                    doc.push_row(error_resonance_row(cfg.harmonic_n, "closed_form", &solver_col, &e));
                }
            }
        } else {
            failures += 1;
            doc.push_row(vec![
                cfg.harmonic_n.to_string(),
                "closed_form".into(),
                String::new(),
                solver_col.clone(),
                String::new(),
                String::new(),
                String::new(),
                "closed forms cover the 3rd harmonic only (harmonic_n=1)".into(),
            ]);
        }
    }

    if cfg.exact_numeric {
        let opts = engine_opts(cfg.dt_omega, 10_000);
        match exact_resonance_report(&p, cfg.harmonic_n, &opts) {
            Ok(rep) => doc.push_row(vec![
                cfg.harmonic_n.to_string(),
                rep.engine.to_string(),
                sig12(rep.delta_res),
                solver_col.clone(),
                sig12(rep.gap),
                sig12(rep.slope),
                sig12(rep.x),
                String::new(),
            ]),
            Err(e) => {
                failures += 1;
                doc.push_row(error_resonance_row(cfg.harmonic_n, "exact_numeric", &solver_col, &e));
            }
        }
    }

    if solver.is_err() && failures == 0 {
        failures += 1;
    }
    doc.write_to(&cfg.out)?;
    Ok(RunStatus {
        rows_written: doc.rows.len(),
        failures,
    })
}

fn error_resonance_row(
    n: u32,
    engine: &str,
    solver_col: &str,
    e: &rabi_aa::Error,
) -> Vec<String> {
    vec![
        n.to_string(),
        engine.into(),
        String::new(),
        solver_col.into(),
        String::new(),
        String::new(),
        String::new(),
        csv_safe(&e.to_string()),
    ]
}

/// Stored Bloch-trajectory resolution per drive period.
pub const BLOCH_SAMPLES_PER_PERIOD: usize = 256;

/// Bloch trajectory of the exact evolution from either an instantaneous
/// eigenstate or the exact cyclic state.
pub fn run_bloch(cfg: &BlochConfig) -> Result<RunStatus, CliError> {
    cfg.validate()?;
    let p = DriveParams::in_omega_units(cfg.delta_over_omega, cfg.a_over_omega)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let psi0: Spinor2 = match cfg.initial {
        InitialState::Instantaneous => {
            rabi_aa::propagator::instantaneous_eigenstate(&p, 0.0, Branch::Minus)
                .map_err(|e| CliError::Config(e.to_string()))?
        }
        InitialState::Cyclic => exact_cyclic_state(&p, cfg.dt_omega, Branch::Plus)
            .map_err(|e| CliError::Config(e.to_string()))?,
    };
    let n_samples = BLOCH_SAMPLES_PER_PERIOD * cfg.periods as usize;
    let grid = propagate_lab(&p, cfg.dt_omega, cfg.periods, RecordSpec::Uniform(n_samples))
        .map_err(|e| CliError::Config(e.to_string()))?;
    let states = evolve_state(&grid, &psi0);
    let times: Vec<f64> = (0..=n_samples)
        .map(|j| cfg.periods as f64 * j as f64 / n_samples as f64)
        .collect();
    let traj =
        bloch_trajectory(&states, &times).map_err(|e| CliError::Config(e.to_string()))?;

    let mut doc = CsvDoc::new(
        vec![cfg.echo()],
        ["t_over_T", "sx", "sy", "sz"].iter().map(|s| s.to_string()).collect(),
    );
    for point in &traj.points {
        doc.push_row(vec![
            sig12(point.t_over_t),
            sig12(point.sx),
            sig12(point.sy),
            sig12(point.sz),
        ]);
    }
    doc.write_to(&cfg.out)?;
    Ok(RunStatus {
        rows_written: doc.rows.len(),
        failures: 0,
    })
}

pub const SLOPES_GAPS_HEADER: [&str; 8] = [
    "a_over_omega",
    "engine",
    "scaled_slope_closed",
    "scaled_slope_engine",
    "gap_closed_over_omega",
    "gap_leading_over_omega",
    "gap_engine_over_omega",
    "error",
];

/// Scaled slope |dγ/d(Δ/ω)|/(100ω/A) and avoided-crossing gap Ξ/ω versus
/// drive amplitude: closed forms next to a measuring engine.
pub fn run_slopes_gaps(cfg: &SlopesGapsConfig) -> Result<RunStatus, CliError> {
    cfg.validate()?;
    let amplitudes: Vec<f64> = if cfg.steps == 1 {
        vec![cfg.a_min]
    } else {
        (0..cfg.steps)
            .map(|i| cfg.a_min + (cfg.a_max - cfg.a_min) * i as f64 / (cfg.steps - 1) as f64)
            .collect()
    };

    let mut doc = CsvDoc::new(
        vec![cfg.echo()],
        SLOPES_GAPS_HEADER.iter().map(|s| s.to_string()).collect(),
    );
    let mut failures = 0;
    for &a in &amplitudes {
        match slopes_gaps_row(cfg, a) {
            Ok(row) => doc.push_row(row),
            Err(e) => {
                failures += 1;
                let mut row = vec![sig12(a), cfg.engine.to_string()];
                row.extend(std::iter::repeat_n(String::new(), SLOPES_GAPS_HEADER.len() - 3));
                row.push(csv_safe(&e.to_string()));
                doc.push_row(row);
            }
        }
    }
    doc.write_to(&cfg.out)?;
    Ok(RunStatus {
        rows_written: doc.rows.len(),
        failures,
    })
}

fn slopes_gaps_row(cfg: &SlopesGapsConfig, a: f64) -> Result<Vec<String>, rabi_aa::Error> {
    let p = DriveParams::in_omega_units(3.0, a)?;
    let scale = a / 100.0; // multiply: slope/(100 ω/A) = slope·A/(100ω)
    let slope_cf = slope_closed_form(&p)?;
    let gap_cf = gap_closed_form(&p);
    let gap_leading = a.powi(3) / 128.0;
    let opts = engine_opts(cfg.dt_omega, 10_000);
    let (slope_engine, gap_engine) = match cfg.engine {
        Engine::Exact => {
            let rep = exact_resonance_report(&p, 1, &opts)?;
            (rep.slope, rep.gap)
        }
        Engine::Pt3 => {
            let delta_res = resonance_point_solve(&p, 1)?;
            let h = (0.05 * gap_cf).clamp(1e-6, 1e-3);
            let slope = resonance_slope_fd(Engine::Pt3, &p, delta_res, h, &opts)?;
            let pres = DriveParams::new(delta_res, p.amplitude, p.omega)?;
            let r = solve_xi(&pres, 1e-14)?;
            let gap = perturbed_quasienergies(&pres, &r, true)?.gap;
            (slope, gap / p.omega)
        }
        _ => unreachable!("validated engine"),
    };
    Ok(vec![
        sig12(a),
        cfg.engine.to_string(),
        sig12(slope_cf * scale),
        sig12(slope_engine * scale),
        sig12(gap_cf),
        sig12(gap_leading),
        sig12(gap_engine),
        String::new(),
    ])
}

/// Print the renormalized-frame parameters for one point to stdout.
pub fn run_xi(delta_over_omega: f64, a_over_omega: f64) -> Result<RunStatus, CliError> {
    let p = DriveParams::in_omega_units(delta_over_omega, a_over_omega)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let r = solve_xi(&p, 1e-14).map_err(|e| CliError::Config(e.to_string()))?;
    let pk = combined_k(&p, &r, true).map_err(|e| CliError::Config(e.to_string()))?;
    println!("delta_over_omega = {}", sig12(delta_over_omega));
    println!("A_over_omega     = {}", sig12(a_over_omega));
    println!("xi               = {}", sig12(r.xi));
    println!("Z                = {}", sig12(r.z));
    println!("A_tilde          = {}", sig12(r.a_tilde));
    println!("delta_tilde      = {}", sig12(r.delta_tilde));
    println!("detuning_tilde   = {}", sig12(r.detuning_tilde));
    println!("rabi_tilde       = {}", sig12(r.rabi_tilde));
    println!("k                = {}", sig12(pk.k));
    println!("k0               = {}", sig12(pk.k0));
    Ok(RunStatus {
        rows_written: 0,
        failures: 0,
    })
}
