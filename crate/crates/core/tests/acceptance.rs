//! Acceptance suite: every release-gating claim, one test per criterion,
//! each printing a PASS line with the measured values (visible with
//! `cargo test --test acceptance -- --nocapture`).

use rabi_aa::chrw::{chrw_phases, chrw_phases_at_xi, rwa_phases, u0_analytic};
use rabi_aa::engine::{
    exact_cyclic_state, exact_cyclicity, exact_resonance_search, resonance_slope_fd, run_point,
    EngineOpts,
};
use rabi_aa::model::{hamiltonian_chrw, solve_xi, DriveParams};
use rabi_aa::numerics::{
    bessel_j, circle_distance, eigensystem_unitary2, fold_principal, fold_two_pi, Matrix2, C64,
};
use rabi_aa::perturbation::{
    gap_closed_form, perturbed_cyclic_states, perturbed_phases_at_k, perturbed_u_at_period,
    resonance_point_closed_form, resonance_point_solve, slope_closed_form, u1z_at_period,
};
use rabi_aa::propagator::{instantaneous_eigenstate, propagate_lab, RecordSpec};
use rabi_aa::{Branch, Engine};
use std::f64::consts::PI;

fn p(delta: f64, a: f64) -> DriveParams {
    DriveParams::in_omega_units(delta, a).unwrap()
}

fn opts(dt_omega: f64) -> EngineOpts {
    EngineOpts {
        dt_omega,
        ..EngineOpts::default()
    }
}

/// Distance of an angle sum from 0 mod 2π (complementarity check that
/// also covers the γ ≡ 0 fold boundary).
fn complementarity_error(gamma_plus: f64, gamma_minus: f64) -> f64 {
    fold_principal(gamma_plus + gamma_minus, 2.0 * PI).abs()
}

#[test]
fn acceptance_01_unitarity_of_exact_propagation() {
    let grid = propagate_lab(&p(1.0, 1.0), 1e-5, 1, RecordSpec::Uniform(1)).unwrap();
    assert!(
        grid.unitarity_error < 1e-12,
        "unitarity error {} >= 1e-12",
        grid.unitarity_error
    );
    println!(
        "ACCEPTANCE 01 PASS: |det(U^dag U) - 1| = {:.3e} < 1e-12 at dt*omega = 1e-5",
        grid.unitarity_error
    );
}

#[test]
fn acceptance_02_chrw_matches_exact_at_main_resonance() {
    let o = opts(1e-4);
    let mut worst: f64 = 0.0;
    for i in 0..21 {
        let delta = 0.8 + 0.4 * i as f64 / 20.0;
        let point = p(delta, 1.0);
        let exact = run_point(Engine::Exact, &point, &o).unwrap();
        let chrw = run_point(Engine::Chrw, &point, &o).unwrap();
        worst = worst.max((exact.plus.gamma - chrw.plus.gamma).abs() / PI);
    }
    assert!(worst <= 0.02, "max |gamma_chrw - gamma_exact|/pi = {worst}");
    println!("ACCEPTANCE 02 PASS: max |gamma_chrw - gamma_exact|/pi = {worst:.5} <= 0.02 over delta/omega in [0.8, 1.2]");
}

#[test]
fn acceptance_03_rwa_diverges_from_exact() {
    let point = p(0.9, 2.0);
    let o = opts(1e-4);
    let exact = run_point(Engine::Exact, &point, &o).unwrap();
    let rwa = run_point(Engine::Rwa, &point, &o).unwrap();
    let diff = (rwa.plus.gamma - exact.plus.gamma).abs() / PI;
    assert!(diff >= 0.1, "|gamma_rwa - gamma_exact|/pi = {diff} < 0.1");
    println!(
        "ACCEPTANCE 03 PASS: |gamma_rwa - gamma_exact|/pi = {diff:.4} >= 0.1 at delta/omega = 0.9, A/omega = 2"
    );
}

#[test]
fn acceptance_04_resonance_point_location() {
    let point = p(3.0, 1.0);
    let found = exact_resonance_search(&point, 1, 1e-4).unwrap();
    let loc_err = (found.delta_res - 2.90625).abs();
    assert!(loc_err <= 0.02, "gap minimum at {} (error {loc_err})", found.delta_res);
    let cf = resonance_point_closed_form(&point);
    let solver = resonance_point_solve(&point, 1).unwrap();
    let cf_err = (cf - solver).abs();
    assert!(cf_err <= 0.03, "closed form {cf} vs solver {solver}");
    println!(
        "ACCEPTANCE 04 PASS: exact gap minimum at delta/omega = {:.6} (|.-2.90625| = {:.4} <= 0.02); closed form {:.6} vs solver {:.6} (diff {:.4} <= 0.03)",
        found.delta_res, loc_err, cf, solver, cf_err
    );
}

#[test]
fn acceptance_05_gap_law() {
    for a in [0.4, 0.6, 0.8, 1.0] {
        let point = p(3.0, a);
        let found = exact_resonance_search(&point, 1, 1e-4).unwrap();
        let leading = a.powi(3) / 128.0;
        let ratio = found.gap / leading;
        assert!(
            (0.9..=1.1).contains(&ratio),
            "exact gap / leading-order = {ratio} at A/omega = {a}"
        );
        let cf = gap_closed_form(&point);
        let rel = (cf - found.gap).abs() / found.gap;
        assert!(rel <= 0.03, "closed-form gap off by {rel} at A/omega = {a}");
        println!(
            "ACCEPTANCE 05 PASS: A/omega = {a}: exact gap {:.4e}, /[(A/w)^3/128] = {ratio:.4} in [0.9, 1.1], closed form within {:.4}",
            found.gap, rel
        );
    }
}

#[test]
fn acceptance_06_slope_law() {
    let o = opts(1e-4);
    // 5% agreement of the measured perturbative slope with the closed form
    for a in [1.0, 1.5, 2.0] {
        let point = p(3.0, a);
        let delta_res = resonance_point_solve(&point, 1).unwrap();
        let h = (0.05 * gap_closed_form(&point)).clamp(1e-6, 1e-3);
        let fd = resonance_slope_fd(Engine::Pt3, &point, delta_res, h, &o).unwrap();
        let cf = slope_closed_form(&point).unwrap();
        let rel = (fd - cf).abs() / cf;
        assert!(rel <= 0.05, "slope at A/omega = {a}: fd {fd} vs cf {cf} ({rel:.4})");
        println!("ACCEPTANCE 06 PASS: A/omega = {a}: measured slope {fd:.2} vs closed form {cf:.2} ({rel:.4} <= 0.05)");
    }
    // linearity of the scaled slope in (omega/A)^2
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..6 {
        let w_over_a = 0.5 + 0.1 * i as f64;
        let a = 1.0 / w_over_a;
        let point = p(3.0, a);
        let delta_res = resonance_point_solve(&point, 1).unwrap();
        let h = (0.05 * gap_closed_form(&point)).clamp(1e-6, 1e-3);
        let fd = resonance_slope_fd(Engine::Pt3, &point, delta_res, h, &o).unwrap();
        xs.push(w_over_a * w_over_a);
        ys.push(fd / (100.0 * w_over_a));
    }
    let n = xs.len() as f64;
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let mean = sy / n;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let r2 = 1.0 - ss_res / ss_tot;
    assert!(r2 >= 0.999, "scaled slope linearity R^2 = {r2}");
    println!("ACCEPTANCE 06 PASS: scaled slope linear in (omega/A)^2 with R^2 = {r2:.6} >= 0.999");
}

#[test]
fn acceptance_07_quadratic_quasienergy_law() {
    let point = p(3.0, 1.0);
    let found = exact_resonance_search(&point, 1, 1e-4).unwrap();
    let h = 1e-3;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for m in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let delta = found.delta_res + m * h;
        let gap = rabi_aa::engine::exact_gap(&p(delta, 1.0), 1e-4).unwrap();
        xs.push(m * h);
        ys.push(0.5 * gap); // |q - zone center|
    }
    // least squares for y = y0 + c x^2
    let n = xs.len() as f64;
    let s2: f64 = xs.iter().map(|x| x * x).sum();
    let s4: f64 = xs.iter().map(|x| x.powi(4)).sum();
    let sy: f64 = ys.iter().sum();
    let sx2y: f64 = xs.iter().zip(&ys).map(|(x, y)| x * x * y).sum();
    let det = n * s4 - s2 * s2;
    let c = (n * sx2y - s2 * sy) / det;
    let y0 = (sy - c * s2) / n;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - y0 - c * x * x).powi(2))
        .sum();
    let ss: f64 = ys.iter().map(|y| y * y).sum();
    let rel = (ss_res / ss).sqrt();
    assert!(rel <= 0.05, "quadratic-fit relative residual {rel}");
    println!(
        "ACCEPTANCE 07 PASS: 5-point parabola fit of exact quasienergy about delta_res: relative residual {rel:.4} <= 0.05 (curvature {c:.3})"
    );
}

#[test]
fn acceptance_08_reduction_identities() {
    // perturbative closed forms at k = 0 equal the renormalized engine
    let mut worst: f64 = 0.0;
    for (delta, a) in [(1.0, 1.0), (2.9, 1.0), (0.7, 1.8), (3.4, 0.6)] {
        let point = p(delta, a);
        let r = solve_xi(&point, 1e-14).unwrap();
        let pt = perturbed_phases_at_k(&point, &r, 0.0);
        let cf = chrw_phases(&point, &r);
        for (x, y) in [
            (pt.plus.theta, cf.plus.theta),
            (pt.plus.alpha, cf.plus.alpha),
            (pt.plus.gamma, cf.plus.gamma),
            (pt.plus.q, cf.plus.q),
            (pt.minus.gamma, cf.minus.gamma),
        ] {
            worst = worst.max((x - y).abs());
        }
        // operator and state reduction with the perturbation switched off
        let mut r0 = r;
        r0.z = 0.0;
        let pu = perturbed_u_at_period(&point, &r0, true).unwrap();
        worst = worst.max(pu.raw.sub(&u0_analytic(&r0, &point, point.period())).norm_inf());
        let (sp, _) = perturbed_cyclic_states(&point, &r0, true).unwrap();
        let (cp, _) = rabi_aa::chrw::chrw_cyclic_states(&r0).unwrap();
        worst = worst.max(sp.distance_up_to_phase(&cp));
    }
    assert!(worst <= 1e-12, "pt3 -> chrw reduction off by {worst}");
    println!("ACCEPTANCE 08 PASS: pt3 outputs at k = 0 equal chrw outputs within {worst:.2e} <= 1e-12");

    // the engine at xi = 0 is the plain rotating-wave approximation
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let delta = 0.1 + 5.9 * i as f64 / 99.0;
        for a in [1.0, 2.0] {
            let point = p(delta, a);
            let via_xi = chrw_phases_at_xi(&point, 0.0).unwrap();
            let direct = rwa_phases(&point);
            worst = worst
                .max((via_xi.plus.gamma - direct.plus.gamma).abs())
                .max((via_xi.plus.theta - direct.plus.theta).abs())
                .max((via_xi.plus.alpha - direct.plus.alpha).abs())
                .max((via_xi.plus.q - direct.plus.q).abs());
        }
    }
    assert!(worst <= 1e-12, "chrw(xi = 0) vs rwa off by {worst}");
    println!("ACCEPTANCE 08 PASS: chrw formulas at xi = 0 equal rwa formulas within {worst:.2e} <= 1e-12 on a 100-point grid");
}

#[test]
fn acceptance_09_complementarity() {
    // analytic engines across the sweep grid
    let mut worst: f64 = 0.0;
    for i in 0..35 {
        let delta = 0.1 + 3.4 * i as f64 / 34.0;
        for a in [1.0, 2.0] {
            let point = p(delta, a);
            let o = opts(1e-4);
            for engine in [Engine::Rwa, Engine::Chrw, Engine::Pt3] {
                let res = run_point(engine, &point, &o).unwrap();
                worst = worst.max(complementarity_error(res.plus.gamma, res.minus.gamma));
            }
        }
    }
    assert!(worst <= 1e-9, "analytic complementarity error {worst}");
    println!("ACCEPTANCE 09 PASS: analytic-engine gamma+ + gamma- = 2pi within {worst:.2e} <= 1e-9");

    // exact engine with the default quadrature
    let mut worst: f64 = 0.0;
    let o = opts(1e-4);
    for (delta, a) in [(0.9, 1.0), (1.6, 2.0), (2.9, 1.0)] {
        let res = run_point(Engine::Exact, &p(delta, a), &o).unwrap();
        worst = worst.max(complementarity_error(res.plus.gamma, res.minus.gamma));
    }
    assert!(worst <= 1e-5, "exact complementarity error {worst}");
    println!("ACCEPTANCE 09 PASS: exact-engine gamma+ + gamma- = 2pi within {worst:.2e} <= 1e-5");
}

#[test]
fn acceptance_10_cyclicity() {
    let point = p(2.9, 1.0);
    let cyclic = exact_cyclic_state(&point, 1e-4, Branch::Plus).unwrap();
    let overlaps = exact_cyclicity(&point, 1e-4, &cyclic, 10).unwrap();
    let min_cyclic = overlaps.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(
        min_cyclic >= 1.0 - 1e-6,
        "cyclic state overlap dropped to {min_cyclic}"
    );

    let instantaneous = instantaneous_eigenstate(&point, 0.0, Branch::Minus).unwrap();
    let overlaps = exact_cyclicity(&point, 1e-4, &instantaneous, 10).unwrap();
    let at_ten = overlaps[9];
    assert!(
        at_ten < 0.99,
        "instantaneous eigenstate stayed cyclic: overlap {at_ten}"
    );
    println!(
        "ACCEPTANCE 10 PASS: cyclic-state overlap >= {min_cyclic:.9} (>= 1 - 1e-6); instantaneous-eigenstate overlap at t = 10T is {at_ten:.4} < 0.99"
    );
}

#[test]
fn acceptance_11_fifth_harmonic_regime() {
    let point = p(4.8, 1.0);
    let found = exact_resonance_search(&point, 2, 1e-4).unwrap();
    assert!(found.gap > 0.0, "exact 5th-harmonic gap vanished");
    let o = opts(1e-4);
    let width = 4.0 * found.gap.max(1e-5);
    let mut worst: f64 = 0.0;
    for i in 0..9 {
        let delta = found.delta_res - width + 2.0 * width * i as f64 / 8.0;
        let pp = p(delta, 1.0);
        let exact = run_point(Engine::Exact, &pp, &o).unwrap();
        let pt5 = run_point(Engine::Pt5, &pp, &o).unwrap();
        worst = worst.max((exact.plus.gamma - pt5.plus.gamma).abs() / PI);
    }
    assert!(worst <= 0.1, "max |gamma_pt5 - gamma_exact|/pi = {worst}");
    let center = run_point(Engine::Pt5, &p(found.delta_res, 1.0), &o).unwrap();
    let pt5_gap = circle_distance(center.plus.q, center.minus.q, 1.0);
    assert!(pt5_gap > 0.0, "pt5 quasienergy gap vanished");
    println!(
        "ACCEPTANCE 11 PASS: max |gamma_pt5 - gamma_exact|/pi = {worst:.4} <= 0.1 across the 5th-harmonic window; gaps: exact {:.3e}, pt5 {pt5_gap:.3e} (both > 0)",
        found.gap
    );
}

#[test]
fn acceptance_12_oracle_equivalence() {
    // closed-form one-period correction vs direct quadrature of its
    // defining integral
    let point = p(2.9, 1.0);
    let r = solve_xi(&point, 1e-14).unwrap();
    let n = 20_000;
    let dt = point.period() / n as f64;
    let mut acc = Matrix2::zero();
    for j in 0..=n {
        let t = j as f64 * dt;
        let u0 = u0_analytic(&r, &point, t);
        let g = u0
            .adjoint()
            .mul(&rabi_aa::model::harmonic_term(&point, &r, 2, t).unwrap())
            .mul(&u0);
        let w = if j == 0 || j == n {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc = acc.add(&g.scale_re(w));
    }
    let quad = acc.scale_re(dt / 3.0);
    let oracle = u0_analytic(&r, &point, point.period())
        .mul(&quad)
        .scale(C64::new(0.0, -1.0));
    let closed = u1z_at_period(&point, &r).unwrap();
    let err_u1z = closed.sub(&oracle).norm_inf();
    assert!(err_u1z <= 1e-9, "u1z closed form vs quadrature: {err_u1z}");

    // analytic propagator vs direct integration of its Hamiltonian
    let grid = rabi_aa::propagator::propagate_recording(
        |t| hamiltonian_chrw(&point, &r, t),
        &point,
        1e-4,
        1,
        RecordSpec::Uniform(1),
    )
    .unwrap();
    let err_u0 = grid
        .final_u()
        .sub(&u0_analytic(&r, &point, point.period()))
        .norm_inf();
    assert!(err_u0 <= 1e-8, "analytic propagator vs integration: {err_u0}");
    println!(
        "ACCEPTANCE 12 PASS: first-order correction closed form within {err_u1z:.2e} of quadrature (<= 1e-9); analytic propagator within {err_u0:.2e} of direct integration (<= 1e-8)"
    );
}

#[test]
fn acceptance_13_property_suites() {
    // eigendecomposition: orthogonality and the fixed-point property
    let mut worst_eig: f64 = 0.0;
    for k in 0..32 {
        let theta = 0.1 + 3.0 * k as f64 / 32.0;
        let axis = (1.0 + k as f64, 0.5 * k as f64 - 3.0, 2.0 - 0.3 * k as f64);
        let norm = (axis.0 * axis.0 + axis.1 * axis.1 + axis.2 * axis.2).sqrt();
        let u = Matrix2::identity().scale_re(theta.cos()).add(
            &Matrix2::from_pauli_vector(axis.0 / norm, axis.1 / norm, axis.2 / norm)
                .scale(C64::new(0.0, theta.sin())),
        );
        let pairs = eigensystem_unitary2(&u, 1e-12).unwrap();
        worst_eig = worst_eig.max(pairs[0].vector.dot(&pairs[1].vector).norm());
        for pair in &pairs {
            let uv = u.apply(&pair.vector);
            let lv = pair.vector.scale(pair.value);
            worst_eig = worst_eig
                .max((uv.c1 - lv.c1).norm())
                .max((uv.c2 - lv.c2).norm());
        }
    }
    assert!(worst_eig < 1e-8, "eigen property violation {worst_eig}");

    // Bessel recurrence J_{n-1} + J_{n+1} = (2n/z) J_n
    let mut worst_bessel: f64 = 0.0;
    let mut z = 0.1;
    while z <= 10.0 {
        for n in 1..=8u32 {
            let lhs = bessel_j(n - 1, z).unwrap() + bessel_j(n + 1, z).unwrap();
            let rhs = 2.0 * n as f64 / z * bessel_j(n, z).unwrap();
            worst_bessel = worst_bessel.max((lhs - rhs).abs());
        }
        z += 0.23;
    }
    assert!(worst_bessel < 1e-10, "Bessel recurrence violation {worst_bessel}");

    // integrator order: halving the step contracts the error ~16x
    let point = p(5.0, 3.0);
    let reference = *propagate_lab(&point, 1e-6, 1, RecordSpec::Uniform(1))
        .unwrap()
        .final_u();
    let err_at = |dt: f64| {
        propagate_lab(&point, dt, 1, RecordSpec::Uniform(1))
            .unwrap()
            .final_u()
            .sub(&reference)
            .norm_inf()
    };
    let ratio = err_at(8e-3) / err_at(4e-3);
    assert!(
        (11.0..=22.0).contains(&ratio),
        "integrator convergence ratio {ratio}"
    );

    // gamma = theta - alpha decomposition across engines
    let o = opts(1e-3);
    let mut worst_dec: f64 = 0.0;
    for engine in [Engine::Rwa, Engine::Chrw, Engine::Pt3, Engine::Exact] {
        let res = run_point(engine, &p(1.3, 1.0), &o).unwrap();
        for b in [&res.plus, &res.minus] {
            worst_dec = worst_dec.max((b.gamma_unfolded - (b.theta - b.alpha)).abs());
            worst_dec = worst_dec.max((b.gamma - fold_two_pi(b.gamma_unfolded)).abs());
        }
    }
    assert!(worst_dec < 1e-12, "decomposition identity violation {worst_dec}");

    println!(
        "ACCEPTANCE 13 PASS: eigen properties ({worst_eig:.2e}), Bessel recurrence ({worst_bessel:.2e}), integrator order (ratio {ratio:.1}), gamma = theta - alpha ({worst_dec:.2e}) all within tolerance"
    );
}
