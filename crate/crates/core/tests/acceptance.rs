//! Acceptance gate: one test per criterion, each printing a PASS/FAIL line
//! to stderr (uncaptured) before asserting.
//!
//! The long runs (dissipative and free radial to t = 1e4, about 100 s each
//! in release mode) are shared between criteria through `OnceLock`s.

mod common;

use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semiwave::asymptotics::{fit_profile_p0, verify_profile_convergence, RaySample};
use semiwave::char_ode::{
    dissipative_power_law_preset, extract_profile, log_samples, solve_xi_eta, solve_z, verify_asymptotic_bound,
    z_at, CharOdeProblem, Forcing, HypothesisBounds, Stepping, DEFAULT_SLOPE_SLACK, DEFAULT_TAIL_TOL,
};
use semiwave::fit::Verdict;
use semiwave::nonlinearity::CubicNonlinearity;
use semiwave::profile::{explicit_profile, integrate_profile, phase_theta, ProfileParams};
use semiwave::runner::{preset, run_single, ArtifactStatus, RunArtifact};
use semiwave::solver::Layout;
use semiwave::C64;

// Pinned tolerances.
const PROFILE_TOL: f64 = 1e-7;
const PHASE_TOL: f64 = 1e-9;
const MODEL_SLOPE_MAX: f64 = -0.90;
const RECON_TOL: f64 = 1e-7;
const RATIO_RANGE: [f64; 2] = [3.5, 4.5];
const PROPAGATION_TOL: f64 = 1e-10;
const DRIFT_MAX: f64 = 1e-4;
const ENERGY_SLOPE_MAX: f64 = -0.32;
const MONOTONE_ULPS: f64 = 4.0;
const POINTWISE_R2: f64 = 0.95;
const PHASE_REL: f64 = 0.15;
const C0_TOL: f64 = 1e-10;
const WINDOW: [f64; 2] = [1e2, 1e4];

fn verdict(n: usize, title: &str, ok: bool, detail: String) {
    let tag = if ok { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{tag} criterion {n:2} {title}: {detail}");
    assert!(ok, "criterion {n} ({title}) failed: {detail}");
}

/// Least squares `y = a + b x`; returns `(b, a, R²)`.
fn regress(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let b = sxy / sxx;
    (b, my - b * mx, sxy * sxy / (sxx * syy))
}

fn ray_at(art: &RunArtifact, sigma: f64) -> &RaySample {
    art.rays.iter().find(|r| r.sigma == sigma).expect("ray stored")
}

fn dissipative_run() -> &'static RunArtifact {
    static RUN: OnceLock<RunArtifact> = OnceLock::new();
    RUN.get_or_init(|| run_single(&preset("dissipative-radial-default").unwrap(), 0.3).unwrap())
}

fn free_run() -> &'static RunArtifact {
    static RUN: OnceLock<RunArtifact> = OnceLock::new();
    RUN.get_or_init(|| run_single(&preset("free-radial").unwrap(), 0.3).unwrap())
}

fn rotational_run() -> &'static RunArtifact {
    static RUN: OnceLock<RunArtifact> = OnceLock::new();
    RUN.get_or_init(|| run_single(&preset("rotational-radial-default").unwrap(), 0.3).unwrap())
}

fn random_disk(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    C64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn random_trace(rng: &mut ChaCha8Rng) -> C64 {
    let z = random_disk(rng, 2.0);
    C64::new(z.re.abs(), z.im)
}

#[test]
fn criterion_01_profile_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let p = ProfileParams::new(random_trace(&mut rng), random_disk(&mut rng, 1.0));
        let tau = rng.gen_range(0.0..100.0);
        let err = (integrate_profile(&p, tau, 5e-3).unwrap() - explicit_profile(&p, tau).unwrap()).norm();
        worst = worst.max(err);
    }
    let secs = start.elapsed();
    verdict(
        1,
        "profile ODE oracle",
        worst <= PROFILE_TOL && secs < Duration::from_secs(5),
        format!("max |RK4 − closed form| = {worst:.2e} over 200 cases in {secs:.2?}"),
    );
}

#[test]
fn criterion_02_phase_closed_form() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = ProfileParams::new(random_trace(&mut rng), random_disk(&mut rng, 1.0));
        let tau = rng.gen_range(0.0..100.0);
        let (m, a) = (p.p0.norm_sqr(), p.f_hat.re);
        // Composite Simpson on 2·10⁵ intervals.
        let n = 200_000;
        let h = tau / n as f64;
        let f = |s: f64| m / (1.0 + a * m * s);
        let mut acc = f(0.0) + f(tau);
        for i in 1..n {
            acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let q = 0.5 * p.f_hat.im * acc * h / 3.0;
        worst = worst.max((phase_theta(&p, tau).unwrap() - q).abs());
    }
    let secs = start.elapsed();
    verdict(
        2,
        "phase closed form",
        worst <= PHASE_TOL && secs < Duration::from_secs(5),
        format!("max |Θ − quadrature| = {worst:.2e} over 100 cases in {secs:.2?}"),
    );
}

#[test]
fn criterion_03_model_ode_rate() {
    let start = Instant::now();
    let p = dissipative_power_law_preset();
    let st = Stepping::Logarithmic(1e-3);
    let prof = extract_profile(&p, 1e8, st, DEFAULT_TAIL_TOL).unwrap();
    let samples = log_samples(1e2, 1e6, 10);
    let fit = verify_asymptotic_bound(&p, &prof, &samples, st, DEFAULT_SLOPE_SLACK).unwrap();
    // Independent regression of the same residuals.
    let z = z_at(&p, &samples, st).unwrap();
    let x: Vec<f64> = samples.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = samples
        .iter()
        .zip(&z)
        .map(|(t, zt)| (zt - prof.profile_at(*t).unwrap()).norm().ln())
        .collect();
    let (slope, _, r2) = regress(&x, &y);
    let secs = start.elapsed();
    let ok = fit.verdict == Verdict::Pass
        && fit.slope <= MODEL_SLOPE_MAX
        && (slope - fit.slope).abs() < 1e-9
        && secs < Duration::from_secs(30);
    verdict(
        3,
        "model ODE residual rate",
        ok,
        format!("slope {slope:.4} (R² {r2:.5}, theory −0.95) on [1e2, 1e6] in {secs:.2?}"),
    );
}

#[test]
fn criterion_04_xi_eta_reconstruction() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let rho = rng.gen_range(1.2..2.5);
        let eps = rng.gen_range(0.01..0.2);
        let bounds = HypothesisBounds {
            eps,
            sigma: 0.0,
            rho,
            mu: 0.05f64.min(0.5 * (rho - 1.0)),
            kappa: 0.0,
            e0: 10.0,
            c0: 3.0,
        };
        let forcing = Forcing::PowerLaw {
            amplitude: random_disk(&mut rng, eps),
            rho,
        };
        let prob = CharOdeProblem::new(
            random_trace(&mut rng),
            random_disk(&mut rng, 0.3),
            rng.gen_range(1.0..5.0),
            forcing,
            bounds,
        )
        .unwrap();
        let st = Stepping::Logarithmic(2e-3);
        let z = solve_z(&prob, 1e4, st).unwrap();
        let xe = solve_xi_eta(&prob, 1e4, st).unwrap();
        assert_eq!(z.len(), xe.len());
        for ((t, zt), s) in z.iter().zip(&xe) {
            assert_eq!(*t, s.t);
            worst = worst.max((zt - s.xi / s.eta.sqrt()).norm());
        }
    }
    verdict(
        4,
        "xi/eta reconstruction",
        worst <= RECON_TOL,
        format!("max |z − ξ/√η| = {worst:.2e} over 50 problems"),
    );
}

#[test]
fn criterion_05_solver_convergence() {
    let start = Instant::now();
    let radial: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&h| common::radial_standing_wave_error(h, 1.0, 3.0, 2.0))
        .collect();
    let cart: Vec<f64> = [32, 64, 128].iter().map(|&n| common::plane_wave_error(n, 1.0)).collect();
    let ratios = [radial[0] / radial[1], radial[1] / radial[2], cart[0] / cart[1], cart[1] / cart[2]];
    let secs = start.elapsed();
    let ok = ratios.iter().all(|r| (RATIO_RANGE[0]..=RATIO_RANGE[1]).contains(r)) && secs < Duration::from_secs(60);
    verdict(
        5,
        "solver convergence",
        ok,
        format!(
            "radial J0 ratios {:.3}, {:.3}; cartesian plane-wave ratios {:.3}, {:.3} ({secs:.2?})",
            ratios[0], ratios[1], ratios[2], ratios[3]
        ),
    );
}

#[test]
fn criterion_06_finite_propagation() {
    let mut cfg = preset("dissipative-radial-default").unwrap();
    cfg.run.t_end = 100.0;
    cfg.analysis = Default::default();
    let art = run_single(&cfg, 0.3).unwrap();
    let radius = cfg.data.radius;
    let mut worst: f64 = 0.0;
    for s in &art.snapshots {
        let Layout::Radial { r0, dr, .. } = s.layout else { panic!("radial run") };
        let inside = s.u.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let outside = s
            .u
            .iter()
            .enumerate()
            .filter(|(j, _)| r0 + *j as f64 * dr > s.t + radius + 2.0 * dr)
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max);
        if inside > 0.0 {
            worst = worst.max(outside / inside);
        }
    }
    let ok = matches!(art.status, ArtifactStatus::Completed { .. }) && worst <= PROPAGATION_TOL;
    verdict(
        6,
        "finite propagation",
        ok,
        format!("max |u| beyond t + R + 2dr relative to max |u|: {worst:.1e} over {} snapshots", art.snapshots.len()),
    );
}

#[test]
fn criterion_07_rotational_energy_conservation() {
    let mut cfg = preset("rotational-radial-default").unwrap();
    cfg.run.t_end = 100.0;
    cfg.grid.window = None;
    cfg.analysis = Default::default();
    let art = run_single(&cfg, 0.3).unwrap();
    let e = &art.energy.energy_sq;
    let e0 = e[0];
    let drift = e.iter().map(|v| (v - e0).abs() / e0).fold(0.0, f64::max);
    let t_last = *art.energy.times.last().unwrap();
    verdict(
        7,
        "rotational energy conservation",
        drift <= DRIFT_MAX && t_last >= 99.0,
        format!("max relative drift {drift:.2e} over t ∈ [0, {t_last:.1}], full grid, 32 cells per radius"),
    );
}

#[test]
fn criterion_08_dissipative_energy_decay() {
    let art = dissipative_run();
    let tr = &art.energy;
    let monotone = tr
        .energy_sq
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + MONOTONE_ULPS * f64::EPSILON));
    let (x, y): (Vec<f64>, Vec<f64>) = tr
        .times
        .iter()
        .zip(&tr.energy_sq)
        .filter(|(t, _)| **t >= WINDOW[0] && **t <= WINDOW[1])
        .map(|(t, e)| (t.ln().ln(), e.ln()))
        .unzip();
    let (slope, _, r2) = regress(&x, &y);
    let lib = art.fit("energy-loglog", None).expect("energy fit");
    let ok = monotone
        && slope <= ENERGY_SLOPE_MAX
        && lib.verdict == Verdict::Pass
        && (lib.slope - slope).abs() < 1e-6;
    verdict(
        8,
        "dissipative energy decay",
        ok,
        format!(
            "non-increasing: {monotone}; log E vs log log t slope {slope:.4} (R² {r2:.4}, bound {ENERGY_SLOPE_MAX}, asymptote −0.474)"
        ),
    );
}

fn pointwise_regression(ray: &RaySample) -> (f64, f64, f64) {
    let (x, y): (Vec<f64>, Vec<f64>) = ray
        .times
        .iter()
        .zip(&ray.du_values)
        .filter(|(t, _)| **t >= WINDOW[0] && **t <= WINDOW[1])
        .map(|(t, du)| (1.0 / t.ln(), du.iter().map(|q| q.norm_sqr()).sum::<f64>() * t))
        .unzip();
    regress(&x, &y)
}

#[test]
fn criterion_09_pointwise_log_improvement() {
    let (d, f) = std::thread::scope(|s| {
        let h = s.spawn(free_run);
        (dissipative_run(), h.join().unwrap())
    });
    let (ds, _, dr2) = pointwise_regression(ray_at(d, 0.0));
    let (fs, _, fr2) = pointwise_regression(ray_at(f, 0.0));
    let d_lib = d.fit("pointwise-log-improvement", Some(0.0)).expect("fit");
    let f_lib = f.fit("pointwise-log-improvement", Some(0.0)).expect("fit");
    let d_ok = dr2 >= POINTWISE_R2 && ds > 0.0 && d_lib.verdict == Verdict::Pass;
    let f_fails = !(fr2 >= POINTWISE_R2 && fs > 0.0) && f_lib.verdict == Verdict::Fail;
    verdict(
        9,
        "pointwise log improvement",
        d_ok && f_fails,
        format!(
            "dissipative σ=0: R² {dr2:.4}, slope {ds:.4} ({:?}); F = 0 control: R² {fr2:.4}, slope {fs:.2e} ({:?})",
            d_lib.verdict, f_lib.verdict
        ),
    );
}

#[test]
fn criterion_10_logarithmic_phase() {
    let art = rotational_run();
    let ray = ray_at(art, 0.0);
    let f_hat = CubicNonlinearity::rotational().at_angle(0.0);
    let p0 = fit_profile_p0(ray, f_hat, *ray.times.last().unwrap()).unwrap();
    let expected = 0.5 * p0.norm_sqr();
    // Own unwrap of arg U over the fit window.
    let mut phase = Vec::new();
    let mut x = Vec::new();
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for (t, u) in ray.times.iter().zip(&ray.u_values) {
        if *t < WINDOW[0] {
            continue;
        }
        let a = u.arg();
        if let Some(p) = prev {
            offset += ((p - a) / std::f64::consts::TAU).round() * std::f64::consts::TAU;
        }
        prev = Some(a);
        phase.push(a + offset);
        x.push(t.ln());
    }
    let (slope, _, r2) = regress(&x, &phase);
    let lib = art.fit("phase-log", Some(0.0)).expect("phase fit");
    let ok = (slope - expected).abs() <= PHASE_REL * expected && lib.verdict == Verdict::Pass;
    verdict(
        10,
        "logarithmic phase correction",
        ok,
        format!("d arg U / d log t = {slope:.5} (R² {r2:.6}) vs |P0|²/2 = {expected:.5}"),
    );
}

#[test]
fn criterion_11_profile_conformance() {
    let (d, r) = std::thread::scope(|s| {
        let h = s.spawn(rotational_run);
        (dissipative_run(), h.join().unwrap())
    });
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, art, f_hat) in [
        ("dissipative", d, C64::new(1.0, 0.0)),
        ("rotational", r, C64::new(0.0, -1.0)),
    ] {
        let ray = ray_at(art, 0.0);
        let tm = *ray.times.last().unwrap();
        let p0 = fit_profile_p0(ray, f_hat, tm).unwrap();
        let fit = verify_profile_convergence(ray, p0, f_hat, tm).unwrap();
        ok &= fit.slope < 0.0 && fit.verdict == Verdict::Pass;
        lines.push(format!("{name} residual slope {:.3}", fit.slope));
    }
    // Closed loop: rays manufactured from the flow itself.
    let times = log_samples(2.0, 1e4, 40);
    for (f_hat, p0) in [(C64::new(1.0, 0.0), C64::new(0.3, 0.1)), (C64::new(0.0, -1.0), C64::new(0.2, -0.2))] {
        let ray = RaySample::manufactured(f_hat, p0, 0.0, 0.0, &times).unwrap();
        let back = fit_profile_p0(&ray, f_hat, 1e4).unwrap();
        let fit = verify_profile_convergence(&ray, back, f_hat, 1e4).unwrap();
        ok &= fit.verdict == Verdict::PassDegenerate && (back - p0).norm() < 1e-12;
        lines.push(format!("manufactured F = {f_hat}: {:?}, |ΔP0| {:.1e}", fit.verdict, (back - p0).norm()));
    }
    verdict(11, "profile conformance", ok, lines.join("; "));
}

#[test]
fn criterion_12_blowup_contrast() {
    let anti = run_single(&preset("antidissipative-blowup").unwrap(), 0.5).unwrap();
    let mut cfg = preset("dissipative-radial-default").unwrap();
    cfg.run.t_end = preset("antidissipative-blowup").unwrap().run.t_end;
    cfg.analysis = Default::default();
    let diss = run_single(&cfg, 0.5).unwrap();
    let ok = matches!(anti.status, ArtifactStatus::Blowup { .. })
        && matches!(diss.status, ArtifactStatus::Completed { .. });
    verdict(
        12,
        "blow-up contrast",
        ok,
        format!("antidissipative ε = 0.5: {:?}; dissipative ε = 0.5: {:?}", anti.status, diss.status),
    );
}

#[test]
fn criterion_13_classifier_truth_table() {
    let rows = [
        ("dissipative", 1.0),
        ("rotational", 0.0),
        ("null-form-a", 0.0),
        ("antidissipative", -1.0),
    ];
    let c: Vec<_> = rows
        .iter()
        .map(|(name, _)| CubicNonlinearity::preset(name).unwrap().classify(1024, C0_TOL).unwrap())
        .collect();
    let flags = c[0].satisfies_agemi
        && c[0].strictly_dissipative
        && c[1].satisfies_agemi
        && c[1].purely_rotational
        && !c[1].strictly_dissipative
        && c[2].satisfies_null_condition
        && !c[3].satisfies_agemi;
    let c0_err = c.iter().zip(&rows).map(|(k, (_, want))| (k.c0 - want).abs()).fold(0.0, f64::max);
    verdict(
        13,
        "classifier truth table",
        flags && c0_err <= C0_TOL,
        format!(
            "c0 = {:?}, max error {c0_err:.1e}",
            c.iter().map(|k| k.c0).collect::<Vec<_>>()
        ),
    );
}
