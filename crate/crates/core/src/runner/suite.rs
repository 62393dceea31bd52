//! The `ode-suite` battery: randomized and fixed checks of the profile
//! equation, the model ODE along a characteristic and the classifier.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::char_ode::{
    dissipative_power_law_preset, extract_profile, log_samples, solve_xi_eta, solve_z, verify_asymptotic_bound,
    CharOdeProblem, Forcing, HypothesisBounds, Stepping, DEFAULT_SLOPE_SLACK, DEFAULT_TAIL_TOL,
};
use crate::error::Result;
use crate::nonlinearity::CubicNonlinearity;
use crate::profile::{explicit_profile, integrate_profile, phase_theta, ProfileParams};
use crate::quadrature::gauss_legendre;
use crate::C64;

pub const PROFILE_CASES: usize = 200;
pub const PROFILE_TOL: f64 = 1e-7;
pub const PHASE_CASES: usize = 100;
pub const PHASE_TOL: f64 = 1e-9;
pub const RECONSTRUCTION_CASES: usize = 50;
pub const RECONSTRUCTION_TOL: f64 = 1e-7;
pub const MODEL_SLOPE_MAX: f64 = -0.90;
pub const RATE_TOL: f64 = 0.01;
pub const CLASSIFY_TOL: f64 = 1e-10;

/// One line of the battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub name: String,
    pub passed: bool,
    /// Measured quantity compared against `threshold`.
    pub value: f64,
    pub threshold: f64,
    pub seconds: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub entries: Vec<SuiteEntry>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn entry(&self, name: &str) -> Option<&SuiteEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

fn timed(name: &str, threshold: f64, f: impl FnOnce() -> Result<(bool, f64, String)>) -> SuiteEntry {
    let start = Instant::now();
    let (passed, value, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, f64::NAN, format!("error: {e}")),
    };
    SuiteEntry {
        name: name.to_string(),
        passed,
        value,
        threshold,
        seconds: start.elapsed().as_secs_f64(),
        detail,
    }
}

fn random_disk(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    let r = radius * rng.gen::<f64>().sqrt();
    C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// `F(ω̂)` with `Re ≥ 0` and modulus at most `radius`.
fn random_trace(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    let z = random_disk(rng, radius);
    C64::new(z.re.abs(), z.im)
}

/// RK4 against the closed form on random parameters.
pub fn profile_oracle(rng: &mut ChaCha8Rng, cases: usize) -> Result<(bool, f64, String)> {
    let mut worst: f64 = 0.0;
    let mut at = ProfileParams::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for _ in 0..cases {
        let p = ProfileParams::new(random_trace(rng, 2.0), random_disk(rng, 1.0));
        let tau = rng.gen_range(0.0..100.0);
        let err = (integrate_profile(&p, tau, 5e-3)? - explicit_profile(&p, tau)?).norm();
        if err > worst {
            worst = err;
            at = p;
        }
    }
    Ok((
        worst <= PROFILE_TOL,
        worst,
        format!("{cases} cases, worst at F = {}, P0 = {}", at.f_hat, at.p0),
    ))
}

/// Closed-form phase against Gauss–Legendre quadrature of its integrand.
pub fn phase_oracle(rng: &mut ChaCha8Rng, cases: usize) -> Result<(bool, f64, String)> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let p = ProfileParams::new(random_trace(rng, 2.0), random_disk(rng, 1.0));
        let tau = rng.gen_range(0.0..100.0);
        let m = p.p0.norm_sqr();
        let a = p.f_hat.re;
        let q = 0.5 * p.f_hat.im * gauss_legendre(|s| m / (1.0 + a * m * s), 0.0, tau, 4000);
        worst = worst.max((phase_theta(&p, tau)? - q).abs());
    }
    Ok((worst <= PHASE_TOL, worst, format!("{cases} cases")))
}

/// Residual slope of the model ODE preset over `[1e2, 1e6]`.
pub fn model_ode_rate() -> Result<(bool, f64, String)> {
    let p = dissipative_power_law_preset();
    let st = Stepping::Logarithmic(1e-3);
    let prof = extract_profile(&p, 1e8, st, DEFAULT_TAIL_TOL)?;
    let fit = verify_asymptotic_bound(&p, &prof, &log_samples(1e2, 1e6, 10), st, DEFAULT_SLOPE_SLACK)?;
    Ok((
        fit.passed() && fit.slope <= MODEL_SLOPE_MAX,
        fit.slope,
        format!(
            "theory {}, R² {:.4}, p0 = {}, tail bound {:.2e}",
            p.bounds.convergence_exponent(),
            fit.r_squared,
            prof.p0,
            prof.tail_bound
        ),
    ))
}

/// `solve_z` against `ξ/√η` on random forced problems.
pub fn reconstruction_oracle(rng: &mut ChaCha8Rng, cases: usize) -> Result<(bool, f64, String)> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let rho = rng.gen_range(1.2..2.5);
        let eps = rng.gen_range(0.01..0.2);
        let bounds = HypothesisBounds {
            eps,
            sigma: 0.0,
            rho,
            mu: 0.5 * (rho - 1.0).min(0.1),
            kappa: 0.0,
            e0: 10.0,
            c0: 3.0,
        };
        let prob = CharOdeProblem::new(
            random_trace(rng, 2.0),
            random_disk(rng, 0.3),
            rng.gen_range(1.0..5.0),
            Forcing::PowerLaw {
                amplitude: random_disk(rng, eps),
                rho,
            },
            bounds,
        )?;
        let st = Stepping::Logarithmic(2e-3);
        let z = solve_z(&prob, 1e4, st)?;
        let xe = solve_xi_eta(&prob, 1e4, st)?;
        for ((_, zt), s) in z.iter().zip(&xe) {
            worst = worst.max((zt - s.z()).norm());
        }
    }
    Ok((worst <= RECONSTRUCTION_TOL, worst, format!("{cases} problems to t = 1e4")))
}

/// `τ|P(τ)|²·Re F(ω̂) → 1`, checked at `τ = 1e6`.
pub fn dissipation_rate(rng: &mut ChaCha8Rng) -> Result<(bool, f64, String)> {
    let tau = 1e6;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let p = ProfileParams::new(
            C64::new(rng.gen_range(0.1..2.0), rng.gen_range(-2.0..2.0)),
            C64::from_polar(rng.gen_range(0.05..1.0), rng.gen_range(0.0..std::f64::consts::TAU)),
        );
        let rate = tau * explicit_profile(&p, tau)?.norm_sqr() * p.f_hat.re;
        worst = worst.max((rate - 1.0).abs());
    }
    Ok((worst <= RATE_TOL, worst, "20 cases at τ = 1e6".into()))
}

/// The four named nonlinearities against their expected flags and `c0`.
pub fn classifier_table() -> Result<(bool, f64, String)> {
    // (name, agemi, dissipative, rotational, null, c0)
    let table = [
        ("dissipative", true, true, false, false, 1.0),
        ("rotational", true, false, true, false, 0.0),
        ("null-form-a", true, false, true, true, 0.0),
        ("antidissipative", false, false, false, false, -1.0),
    ];
    let mut worst: f64 = 0.0;
    let mut ok = true;
    let mut bad = Vec::new();
    for (name, agemi, diss, rot, null, c0) in table {
        let c = CubicNonlinearity::preset(name)?.classify(256, CLASSIFY_TOL)?;
        let flags = c.satisfies_agemi == agemi
            && c.strictly_dissipative == diss
            && c.purely_rotational == rot
            && c.satisfies_null_condition == null;
        worst = worst.max((c.c0 - c0).abs());
        if !flags {
            ok = false;
            bad.push(name);
        }
    }
    let detail = if bad.is_empty() { "all flags match".to_string() } else { format!("mismatch: {}", bad.join(", ")) };
    Ok((ok && worst <= CLASSIFY_TOL, worst, detail))
}

/// Runs the whole battery from one seed.
pub fn run_ode_suite(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = vec![
        timed("profile-oracle", PROFILE_TOL, || profile_oracle(&mut rng, PROFILE_CASES)),
        timed("phase-closed-form", PHASE_TOL, || phase_oracle(&mut rng, PHASE_CASES)),
        timed("model-ode-rate", MODEL_SLOPE_MAX, model_ode_rate),
        timed("xi-eta-reconstruction", RECONSTRUCTION_TOL, || {
            reconstruction_oracle(&mut rng, RECONSTRUCTION_CASES)
        }),
        timed("dissipation-rate", RATE_TOL, || dissipation_rate(&mut rng)),
        timed("classifier-table", CLASSIFY_TOL, classifier_table),
    ];
    SuiteReport { seed, entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_entries_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(profile_oracle(&mut rng, 20).unwrap().0);
        assert!(phase_oracle(&mut rng, 20).unwrap().0);
        assert!(reconstruction_oracle(&mut rng, 3).unwrap().0);
        let r = dissipation_rate(&mut rng).unwrap();
        assert!(r.0, "{r:?}");
        let r = classifier_table().unwrap();
        assert!(r.0, "{r:?}");
    }
}
