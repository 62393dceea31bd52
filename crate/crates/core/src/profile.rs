//! The asymptotic profile equation
//!
//! ```text
//! ∂_τ P = −(F(ω̂)/2) |P|² P,      P(0) = P₀
//! ```
//!
//! solved ray by ray. With `a = Re F(ω̂)` and `b = Im F(ω̂)` the solution is
//!
//! ```text
//! P(τ) = P₀ exp(−iΘ(τ)) / √(1 + a|P₀|²τ),
//! Θ(τ) = (b/2) ∫₀^τ |P₀|² / (1 + a|P₀|²s) ds.
//! ```

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::nonlinearity::CubicNonlinearity;
use crate::{rk4, C64};

/// Trace value `F(ω̂)` for one ray together with the initial profile value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileParams {
    pub f_hat: C64,
    pub p0: C64,
}

impl ProfileParams {
    pub fn new(f_hat: C64, p0: C64) -> Self {
        Self { f_hat, p0 }
    }

    /// `1 + Re F(ω̂)·|P₀|²·τ`.
    pub fn radicand(&self, tau: f64) -> f64 {
        1.0 + self.f_hat.re * self.p0.norm_sqr() * tau
    }

    /// Profile blow-up time `−1/(Re F(ω̂)|P₀|²)`, only for anti-dissipative rays.
    pub fn blowup_time(&self) -> Option<f64> {
        let rate = self.f_hat.re * self.p0.norm_sqr();
        (rate < 0.0).then(|| -1.0 / rate)
    }

    /// The reversed flow: integrating backwards in `τ` is the forward flow
    /// with `F(ω̂)` negated.
    pub fn reversed(&self) -> Self {
        Self {
            f_hat: -self.f_hat,
            p0: self.p0,
        }
    }
}

/// Closed-form phase `Θ(τ)`.
pub fn phase_theta(params: &ProfileParams, tau: f64) -> Result<f64> {
    let m = params.p0.norm_sqr();
    let x = params.f_hat.re * m * tau;
    if 1.0 + x <= 0.0 {
        return Err(Error::Domain(format!(
            "phase log argument 1 + Re F|P₀|²τ = {} is not positive",
            1.0 + x
        )));
    }
    // (b/2a)·log(1 + x) written as (b/2)·m·τ·log1p(x)/x, stable as a → 0.
    let log_ratio = if x.abs() < 1e-8 {
        1.0 - x / 2.0 + x * x / 3.0
    } else {
        x.ln_1p() / x
    };
    Ok(0.5 * params.f_hat.im * m * tau * log_ratio)
}

/// Closed-form profile `P(τ)`.
pub fn explicit_profile(params: &ProfileParams, tau: f64) -> Result<C64> {
    if params.p0 == C64::new(0.0, 0.0) {
        return Ok(params.p0);
    }
    let radicand = params.radicand(tau);
    if radicand <= 0.0 {
        return Err(Error::Domain(format!(
            "profile radicand {radicand} is not positive at τ = {tau} (blow-up time reached)"
        )));
    }
    let theta = phase_theta(params, tau)?;
    Ok(params.p0 * C64::from_polar(1.0 / radicand.sqrt(), -theta))
}

/// Upper bound `|P₀|/√(1 + Re F(ω̂)|P₀|²τ)`; equal to `|P(τ)|` whenever
/// `Re F(ω̂) ≥ 0`.
pub fn modulus_bound(params: &ProfileParams, tau: f64) -> f64 {
    debug_assert!(params.f_hat.re >= 0.0, "modulus bound needs Re F(ω̂) ≥ 0");
    params.p0.norm() / params.radicand(tau).sqrt()
}

/// Fixed-step RK4 integration of the profile equation up to `tau_end`.
pub fn integrate_profile(params: &ProfileParams, tau_end: f64, dt: f64) -> Result<C64> {
    if !(dt > 0.0) || !(tau_end >= 0.0) {
        return Err(Error::Domain(format!(
            "integrate_profile needs dt > 0 and tau_end ≥ 0 (dt = {dt}, tau_end = {tau_end})"
        )));
    }
    let k = params.f_hat;
    let rhs = move |_: f64, y: &[f64; 2]| {
        let p = C64::new(y[0], y[1]);
        let d = -0.5 * k * p.norm_sqr() * p;
        [d.re, d.im]
    };
    let n = rk4::steps_for(tau_end, dt);
    let y = rk4::integrate(rhs, 0.0, [params.p0.re, params.p0.im], tau_end, n, |_, _| {})?;
    Ok(C64::new(y[0], y[1]))
}

/// Sampled initial profile `P₀(σ, θ)` on a tensor grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileFunction {
    pub sigma_grid: Vec<f64>,
    pub omega_grid: Vec<f64>,
    /// Row-major: `p0_values[i * omega_grid.len() + j]` is `P₀(σ_i, θ_j)`.
    pub p0_values: Vec<C64>,
    pub tau: f64,
}

impl ProfileFunction {
    pub fn new(sigma_grid: Vec<f64>, omega_grid: Vec<f64>, p0_values: Vec<C64>) -> Result<Self> {
        if p0_values.len() != sigma_grid.len() * omega_grid.len() {
            return Err(Error::Domain(format!(
                "profile grid has {} values for a {}×{} grid",
                p0_values.len(),
                sigma_grid.len(),
                omega_grid.len()
            )));
        }
        Ok(Self {
            sigma_grid,
            omega_grid,
            p0_values,
            tau: 0.0,
        })
    }

    pub fn p0(&self, i_sigma: usize, j_omega: usize) -> C64 {
        self.p0_values[i_sigma * self.omega_grid.len() + j_omega]
    }

    /// Evolves every sample to slow time `tau` with the trace of `f`.
    pub fn evolved(&self, f: &CubicNonlinearity, tau: f64) -> Result<Vec<C64>> {
        let traces: Vec<C64> = self.omega_grid.iter().map(|&th| f.at_angle(th)).collect();
        let mut out = Vec::with_capacity(self.p0_values.len());
        for (i, _) in self.sigma_grid.iter().enumerate() {
            for (j, f_hat) in traces.iter().enumerate() {
                out.push(explicit_profile(&ProfileParams::new(*f_hat, self.p0(i, j)), tau)?);
            }
        }
        Ok(out)
    }

    /// Empirical `sup |P₀(σ,ω)|⟨σ⟩^{1−μ}/ε`, the constant in the profile
    /// size bound for this run.
    pub fn bound_constant(&self, eps: f64, mu: f64) -> f64 {
        let mut sup: f64 = 0.0;
        for (i, sigma) in self.sigma_grid.iter().enumerate() {
            let weight = (1.0 + sigma * sigma).sqrt().powf(1.0 - mu);
            for j in 0..self.omega_grid.len() {
                sup = sup.max(self.p0(i, j).norm() * weight / eps);
            }
        }
        sup
    }

    /// CSV with columns `sigma,theta,re_p0,im_p0`.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "sigma,theta,re_p0,im_p0")?;
        for (i, sigma) in self.sigma_grid.iter().enumerate() {
            for (j, theta) in self.omega_grid.iter().enumerate() {
                let p = self.p0(i, j);
                writeln!(w, "{sigma},{theta},{},{}", p.re, p.im)?;
            }
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
            .map_err(|e| Error::io(path, e))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config(format!("profile csv line {}: {e}", n + 1)))?;
            if cols.len() != 4 {
                return Err(Error::Config(format!(
                    "profile csv line {} has {} columns",
                    n + 1,
                    cols.len()
                )));
            }
            rows.push(cols);
        }
        let mut sigma_grid: Vec<f64> = Vec::new();
        let mut omega_grid: Vec<f64> = Vec::new();
        for r in &rows {
            if !sigma_grid.contains(&r[0]) {
                sigma_grid.push(r[0]);
            }
            if !omega_grid.contains(&r[1]) {
                omega_grid.push(r[1]);
            }
        }
        let values = rows.iter().map(|r| C64::new(r[2], r[3])).collect();
        Self::new(sigma_grid, omega_grid, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Independent route to `Θ`: quadrature of the integrand.
    fn theta_by_quadrature(p: &ProfileParams, tau: f64) -> f64 {
        let m = p.p0.norm_sqr();
        let a = p.f_hat.re;
        0.5 * p.f_hat.im * gauss_legendre(|s| m / (1.0 + a * m * s), 0.0, tau, 64)
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let p = ProfileParams::new(c(0.3, -2.0), c(0.0, 0.0));
        assert_eq!(explicit_profile(&p, 5.0).unwrap(), c(0.0, 0.0));
        assert_eq!(integrate_profile(&p, 5.0, 0.1).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn explicit_examples() {
        let p = explicit_profile(&ProfileParams::new(c(1.0, 0.0), c(1.0, 0.0)), 3.0).unwrap();
        assert!((p - c(0.5, 0.0)).norm() < 1e-15);
        let p = explicit_profile(&ProfileParams::new(c(0.0, -1.0), c(1.0, 0.0)), 2.0).unwrap();
        assert!((p - C64::from_polar(1.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn phase_examples_against_quadrature() {
        let real = ProfileParams::new(c(2.0, 0.0), c(0.7, 0.1));
        assert_eq!(phase_theta(&real, 4.0).unwrap(), 0.0);

        let rot = ProfileParams::new(c(0.0, -1.0), c(1.0, 0.0));
        let q = theta_by_quadrature(&rot, 2.0);
        assert!((q + 1.0).abs() < 1e-13);
        assert!((phase_theta(&rot, 2.0).unwrap() - q).abs() < 1e-13);

        let mixed = ProfileParams::new(c(1.0, 1.0), c(1.0, 0.0));
        let q = theta_by_quadrature(&mixed, 3.0);
        assert!((q - 0.5 * 4f64.ln()).abs() < 1e-12);
        assert!((phase_theta(&mixed, 3.0).unwrap() - q).abs() < 1e-12);
    }

    #[test]
    fn integrator_matches_examples() {
        let p = integrate_profile(&ProfileParams::new(c(1.0, 0.0), c(1.0, 0.0)), 3.0, 1e-3).unwrap();
        assert!((p - c(0.5, 0.0)).norm() < 1e-9);
        let p = integrate_profile(&ProfileParams::new(c(0.0, -1.0), c(1.0, 0.0)), 2.0, 1e-3).unwrap();
        assert!((p - C64::from_polar(1.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn modulus_bound_examples() {
        let p = ProfileParams::new(c(0.0, 3.0), c(0.6, 0.8));
        assert!((modulus_bound(&p, 40.0) - 1.0).abs() < 1e-15);
        let p = ProfileParams::new(c(1.0, 0.0), c(1.0, 0.0));
        assert!((modulus_bound(&p, 99.0) - 0.1).abs() < 1e-15);
        let p = ProfileParams::new(c(2.0, 0.0), c(1.0, 0.0));
        assert_eq!(modulus_bound(&p, 0.0), 1.0);
    }

    #[test]
    fn antidissipative_domain_error_and_blowup_time() {
        let p = ProfileParams::new(c(-1.0, 0.0), c(1.0, 0.0));
        assert_eq!(p.blowup_time(), Some(1.0));
        assert!(explicit_profile(&p, 0.5).is_ok());
        assert!(matches!(explicit_profile(&p, 1.0), Err(Error::Domain(_))));
        assert!(matches!(phase_theta(&p, 2.0), Err(Error::Domain(_))));
        assert!(matches!(integrate_profile(&p, 2.0, 1e-3), Err(Error::Step { .. })));
        assert_eq!(ProfileParams::new(c(1.0, 0.0), c(1.0, 0.0)).blowup_time(), None);
    }

    #[test]
    fn dissipation_rate_law() {
        for c0 in [0.5, 1.0, 2.0] {
            let p = ProfileParams::new(c(c0, 0.7), c(0.3, -0.2));
            let tau = 1e6;
            let m = explicit_profile(&p, tau).unwrap().norm_sqr();
            assert!((tau * m * c0 - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn reversed_flow_inverts() {
        let p = ProfileParams::new(c(0.8, -0.4), c(0.5, 0.3));
        let forward = explicit_profile(&p, 3.0).unwrap();
        let back = explicit_profile(&ProfileParams::new(-p.f_hat, forward), 3.0).unwrap();
        assert!((back - p.p0).norm() < 1e-14);
    }

    #[test]
    fn profile_function_csv_and_bound() {
        let pf = ProfileFunction::new(
            vec![-1.0, 0.0, 2.5],
            vec![0.0, 1.5],
            vec![c(0.1, 0.0), c(0.0, 0.2), c(0.3, 0.3), c(-0.1, 0.0), c(0.05, 0.0), c(0.0, -0.01)],
        )
        .unwrap();
        let mut buf = Vec::new();
        pf.write_csv(&mut buf).unwrap();
        let back = ProfileFunction::from_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, pf);
        let b = pf.bound_constant(0.1, 0.05);
        assert!((b - 0.3f64.hypot(0.3) / 0.1).abs() < 1e-12);
        let evolved = pf.evolved(&CubicNonlinearity::rotational(), 2.0).unwrap();
        for (e, p) in evolved.iter().zip(&pf.p0_values) {
            assert!((e.norm() - p.norm()).abs() < 1e-15);
        }
        assert!(ProfileFunction::new(vec![0.0], vec![0.0, 1.0], vec![c(0.0, 0.0)]).is_err());
    }

    proptest! {
        #[test]
        fn modulus_non_increasing(a in 0.0..2.0f64, b in -2.0..2.0f64, r in 0.0..1.0f64, ph in 0.0..6.3f64, t1 in 0.0..100.0f64, dt in 0.0..50.0f64) {
            let p = ProfileParams::new(c(a, b), C64::from_polar(r, ph));
            let m1 = explicit_profile(&p, t1).unwrap().norm();
            let m2 = explicit_profile(&p, t1 + dt).unwrap().norm();
            prop_assert!(m2 <= m1 * (1.0 + 1e-14));
            prop_assert!((modulus_bound(&p, t1) - m1).abs() <= 1e-14);
        }

        #[test]
        fn rotational_modulus_conserved(b in -2.0..2.0f64, r in 0.0..1.0f64, ph in 0.0..6.3f64, tau in 0.0..100.0f64) {
            let p = ProfileParams::new(c(0.0, b), C64::from_polar(r, ph));
            let m = explicit_profile(&p, tau).unwrap().norm();
            prop_assert!((m - r).abs() <= 4.0 * f64::EPSILON);
        }
    }
}
