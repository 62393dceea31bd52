//! Ray data `U = D₋(r^{1/2}u) = ½(∂_r − ∂_t)(r^{1/2}u)` sampled from solver
//! snapshots, and the fits that compare it with the profile law.
//!
//! Along `r = t + σ` the solution behaves like
//! `∂u ≈ ω̂ r^{−1/2} P(log t, σ, ω)`, so `U(t) ≈ P(log t)` and
//! `|∂u|² t ≈ 2|P|²`.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{linear_fit, DecayFit, Verdict};
use crate::nonlinearity::CubicNonlinearity;
use crate::profile::{explicit_profile, ProfileFunction, ProfileParams};
use crate::solver::{Layout, Snapshot};
use crate::C64;

/// Relative size below which a residual counts as rounding noise.
pub const NOISE_FLOOR: f64 = 1e-7;
/// Samples later than `t_match / MATCH_EXCLUSION` are left out of the
/// residual fit; near the matching time the residual vanishes by construction.
pub const MATCH_EXCLUSION: f64 = 4.0;
/// Largest phase jump between neighbouring samples accepted by the unwrapper.
pub const MAX_PHASE_JUMP: f64 = PI / 2.0;
/// Smallest share of `|∂u|²t` that the `1/log t` term must carry at the
/// window mean; free waves give 0, the asymptotic law 1.
pub const MIN_ELASTICITY: f64 = 0.1;

/// `‖u(t)‖²_E` sampled in time.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyTrace {
    pub times: Vec<f64>,
    pub energy_sq: Vec<f64>,
}

impl EnergyTrace {
    pub fn push(&mut self, t: f64, e: f64) {
        self.times.push(t);
        self.energy_sq.push(e);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest relative increase `(E_{k+1} − E_k)/E_k` (≤ 0 for a
    /// non-increasing trace).
    pub fn max_relative_increase(&self) -> f64 {
        self.energy_sq
            .windows(2)
            .map(|w| if w[0] > 0.0 { (w[1] - w[0]) / w[0] } else { w[1] - w[0] })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Non-increasing up to `ulps` units of rounding per step.
    pub fn is_non_increasing(&self, ulps: f64) -> bool {
        self.max_relative_increase() <= ulps * f64::EPSILON
    }

    /// `max |E − E₀| / E₀`.
    pub fn relative_drift(&self) -> f64 {
        let Some(&e0) = self.energy_sq.first() else {
            return 0.0;
        };
        self.energy_sq
            .iter()
            .map(|e| (e - e0).abs())
            .fold(0.0, f64::max)
            / e0.abs().max(f64::MIN_POSITIVE)
    }

    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "t,energy_sq")?;
        for (t, e) in self.times.iter().zip(&self.energy_sq) {
            writeln!(w, "{t},{e}")?;
        }
        Ok(())
    }
}

/// `U` and `∂u` along the ray `|x| = t + σ`, `x/|x| = (cos ω, sin ω)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaySample {
    pub sigma: f64,
    pub omega: f64,
    pub times: Vec<f64>,
    pub u_values: Vec<C64>,
    pub du_values: Vec<[C64; 3]>,
}

/// `t_{0,σ} = max{2, −2σ}`.
pub fn start_time(sigma: f64) -> f64 {
    (-2.0 * sigma).max(2.0)
}

impl RaySample {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Indices with `t_lo ≤ t ≤ t_hi`.
    fn indices(&self, t_lo: f64, t_hi: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&k| self.times[k] >= t_lo && self.times[k] <= t_hi)
            .collect()
    }

    /// Sub-ray restricted to `[t_lo, t_hi]`.
    pub fn restrict(&self, t_lo: f64, t_hi: f64) -> Self {
        let idx = self.indices(t_lo, t_hi);
        Self {
            sigma: self.sigma,
            omega: self.omega,
            times: idx.iter().map(|&k| self.times[k]).collect(),
            u_values: idx.iter().map(|&k| self.u_values[k]).collect(),
            du_values: idx.iter().map(|&k| self.du_values[k]).collect(),
        }
    }

    /// `arg U` made continuous.
    pub fn unwrapped_phase(&self) -> Result<Vec<f64>> {
        unwrap_phase(&self.u_values)
    }

    /// Columns `t,re_u,im_u,abs_u,arg_u` with the phase unwrapped.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        let phase = self.unwrapped_phase()?;
        let io = |e| Error::io("ray csv", e);
        writeln!(w, "t,re_u,im_u,abs_u,arg_u").map_err(io)?;
        for ((t, u), a) in self.times.iter().zip(&self.u_values).zip(&phase) {
            writeln!(w, "{t},{},{},{},{a}", u.re, u.im, u.norm()).map_err(io)?;
        }
        Ok(())
    }

    /// Ray whose `U` follows the profile flow exactly: `U(t) = P(log t)`,
    /// `∂u = ω̂ r^{−1/2} U`.
    pub fn manufactured(f_hat: C64, p0: C64, sigma: f64, omega: f64, times: &[f64]) -> Result<Self> {
        let params = ProfileParams::new(f_hat, p0);
        let mut u_values = Vec::with_capacity(times.len());
        let mut du_values = Vec::with_capacity(times.len());
        for &t in times {
            let u = explicit_profile(&params, t.ln())?;
            let s = (t + sigma).sqrt().recip();
            u_values.push(u);
            du_values.push([-u * s, u * (s * omega.cos()), u * (s * omega.sin())]);
        }
        Ok(Self {
            sigma,
            omega,
            times: times.to_vec(),
            u_values,
            du_values,
        })
    }
}

/// Continuous phase of a complex series; fails if neighbouring samples turn
/// by more than [`MAX_PHASE_JUMP`].
pub fn unwrap_phase(values: &[C64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(values.len());
    let mut prev: Option<(f64, f64)> = None;
    for (k, z) in values.iter().enumerate() {
        let raw = z.arg();
        let val = match prev {
            None => raw,
            Some((prev_raw, prev_val)) => {
                let mut d = raw - prev_raw;
                d -= 2.0 * PI * (d / (2.0 * PI)).round();
                if d.abs() > MAX_PHASE_JUMP {
                    return Err(Error::Unwrap(format!(
                        "phase jump {d:.3} rad at sample {k} exceeds {MAX_PHASE_JUMP:.3}; sample more densely"
                    )));
                }
                prev_val + d
            }
        };
        out.push(val);
        prev = Some((raw, val));
    }
    Ok(out)
}

/// Cubic Lagrange weights for nodes `−1, 0, 1, 2` at offset `s ∈ [0, 1)`.
fn lagrange4(s: f64) -> [f64; 4] {
    [
        -s * (s - 1.0) * (s - 2.0) / 6.0,
        (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
        -(s + 1.0) * s * (s - 2.0) / 2.0,
        (s + 1.0) * s * (s - 1.0) / 6.0,
    ]
}

/// Fourth-order centred first derivative from five samples.
#[inline]
fn d4(m2: C64, m1: C64, p1: C64, p2: C64, h: f64) -> C64 {
    (m2 - p2 + (p1 - m1) * 8.0) / (12.0 * h)
}

/// Interpolated `(u, u_r, u_t)` on a radial snapshot.
fn sample_radial(snap: &Snapshot, r0: f64, dr: f64, r: f64) -> Result<(C64, C64, C64)> {
    let len = snap.u.len() as isize;
    // Cells r0 = dr/2 mirror evenly across the axis.
    let axis = (r0 - 0.5 * dr).abs() < 1e-9 * dr;
    let idx = |k: isize| -> Option<usize> {
        if k >= 0 && k < len {
            Some(k as usize)
        } else if k < 0 && axis && -1 - k < len {
            Some((-1 - k) as usize)
        } else {
            None
        }
    };
    let x = (r - r0) / dr;
    let base = x.floor() as isize;
    let w = lagrange4(x - base as f64);
    let (mut u, mut ur, mut ut) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    let range_err = || Error::Range(format!("radius {r} outside the stored snapshot at t = {}", snap.t));
    for (m, wm) in w.iter().enumerate() {
        let k = base - 1 + m as isize;
        let at = |o: isize| idx(k + o).map(|i| snap.u[i]).ok_or_else(range_err);
        let c = at(0)?;
        u += c * *wm;
        ur += d4(at(-2)?, at(-1)?, at(1)?, at(2)?, dr) * *wm;
        ut += snap.ut[idx(k).ok_or_else(range_err)?] * *wm;
    }
    Ok((u, ur, ut))
}

/// Bicubic `(u, ∂_x u, ∂_y u, u_t)` on a Cartesian snapshot.
fn sample_cartesian(snap: &Snapshot, x0: f64, dx: f64, n: usize, x: f64, y: f64) -> Result<[C64; 4]> {
    let fx = (x - x0) / dx;
    let fy = (y - x0) / dx;
    let (bx, by) = (fx.floor() as isize, fy.floor() as isize);
    if bx - 3 < 0 || by - 3 < 0 || bx + 4 >= n as isize || by + 4 >= n as isize {
        return Err(Error::Range(format!("point ({x}, {y}) outside the stored snapshot at t = {}", snap.t)));
    }
    let wx = lagrange4(fx - bx as f64);
    let wy = lagrange4(fy - by as f64);
    let at = |i: isize, k: isize| snap.u[k as usize * n + i as usize];
    let mut out = [C64::new(0.0, 0.0); 4];
    for (b, wyb) in wy.iter().enumerate() {
        let k = by - 1 + b as isize;
        for (a, wxa) in wx.iter().enumerate() {
            let i = bx - 1 + a as isize;
            let w = wxa * wyb;
            out[0] += at(i, k) * w;
            out[1] += d4(at(i - 2, k), at(i - 1, k), at(i + 1, k), at(i + 2, k), dx) * w;
            out[2] += d4(at(i, k - 2), at(i, k - 1), at(i, k + 1), at(i, k + 2), dx) * w;
            out[3] += snap.ut[k as usize * n + i as usize] * w;
        }
    }
    Ok(out)
}

/// Samples `U` and `∂u` along a ray at every snapshot time `≥ t_{0,σ}`.
pub fn extract_ray(snapshots: &[Snapshot], sigma: f64, omega: f64) -> Result<RaySample> {
    let t_start = start_time(sigma);
    let (c, s) = (omega.cos(), omega.sin());
    let mut ray = RaySample {
        sigma,
        omega,
        times: Vec::new(),
        u_values: Vec::new(),
        du_values: Vec::new(),
    };
    for snap in snapshots.iter().filter(|s| s.t >= t_start) {
        let r = snap.t + sigma;
        let (u, ur, ut) = match snap.layout {
            Layout::Radial { r0, dr, .. } => sample_radial(snap, r0, dr, r)?,
            Layout::Cartesian { x0, dx, n } => {
                let [u, ux, uy, ut] = sample_cartesian(snap, x0, dx, n, r * c, r * s)?;
                (u, ux * c + uy * s, ut)
            }
        };
        let sr = r.sqrt();
        ray.times.push(snap.t);
        ray.u_values.push(0.5 * (sr * (ur - ut) + u / (2.0 * sr)));
        ray.du_values.push(match snap.layout {
            Layout::Radial { .. } => [ut, ur * c, ur * s],
            Layout::Cartesian { x0, dx, n } => {
                let [_, ux, uy, _] = sample_cartesian(snap, x0, dx, n, r * c, r * s)?;
                [ut, ux, uy]
            }
        });
    }
    if ray.times.is_empty() {
        return Err(Error::Range(format!("no snapshot at or after t₀ = {t_start} for σ = {sigma}")));
    }
    Ok(ray)
}

fn nearest_index(times: &[f64], t: f64) -> Option<usize> {
    (0..times.len()).min_by(|&a, &b| (times[a] - t).abs().total_cmp(&(times[b] - t).abs()))
}

/// `P₀` obtained by running the profile flow backwards from
/// `U(t_match)` at `τ = log t_match` to `τ = 0`.
pub fn fit_profile_p0(ray: &RaySample, f_hat: C64, t_match: f64) -> Result<C64> {
    let k = nearest_index(&ray.times, t_match).ok_or_else(|| Error::Range("empty ray".into()))?;
    let (t, u) = (ray.times[k], ray.u_values[k]);
    let lo = ray.times.first().copied().unwrap_or(t);
    let hi = ray.times.last().copied().unwrap_or(t);
    if t_match < lo * 0.999 || t_match > hi * 1.001 {
        return Err(Error::Range(format!("t_match = {t_match} outside the ray window [{lo}, {hi}]")));
    }
    explicit_profile(&ProfileParams::new(f_hat, u).reversed(), t.ln()).map_err(|_| {
        Error::Domain(format!(
            "backward flow from U({t}) = {u} leaves the small-data regime (1 − Re F|U|² log t ≤ 0)"
        ))
    })
}

/// Measures `|U(t) − P(log t)|` on `[10 t_{0,σ}, t_match/MATCH_EXCLUSION]`
/// and fits a power law in `t`.
pub fn verify_profile_convergence(ray: &RaySample, p0: C64, f_hat: C64, t_match: f64) -> Result<DecayFit> {
    let t_lo = 10.0 * start_time(ray.sigma);
    let t_hi = t_match / MATCH_EXCLUSION;
    let params = ProfileParams::new(f_hat, p0);
    let idx = ray.indices(t_lo, t_hi);
    let window = [t_lo, t_hi];
    let mut x = Vec::with_capacity(idx.len());
    let mut y = Vec::with_capacity(idx.len());
    let mut scale: f64 = 0.0;
    let mut last = (0.0, 0.0);
    for &k in &idx {
        let t = ray.times[k];
        let p = explicit_profile(&params, t.ln())?;
        let res = (ray.u_values[k] - p).norm();
        scale = scale.max(ray.u_values[k].norm()).max(p.norm());
        x.push(t.ln());
        y.push(res);
        last = (res, p.norm());
    }
    let criterion = "slope < 0 and late residual <= 0.1 |P|".to_string();
    if idx.len() < 3 {
        return Err(Error::Window(format!(
            "only {} ray samples in [{t_lo}, {t_hi}]; extend the run or move t_match later",
            idx.len()
        )));
    }
    let max_res = y.iter().cloned().fold(0.0, f64::max);
    if max_res <= NOISE_FLOOR * scale.max(f64::MIN_POSITIVE) {
        let mut r = DecayFit::degenerate("profile-residual", window, idx.len(), "residual at the noise floor");
        r.criterion = criterion;
        return Ok(r.with_extra("max_residual", max_res).with_extra("p0_abs", p0.norm()));
    }
    let ly: Vec<f64> = y.iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect();
    let lf = linear_fit(&x, &ly)?;
    let mut r = DecayFit::from_linear("profile-residual", &lf, window);
    r.criterion = criterion;
    r.verdict = Verdict::from_bool(lf.slope < 0.0 && last.0 <= 0.1 * last.1);
    r.note = format!("log|U(t) − P(log t)| vs log t, P₀ matched at t = {t_match}");
    Ok(r.with_extra("p0_re", p0.re)
        .with_extra("p0_im", p0.im)
        .with_extra("late_residual", last.0)
        .with_extra("late_profile_abs", last.1))
}

/// Regresses `y = |∂u|²t` against `x = 1/log t` on `window`.
///
/// The dissipative law `|P|² ≈ 1/(C₀τ)` makes `y` proportional to `x`; a
/// free wave gives a constant. PASS needs `R² ≥ 0.95`, a positive slope and
/// an elasticity `slope·x̄/ȳ` of at least [`MIN_ELASTICITY`]; otherwise the
/// intercept dominates. At finite `t` the profile flow predicts
/// `1/(1 + x̄/|P₀|²)` rather than the asymptotic value 1.
pub fn fit_pointwise_decay(ray: &RaySample, window: [f64; 2]) -> Result<DecayFit> {
    check_window(window, ray.times.last().copied())?;
    let idx = ray.indices(window[0], window[1]);
    if idx.len() < 5 {
        return Err(Error::Window(format!("only {} samples in {window:?}", idx.len())));
    }
    let x: Vec<f64> = idx.iter().map(|&k| 1.0 / ray.times[k].ln()).collect();
    let y: Vec<f64> = idx
        .iter()
        .map(|&k| ray.du_values[k].iter().map(|q| q.norm_sqr()).sum::<f64>() * ray.times[k])
        .collect();
    let lf = linear_fit(&x, &y)?;
    let x_mean = x.iter().sum::<f64>() / x.len() as f64;
    let y_mean = y.iter().sum::<f64>() / y.len() as f64;
    let elasticity = if y_mean > 0.0 { lf.slope * x_mean / y_mean } else { 0.0 };
    let ok = lf.r_squared >= 0.95 && lf.slope > 0.0 && elasticity >= MIN_ELASTICITY;
    let mut r = DecayFit::from_linear("pointwise-log-improvement", &lf, window);
    r.criterion = format!("R^2 >= 0.95, slope > 0, slope * mean(x) / mean(y) >= {MIN_ELASTICITY}");
    r.verdict = Verdict::from_bool(ok);
    r.note = "|du|^2 t vs 1/log t".into();
    Ok(r.with_extra("x_mean", x_mean)
        .with_extra("elasticity", elasticity)
        .with_extra("sigma", ray.sigma))
}

fn check_window(window: [f64; 2], t_last: Option<f64>) -> Result<()> {
    if !(window[0] > 1.0 && window[1] >= 10.0 * window[0]) {
        return Err(Error::Window(format!(
            "window {window:?} spans less than a decade (or starts at t ≤ 1)"
        )));
    }
    match t_last {
        Some(t) if t >= 0.999e3 => Ok(()),
        _ => Err(Error::Window(format!("data end at {t_last:?}; need t ≥ 1e3"))),
    }
}

/// `−(1 − 2μ)/(2 − 2μ)`.
pub fn energy_decay_exponent(mu: f64) -> f64 {
    -(1.0 - 2.0 * mu) / (2.0 - 2.0 * mu)
}

/// Regresses `log E` against `log log t` on `window`. PASS needs a slope
/// at most `exponent(μ) + slack` and a non-increasing trace.
pub fn fit_energy_decay(trace: &EnergyTrace, mu: f64, eps: f64, window: [f64; 2], slack: f64) -> Result<DecayFit> {
    check_window(window, trace.times.last().copied())?;
    let idx: Vec<usize> = (0..trace.len())
        .filter(|&k| trace.times[k] >= window[0] && trace.times[k] <= window[1])
        .collect();
    if idx.len() < 5 {
        return Err(Error::Window(format!("only {} energy samples in {window:?}", idx.len())));
    }
    if idx.iter().any(|&k| !(trace.energy_sq[k] > 0.0)) {
        return Err(Error::Fit("energy must be positive to take logarithms".into()));
    }
    let x: Vec<f64> = idx.iter().map(|&k| trace.times[k].ln().ln()).collect();
    let y: Vec<f64> = idx.iter().map(|&k| trace.energy_sq[k].ln()).collect();
    let lf = linear_fit(&x, &y)?;
    let theory = energy_decay_exponent(mu);
    let monotone = trace.is_non_increasing(4.0);
    let mut r = DecayFit::from_linear("energy-loglog", &lf, window);
    r.criterion = format!("slope <= {theory} + {slack} and non-increasing");
    r.verdict = Verdict::from_bool(lf.slope <= theory + slack && monotone);
    r.note = "log E vs log log t".into();
    // Empirical constant in E ≤ C ε^{1/(1−μ)} (log t)^{exponent}.
    let c_emp = idx
        .iter()
        .map(|&k| trace.energy_sq[k] / (eps.powf(1.0 / (1.0 - mu)) * trace.times[k].ln().powf(theory)))
        .fold(0.0, f64::max);
    Ok(r.with_extra("theory_slope", theory)
        .with_extra("non_increasing", if monotone { 1.0 } else { 0.0 })
        .with_extra("max_relative_increase", trace.max_relative_increase())
        .with_extra("bound_constant", c_emp))
}

/// Regresses the unwrapped `arg U` against `log t` on `[10 t_{0,σ}, ∞)` and
/// compares with `−Im F(ω̂)|P₀|²/2` within `rel_tol`.
pub fn fit_phase_slope(ray: &RaySample, p0: C64, f_hat: C64, rel_tol: f64) -> Result<DecayFit> {
    let t_lo = 10.0 * start_time(ray.sigma);
    let sub = ray.restrict(t_lo, f64::INFINITY);
    let window = [t_lo, sub.times.last().copied().unwrap_or(t_lo)];
    if sub.len() < 3 {
        return Err(Error::Window(format!("only {} samples after t = {t_lo}", sub.len())));
    }
    let expected = -0.5 * f_hat.im * p0.norm_sqr();
    let scale = sub.u_values.iter().map(|u| u.norm()).fold(0.0, f64::max);
    let criterion = format!("|slope - {expected}| <= {rel_tol} |{expected}|");
    if scale <= NOISE_FLOOR * p0.norm().max(1.0) * 1e-3 {
        let mut r = DecayFit::degenerate("phase-log", window, sub.len(), "U vanishes; phase undefined");
        r.criterion = criterion;
        return Ok(r);
    }
    let phase = sub.unwrapped_phase()?;
    let x: Vec<f64> = sub.times.iter().map(|t| t.ln()).collect();
    let lf = linear_fit(&x, &phase)?;
    let mut r = DecayFit::from_linear("phase-log", &lf, window);
    r.criterion = criterion;
    r.verdict = if expected == 0.0 {
        if lf.slope.abs() <= 1e-9 {
            Verdict::PassDegenerate
        } else {
            Verdict::Fail
        }
    } else {
        Verdict::from_bool((lf.slope - expected).abs() <= rel_tol * expected.abs())
    };
    r.note = "unwrapped arg U vs log t".into();
    Ok(r.with_extra("expected_slope", expected).with_extra("p0_abs_sq", p0.norm_sqr()))
}

/// Fits the decay of `|r^{1/2}∂u − ω̂ U|` along the ray; the two routes to
/// the leading behaviour must agree increasingly well.
pub fn extraction_discrepancy(ray: &RaySample) -> Result<DecayFit> {
    let t_lo = 10.0 * start_time(ray.sigma);
    let sub = ray.restrict(t_lo, f64::INFINITY);
    let window = [t_lo, sub.times.last().copied().unwrap_or(t_lo)];
    let (c, s) = (ray.omega.cos(), ray.omega.sin());
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut scale: f64 = 0.0;
    for k in 0..sub.len() {
        let t = sub.times[k];
        let sr = (t + ray.sigma).sqrt();
        let u = sub.u_values[k];
        let du = sub.du_values[k];
        let d = ((du[0] * sr + u).norm_sqr() + (du[1] * sr - u * c).norm_sqr() + (du[2] * sr - u * s).norm_sqr()).sqrt();
        scale = scale.max(u.norm());
        x.push(t.ln());
        y.push(d);
    }
    if x.len() < 3 {
        return Err(Error::Window(format!("only {} samples after t = {t_lo}", x.len())));
    }
    if y.iter().cloned().fold(0.0, f64::max) <= NOISE_FLOOR * scale.max(f64::MIN_POSITIVE) {
        let mut r = DecayFit::degenerate("extraction-discrepancy", window, x.len(), "discrepancy at the noise floor");
        r.criterion = "slope < 0".into();
        return Ok(r);
    }
    let ly: Vec<f64> = y.iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect();
    let lf = linear_fit(&x, &ly)?;
    let mut r = DecayFit::from_linear("extraction-discrepancy", &lf, window);
    r.criterion = "slope < 0".into();
    r.verdict = Verdict::from_bool(lf.slope < 0.0);
    r.note = "log|r^{1/2} du - omega_hat U| vs log t".into();
    Ok(r)
}

/// Scattering-type diagnostics for a fitted profile grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreenessReport {
    /// `Re F(ω̂) = 0` on every grid direction, so `|P|` is `τ`-independent.
    pub modulus_conserved: bool,
    /// Some `Im F(ω̂)|P₀|²` is non-zero, so `arg P` drifts like `log t`.
    pub phase_drift: bool,
    pub asymptotically_free: bool,
    /// `max |Im F(ω̂)| |P₀|² / 2` over the grid.
    pub max_drift_rate: f64,
    /// `(∫∫ |P₀|² dσ dω)^{1/2}` by the trapezoid rule.
    pub l2_norm: f64,
}

pub fn asymptotic_freeness_diagnostic(profile: &ProfileFunction, f: &CubicNonlinearity, tol: f64) -> FreenessReport {
    let ns = profile.sigma_grid.len();
    let nw = profile.omega_grid.len();
    let traces: Vec<C64> = profile.omega_grid.iter().map(|&w| f.at_angle(w)).collect();
    let modulus_conserved = traces.iter().all(|fh| fh.re.abs() <= tol);
    let mut max_drift_rate: f64 = 0.0;
    for i in 0..ns {
        for (j, fh) in traces.iter().enumerate() {
            max_drift_rate = max_drift_rate.max(0.5 * fh.im.abs() * profile.p0(i, j).norm_sqr());
        }
    }
    let phase_drift = max_drift_rate > tol;
    let trap = |grid: &[f64], k: usize| -> f64 {
        if grid.len() < 2 {
            return 1.0;
        }
        let left = if k > 0 { grid[k] - grid[k - 1] } else { 0.0 };
        let right = if k + 1 < grid.len() { grid[k + 1] - grid[k] } else { 0.0 };
        0.5 * (left + right)
    };
    let mut l2 = 0.0;
    for i in 0..ns {
        for j in 0..nw {
            l2 += profile.p0(i, j).norm_sqr() * trap(&profile.sigma_grid, i) * trap(&profile.omega_grid, j);
        }
    }
    FreenessReport {
        modulus_conserved,
        phase_drift,
        asymptotically_free: modulus_conserved && !phase_drift,
        max_drift_rate,
        l2_norm: l2.sqrt(),
    }
}
