//! Experiment driver: configs in, solver runs and analyses, artifacts out.
//!
//! Each `ε` of a config becomes one [`RunArtifact`]. Sweeps run
//! concurrently on a rayon pool unless deterministic mode is requested;
//! every run owns its field and its output directory.

mod artifact;
pub mod config;
pub mod suite;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{self, EnergyTrace, RaySample};
use crate::error::{Error, Result};
use crate::fit::DecayFit;
use crate::profile::ProfileFunction;
use crate::solver::{self, CartesianGrid2D, Grid, RadialGrid, Recorder, RunStatus, Schedule, Snapshot, WaveField};
use crate::C64;
pub use artifact::{load_artifact, report, write_artifact, ReportRow};
pub use config::{preset, preset_names, Expect, ExpectStatus, ExperimentConfig, Mode};

/// Relative level below which the field counts as zero outside the light cone.
pub const PROPAGATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ArtifactStatus {
    Completed { t: f64 },
    Blowup { t: f64, max_abs: f64 },
    Error { message: String },
}

impl From<RunStatus> for ArtifactStatus {
    fn from(s: RunStatus) -> Self {
        match s {
            RunStatus::Completed { t } => ArtifactStatus::Completed { t },
            RunStatus::Blowup { t, max_abs } => ArtifactStatus::Blowup { t, max_abs },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    Error,
}

/// One enabled criterion of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expect: Expect,
    pub outcome: Outcome,
    /// The outcome matches the expectation.
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, expect: Expect, outcome: Outcome, detail: impl Into<String>) -> Self {
        let passed = match expect {
            Expect::Off => true,
            Expect::Pass => outcome == Outcome::Pass,
            Expect::Fail => outcome == Outcome::Fail,
        };
        Self {
            name: name.into(),
            expect,
            outcome,
            passed,
            detail: detail.into(),
        }
    }

    fn from_fit(name: String, expect: Expect, fit: &Result<DecayFit>) -> Self {
        match fit {
            Ok(f) => {
                let outcome = if f.passed() { Outcome::Pass } else { Outcome::Fail };
                let detail = format!("{} slope {} (r2 {}); {}", f.model, f.slope, f.r_squared, f.criterion);
                Self::new(name, expect, outcome, detail)
            }
            Err(e) => Self::new(name, expect, Outcome::Error, e.to_string()),
        }
    }
}

/// Everything produced by one `ε`.
#[derive(Debug, Clone)]
pub struct RunArtifact {
    pub config: ExperimentConfig,
    pub eps: f64,
    pub status: ArtifactStatus,
    pub energy: EnergyTrace,
    pub snapshots: Vec<Snapshot>,
    pub rays: Vec<RaySample>,
    pub profile: Option<ProfileFunction>,
    pub fits: Vec<DecayFit>,
    pub checks: Vec<Check>,
    /// Where the artifact was written, if anywhere.
    pub dir: Option<PathBuf>,
}

impl RunArtifact {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn fit(&self, model: &str, sigma: Option<f64>) -> Option<&DecayFit> {
        self.fits
            .iter()
            .find(|f| f.model == model && sigma.is_none_or(|s| f.extra.get("sigma") == Some(&s)))
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads for ε-sweeps (rayon default when `None`).
    pub threads: Option<usize>,
    /// Run sweep entries one after another in input order.
    pub deterministic: bool,
    /// Overrides the config's output directory.
    pub out: Option<PathBuf>,
}

/// Grid for a config, sized so the wave never reaches the outer boundary.
pub fn build_grid(cfg: &ExperimentConfig) -> Result<Grid> {
    let r = cfg.data.radius;
    let h = r / cfg.grid.cells_per_radius;
    let t_end = cfg.run.t_end;
    match cfg.grid.mode {
        Mode::Radial => {
            let mut g = RadialGrid::with_spacing(t_end + r + 8.0 * h, h, cfg.grid.cfl.unwrap_or(1.0))?;
            if let Some(w) = cfg.grid.window {
                g = g.with_window(w)?;
            }
            Ok(Grid::Radial(g))
        }
        Mode::Cartesian2d => {
            let half = cfg.grid.half_width.unwrap_or(t_end + r + 4.0 * h);
            let n = (2.0 * half / h).ceil() as usize;
            let g = CartesianGrid2D::new(0.5 * n as f64 * h, n, cfg.grid.cfl.unwrap_or(0.45), cfg.grid.boundary)?;
            Ok(Grid::Cartesian(g))
        }
    }
}

pub fn schedule(cfg: &ExperimentConfig, dt: f64) -> Schedule {
    let steps = (cfg.run.t_end / dt).max(1.0);
    let every = (steps / cfg.run.energy_samples.max(1) as f64).round().max(1.0) as usize;
    let s = Schedule {
        energy_every: every,
        snapshot_times: Vec::new(),
    };
    if cfg.run.t_end > cfg.run.snapshot_start {
        s.log_snapshots(cfg.run.snapshot_start, cfg.run.t_end, cfg.run.snapshots)
    } else {
        Schedule {
            snapshot_times: vec![0.0, cfg.run.t_end],
            ..s
        }
    }
}

/// Solves and analyses one `ε` without touching the filesystem.
pub fn run_single(cfg: &ExperimentConfig, eps: f64) -> Result<RunArtifact> {
    let cfg = cfg.for_eps(eps);
    cfg.validate()?;
    let nl = cfg.nonlinearity.resolve()?;
    let data = cfg.data.at_eps(eps)?;
    let grid = build_grid(&cfg)?;
    let mut rec = Recorder::default();
    let status = WaveField::init(&data, grid, nl)
        .and_then(|mut field| solver::run(&mut field, cfg.run.t_end, &schedule(&cfg, grid.dt()), &mut rec));
    let status = match status {
        Ok(s) => s.into(),
        Err(e @ Error::Config(_)) => return Err(e),
        Err(e) => ArtifactStatus::Error { message: e.to_string() },
    };
    let mut art = RunArtifact {
        config: cfg,
        eps,
        status,
        energy: rec.energy,
        snapshots: rec.snapshots,
        rays: Vec::new(),
        profile: None,
        fits: Vec::new(),
        checks: Vec::new(),
        dir: None,
    };
    analyze(&mut art)?;
    Ok(art)
}

/// (Re)computes rays, fits and checks from the stored traces.
pub fn analyze(art: &mut RunArtifact) -> Result<()> {
    let cfg = art.config.clone();
    let a = &cfg.analysis;
    let nl = cfg.nonlinearity.resolve()?;
    art.rays.clear();
    art.fits.clear();
    art.checks.clear();
    art.profile = None;

    let (status_ok, detail) = match (&art.status, a.expect_status) {
        (ArtifactStatus::Completed { t }, ExpectStatus::Completed) => (true, format!("completed at t = {t}")),
        (ArtifactStatus::Blowup { t, max_abs }, ExpectStatus::Blowup) => {
            (true, format!("blow-up at t = {t}, max |u| = {max_abs:e}"))
        }
        (s, e) => (false, format!("expected {e:?}, got {s:?}")),
    };
    let outcome = if status_ok { Outcome::Pass } else { Outcome::Fail };
    art.checks.push(Check::new("status", Expect::Pass, outcome, detail));
    if !matches!(art.status, ArtifactStatus::Completed { .. }) {
        return Ok(());
    }

    let h = build_grid(&cfg)?.spacing();
    if a.finite_propagation.enabled() {
        let mut worst: f64 = 0.0;
        for s in &art.snapshots {
            let scale = s.max_abs();
            if scale > 0.0 {
                worst = worst.max(s.max_abs_outside(s.t + cfg.data.radius + 2.0 * h) / scale);
            }
        }
        let outcome = if worst <= PROPAGATION_TOL { Outcome::Pass } else { Outcome::Fail };
        let detail = format!("max relative |u| beyond t + R + 2h: {worst:e}");
        art.checks.push(Check::new("finite-propagation", a.finite_propagation, outcome, detail));
    }
    if a.energy_monotone.enabled() {
        let inc = art.energy.max_relative_increase();
        let outcome = if art.energy.is_non_increasing(4.0) { Outcome::Pass } else { Outcome::Fail };
        let detail = format!("largest relative increase {inc:e}");
        art.checks.push(Check::new("energy-monotone", a.energy_monotone, outcome, detail));
    }
    if a.energy_drift.enabled() {
        let until = a.energy_drift_until.unwrap_or(f64::INFINITY);
        let mut head = EnergyTrace::default();
        for (t, e) in art.energy.times.iter().zip(&art.energy.energy_sq) {
            if *t <= until {
                head.push(*t, *e);
            }
        }
        let drift = head.relative_drift();
        let outcome = if drift <= a.energy_drift_max { Outcome::Pass } else { Outcome::Fail };
        let detail = format!("relative drift {drift:e} up to t = {until} (max {:e})", a.energy_drift_max);
        art.checks.push(Check::new("energy-drift", a.energy_drift, outcome, detail));
    }
    if a.energy_fit.enabled() {
        let fit = asymptotics::fit_energy_decay(&art.energy, a.mu, art.eps, a.energy_window, a.energy_slack);
        art.checks.push(Check::from_fit("energy-decay".into(), a.energy_fit, &fit));
        if let Ok(f) = fit {
            art.fits.push(f);
        }
    }

    let wants_p0 = a.profile.enabled() || a.phase.enabled() || a.freeness.enabled();
    let mut p0s = Vec::new();
    for &sigma in &a.rays {
        let ray = match asymptotics::extract_ray(&art.snapshots, sigma, a.ray_omega) {
            Ok(r) => r,
            Err(e) => {
                art.checks.push(Check::new(format!("ray[{sigma}]"), Expect::Pass, Outcome::Error, e.to_string()));
                continue;
            }
        };
        let f_hat = nl.at_angle(a.ray_omega);
        let tag = |f: Result<DecayFit>| f.map(|f| f.with_extra("sigma", sigma));
        if a.pointwise.enabled() {
            let fit = tag(asymptotics::fit_pointwise_decay(&ray, a.pointwise_window));
            art.checks.push(Check::from_fit(format!("pointwise[{sigma}]"), a.pointwise, &fit));
            art.fits.extend(fit.ok());
        }
        if a.discrepancy.enabled() {
            let fit = tag(asymptotics::extraction_discrepancy(&ray));
            art.checks.push(Check::from_fit(format!("discrepancy[{sigma}]"), a.discrepancy, &fit));
            art.fits.extend(fit.ok());
        }
        if wants_p0 {
            let t_match = a.t_match.unwrap_or_else(|| ray.times.last().copied().unwrap_or(0.0));
            match asymptotics::fit_profile_p0(&ray, f_hat, t_match) {
                Ok(p0) => {
                    p0s.push(p0);
                    if a.profile.enabled() {
                        let fit = tag(asymptotics::verify_profile_convergence(&ray, p0, f_hat, t_match));
                        art.checks.push(Check::from_fit(format!("profile[{sigma}]"), a.profile, &fit));
                        art.fits.extend(fit.ok());
                    }
                    if a.phase.enabled() {
                        let fit = tag(asymptotics::fit_phase_slope(&ray, p0, f_hat, a.phase_tol));
                        art.checks.push(Check::from_fit(format!("phase[{sigma}]"), a.phase, &fit));
                        art.fits.extend(fit.ok());
                    }
                }
                Err(e) => {
                    p0s.push(C64::new(f64::NAN, f64::NAN));
                    art.checks.push(Check::new(format!("p0[{sigma}]"), Expect::Pass, Outcome::Error, e.to_string()));
                }
            }
        }
        art.rays.push(ray);
    }
    if wants_p0 && p0s.len() == a.rays.len() && p0s.iter().all(|p| p.re.is_finite()) {
        let pf = ProfileFunction::new(a.rays.clone(), vec![a.ray_omega], p0s)?;
        if a.freeness.enabled() {
            let rep = asymptotics::asymptotic_freeness_diagnostic(&pf, &nl, 1e-10);
            let outcome = if rep.asymptotically_free { Outcome::Pass } else { Outcome::Fail };
            let detail = format!(
                "modulus conserved {}, phase drift {} (max rate {:e}), |P0| L2 {}",
                rep.modulus_conserved, rep.phase_drift, rep.max_drift_rate, rep.l2_norm
            );
            art.checks.push(Check::new("asymptotically-free", a.freeness, outcome, detail));
        }
        art.profile = Some(pf);
    }
    Ok(())
}

/// Runs every `ε` of the config, writes artifacts when an output directory
/// is known, and returns them in `ε` order.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<RunArtifact>> {
    cfg.validate()?;
    let out = opts.out.clone().or_else(|| cfg.output.clone());
    let one = |eps: f64| -> Result<RunArtifact> {
        let mut art = run_single(cfg, eps)?;
        if let Some(root) = &out {
            art.dir = Some(write_artifact(&art, &run_dir(root, &cfg.name, eps))?);
        }
        Ok(art)
    };
    if opts.deterministic {
        return cfg.run.eps.iter().map(|&e| one(e)).collect();
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| cfg.run.eps.par_iter().map(|&e| one(e)).collect())
}

pub fn run_dir(root: &Path, name: &str, eps: f64) -> PathBuf {
    root.join(name).join(format!("eps-{eps}"))
}

/// Re-analyses a stored artifact directory and rewrites its reports.
pub fn analyze_dir(dir: &Path) -> Result<RunArtifact> {
    let mut art = load_artifact(dir)?;
    analyze(&mut art)?;
    write_artifact(&art, dir)?;
    Ok(art)
}
