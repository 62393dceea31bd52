//! TOML experiment configuration and the named presets.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::CubicNonlinearity;
use crate::solver::{Boundary, BumpShape, InitialData, MIN_CELLS_PER_RADIUS};
use crate::C64;

pub const SCHEMA_VERSION: u32 = 1;

/// Nonlinearity by preset name or by explicit `p_abc` entries
/// (`"abc" = [re, im]`, missing entries are zero).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearitySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_abc: Option<BTreeMap<String, [f64; 2]>>,
}

impl NonlinearitySpec {
    pub fn preset(name: &str) -> Self {
        Self {
            preset: Some(name.to_string()),
            p_abc: None,
        }
    }

    pub fn resolve(&self) -> Result<CubicNonlinearity> {
        match (&self.preset, &self.p_abc) {
            (Some(name), None) => CubicNonlinearity::preset(name),
            (None, Some(table)) => CubicNonlinearity::from_json_value(&serde_json::json!({ "p_abc": table })),
            _ => Err(Error::Config("nonlinearity needs exactly one of `preset` or `p_abc`".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub shape: BumpShape,
    pub radius: f64,
    #[serde(default = "one")]
    pub f_amp: C64,
    #[serde(default)]
    pub g_amp: C64,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

impl DataSpec {
    pub fn at_eps(&self, eps: f64) -> Result<InitialData> {
        Ok(InitialData::new(self.shape, self.radius, eps)?.with_amplitudes(self.f_amp, self.g_amp))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Radial,
    #[serde(rename = "cartesian2d")]
    Cartesian2d,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub mode: Mode,
    pub cells_per_radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfl: Option<f64>,
    /// Radial only: keep `σ ≥ −window`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    /// Cartesian only; defaults to `t_end + R + 4dx`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default = "dirichlet")]
    pub boundary: Boundary,
}

fn dirichlet() -> Boundary {
    Boundary::Dirichlet
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub eps: Vec<f64>,
    pub t_end: f64,
    /// Approximate number of energy records over the run.
    #[serde(default = "default_energy_samples")]
    pub energy_samples: usize,
    /// Log-spaced snapshots on `[snapshot_start, t_end]` (plus `t = 0`).
    #[serde(default = "default_snapshots")]
    pub snapshots: usize,
    #[serde(default = "default_snapshot_start")]
    pub snapshot_start: f64,
    /// Write snapshot arrays to disk.
    #[serde(default = "yes")]
    pub save_snapshots: bool,
}

fn default_energy_samples() -> usize {
    2000
}
fn default_snapshots() -> usize {
    200
}
fn default_snapshot_start() -> f64 {
    2.0
}
fn yes() -> bool {
    true
}

/// What an enabled check is expected to report.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    #[default]
    Off,
    Pass,
    /// Negative control: the check must fail.
    Fail,
}

impl Expect {
    pub fn enabled(self) -> bool {
        self != Expect::Off
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpectStatus {
    #[default]
    Completed,
    Blowup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    #[serde(default)]
    pub expect_status: ExpectStatus,
    #[serde(default = "default_mu")]
    pub mu: f64,
    /// `max|u|` beyond `t + R + 2h` must stay below `1e-10 max|u|`.
    #[serde(default)]
    pub finite_propagation: Expect,
    #[serde(default)]
    pub energy_monotone: Expect,
    /// Relative energy drift over `[0, energy_drift_until]` at most `energy_drift_max`.
    #[serde(default)]
    pub energy_drift: Expect,
    #[serde(default = "default_drift_max")]
    pub energy_drift_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_drift_until: Option<f64>,
    #[serde(default)]
    pub energy_fit: Expect,
    #[serde(default = "default_slack")]
    pub energy_slack: f64,
    #[serde(default = "default_fit_window")]
    pub energy_window: [f64; 2],
    /// Rays `σ` sampled at angle `ray_omega`.
    #[serde(default)]
    pub rays: Vec<f64>,
    #[serde(default)]
    pub ray_omega: f64,
    #[serde(default)]
    pub pointwise: Expect,
    #[serde(default = "default_fit_window")]
    pub pointwise_window: [f64; 2],
    #[serde(default)]
    pub profile: Expect,
    /// Defaults to the last ray sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_match: Option<f64>,
    #[serde(default)]
    pub phase: Expect,
    #[serde(default = "default_phase_tol")]
    pub phase_tol: f64,
    #[serde(default)]
    pub discrepancy: Expect,
    /// Profile grid diagnostic over `rays`.
    #[serde(default)]
    pub freeness: Expect,
}

fn default_mu() -> f64 {
    0.05
}
fn default_drift_max() -> f64 {
    1e-4
}
fn default_slack() -> f64 {
    0.15
}
fn default_fit_window() -> [f64; 2] {
    [1e2, 1e4]
}
fn default_phase_tol() -> f64 {
    0.15
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        toml::from_str("").expect("all analysis fields have defaults")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub nonlinearity: NonlinearitySpec,
    pub data: DataSpec,
    pub grid: GridSpec,
    pub run: RunSpec,
    #[serde(default)]
    pub analysis: AnalysisSpec,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// A file path if one exists, otherwise a preset name.
    pub fn load_or_preset(arg: &str) -> Result<Self> {
        let path = Path::new(arg);
        if path.exists() {
            Self::load(path)
        } else {
            preset(arg)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return bad(format!("name `{}` must be non-empty without path separators", self.name));
        }
        let nl = self.nonlinearity.resolve()?;
        if self.run.eps.is_empty() {
            return bad("eps list is empty".into());
        }
        if let Some(e) = self.run.eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return bad(format!("eps values must be positive, got {e}"));
        }
        if !(self.run.t_end >= 0.0 && self.run.t_end.is_finite()) {
            return bad(format!("t_end must be non-negative, got {}", self.run.t_end));
        }
        if !(self.data.radius > 0.0) {
            return bad(format!("support radius must be positive, got {}", self.data.radius));
        }
        if self.grid.cells_per_radius < MIN_CELLS_PER_RADIUS {
            return bad(format!(
                "cells_per_radius {} is below the minimum {MIN_CELLS_PER_RADIUS}",
                self.grid.cells_per_radius
            ));
        }
        match self.grid.mode {
            Mode::Radial => {
                if !nl.is_rotation_invariant(1e-12) {
                    return bad("radial mode needs a rotation-invariant nonlinearity; use cartesian2d".into());
                }
                if self.grid.half_width.is_some() {
                    return bad("half_width applies to cartesian2d only".into());
                }
            }
            Mode::Cartesian2d => {
                if self.grid.window.is_some() {
                    return bad("window applies to radial mode only".into());
                }
            }
        }
        let a = &self.analysis;
        if let Some(s) = a.rays.iter().find(|s| **s > self.data.radius) {
            return bad(format!("ray σ = {s} exceeds the support radius {}", self.data.radius));
        }
        if let (Some(w), Some(s)) = (self.grid.window, a.rays.iter().cloned().reduce(f64::min)) {
            if s <= -w {
                return bad(format!("ray σ = {s} lies behind the retained window {w}"));
            }
        }
        let ray_checks = [a.pointwise, a.profile, a.phase, a.discrepancy, a.freeness];
        if ray_checks.iter().any(|e| e.enabled()) && a.rays.is_empty() {
            return bad("ray analyses are enabled but `rays` is empty".into());
        }
        if !(a.mu > 0.0 && a.mu < 0.1) {
            return bad(format!("mu must lie in (0, 0.1), got {}", a.mu));
        }
        Ok(())
    }

    /// Copy restricted to a single `ε`.
    pub fn for_eps(&self, eps: f64) -> Self {
        let mut c = self.clone();
        c.run.eps = vec![eps];
        c
    }
}

pub fn preset_names() -> &'static [&'static str] {
    &[
        "dissipative-radial-default",
        "rotational-radial-default",
        "null-form-radial-default",
        "antidissipative-blowup",
        "free-radial",
        "null-form-cartesian",
    ]
}

fn base(name: &str, nl: &str, radius: f64, cells: f64, eps: f64, t_end: f64) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        name: name.to_string(),
        seed: 0,
        output: None,
        nonlinearity: NonlinearitySpec::preset(nl),
        data: DataSpec {
            shape: BumpShape::Polynomial,
            radius,
            f_amp: one(),
            g_amp: C64::new(0.0, 0.0),
        },
        grid: GridSpec {
            mode: Mode::Radial,
            cells_per_radius: cells,
            cfl: None,
            window: None,
            half_width: None,
            boundary: Boundary::Dirichlet,
        },
        run: RunSpec {
            eps: vec![eps],
            t_end,
            energy_samples: default_energy_samples(),
            snapshots: default_snapshots(),
            snapshot_start: default_snapshot_start(),
            save_snapshots: true,
        },
        analysis: AnalysisSpec::default(),
    }
}

/// Built-in experiment definitions.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let mut c = match name {
        "dissipative-radial-default" => {
            let mut c = base(name, "dissipative", 0.05, 16.0, 0.3, 1e4);
            c.grid.window = Some(2.0);
            c.run.snapshots = 300;
            let a = &mut c.analysis;
            a.finite_propagation = Expect::Pass;
            a.energy_monotone = Expect::Pass;
            a.energy_fit = Expect::Pass;
            a.rays = vec![0.0];
            a.pointwise = Expect::Pass;
            a.profile = Expect::Pass;
            a.discrepancy = Expect::Pass;
            c
        }
        "rotational-radial-default" => {
            let mut c = base(name, "rotational", 1.0, 32.0, 0.3, 1e4);
            c.grid.window = Some(4.0);
            c.run.snapshots = 300;
            let a = &mut c.analysis;
            a.finite_propagation = Expect::Pass;
            a.energy_drift = Expect::Pass;
            a.energy_drift_until = Some(100.0);
            a.energy_fit = Expect::Fail;
            a.rays = vec![0.0];
            a.profile = Expect::Pass;
            a.phase = Expect::Pass;
            a.discrepancy = Expect::Pass;
            a.freeness = Expect::Fail;
            c
        }
        "null-form-radial-default" => {
            let mut c = base(name, "null-form-a", 1.0, 32.0, 0.3, 1e3);
            c.grid.window = Some(4.0);
            let a = &mut c.analysis;
            a.finite_propagation = Expect::Pass;
            a.rays = vec![-0.5, 0.0, 0.5];
            a.profile = Expect::Pass;
            a.phase = Expect::Pass;
            a.freeness = Expect::Pass;
            c
        }
        "antidissipative-blowup" => {
            let mut c = base(name, "antidissipative", 0.05, 16.0, 0.5, 100.0);
            c.grid.window = Some(2.0);
            c.run.snapshots = 20;
            c.analysis.expect_status = ExpectStatus::Blowup;
            c
        }
        "free-radial" => {
            let mut c = base(name, "free", 0.05, 16.0, 0.3, 1e4);
            c.grid.window = Some(2.0);
            c.run.snapshots = 300;
            let a = &mut c.analysis;
            a.finite_propagation = Expect::Pass;
            a.energy_fit = Expect::Fail;
            a.rays = vec![0.0];
            a.pointwise = Expect::Fail;
            a.profile = Expect::Pass;
            c
        }
        "null-form-cartesian" => {
            let mut c = base(name, "null-form-a", 1.0, 16.0, 0.3, 8.0);
            c.nonlinearity = NonlinearitySpec {
                preset: None,
                p_abc: Some(null_form_table(1)),
            };
            c.grid.mode = Mode::Cartesian2d;
            c.run.snapshots = 10;
            c.run.energy_samples = 200;
            c
        }
        other => {
            return Err(Error::Config(format!(
                "`{other}` is neither a config file nor a preset ({})",
                preset_names().join(", ")
            )))
        }
    };
    c.name = name.to_string();
    c.validate()?;
    Ok(c)
}

fn null_form_table(a: usize) -> BTreeMap<String, [f64; 2]> {
    let nl = CubicNonlinearity::null_form_a(a).expect("index in range");
    let mut out = BTreeMap::new();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let p = nl.coefficient(i, j, k);
                if p != C64::new(0.0, 0.0) {
                    out.insert(format!("{i}{j}{k}"), [p.re, p.im]);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_round_trip_through_toml() {
        for name in preset_names() {
            let c = preset(name).unwrap();
            let text = c.to_toml();
            let back = ExperimentConfig::from_toml(&text).unwrap();
            assert_eq!(back, c, "{name}");
            assert_eq!(back.to_toml(), text);
        }
    }

    #[test]
    fn validation_errors() {
        let good = preset("dissipative-radial-default").unwrap();
        let mut c = good.clone();
        c.run.eps.clear();
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = good.clone();
        c.run.eps = vec![0.3, -0.1];
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.schema_version = 2;
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.analysis.rays = vec![0.5];
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.nonlinearity = NonlinearitySpec::preset("no-such");
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.nonlinearity.p_abc = Some(BTreeMap::new());
        assert!(c.validate().is_err());
        let mut c = good;
        c.nonlinearity = NonlinearitySpec {
            preset: None,
            p_abc: Some(null_form_table(1)),
        };
        assert!(c.validate().is_err(), "non-invariant F in radial mode");
        assert!(preset("nope").is_err());
        assert!(ExperimentConfig::from_toml("schema_version = 1\nname = 3").is_err());
    }

    #[test]
    fn inline_tensor_matches_preset() {
        let mut t = BTreeMap::new();
        t.insert("000".to_string(), [-1.0, 0.0]);
        let spec = NonlinearitySpec { preset: None, p_abc: Some(t) };
        assert_eq!(spec.resolve().unwrap(), CubicNonlinearity::dissipative());
    }
}
