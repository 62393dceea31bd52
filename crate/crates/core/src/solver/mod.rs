//! Leapfrog time stepping for `□u = F(∂u)` with complex-valued `u`.
//!
//! ```text
//! u^{n+1} = 2u^n − u^{n−1} + dt²(Δ_h u^n + F(∂_h u^n))
//! ```
//!
//! `∂_t u` inside `F` comes from a predictor `(u^n − u^{n−1})/dt` followed by
//! one corrector pass with `(u* − u^{n−1})/(2dt)`.
//!
//! Two geometries are available. [`RadialGrid`] solves the radially symmetric
//! problem on a cell-centred grid; it requires a rotation-invariant
//! nonlinearity and defaults to `dt = dr`, where outgoing pulses move exactly
//! one cell per step and a trailing window may be dropped without touching
//! the retained cells. [`CartesianGrid2D`] is the full five-point scheme.
//!
//! The reported energy is the staggered quantity
//!
//! ```text
//! E^{n−½} = ½ Σ |u^n − u^{n−1}|²/dt² + ½ Re⟨∇_h u^n, ∇_h u^{n−1}⟩
//! ```
//!
//! whose increment is exactly `dt·Re Σ F conj((u^{n+1} − u^{n−1})/2dt)` when
//! `F` is evaluated at that centred velocity.

mod cartesian;
pub mod data;
mod radial;

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::asymptotics::EnergyTrace;
use crate::error::{Error, Result};
use crate::nonlinearity::CubicNonlinearity;
use crate::C64;
use cartesian::IndexBox;
pub use data::{BumpShape, InitialData};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Minimum number of cells per support radius.
pub const MIN_CELLS_PER_RADIUS: f64 = 16.0;
/// Blow-up is declared when `max|u|` exceeds this multiple of `ε`.
pub const BLOWUP_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_max: f64,
    pub n_r: usize,
    pub dr: f64,
    pub dt: f64,
    /// Width of the retained region behind the outgoing front (`σ ≥ −window`).
    #[serde(default)]
    pub window: Option<f64>,
}

impl RadialGrid {
    pub fn new(r_max: f64, n_r: usize, cfl: f64) -> Result<Self> {
        if !(r_max > 0.0) || n_r < 4 {
            return Err(Error::Config(format!("bad radial grid r_max = {r_max}, n_r = {n_r}")));
        }
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(Error::Config(format!("radial cfl must lie in (0, 1], got {cfl}")));
        }
        let dr = r_max / n_r as f64;
        Ok(Self {
            r_max,
            n_r,
            dr,
            dt: cfl * dr,
            window: None,
        })
    }

    /// Grid with spacing `dr` covering `r_max` (rounded up).
    pub fn with_spacing(r_max: f64, dr: f64, cfl: f64) -> Result<Self> {
        let n_r = (r_max / dr).ceil() as usize;
        Self::new(n_r as f64 * dr, n_r, cfl)
    }

    /// Keep only `σ = r − t ≥ −width`. Exact only when `dt = dr`.
    pub fn with_window(mut self, width: f64) -> Result<Self> {
        if self.dt != self.dr {
            return Err(Error::Config("a trailing window needs cfl = 1".into()));
        }
        if !(width > 0.0) {
            return Err(Error::Config(format!("window width must be positive, got {width}")));
        }
        self.window = Some(width);
        Ok(self)
    }

    pub fn cfl(&self) -> f64 {
        self.dt / self.dr
    }

    pub fn r(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dr
    }

    /// First valid cell at level `n`.
    fn lo(&self, n: usize) -> usize {
        match self.window {
            Some(w) => n.saturating_sub((w / self.dr).ceil() as usize),
            None => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianGrid2D {
    pub half_width: f64,
    pub n: usize,
    pub dx: f64,
    pub dt: f64,
    pub boundary: Boundary,
}

impl CartesianGrid2D {
    pub fn new(half_width: f64, n: usize, cfl: f64, boundary: Boundary) -> Result<Self> {
        if !(half_width > 0.0) || n < 4 {
            return Err(Error::Config(format!("bad cartesian grid L = {half_width}, n = {n}")));
        }
        if !(cfl > 0.0 && cfl <= 0.5) {
            return Err(Error::Config(format!("cartesian cfl must lie in (0, 0.5], got {cfl}")));
        }
        let dx = 2.0 * half_width / n as f64;
        Ok(Self {
            half_width,
            n,
            dx,
            dt: cfl * dx,
            boundary,
        })
    }

    pub fn cfl(&self) -> f64 {
        self.dt / self.dx
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.dx
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Grid {
    Radial(RadialGrid),
    #[serde(rename = "cartesian2d")]
    Cartesian(CartesianGrid2D),
}

impl Grid {
    pub fn dt(&self) -> f64 {
        match self {
            Grid::Radial(g) => g.dt,
            Grid::Cartesian(g) => g.dt,
        }
    }

    pub fn spacing(&self) -> f64 {
        match self {
            Grid::Radial(g) => g.dr,
            Grid::Cartesian(g) => g.dx,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Grid::Radial(g) => g.n_r,
            Grid::Cartesian(g) => g.n * g.n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Radius of every grid point, in storage order.
    pub fn radii(&self) -> Vec<f64> {
        match self {
            Grid::Radial(g) => (0..g.n_r).map(|j| g.r(j)).collect(),
            Grid::Cartesian(g) => {
                let mut out = Vec::with_capacity(g.n * g.n);
                for k in 0..g.n {
                    for i in 0..g.n {
                        out.push(g.x(i).hypot(g.x(k)));
                    }
                }
                out
            }
        }
    }
}

/// Stored samples of one level: `u` and the centred `∂_t u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub layout: Layout,
    pub u: Vec<C64>,
    pub ut: Vec<C64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Layout {
    /// Samples at `r0 + j·dr`, `j < len`.
    Radial { r0: f64, dr: f64, len: usize },
    /// Row-major `n × n` samples at `x0 + i·dx` along both axes.
    Cartesian { x0: f64, dx: f64, n: usize },
}

impl Snapshot {
    pub fn max_abs(&self) -> f64 {
        self.u.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |u|` over points with `|x| > radius`.
    pub fn max_abs_outside(&self, radius: f64) -> f64 {
        let mut m: f64 = 0.0;
        match self.layout {
            Layout::Radial { r0, dr, .. } => {
                for (j, z) in self.u.iter().enumerate() {
                    if r0 + j as f64 * dr > radius {
                        m = m.max(z.norm());
                    }
                }
            }
            Layout::Cartesian { x0, dx, n } => {
                for k in 0..n {
                    for i in 0..n {
                        let r = (x0 + i as f64 * dx).hypot(x0 + k as f64 * dx);
                        if r > radius {
                            m = m.max(self.u[k * n + i].norm());
                        }
                    }
                }
            }
        }
        m
    }
}

/// Discrete state: levels `n − 2`, `n − 1`, `n` plus a work buffer.
#[derive(Debug, Clone)]
pub struct WaveField {
    grid: Grid,
    nl: CubicNonlinearity,
    older: Vec<C64>,
    prev: Vec<C64>,
    curr: Vec<C64>,
    next: Vec<C64>,
    /// Index of the level held in `curr`.
    step: usize,
    ut0: Vec<C64>,
    /// Radial: cells at or beyond `hi` are zero on every level.
    hi: usize,
    /// Cartesian: box outside which every level is zero.
    bbox: IndexBox,
    /// Initial support radius, for the boundary watchdog.
    support: f64,
    blowup_threshold: f64,
}

impl WaveField {
    /// Builds levels 0 and 1 from compactly supported data.
    pub fn init(data: &InitialData, grid: Grid, nl: CubicNonlinearity) -> Result<Self> {
        data.validate()?;
        if data.radius / grid.spacing() < MIN_CELLS_PER_RADIUS {
            return Err(Error::Config(format!(
                "support radius {} resolved by only {:.1} cells (need {MIN_CELLS_PER_RADIUS})",
                data.radius,
                data.radius / grid.spacing()
            )));
        }
        let radii = grid.radii();
        let u0: Vec<C64> = radii.iter().map(|&r| data.u0(r)).collect();
        let ut0: Vec<C64> = radii.iter().map(|&r| data.ut0(r)).collect();
        let mut f = Self::from_state(grid, nl, u0, ut0)?;
        f.support = data.radius;
        f.blowup_threshold = BLOWUP_FACTOR * data.eps.max(f64::MIN_POSITIVE);
        Ok(f)
    }

    /// Taylor start `u¹ = u⁰ + dt·u_t⁰ + (dt²/2)(Δ_h u⁰ + F(∂u⁰))` from grid values.
    pub fn from_state(grid: Grid, nl: CubicNonlinearity, u0: Vec<C64>, ut0: Vec<C64>) -> Result<Self> {
        let n = grid.len();
        if u0.len() != n || ut0.len() != n {
            return Err(Error::Config(format!("state length {} / {} does not match grid {n}", u0.len(), ut0.len())));
        }
        if u0.iter().chain(&ut0).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Config("initial state is not finite".into()));
        }
        if let Grid::Radial(_) = grid {
            if !nl.is_rotation_invariant(1e-12) {
                return Err(Error::Config(
                    "radial mode needs a rotation-invariant nonlinearity; use cartesian2d".into(),
                ));
            }
        }
        let dt = grid.dt();
        let mut u1 = vec![ZERO; n];
        let f_at = |lap: C64, q: [C64; 3], u: C64, ut: C64| u + ut * dt + (lap + nl.evaluate(&q)) * (0.5 * dt * dt);
        let (hi, bbox, support) = match &grid {
            Grid::Radial(g) => {
                for j in 0..n {
                    let (lap, ur) = (radial::laplacian(g, &u0, j), radial::gradient(g, &u0, j));
                    u1[j] = f_at(lap, [ut0[j], ur, ZERO], u0[j], ut0[j]);
                }
                let last = (0..n).rev().find(|&j| u1[j] != ZERO || u0[j] != ZERO);
                let hi = last.map_or(0, |j| j + 1);
                (hi, IndexBox::full(0), hi as f64 * g.dr)
            }
            Grid::Cartesian(g) => {
                for k in 0..g.n {
                    for i in 0..g.n {
                        let idx = k * g.n + i;
                        let (lap, ux, uy) = cartesian::lap_and_grad(g, &u0, i, k);
                        u1[idx] = f_at(lap, [ut0[idx], ux, uy], u0[idx], ut0[idx]);
                    }
                }
                let bbox = match g.boundary {
                    Boundary::Periodic => IndexBox::full(g.n),
                    Boundary::Dirichlet => IndexBox::support(g.n, &[&u0, &u1]).unwrap_or(IndexBox {
                        i0: 0,
                        i1: 0,
                        k0: 0,
                        k1: 0,
                    }),
                };
                let mut support: f64 = 0.0;
                for k in bbox.k0..bbox.k1 {
                    for i in bbox.i0..bbox.i1 {
                        if u0[k * g.n + i] != ZERO || u1[k * g.n + i] != ZERO {
                            support = support.max(g.x(i).hypot(g.x(k)) + g.dx);
                        }
                    }
                }
                (0, bbox, support)
            }
        };
        let scale = u0.iter().chain(&ut0).map(|z| z.norm()).fold(0.0, f64::max);
        Ok(Self {
            grid,
            nl,
            older: vec![ZERO; n],
            prev: u0,
            curr: u1,
            next: vec![ZERO; n],
            step: 1,
            ut0,
            hi,
            bbox,
            support,
            blowup_threshold: BLOWUP_FACTOR * scale.max(f64::MIN_POSITIVE),
        })
    }

    pub fn set_blowup_threshold(&mut self, threshold: f64) {
        self.blowup_threshold = threshold;
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn nonlinearity(&self) -> &CubicNonlinearity {
        &self.nl
    }

    /// Index of the current level.
    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn t(&self) -> f64 {
        self.step as f64 * self.grid.dt()
    }

    /// Current level; cells outside [`Self::valid_cells`] are stale.
    pub fn u(&self) -> &[C64] {
        &self.curr
    }

    /// Radial cells holding valid values at the current level.
    pub fn valid_cells(&self) -> Range<usize> {
        match &self.grid {
            Grid::Radial(g) => g.lo(self.step)..g.n_r,
            Grid::Cartesian(g) => 0..g.n * g.n,
        }
    }

    /// Radius beyond which the initial state vanishes.
    pub fn support_radius(&self) -> f64 {
        self.support
    }

    /// Advances one level.
    pub fn step(&mut self) -> Result<()> {
        let n1 = self.step + 1;
        let max_abs = match &self.grid {
            Grid::Radial(g) => {
                let hi = (self.hi + 1).min(g.n_r);
                let m = radial::step(g, &self.nl, &self.prev, &self.curr, &mut self.next, g.lo(n1)..hi);
                self.hi = hi;
                m
            }
            Grid::Cartesian(g) => {
                let cells = match g.boundary {
                    Boundary::Periodic => IndexBox::full(g.n),
                    Boundary::Dirichlet => self.bbox.grown(g.n),
                };
                let m = cartesian::step(g, &self.nl, &self.prev, &self.curr, &mut self.next, cells);
                self.bbox = cells;
                m
            }
        };
        std::mem::swap(&mut self.older, &mut self.prev);
        std::mem::swap(&mut self.prev, &mut self.curr);
        std::mem::swap(&mut self.curr, &mut self.next);
        self.step = n1;
        if !(max_abs <= self.blowup_threshold) {
            return Err(Error::Blowup {
                t: self.t(),
                max_abs,
            });
        }
        Ok(())
    }

    /// Staggered energy `E^{n−½}` between the previous and current level.
    pub fn energy(&self) -> f64 {
        match &self.grid {
            Grid::Radial(g) => radial::energy(g, &self.prev, &self.curr, g.lo(self.step)..self.hi),
            Grid::Cartesian(g) => cartesian::energy(g, &self.prev, &self.curr, self.bbox),
        }
    }

    /// Snapshot of level `n − 1` with `∂_t u` from levels `n − 2` and `n`.
    /// At level 0 the initial velocity is used.
    fn snapshot_previous(&self) -> Snapshot {
        let dt = self.grid.dt();
        let level = self.step - 1;
        let ut_at = |idx: usize| {
            if level == 0 {
                self.ut0[idx]
            } else {
                (self.curr[idx] - self.older[idx]) / (2.0 * dt)
            }
        };
        match &self.grid {
            Grid::Radial(g) => {
                let lo = g.lo(self.step);
                let hi = (self.hi + 2).min(g.n_r).max(lo);
                Snapshot {
                    step: level,
                    t: level as f64 * dt,
                    layout: Layout::Radial {
                        r0: g.r(lo),
                        dr: g.dr,
                        len: hi - lo,
                    },
                    u: self.prev[lo..hi].to_vec(),
                    ut: (lo..hi).map(ut_at).collect(),
                }
            }
            Grid::Cartesian(g) => Snapshot {
                step: level,
                t: level as f64 * dt,
                layout: Layout::Cartesian {
                    x0: g.x(0),
                    dx: g.dx,
                    n: g.n,
                },
                u: self.prev.clone(),
                ut: (0..g.n * g.n).map(ut_at).collect(),
            },
        }
    }
}

/// Observer cadences for [`run`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    /// Record the energy every this many steps (0 disables).
    pub energy_every: usize,
    /// Requested snapshot times, rounded to the nearest level.
    pub snapshot_times: Vec<f64>,
}

impl Schedule {
    /// `count` snapshot times log-spaced on `[t_lo, t_hi]`, plus `t = 0`.
    pub fn log_snapshots(mut self, t_lo: f64, t_hi: f64, count: usize) -> Self {
        self.snapshot_times.push(0.0);
        let ratio = (t_hi / t_lo).ln();
        for i in 0..count {
            let frac = if count > 1 { i as f64 / (count - 1) as f64 } else { 0.0 };
            self.snapshot_times.push(t_lo * (ratio * frac).exp());
        }
        self
    }

    /// Snapshots every `every` time units on `[0, t_end]`.
    pub fn linear_snapshots(mut self, t_end: f64, every: f64) -> Self {
        let n = (t_end / every).floor() as usize;
        self.snapshot_times.extend((0..=n).map(|i| i as f64 * every));
        self
    }
}

pub trait Observer {
    fn on_energy(&mut self, _t: f64, _energy: f64) {}
    fn on_snapshot(&mut self, _snap: &Snapshot) -> Result<()> {
        Ok(())
    }
}

/// Keeps everything in memory.
#[derive(Debug, Clone, Default)]
pub struct Recorder {
    pub energy: EnergyTrace,
    pub snapshots: Vec<Snapshot>,
}

impl Observer for Recorder {
    fn on_energy(&mut self, t: f64, energy: f64) {
        self.energy.push(t, energy);
    }

    fn on_snapshot(&mut self, snap: &Snapshot) -> Result<()> {
        self.snapshots.push(snap.clone());
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RunStatus {
    Completed { t: f64 },
    Blowup { t: f64, max_abs: f64 },
}

/// Steps a freshly initialised field to `t_end`, feeding the observer.
/// Energies are reported at half levels `(n − ½)dt`.
pub fn run(field: &mut WaveField, t_end: f64, schedule: &Schedule, obs: &mut dyn Observer) -> Result<RunStatus> {
    if field.step != 1 {
        return Err(Error::Config("run expects a field at its first level".into()));
    }
    if !(t_end >= 0.0) {
        return Err(Error::Config(format!("t_end must be non-negative, got {t_end}")));
    }
    let dt = field.grid.dt();
    let n_end = (t_end / dt).round() as usize;
    let mut snaps: Vec<usize> = schedule
        .snapshot_times
        .iter()
        .filter(|&&t| t >= 0.0 && t <= t_end + 0.5 * dt)
        .map(|&t| (t / dt).round() as usize)
        .collect();
    snaps.sort_unstable();
    snaps.dedup();
    let last = n_end.max(snaps.last().map_or(0, |&s| s + 1));
    watchdog(field, last as f64 * dt)?;

    let mut pending = snaps.into_iter().peekable();
    let energy_due = |n: usize| schedule.energy_every > 0 && n.is_multiple_of(schedule.energy_every);
    loop {
        // `curr` holds level `step`; level `step − 1` is now snapshot-ready.
        if pending.peek() == Some(&(field.step - 1)) {
            pending.next();
            obs.on_snapshot(&field.snapshot_previous())?;
        }
        if energy_due(field.step) {
            obs.on_energy((field.step as f64 - 0.5) * dt, field.energy());
        }
        if field.step >= last && pending.peek().is_none() {
            break;
        }
        match field.step() {
            Ok(()) => {}
            Err(Error::Blowup { t, max_abs }) => return Ok(RunStatus::Blowup { t, max_abs }),
            Err(e) => return Err(e),
        }
    }
    Ok(RunStatus::Completed { t: n_end as f64 * dt })
}

fn watchdog(field: &WaveField, t_final: f64) -> Result<()> {
    let (extent, h, name) = match &field.grid {
        Grid::Radial(g) => (g.r_max, g.dr, "r_max"),
        Grid::Cartesian(g) if g.boundary == Boundary::Dirichlet => (g.half_width, g.dx, "half width"),
        Grid::Cartesian(_) => return Ok(()),
    };
    let need = t_final + field.support + 2.0 * h;
    if extent < need {
        return Err(Error::Config(format!(
            "{name} = {extent} is reached by the wave before t = {t_final} (need ≥ {need})"
        )));
    }
    Ok(())
}
