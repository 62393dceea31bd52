#![allow(dead_code)]

use std::f64::consts::PI;

use semiwave::nonlinearity::CubicNonlinearity;
use semiwave::solver::{Boundary, CartesianGrid2D, Grid, RadialGrid, WaveField};
use semiwave::C64;

/// `J₀(x) = (1/π)∫₀^π cos(x sin θ) dθ` by the trapezoid rule, which is
/// spectrally accurate for this periodic integrand.
pub fn bessel_j0(x: f64) -> f64 {
    let n = 256;
    let h = PI / n as f64;
    let mut acc = 0.5 * (1.0 + (x * PI.sin()).cos());
    for i in 1..n {
        acc += (x * (i as f64 * h).sin()).cos();
    }
    acc * h / PI
}

fn advance(f: &mut WaveField, steps: usize) {
    for _ in 1..steps {
        f.step().unwrap();
    }
}

/// Max error of the standing wave `J₀(kr)cos(kt)` at `t ≈ t_end`, over
/// cells the outer boundary cannot have influenced.
pub fn radial_standing_wave_error(dr: f64, cfl: f64, k: f64, t_end: f64) -> f64 {
    let r_max = 10.0;
    let g = RadialGrid::new(r_max, (r_max / dr).round() as usize, cfl).unwrap();
    let u0: Vec<C64> = (0..g.n_r).map(|j| C64::new(bessel_j0(k * g.r(j)), 0.0)).collect();
    let ut0 = vec![C64::new(0.0, 0.0); g.n_r];
    let mut f = WaveField::from_state(Grid::Radial(g), CubicNonlinearity::zero(), u0, ut0).unwrap();
    let steps = (t_end / g.dt).round() as usize;
    advance(&mut f, steps);
    let t = f.t();
    let cut = r_max - t - 1.0;
    (0..g.n_r)
        .filter(|&j| g.r(j) < cut)
        .map(|j| (f.u()[j] - bessel_j0(k * g.r(j)) * (k * t).cos()).norm())
        .fold(0.0, f64::max)
}

/// Max error of `sin(k·x − |k|t)` on the periodic square `[−1, 1)²`.
pub fn plane_wave_error(n: usize, t_end: f64) -> f64 {
    let g = CartesianGrid2D::new(1.0, n, 0.45, Boundary::Periodic).unwrap();
    let (kx, ky) = (PI, 2.0 * PI);
    let w = kx.hypot(ky);
    let exact = |i: usize, j: usize, t: f64| (kx * g.x(i) + ky * g.x(j) - w * t).sin();
    let mut u0 = Vec::with_capacity(n * n);
    let mut ut0 = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            u0.push(C64::new(exact(i, j, 0.0), 0.0));
            ut0.push(C64::new(-w * (kx * g.x(i) + ky * g.x(j)).cos(), 0.0));
        }
    }
    let mut f = WaveField::from_state(Grid::Cartesian(g), CubicNonlinearity::zero(), u0, ut0).unwrap();
    let steps = (t_end / g.dt).round() as usize;
    advance(&mut f, steps);
    let t = f.t();
    let mut err: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            err = err.max((f.u()[j * n + i] - exact(i, j, t)).norm());
        }
    }
    err
}

/// Cubic Lagrange interpolation of radial samples `r_j = (j + ½)dr`, with
/// the even extension across the axis.
pub fn radial_interp(u: &[C64], dr: f64, r: f64) -> C64 {
    let s = r / dr - 0.5;
    let j = (s.floor() as isize).clamp(1, u.len() as isize - 3);
    let x = s - j as f64;
    let at = |i: isize| if i < 0 { u[(-i - 1) as usize] } else { u[i as usize] };
    let w = [
        -x * (x - 1.0) * (x - 2.0) / 6.0,
        (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0,
        -(x + 1.0) * x * (x - 2.0) / 2.0,
        (x + 1.0) * x * (x - 1.0) / 6.0,
    ];
    (0..4).map(|m| at(j - 1 + m as isize) * w[m]).sum()
}

/// Runs the same radial data in both modes to `t_end` and returns
/// `max |u_cart − u_rad| / max |u_rad|` over the Cartesian points.
pub fn radial_cartesian_mismatch(nl: &CubicNonlinearity, radius: f64, eps: f64, dx: f64, t_end: f64) -> f64 {
    use semiwave::solver::{BumpShape, InitialData};
    let data = InitialData::new(BumpShape::Polynomial, radius, eps).unwrap();
    let half = t_end + radius + 1.0;
    let n = (2.0 * half / dx).round() as usize;
    let cg = CartesianGrid2D::new(half, n, 0.45, Boundary::Dirichlet).unwrap();
    let mut cf = WaveField::init(&data, Grid::Cartesian(cg), nl.clone()).unwrap();
    advance(&mut cf, (t_end / cg.dt).round() as usize);
    let t = cf.t();

    // Reference radial run on a four times finer grid, same final time.
    let rg = RadialGrid::new(half + 1.0, ((half + 1.0) / (dx / 4.0)).round() as usize, 1.0).unwrap();
    let rg = RadialGrid { dt: t / (t / rg.dt).round(), ..rg };
    let mut rf = WaveField::init(&data, Grid::Radial(rg), nl.clone()).unwrap();
    advance(&mut rf, (t / rg.dt).round() as usize);
    assert!((rf.t() - t).abs() < 1e-9);
    let ur = rf.u();
    let scale = ur.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut err: f64 = 0.0;
    for k in 0..n {
        for i in 0..n {
            let r = cg.x(i).hypot(cg.x(k));
            if r < half - 0.5 {
                err = err.max((cf.u()[k * n + i] - radial_interp(ur, rg.dr, r)).norm());
            }
        }
    }
    err / scale
}
