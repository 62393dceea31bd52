//! Radially symmetric stencil on the cell-centred grid `r_j = (j + ½)dr`.
//!
//! The Laplacian is the flux form
//! `[r_{j+½}(u_{j+1} − u_j) − r_{j−½}(u_j − u_{j−1})] / (r_j dr²)`,
//! which needs no axis ghost because `r_{−½} = 0`. Outside the grid the
//! field is zero (Dirichlet).

use super::RadialGrid;
use crate::nonlinearity::CubicNonlinearity;
use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// `F(v, w, 0)` collapsed to the six monomials in `v`, `w` that survive.
#[derive(Debug, Clone, Copy)]
struct RadialCubic([C64; 6]);

impl RadialCubic {
    fn new(nl: &CubicNonlinearity) -> Self {
        let p = |a, b, c| nl.coefficient(a, b, c);
        Self([
            p(0, 0, 0),
            p(0, 0, 1),
            p(0, 1, 0) + p(1, 0, 0),
            p(0, 1, 1) + p(1, 0, 1),
            p(1, 1, 0),
            p(1, 1, 1),
        ])
    }

    #[inline(always)]
    fn eval(&self, v: C64, w: C64) -> C64 {
        let c = &self.0;
        let (vc, wc) = (v.conj(), w.conj());
        v * (v * (c[0] * vc + c[1] * wc) + w * (c[2] * vc + c[3] * wc)) + w * w * (c[4] * vc + c[5] * wc)
    }
}

#[inline]
fn neighbours(u: &[C64], j: usize) -> (C64, C64) {
    // Even reflection across the axis for the centred first derivative.
    let left = if j == 0 { u[0] } else { u[j - 1] };
    let right = if j + 1 < u.len() { u[j + 1] } else { ZERO };
    (left, right)
}

#[inline]
fn lap_and_grad(g: &RadialGrid, u: &[C64], j: usize) -> (C64, C64) {
    let inv_h = 1.0 / g.dr;
    let (l, rt) = neighbours(u, j);
    let c = u[j];
    // (r ± h/2)/r = 1 ± 1/(2j + 1)
    let k = 1.0 / (2 * j + 1) as f64;
    let lap = ((rt - c) * (1.0 + k) - (c - l) * (1.0 - k)) * (inv_h * inv_h);
    (lap, (rt - l) * (0.5 * inv_h))
}

pub(super) fn laplacian(g: &RadialGrid, u: &[C64], j: usize) -> C64 {
    lap_and_grad(g, u, j).0
}

pub(super) fn gradient(g: &RadialGrid, u: &[C64], j: usize) -> C64 {
    lap_and_grad(g, u, j).1
}

/// Advances `cells` from `(prev, curr)` into `next`; returns `max |next|`
/// (NaN if any value is NaN).
pub(super) fn step(
    g: &RadialGrid,
    nl: &CubicNonlinearity,
    prev: &[C64],
    curr: &[C64],
    next: &mut [C64],
    cells: std::ops::Range<usize>,
) -> f64 {
    let dt = g.dt;
    let dt2 = dt * dt;
    let (inv_dt, inv_2dt) = (1.0 / dt, 0.5 / dt);
    let linear = nl.is_zero();
    let f = RadialCubic::new(nl);
    let mut max_sq: f64 = 0.0;
    let mut nan = false;
    for j in cells {
        let (lap, ur) = lap_and_grad(g, curr, j);
        let base = 2.0 * curr[j] - prev[j] + lap * dt2;
        let val = if linear {
            base
        } else {
            let v_pred = (curr[j] - prev[j]) * inv_dt;
            let star = base + f.eval(v_pred, ur) * dt2;
            let v = (star - prev[j]) * inv_2dt;
            base + f.eval(v, ur) * dt2
        };
        let a = val.norm_sqr();
        nan |= a.is_nan();
        max_sq = max_sq.max(a);
        next[j] = val;
    }
    if nan {
        f64::NAN
    } else {
        max_sq.sqrt()
    }
}

/// Staggered energy `E^{n−½}` from levels `n − 1` and `n` over `cells`.
pub(super) fn energy(g: &RadialGrid, prev: &[C64], curr: &[C64], cells: std::ops::Range<usize>) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let h = g.dr;
    let n = curr.len();
    let (mut kin, mut pot) = (0.0, 0.0);
    for j in cells.clone() {
        kin += g.r(j) * (curr[j] - prev[j]).norm_sqr();
        let (c1, p1) = if j + 1 < n { (curr[j + 1], prev[j + 1]) } else { (ZERO, ZERO) };
        let dc = c1 - curr[j];
        let dp = p1 - prev[j];
        pot += (g.r(j) + 0.5 * h) * (dc * dp.conj()).re;
    }
    0.5 * two_pi * (kin * h / (g.dt * g.dt) + pot / h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collapsed_cubic_matches_general_evaluation() {
        let mut terms = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    terms.push((a, b, c, C64::new(0.3 * a as f64 - 0.1 * c as f64, 0.7 - 0.2 * b as f64)));
                }
            }
        }
        let nl = CubicNonlinearity::from_terms(&terms).unwrap();
        let f = RadialCubic::new(&nl);
        let (v, w) = (C64::new(0.4, -1.1), C64::new(-0.3, 0.8));
        assert!((f.eval(v, w) - nl.evaluate(&[v, w, ZERO])).norm() < 1e-14);
    }
}
