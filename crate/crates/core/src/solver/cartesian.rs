//! Five-point stencil on the cell-centred square `x_i = −L + (i + ½)dx`.

use super::{Boundary, CartesianGrid2D};
use crate::nonlinearity::CubicNonlinearity;
use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Half-open index box `[i0, i1) × [k0, k1)`; `i` runs along x.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) struct IndexBox {
    pub i0: usize,
    pub i1: usize,
    pub k0: usize,
    pub k1: usize,
}

impl IndexBox {
    pub fn full(n: usize) -> Self {
        Self { i0: 0, i1: n, k0: 0, k1: n }
    }

    pub fn grown(&self, n: usize) -> Self {
        Self {
            i0: self.i0.saturating_sub(1),
            i1: (self.i1 + 1).min(n),
            k0: self.k0.saturating_sub(1),
            k1: (self.k1 + 1).min(n),
        }
    }

    /// Smallest box holding every non-zero entry of the given arrays.
    pub fn support(n: usize, arrays: &[&[C64]]) -> Option<Self> {
        let mut b: Option<Self> = None;
        for k in 0..n {
            for i in 0..n {
                if arrays.iter().any(|a| a[k * n + i] != ZERO) {
                    let e = b.get_or_insert(Self { i0: i, i1: i + 1, k0: k, k1: k + 1 });
                    e.i0 = e.i0.min(i);
                    e.i1 = e.i1.max(i + 1);
                    e.k0 = e.k0.min(k);
                    e.k1 = e.k1.max(k + 1);
                }
            }
        }
        b
    }
}

#[inline]
fn at(g: &CartesianGrid2D, u: &[C64], i: isize, k: isize) -> C64 {
    let n = g.n as isize;
    match g.boundary {
        Boundary::Periodic => u[(k.rem_euclid(n) * n + i.rem_euclid(n)) as usize],
        Boundary::Dirichlet => {
            if i < 0 || k < 0 || i >= n || k >= n {
                ZERO
            } else {
                u[(k * n + i) as usize]
            }
        }
    }
}

/// Laplacian and centred gradient at `(i, k)`.
#[inline]
pub(super) fn lap_and_grad(g: &CartesianGrid2D, u: &[C64], i: usize, k: usize) -> (C64, C64, C64) {
    let (ii, kk) = (i as isize, k as isize);
    let c = u[k * g.n + i];
    let e = at(g, u, ii + 1, kk);
    let w = at(g, u, ii - 1, kk);
    let nn = at(g, u, ii, kk + 1);
    let s = at(g, u, ii, kk - 1);
    let inv_h = 1.0 / g.dx;
    let half = 0.5 * inv_h;
    ((e + w + nn + s - 4.0 * c) * (inv_h * inv_h), (e - w) * half, (nn - s) * half)
}

pub(super) fn step(
    g: &CartesianGrid2D,
    nl: &CubicNonlinearity,
    prev: &[C64],
    curr: &[C64],
    next: &mut [C64],
    cells: IndexBox,
) -> f64 {
    let dt = g.dt;
    let dt2 = dt * dt;
    let (inv_dt, inv_2dt) = (1.0 / dt, 0.5 / dt);
    let linear = nl.is_zero();
    let mut max_sq: f64 = 0.0;
    let mut nan = false;
    for k in cells.k0..cells.k1 {
        for i in cells.i0..cells.i1 {
            let idx = k * g.n + i;
            let (lap, ux, uy) = lap_and_grad(g, curr, i, k);
            let base = 2.0 * curr[idx] - prev[idx] + lap * dt2;
            let val = if linear {
                base
            } else {
                let v_pred = (curr[idx] - prev[idx]) * inv_dt;
                let star = base + nl.evaluate(&[v_pred, ux, uy]) * dt2;
                let v = (star - prev[idx]) * inv_2dt;
                base + nl.evaluate(&[v, ux, uy]) * dt2
            };
            let a = val.norm_sqr();
            nan |= a.is_nan();
            max_sq = max_sq.max(a);
            next[idx] = val;
        }
    }
    if nan {
        f64::NAN
    } else {
        max_sq.sqrt()
    }
}

/// Staggered energy over the box grown by one cell (to catch boundary faces).
pub(super) fn energy(g: &CartesianGrid2D, prev: &[C64], curr: &[C64], cells: IndexBox) -> f64 {
    let cells = cells.grown(g.n);
    let (mut kin, mut pot) = (0.0, 0.0);
    for k in cells.k0..cells.k1 {
        for i in cells.i0..cells.i1 {
            let idx = k * g.n + i;
            kin += (curr[idx] - prev[idx]).norm_sqr();
            let (ii, kk) = (i as isize, k as isize);
            // Faces to the east and north; for Dirichlet the faces on the
            // west/south boundary are added explicitly.
            for (di, dk) in [(1isize, 0isize), (0, 1)] {
                let dc = at(g, curr, ii + di, kk + dk) - curr[idx];
                let dp = at(g, prev, ii + di, kk + dk) - prev[idx];
                pot += (dc * dp.conj()).re;
            }
            if g.boundary == Boundary::Dirichlet {
                if i == 0 {
                    pot += (curr[idx] * prev[idx].conj()).re;
                }
                if k == 0 {
                    pot += (curr[idx] * prev[idx].conj()).re;
                }
            }
        }
    }
    0.5 * (kin * g.dx * g.dx / (g.dt * g.dt) + pot)
}
