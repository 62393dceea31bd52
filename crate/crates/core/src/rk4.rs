//! Classical fixed-step fourth-order Runge–Kutta on small real state vectors.

use crate::error::{Error, Result};

/// One RK4 step of size `h` for `y' = f(t, y)`.
#[inline]
pub fn step<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    h: f64,
) -> [f64; N] {
    let k1 = f(t, y);
    let y2 = axpy(y, 0.5 * h, &k1);
    let k2 = f(t + 0.5 * h, &y2);
    let y3 = axpy(y, 0.5 * h, &k2);
    let k3 = f(t + 0.5 * h, &y3);
    let y4 = axpy(y, h, &k3);
    let k4 = f(t + h, &y4);
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], a: f64, x: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * x[i];
    }
    out
}

/// Integrates from `t0` to `t1` in `n` equal steps, calling `visit` at every
/// node (including the initial one). Fails on the first non-finite state.
pub fn integrate<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t1: f64,
    n: usize,
    mut visit: impl FnMut(f64, &[f64; N]),
) -> Result<[f64; N]> {
    let h = if n == 0 { 0.0 } else { (t1 - t0) / n as f64 };
    let mut y = y0;
    visit(t0, &y);
    for k in 0..n {
        let t = t0 + k as f64 * h;
        y = step(&f, t, &y, h);
        let t_next = if k + 1 == n { t1 } else { t0 + (k + 1) as f64 * h };
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Step { t: t_next });
        }
        visit(t_next, &y);
    }
    Ok(y)
}

/// Number of equal steps of size at most `h` covering `span`.
pub fn steps_for(span: f64, h: f64) -> usize {
    if span <= 0.0 {
        0
    } else {
        (span / h).ceil().max(1.0) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_order_on_exponential() {
        let err = |n: usize| {
            let y = integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 1.0, n, |_, _| {}).unwrap();
            (y[0] - 1f64.exp()).abs()
        };
        let ratio = err(20) / err(40);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn non_finite_state_is_reported() {
        let r = integrate(|_, y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], 2.0, 200, |_, _| {});
        assert!(matches!(r, Err(Error::Step { .. })));
    }
}
