//! Compactly supported initial data `u(0) = εf`, `∂_t u(0) = εg`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BumpShape {
    /// `(1 − s²)⁴`, a C³ bump.
    Polynomial,
    /// `exp(1 − 1/(1 − s²))`, C∞ and normalised to 1 at the centre.
    Smooth,
}

impl BumpShape {
    /// Value and derivative at `s ≥ 0`.
    pub fn eval(self, s: f64) -> (f64, f64) {
        let s = s.abs();
        if s >= 1.0 {
            return (0.0, 0.0);
        }
        let w = 1.0 - s * s;
        match self {
            BumpShape::Polynomial => (w.powi(4), -8.0 * s * w.powi(3)),
            BumpShape::Smooth => {
                let b = (1.0 - 1.0 / w).exp();
                (b, -2.0 * s / (w * w) * b)
            }
        }
    }
}

/// `f = f_amp · b(|x|/R)`, `g = g_amp · b(|x|/R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub shape: BumpShape,
    pub radius: f64,
    pub eps: f64,
    #[serde(default = "one")]
    pub f_amp: C64,
    #[serde(default)]
    pub g_amp: C64,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

impl InitialData {
    pub fn new(shape: BumpShape, radius: f64, eps: f64) -> Result<Self> {
        let d = Self {
            shape,
            radius,
            eps,
            f_amp: one(),
            g_amp: C64::new(0.0, 0.0),
        };
        d.validate()?;
        Ok(d)
    }

    pub fn with_amplitudes(mut self, f_amp: C64, g_amp: C64) -> Self {
        self.f_amp = f_amp;
        self.g_amp = g_amp;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Config(format!("support radius must be positive, got {}", self.radius)));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::Config(format!("eps must be non-negative, got {}", self.eps)));
        }
        Ok(())
    }

    /// `εf(r)`.
    pub fn u0(&self, r: f64) -> C64 {
        self.f_amp * (self.eps * self.shape.eval(r / self.radius).0)
    }

    /// `ε∂_r f(r)`.
    pub fn u0_r(&self, r: f64) -> C64 {
        self.f_amp * (self.eps * self.shape.eval(r / self.radius).1 / self.radius)
    }

    /// `εg(r)`.
    pub fn ut0(&self, r: f64) -> C64 {
        self.g_amp * (self.eps * self.shape.eval(r / self.radius).0)
    }

    /// `(ε²/2)∫(|g|² + |∇f|²) dx` by Gauss–Legendre in `r`.
    pub fn energy(&self) -> f64 {
        let integrand = |r: f64| (self.ut0(r).norm_sqr() + self.u0_r(r).norm_sqr()) * r;
        0.5 * 2.0 * std::f64::consts::PI * gauss_legendre(integrand, 0.0, self.radius, 64)
    }
}
