//! Cubic derivative nonlinearities and their structural classification.
//!
//! A nonlinearity is stored as the full `3×3×3` tensor of complex
//! coefficients `p_abc`, index `0` being the time derivative. Everything the
//! long-time theory needs is read off its trace on the null circle,
//! `F(ω̂)` with `ω̂ = (−1, cos θ, sin θ)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::Add;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Default tolerance for zero comparisons on the null circle.
pub const DEFAULT_ZERO_TOL: f64 = 1e-10;
/// Default number of angles sampled by [`CubicNonlinearity::classify`].
pub const DEFAULT_SAMPLES: usize = 1024;

/// One non-zero coefficient `p_abc`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub coeff: C64,
}

/// `F(q) = Σ p_abc q_a q_b conj(q_c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicNonlinearity {
    coeffs: [[[C64; 3]; 3]; 3],
    terms: Vec<Term>,
}

/// A point `ω̂ = (−1, ω₁, ω₂)` of the null circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullVector {
    omega: [f64; 2],
}

impl NullVector {
    pub const OMEGA0: f64 = -1.0;

    pub fn new(omega1: f64, omega2: f64) -> Result<Self> {
        let norm = (omega1 * omega1 + omega2 * omega2).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "null vector spatial part must be a unit vector, |ω| = {norm}"
            )));
        }
        Ok(Self {
            omega: [omega1, omega2],
        })
    }

    pub fn from_angle(theta: f64) -> Self {
        Self {
            omega: [theta.cos(), theta.sin()],
        }
    }

    pub fn omega(&self) -> [f64; 2] {
        self.omega
    }

    pub fn as_vector(&self) -> [C64; 3] {
        [
            C64::new(Self::OMEGA0, 0.0),
            C64::new(self.omega[0], 0.0),
            C64::new(self.omega[1], 0.0),
        ]
    }
}

/// Structural flags of a nonlinearity, read from its sampled null-circle trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearityClass {
    pub satisfies_null_condition: bool,
    pub satisfies_agemi: bool,
    pub strictly_dissipative: bool,
    pub purely_rotational: bool,
    /// `min_θ Re F(ω̂)`.
    pub c0: f64,
    /// Angle at which the minimum is attained.
    pub c0_angle: f64,
}

impl Default for CubicNonlinearity {
    fn default() -> Self {
        Self::zero()
    }
}

impl CubicNonlinearity {
    pub fn zero() -> Self {
        Self {
            coeffs: [[[C64::new(0.0, 0.0); 3]; 3]; 3],
            terms: Vec::new(),
        }
    }

    pub fn from_coefficients(coeffs: [[[C64; 3]; 3]; 3]) -> Result<Self> {
        for (a, plane) in coeffs.iter().enumerate() {
            for (b, row) in plane.iter().enumerate() {
                for (c, p) in row.iter().enumerate() {
                    if !p.re.is_finite() || !p.im.is_finite() {
                        return Err(Error::Domain(format!("coefficient p{a}{b}{c} is not finite")));
                    }
                }
            }
        }
        let mut f = Self {
            coeffs,
            terms: Vec::new(),
        };
        f.rebuild_terms();
        Ok(f)
    }

    /// Builds from a list of `(a, b, c, p_abc)`; repeated indices accumulate.
    pub fn from_terms(terms: &[(usize, usize, usize, C64)]) -> Result<Self> {
        let mut coeffs = [[[C64::new(0.0, 0.0); 3]; 3]; 3];
        for &(a, b, c, p) in terms {
            if a > 2 || b > 2 || c > 2 {
                return Err(Error::Domain(format!("index p{a}{b}{c} out of range")));
            }
            coeffs[a][b][c] += p;
        }
        Self::from_coefficients(coeffs)
    }

    fn rebuild_terms(&mut self) {
        self.terms.clear();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let p = self.coeffs[a][b][c];
                    if p != C64::new(0.0, 0.0) {
                        self.terms.push(Term { a, b, c, coeff: p });
                    }
                }
            }
        }
    }

    pub fn coefficient(&self, a: usize, b: usize, c: usize) -> C64 {
        self.coeffs[a][b][c]
    }

    pub fn coefficients(&self) -> &[[[C64; 3]; 3]; 3] {
        &self.coeffs
    }

    /// The non-zero coefficients.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, lambda: C64) -> Self {
        let mut coeffs = self.coeffs;
        for plane in coeffs.iter_mut() {
            for row in plane.iter_mut() {
                for p in row.iter_mut() {
                    *p *= lambda;
                }
            }
        }
        let mut f = Self {
            coeffs,
            terms: Vec::new(),
        };
        f.rebuild_terms();
        f
    }

    #[inline]
    pub fn evaluate(&self, q: &[C64; 3]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for t in &self.terms {
            acc += t.coeff * q[t.a] * q[t.b] * q[t.c].conj();
        }
        acc
    }

    /// `F(ω̂)`.
    pub fn on_null_vector(&self, omega: &NullVector) -> C64 {
        self.evaluate(&omega.as_vector())
    }

    pub fn at_angle(&self, theta: f64) -> C64 {
        self.on_null_vector(&NullVector::from_angle(theta))
    }

    /// `F(ω̂)` at the uniformly spaced angles `θ_k = 2πk/n`.
    pub fn circle_trace(&self, n_samples: usize) -> Result<Vec<(f64, C64)>> {
        if n_samples < 4 {
            return Err(Error::Domain(format!(
                "circle trace needs at least 4 samples, got {n_samples}"
            )));
        }
        Ok((0..n_samples)
            .map(|k| {
                let theta = 2.0 * PI * k as f64 / n_samples as f64;
                (theta, self.at_angle(theta))
            })
            .collect())
    }

    /// Minimum of `Re F(ω̂)` over the circle: dense sampling followed by a
    /// golden-section refinement around the best sample.
    pub fn min_real_trace(&self, n_samples: usize) -> Result<(f64, f64)> {
        let trace = self.circle_trace(n_samples)?;
        let (k_min, _) = trace
            .iter()
            .enumerate()
            .min_by(|x, y| x.1 .1.re.total_cmp(&y.1 .1.re))
            .expect("non-empty trace");
        let h = 2.0 * PI / n_samples as f64;
        let centre = trace[k_min].0;
        let re = |theta: f64| self.at_angle(theta).re;
        let (theta, value) = golden_section_min(re, centre - h, centre + h, 1e-13);
        let sampled = trace[k_min].1.re;
        if sampled <= value {
            Ok((centre, sampled))
        } else {
            Ok((theta.rem_euclid(2.0 * PI), value))
        }
    }

    pub fn classify(&self, n_samples: usize, tol: f64) -> Result<NonlinearityClass> {
        if n_samples < 64 {
            return Err(Error::Domain(format!(
                "classification needs at least 64 samples, got {n_samples}"
            )));
        }
        let trace = self.circle_trace(n_samples)?;
        let (c0_angle, c0) = self.min_real_trace(n_samples)?;
        let null = trace.iter().all(|(_, v)| v.norm() <= tol);
        let rotational = trace.iter().all(|(_, v)| v.re.abs() <= tol);
        let agemi = c0 >= -tol;
        let dissipative = c0 > tol;
        Ok(NonlinearityClass {
            satisfies_null_condition: null,
            satisfies_agemi: agemi,
            strictly_dissipative: dissipative,
            purely_rotational: rotational,
            c0,
            c0_angle,
        })
    }

    /// True when `F(q₀, q_r cos θ, q_r sin θ)` does not depend on `θ`, which
    /// is what the radially symmetric solver needs.
    pub fn is_rotation_invariant(&self, tol: f64) -> bool {
        let probes = [
            (C64::new(0.7, -0.2), C64::new(0.3, 0.9)),
            (C64::new(-1.1, 0.4), C64::new(0.5, -0.6)),
            (C64::new(0.2, 1.3), C64::new(-0.8, 0.1)),
        ];
        probes.iter().all(|&(q0, qr)| {
            let reference = self.evaluate(&[q0, qr, C64::new(0.0, 0.0)]);
            let scale = reference.norm().max(q0.norm().max(qr.norm()).powi(3));
            (1..32).all(|k| {
                let theta = 2.0 * PI * k as f64 / 32.0;
                let v = self.evaluate(&[q0, qr * theta.cos(), qr * theta.sin()]);
                (v - reference).norm() <= tol * scale
            })
        })
    }

    // Named examples.

    /// `−|∂_t u|² ∂_t u`, with `F(ω̂) ≡ 1`.
    pub fn dissipative() -> Self {
        Self::from_terms(&[(0, 0, 0, C64::new(-1.0, 0.0))]).expect("finite")
    }

    /// `i|∂_t u|² ∂_t u`, with `F(ω̂) ≡ −i`.
    pub fn rotational() -> Self {
        Self::from_terms(&[(0, 0, 0, C64::new(0.0, 1.0))]).expect("finite")
    }

    /// `|∂_t u|² ∂_t u`, which is `(∂_t u)³` for real solutions; `F(ω̂) ≡ −1`.
    pub fn antidissipative() -> Self {
        Self::from_terms(&[(0, 0, 0, C64::new(1.0, 0.0))]).expect("finite")
    }

    /// `(∂_a u)(|∂_t u|² − |∂₁u|² − |∂₂u|²)`.
    pub fn null_form_a(a: usize) -> Result<Self> {
        Self::from_terms(&[
            (a, 0, 0, C64::new(1.0, 0.0)),
            (a, 1, 1, C64::new(-1.0, 0.0)),
            (a, 2, 2, C64::new(-1.0, 0.0)),
        ])
    }

    /// `conj(∂_a u)((∂_t u)² − (∂₁u)² − (∂₂u)²)`.
    pub fn null_form_conjugate(a: usize) -> Result<Self> {
        Self::from_terms(&[
            (0, 0, a, C64::new(1.0, 0.0)),
            (1, 1, a, C64::new(-1.0, 0.0)),
            (2, 2, a, C64::new(-1.0, 0.0)),
        ])
    }

    /// `(∂_a u)((∂_b u) conj(∂_c u) − (∂_c u) conj(∂_b u))`.
    pub fn null_form_commutator(a: usize, b: usize, c: usize) -> Result<Self> {
        Self::from_terms(&[(a, b, c, C64::new(1.0, 0.0)), (a, c, b, C64::new(-1.0, 0.0))])
    }

    /// Looks up a nonlinearity preset by name.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "dissipative" => Ok(Self::dissipative()),
            "rotational" => Ok(Self::rotational()),
            "antidissipative" => Ok(Self::antidissipative()),
            "null-form-a" => Self::null_form_a(0),
            "null-form-conjugate" => Self::null_form_conjugate(0),
            "free" | "zero" => Ok(Self::zero()),
            other => Err(Error::Config(format!("unknown nonlinearity preset `{other}`"))),
        }
    }

    pub fn preset_names() -> &'static [&'static str] {
        &[
            "dissipative",
            "rotational",
            "null-form-a",
            "null-form-conjugate",
            "antidissipative",
            "free",
        ]
    }

    // Plain-text form: {"p_abc": {"000": [re, im], ...}}.

    pub fn to_json_value(&self) -> serde_json::Value {
        let mut map = BTreeMap::new();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let p = self.coeffs[a][b][c];
                    map.insert(format!("{a}{b}{c}"), [p.re, p.im]);
                }
            }
        }
        serde_json::json!({ "p_abc": map })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("serializable")
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<Self> {
        let table = value
            .get("p_abc")
            .and_then(|v| v.as_object())
            .ok_or_else(|| Error::Config("expected an object under key \"p_abc\"".into()))?;
        let mut coeffs = [[[C64::new(0.0, 0.0); 3]; 3]; 3];
        for (key, entry) in table {
            let digits: Vec<usize> = key
                .chars()
                .map(|ch| ch.to_digit(10).map(|d| d as usize))
                .collect::<Option<_>>()
                .filter(|d: &Vec<usize>| d.len() == 3 && d.iter().all(|&i| i < 3))
                .ok_or_else(|| Error::Config(format!("invalid coefficient key `{key}`")))?;
            let pair: [f64; 2] = serde_json::from_value(entry.clone())
                .map_err(|e| Error::Config(format!("coefficient {key}: {e}")))?;
            coeffs[digits[0]][digits[1]][digits[2]] = C64::new(pair[0], pair[1]);
        }
        Self::from_coefficients(coeffs)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        Self::from_json_value(&value)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }
}

impl Add for &CubicNonlinearity {
    type Output = CubicNonlinearity;

    fn add(self, rhs: &CubicNonlinearity) -> CubicNonlinearity {
        let mut coeffs = self.coeffs;
        for (x, y) in coeffs.iter_mut().flatten().flatten().zip(rhs.coeffs.iter().flatten().flatten()) {
            *x += y;
        }
        CubicNonlinearity::from_coefficients(coeffs).expect("sum of finite tensors")
    }
}

fn golden_section_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn evaluate_named_examples_on_null_vector() {
        let q = NullVector::from_angle(0.3).as_vector();
        let d = CubicNonlinearity::dissipative().evaluate(&q);
        assert!((d - c(1.0, 0.0)).norm() < 1e-15);
        let r = CubicNonlinearity::rotational().evaluate(&q);
        assert!((r - c(0.0, -1.0)).norm() < 1e-15);
        for a in 0..3 {
            let f = CubicNonlinearity::null_form_a(a).unwrap();
            for k in 0..50 {
                let theta = k as f64 * 0.1257;
                assert!(f.at_angle(theta).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn circle_trace_values() {
        for n in [4, 7, 64] {
            let t = CubicNonlinearity::dissipative().circle_trace(n).unwrap();
            assert_eq!(t.len(), n);
            for (k, (theta, v)) in t.iter().enumerate() {
                assert!((theta - 2.0 * PI * k as f64 / n as f64).abs() < 1e-15);
                assert!((v - c(1.0, 0.0)).norm() < 1e-15);
            }
            let t = CubicNonlinearity::rotational().circle_trace(n).unwrap();
            assert!(t.iter().all(|(_, v)| (v - c(0.0, -1.0)).norm() < 1e-15));
        }
        assert!(CubicNonlinearity::dissipative().circle_trace(3).is_err());
    }

    #[test]
    fn null_form_families_vanish_on_circle() {
        let mut forms = Vec::new();
        for a in 0..3 {
            forms.push(CubicNonlinearity::null_form_a(a).unwrap());
            forms.push(CubicNonlinearity::null_form_conjugate(a).unwrap());
            for b in 0..3 {
                for cc in 0..3 {
                    forms.push(CubicNonlinearity::null_form_commutator(a, b, cc).unwrap());
                }
            }
        }
        for f in forms {
            let trace = f.circle_trace(256).unwrap();
            assert!(trace.iter().all(|(_, v)| v.norm() <= 1e-12));
            assert!(f.classify(256, DEFAULT_ZERO_TOL).unwrap().satisfies_null_condition);
        }
    }

    #[test]
    fn classify_presets() {
        let d = CubicNonlinearity::dissipative().classify(DEFAULT_SAMPLES, DEFAULT_ZERO_TOL).unwrap();
        assert!(d.satisfies_agemi && d.strictly_dissipative && !d.purely_rotational);
        assert!((d.c0 - 1.0).abs() < 1e-12);

        let r = CubicNonlinearity::rotational().classify(DEFAULT_SAMPLES, DEFAULT_ZERO_TOL).unwrap();
        assert!(r.satisfies_agemi && !r.strictly_dissipative && r.purely_rotational);
        assert!(!r.satisfies_null_condition);
        assert!(r.c0.abs() < 1e-12);

        let a = CubicNonlinearity::antidissipative().classify(DEFAULT_SAMPLES, DEFAULT_ZERO_TOL).unwrap();
        assert!(!a.satisfies_agemi);
        assert!((a.c0 + 1.0).abs() < 1e-12);

        assert!(CubicNonlinearity::dissipative().classify(32, 1e-10).is_err());
    }

    #[test]
    fn refined_minimum_beats_sampling() {
        let f = CubicNonlinearity::from_terms(&[
            (0, 0, 0, c(-1.0, 0.0)),
            (0, 0, 1, c(0.8, 0.0)),
        ])
        .unwrap();
        // F(ω̂) = 1 + 0.8 cos θ: minimum 0.2 at θ = π, off the 999-point grid.
        let (theta, m) = f.min_real_trace(999).unwrap();
        assert!((m - 0.2).abs() < 1e-12, "{m}");
        assert!((theta - PI).abs() < 1e-5);
    }

    #[test]
    fn null_vector_requires_unit_length() {
        assert!(NullVector::new(0.6, 0.8).is_ok());
        assert!(NullVector::new(0.6, 0.81).is_err());
        assert!(NullVector::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn non_finite_coefficient_rejected() {
        assert!(CubicNonlinearity::from_terms(&[(0, 1, 2, c(f64::INFINITY, 0.0))]).is_err());
        assert!(CubicNonlinearity::from_terms(&[(3, 0, 0, c(1.0, 0.0))]).is_err());
    }

    #[test]
    fn json_round_trip_and_errors() {
        let f = &CubicNonlinearity::null_form_a(1).unwrap() + &CubicNonlinearity::rotational();
        let g = CubicNonlinearity::from_json_str(&f.to_json_string()).unwrap();
        assert_eq!(f, g);
        let sparse = CubicNonlinearity::from_json_str(r#"{"p_abc": {"000": [-1, 0]}}"#).unwrap();
        assert_eq!(sparse, CubicNonlinearity::dissipative());
        assert!(CubicNonlinearity::from_json_str(r#"{"p_abc": {"030": [1, 0]}}"#).is_err());
        assert!(CubicNonlinearity::from_json_str(r#"{"q": {}}"#).is_err());
    }

    #[test]
    fn rotation_invariance_detection() {
        assert!(CubicNonlinearity::dissipative().is_rotation_invariant(1e-12));
        assert!(CubicNonlinearity::null_form_a(0).unwrap().is_rotation_invariant(1e-12));
        assert!(!CubicNonlinearity::null_form_a(1).unwrap().is_rotation_invariant(1e-12));
    }

    fn arb_c64() -> impl Strategy<Value = C64> {
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| C64::new(a, b))
    }

    fn arb_tensor() -> impl Strategy<Value = CubicNonlinearity> {
        proptest::collection::vec(arb_c64(), 27).prop_map(|v| {
            let mut coeffs = [[[C64::new(0.0, 0.0); 3]; 3]; 3];
            for (i, p) in v.into_iter().enumerate() {
                coeffs[i / 9][(i / 3) % 3][i % 3] = p;
            }
            CubicNonlinearity::from_coefficients(coeffs).unwrap()
        })
    }

    proptest! {
        #[test]
        fn homogeneous_of_degree_three(f in arb_tensor(), q0 in arb_c64(), q1 in arb_c64(), q2 in arb_c64(), lambda in -3.0..3.0f64) {
            let q = [q0, q1, q2];
            let lq = [q0 * lambda, q1 * lambda, q2 * lambda];
            let lhs = f.evaluate(&lq);
            let rhs = f.evaluate(&q) * lambda.powi(3);
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        }

        #[test]
        fn additive_in_coefficients(f in arb_tensor(), g in arb_tensor(), q0 in arb_c64(), q1 in arb_c64(), q2 in arb_c64()) {
            let q = [q0, q1, q2];
            let lhs = (&f + &g).evaluate(&q);
            let rhs = f.evaluate(&q) + g.evaluate(&q);
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        }

        #[test]
        fn class_flags_are_consistent(f in arb_tensor(), rot in any::<bool>()) {
            // Mix in purely rotational cases so that branch is exercised.
            let f = if rot { CubicNonlinearity::rotational().scaled(C64::new(f.coefficient(0,0,0).re, 0.0)) } else { f };
            let class = f.classify(128, DEFAULT_ZERO_TOL).unwrap();
            if class.strictly_dissipative { prop_assert!(class.satisfies_agemi); }
            if class.satisfies_null_condition { prop_assert!(class.purely_rotational); }
            if class.purely_rotational { prop_assert!(class.satisfies_agemi); }
            prop_assert_eq!(class.c0 > DEFAULT_ZERO_TOL, class.strictly_dissipative);
        }
    }
}
