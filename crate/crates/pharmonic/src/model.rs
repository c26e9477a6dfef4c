//! Problem parameters and closed-form regime analysis.
//!
//! For `(p, m)` the linearization of the reduced equation at `h = 0` has
//! characteristic roots `α± = ((m−p) ± √D)/2` with
//! `D = m² − 2m(2+p) + p² + 4`. Complex roots (oscillatory linearization)
//! occur exactly for `m < 2 + p + 2√p`, the upper edge of the existence
//! window; the winding window `m < 3p − 2 + 2√(p(p−1))` is where the phase
//! rotates at a definite rate for small orbits.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Problem instance: energy exponent `p ≥ 2` and sphere dimension `m ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    p: f64,
    m: u32,
}

impl Params {
    pub fn new(p: f64, m: u32) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::InvalidInput("p must be finite".into()));
        }
        if p < 2.0 {
            return Err(Error::InvalidInput("p must be ≥ 2".into()));
        }
        if m < 2 {
            return Err(Error::InvalidInput("m must be ≥ 2".into()));
        }
        Ok(Self { p, m })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Sphere dimension as a float, for formula use.
    pub fn mf(&self) -> f64 {
        f64::from(self.m)
    }
}

/// Validate raw inputs; an integer-valued real `m` (e.g. `5.0`) is accepted
/// and normalized.
pub fn validate_params(p: f64, m: f64) -> Result<Params> {
    if !m.is_finite() {
        return Err(Error::InvalidInput("m must be finite".into()));
    }
    let rounded = m.round();
    if (m - rounded).abs() > 1e-9 || rounded < 0.0 || rounded > u32::MAX as f64 {
        return Err(Error::InvalidInput(format!(
            "m must be a positive integer, got {m}"
        )));
    }
    if rounded < 2.0 {
        return Err(Error::InvalidInput("m must be ≥ 2".into()));
    }
    Params::new(p, rounded as u32)
}

/// Behavior of the linearization at `h = 0` for large `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Complex `α±`: small solutions oscillate (existence regime).
    Oscillatory,
    /// Real `α±`: small solutions grow exponentially (nonexistence regime).
    Exponential,
    /// `m = p` or `m = 2 + p + 2√p` exactly; no claim is made either way.
    Boundary,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Oscillatory => "Oscillatory",
            Regime::Exponential => "Exponential",
            Regime::Boundary => "Boundary",
        }
    }
}

/// Closed-form window bounds and linearization exponents for one instance.
#[derive(Debug, Clone, Copy)]
pub struct RegimeReport {
    /// Lower edge of the existence window (= p).
    pub existence_lower: f64,
    /// Upper edge of the existence window, `2 + p + 2√p`.
    pub existence_upper: f64,
    /// Upper edge of the winding window, `3p − 2 + 2√(p(p−1))`.
    pub winding_upper: f64,
    /// `m² − 2m(2+p) + p² + 4`.
    pub discriminant: f64,
    pub alpha_plus: Complex64,
    pub alpha_minus: Complex64,
    pub regime: Regime,
}

pub fn existence_upper(p: f64) -> f64 {
    2.0 + p + 2.0 * p.sqrt()
}

pub fn winding_upper(p: f64) -> f64 {
    3.0 * p - 2.0 + 2.0 * (p * (p - 1.0)).sqrt()
}

/// Regime classification and linearization exponents.
pub fn regime(params: &Params) -> RegimeReport {
    let p = params.p();
    let m = params.mf();
    let disc = m * m - 2.0 * m * (2.0 + p) + p * p + 4.0;
    let (alpha_plus, alpha_minus) = if disc >= 0.0 {
        let s = disc.sqrt();
        (
            Complex64::new((m - p + s) / 2.0, 0.0),
            Complex64::new((m - p - s) / 2.0, 0.0),
        )
    } else {
        let s = (-disc).sqrt();
        (
            Complex64::new((m - p) / 2.0, s / 2.0),
            Complex64::new((m - p) / 2.0, -s / 2.0),
        )
    };
    let scale = 1.0 + m * m + p * p;
    let regime = if (m - p).abs() < 1e-12 || disc.abs() <= 1e-12 * scale {
        Regime::Boundary
    } else if disc < 0.0 {
        Regime::Oscillatory
    } else {
        Regime::Exponential
    };
    RegimeReport {
        existence_lower: p,
        existence_upper: existence_upper(p),
        winding_upper: winding_upper(p),
        discriminant: disc,
        alpha_plus,
        alpha_minus,
        regime,
    }
}

/// `p < m < 2 + p + 2√p`.
pub fn in_existence_window(params: &Params) -> bool {
    let m = params.mf();
    params.p() < m && m < existence_upper(params.p())
}

/// `p < m < 3p − 2 + 2√(p(p−1))`.
pub fn in_winding_window(params: &Params) -> bool {
    let m = params.mf();
    params.p() < m && m < winding_upper(params.p())
}
