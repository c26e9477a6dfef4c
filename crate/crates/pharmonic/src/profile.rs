//! The reduced ODE in the `x`-chart, derived pointwise quantities, the
//! identity-map profile, and the transform back to the colatitude chart.
//!
//! With `t = 2·arctan(eˣ)` and `h(x) = r(t) − π/2` the Euler–Lagrange
//! equation reads
//!
//! ```text
//! h″ + (p−m)·tanh x · (A/D)·h′ + ((m−1)/2)·(B/D)·sin 2h = 0,
//!   A = h′² + (m−1)cos²h,   D = (p−1)h′² + (m−1)cos²h,
//!   B = (3−p)h′² + (m−1)cos²h.
//! ```
//!
//! `D` vanishes exactly at the fixed points `(h, h′) = (±π/2 + kπ, 0)`;
//! integration must stop there rather than regularize.

use crate::error::{Error, Result};
use crate::model::Params;
use crate::numerics::hermite_value;
use std::f64::consts::{FRAC_PI_2, PI};

/// Denominator floor below which the ODE is treated as degenerate.
pub const DEGENERACY_FLOOR: f64 = 1e-14;

/// Point on an orbit: chart coordinate, angle, derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileState {
    pub x: f64,
    pub h: f64,
    pub dh: f64,
}

/// Orbit point enriched with the derived quantities used downstream.
#[derive(Debug, Clone, Copy)]
pub struct OrbitSample {
    pub state: ProfileState,
    /// `A = h′² + (m−1)cos²h ≥ 0`.
    pub a_val: f64,
    /// Lyapunov value `W = A^{p/2−1}·((p−1)h′² − (m−1)cos²h)`.
    pub w_val: f64,
    /// Continuous (unwrapped) phase of `(h, h′)`.
    pub theta: f64,
    /// `ρ = √(h² + h′²)`.
    pub rho: f64,
}

impl OrbitSample {
    /// Build a sample, unwrapping the phase against the previous sample.
    pub fn from_state(state: ProfileState, params: &Params, prev_theta: Option<f64>) -> Self {
        let mut theta = state.dh.atan2(state.h);
        if let Some(prev) = prev_theta {
            let two_pi = 2.0 * PI;
            theta += two_pi * ((prev - theta) / two_pi).round();
        }
        OrbitSample {
            state,
            a_val: a_value(&state, params),
            w_val: lyapunov_w(&state, params),
            theta,
            rho: state.h.hypot(state.dh),
        }
    }
}

/// `t = 2·arctan(eˣ)`, the colatitude of the chart point.
pub fn t_of_x(x: f64) -> f64 {
    2.0 * x.exp().atan()
}

/// Inverse chart map; only the open interval `(0, π)` is reachable.
pub fn x_of_t(t: f64) -> Result<f64> {
    if !(t > 0.0 && t < PI) {
        return Err(Error::InvalidInput(format!(
            "t = {t} outside (0, pi) maps to x = ±infinity"
        )));
    }
    Ok((t / 2.0).tan().ln())
}

/// `A(x) = h′² + (m−1)cos²h`.
pub fn a_value(state: &ProfileState, params: &Params) -> f64 {
    let c = state.h.cos();
    state.dh * state.dh + (params.mf() - 1.0) * c * c
}

/// Right-hand side of the first-order system `(h, h′) ↦ (h′, h″)`.
pub fn el_rhs(state: &ProfileState, params: &Params) -> Result<(f64, f64)> {
    el_rhs_with_floor(state, params, DEGENERACY_FLOOR)
}

pub fn el_rhs_with_floor(state: &ProfileState, params: &Params, floor: f64) -> Result<(f64, f64)> {
    let p = params.p();
    let m = params.mf();
    let c = state.h.cos();
    let cos2 = c * c;
    let dh2 = state.dh * state.dh;
    let denom = (p - 1.0) * dh2 + (m - 1.0) * cos2;
    if denom < floor {
        return Err(Error::DegeneratePoint {
            x: state.x,
            denominator: denom,
            floor,
        });
    }
    let a = dh2 + (m - 1.0) * cos2;
    let b = (3.0 - p) * dh2 + (m - 1.0) * cos2;
    let ddh = -(p - m) * state.x.tanh() * (a / denom) * state.dh
        - 0.5 * (m - 1.0) * (b / denom) * (2.0 * state.h).sin();
    Ok((state.dh, ddh))
}

/// Lyapunov value `W = A^{p/2−1}·((p−1)h′² − (m−1)cos²h)`; zero at the
/// degenerate fixed points for every `p`.
pub fn lyapunov_w(state: &ProfileState, params: &Params) -> f64 {
    let p = params.p();
    let m = params.mf();
    let c = state.h.cos();
    let cos2 = c * c;
    let dh2 = state.dh * state.dh;
    let a = dh2 + (m - 1.0) * cos2;
    let core = (p - 1.0) * dh2 - (m - 1.0) * cos2;
    if a == 0.0 {
        return 0.0;
    }
    a.powf(p / 2.0 - 1.0) * core
}

/// Closed-form derivative `W′ = p(m−p)·A^{p/2−1}·tanh x·h′²` along orbits.
pub fn lyapunov_w_rate(state: &ProfileState, params: &Params) -> f64 {
    let p = params.p();
    let m = params.mf();
    let a = a_value(state, params);
    if a == 0.0 {
        return 0.0;
    }
    p * (m - p) * a.powf(p / 2.0 - 1.0) * state.x.tanh() * state.dh * state.dh
}

/// The identity map in this chart: `h₁(x) = 2·arctan(eˣ) − π/2`,
/// `h₁′(x) = sech x`. Satisfies `A ≡ m·sech²x` for every `m`.
pub fn identity_profile(x: f64) -> ProfileState {
    ProfileState {
        x,
        h: t_of_x(x) - FRAC_PI_2,
        dh: 1.0 / x.cosh(),
    }
}

/// Reflection symmetry of the initial condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// `h(−x) = −h(x)` (b-orbits, `h(0) = 0`).
    Odd,
    /// `h(−x) = h(x)` (d-orbits, `h′(0) = 0`).
    Even,
}

/// One point of the colatitude-chart profile `r(t)`.
#[derive(Debug, Clone, Copy)]
pub struct RSample {
    pub t: f64,
    pub r: f64,
    /// `ṙ(t) = h′(x)·cosh x`.
    pub dr: f64,
}

/// Boundary-value profile `r(t)` on (a subset of) `[0, π]`.
#[derive(Debug, Clone)]
pub struct RProfile {
    /// Samples with strictly increasing `t`.
    pub samples: Vec<RSample>,
    /// Boundary index: `r` at the right end equals `k_end·π`.
    pub k_end: i32,
}

impl RProfile {
    /// Interpolated `r` at `t` (cubic Hermite between samples).
    pub fn r_at(&self, t: f64) -> f64 {
        let s = &self.samples;
        let i = match s.binary_search_by(|v| v.t.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(s.len() - 2),
            Err(i) => i.saturating_sub(1).min(s.len() - 2),
        };
        hermite_value(
            s[i].t,
            s[i + 1].t,
            s[i].r,
            s[i].dr,
            s[i + 1].r,
            s[i + 1].dr,
            t,
        )
    }
}

/// How close the terminal point must be to a fixed point for the orbit to
/// carry a boundary value (matches loose convergence-ball radii).
const TERMINAL_BALL: f64 = 0.2;

/// Extend a half-line orbit by its reflection symmetry and map it to the
/// colatitude chart: `(x, h) ↦ (2·arctan eˣ, h + π/2)`.
///
/// Orbits that converged toward `(±π/2, 0)` get exact endpoint samples at
/// `t = 0` and `t = π` with the limiting values; orbits that exited through
/// `|h| = π/2` end at their exit point (the boundary value is attained at an
/// interior `t`). Anything else is rejected.
pub fn to_r_profile(samples: &[OrbitSample], symmetry: Symmetry) -> Result<RProfile> {
    if samples.len() < 2 {
        return Err(Error::InvalidInput(
            "orbit too short to reconstruct a profile".into(),
        ));
    }
    let last = samples[samples.len() - 1].state;
    let sign = if last.h >= 0.0 { 1.0 } else { -1.0 };
    let converged = (last.h - sign * FRAC_PI_2).hypot(last.dh) <= TERMINAL_BALL;
    let exited = !converged && (last.h.abs() - FRAC_PI_2).abs() <= 1e-9;
    if !exited && !converged {
        return Err(Error::InvalidInput(
            "orbit neither converged to (±π/2, 0) nor exited through |h| = π/2".into(),
        ));
    }

    // Beyond x ≈ 30 the chart saturates: t = 2·arctan(eˣ) is within an ulp
    // of π and consecutive samples collide. The tail is represented by the
    // appended limit samples instead.
    const X_CHART_MAX: f64 = 30.0;
    let kept: Vec<&OrbitSample> = samples
        .iter()
        .filter(|s| s.state.x <= X_CHART_MAX)
        .collect();
    if kept.len() < 2 {
        return Err(Error::InvalidInput(
            "orbit has fewer than two samples inside the chart range".into(),
        ));
    }

    let to_sample = |s: &ProfileState| RSample {
        t: t_of_x(s.x),
        r: s.h + FRAC_PI_2,
        dr: s.dh * s.x.cosh(),
    };
    let mut out: Vec<RSample> = Vec::with_capacity(2 * kept.len() + 2);

    // mirrored half x < 0, reversed so that t increases
    for s in kept.iter().rev() {
        if s.state.x == 0.0 {
            continue;
        }
        let fwd = to_sample(&s.state);
        let (r, dr) = match symmetry {
            Symmetry::Odd => (PI - fwd.r, fwd.dr),
            Symmetry::Even => (fwd.r, -fwd.dr),
        };
        out.push(RSample {
            t: PI - fwd.t,
            r,
            dr,
        });
    }
    for s in &kept {
        out.push(to_sample(&s.state));
    }
    // drop any samples that collide in t after rounding
    out.dedup_by(|b, a| b.t <= a.t);

    let h_limit = sign * FRAC_PI_2;
    let r_end = h_limit + FRAC_PI_2;
    if converged {
        let tail = kept[kept.len() - 1].state;
        let dr_limit = tail.dh * tail.x.cosh();
        if out.last().map(|s| s.t < PI) == Some(true) {
            out.push(RSample {
                t: PI,
                r: r_end,
                dr: dr_limit,
            });
        }
        let r0 = match symmetry {
            Symmetry::Odd => PI - r_end,
            Symmetry::Even => r_end,
        };
        let dr0 = match symmetry {
            Symmetry::Odd => dr_limit,
            Symmetry::Even => -dr_limit,
        };
        if out.first().map(|s| s.t > 0.0) == Some(true) {
            out.insert(
                0,
                RSample {
                    t: 0.0,
                    r: r0,
                    dr: dr0,
                },
            );
        }
    }

    if out.windows(2).any(|w| w[1].t <= w[0].t) {
        return Err(Error::InvalidInput(
            "reconstructed profile is not strictly increasing in t".into(),
        ));
    }
    let k_end = (r_end / PI).round() as i32;
    Ok(RProfile {
        samples: out,
        k_end,
    })
}

/// Sample a closed-form profile on the given grid, with phase unwrapping.
pub fn sample_closed_form(
    f: impl Fn(f64) -> ProfileState,
    xs: &[f64],
    params: &Params,
) -> Vec<OrbitSample> {
    let mut out: Vec<OrbitSample> = Vec::with_capacity(xs.len());
    for &x in xs {
        let prev = out.last().map(|s: &OrbitSample| s.theta);
        out.push(OrbitSample::from_state(f(x), params, prev));
    }
    out
}
