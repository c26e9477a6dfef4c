//! Adaptive integration of the reduced first-order system with event
//! location and orbit classification.
//!
//! The stepper is an embedded Dormand–Prince 5(4) pair with
//! proportional-integral step-size control. Zero crossings of `h`, of `h′`,
//! and the first crossing of `|h| = π/2` are located by bisection on the
//! accepted step (re-taking a shorter step, no dense output). Identical
//! inputs produce bit-identical sample sequences.
//!
//! Convergence toward the degenerate fixed points `(±π/2, 0)` is declared
//! by a distance ball: once inside radius `convergence_eps` the orbit is
//! tracked to its closest approach and truncated there when it departs
//! (distance above `max(eps, 3·closest)`). The ball radius is a resolution
//! knob, not a precision knob (the reported terminal point is the closest
//! approach): a separatrix-shadowing orbit in double precision cannot come
//! closer to the fixed point than roughly `Δb^{1/m}`, which reaches a few
//! times `1e-2` by `m = 8`; the default radius admits that floor.

use crate::error::{Error, Result};
use crate::model::Params;
use crate::numerics::deriv1_scattered;
use crate::profile::{el_rhs, OrbitSample, ProfileState};
use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Right end of the integration range.
    pub x_max: f64,
    pub max_steps: usize,
    /// Absolute x-tolerance for located events.
    pub event_tol: f64,
    /// Radius of the convergence ball around `(±π/2, 0)`; `0` disables
    /// convergence detection entirely (probe mode).
    pub convergence_eps: f64,
    /// Upper bound on the step size (dense output for reconstruction).
    pub max_step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            x_max: 50.0,
            max_steps: 1_000_000,
            event_tol: 1e-12,
            convergence_eps: 2.5e-2,
            max_step: f64::INFINITY,
        }
    }
}

impl IntegratorConfig {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail the checks
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("event_tol", self.event_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !(self.x_max > 1.0) {
            return Err(Error::InvalidInput(format!(
                "x_max must exceed 1, got {}",
                self.x_max
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidInput("max_steps must be positive".into()));
        }
        if !(self.convergence_eps >= 0.0) || !(self.max_step > 0.0) {
            return Err(Error::InvalidInput(
                "convergence_eps must be ≥ 0 and max_step positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    ZeroOfH,
    ZeroOfDh,
    /// First crossing of `h = sign·π/2`.
    ExitGamma(i8),
    /// Closest approach to `(sign·π/2, 0)` inside the convergence ball.
    Converged(i8),
    /// Ran out of range, steps, or step size without a decision.
    Truncated,
}

#[derive(Debug, Clone, Copy)]
pub struct Event {
    pub x: f64,
    pub kind: EventKind,
}

/// Integrated orbit: accepted samples (x strictly increasing from 0) plus
/// the located events, the last of which is terminal.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub samples: Vec<OrbitSample>,
    pub events: Vec<Event>,
    /// Diagnostics for abnormal terminations (step underflow, degeneracy).
    pub diagnostics: Vec<String>,
}

impl Orbit {
    pub fn terminal(&self) -> Option<&Event> {
        self.events.last()
    }

    pub fn zero_count(&self) -> u32 {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::ZeroOfH)
            .count() as u32
    }

    pub fn last_sample(&self) -> &OrbitSample {
        self.samples
            .last()
            .expect("orbit has at least the initial sample")
    }

    /// Smallest sampled distance to either fixed point `(±π/2, 0)`.
    pub fn closest_approach(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| fixed_point_distance(&s.state).0)
            .fold(f64::INFINITY, f64::min)
    }
}

fn fixed_point_distance(state: &ProfileState) -> (f64, i8) {
    let dp = (state.h - FRAC_PI_2).hypot(state.dh);
    let dm = (state.h + FRAC_PI_2).hypot(state.dh);
    if dp <= dm {
        (dp, 1)
    } else {
        (dm, -1)
    }
}

// Dormand–Prince 5(4) tableau.
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B5: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
// b5 − b4, applied to all seven stages
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

type State = [f64; 2];

struct Stepper<'a> {
    params: &'a Params,
}

impl Stepper<'_> {
    fn rhs(&self, x: f64, y: &State) -> Result<State> {
        let (dh, ddh) = el_rhs(
            &ProfileState {
                x,
                h: y[0],
                dh: y[1],
            },
            self.params,
        )?;
        Ok([dh, ddh])
    }

    /// One 5(4) step from (x, y) of size h; returns the 5th-order solution,
    /// the error vector and the last stage (FSAL candidate).
    fn step(&self, x: f64, y: &State, h: f64, k1: &State) -> Result<(State, [f64; 2], State)> {
        let mut k = [[0.0; 2]; 7];
        k[0] = *k1;
        let stage = |coeffs: &[f64], k: &[[f64; 2]; 7]| -> State {
            let mut out = *y;
            for (j, &a) in coeffs.iter().enumerate() {
                out[0] += h * a * k[j][0];
                out[1] += h * a * k[j][1];
            }
            out
        };
        k[1] = self.rhs(x + C[0] * h, &stage(&A2, &k))?;
        k[2] = self.rhs(x + C[1] * h, &stage(&A3, &k))?;
        k[3] = self.rhs(x + C[2] * h, &stage(&A4, &k))?;
        k[4] = self.rhs(x + C[3] * h, &stage(&A5, &k))?;
        k[5] = self.rhs(x + C[4] * h, &stage(&A6, &k))?;
        let y5 = stage(&B5, &k);
        k[6] = self.rhs(x + h, &y5)?;
        let mut err = [0.0; 2];
        for j in 0..7 {
            err[0] += E[j] * k[j][0];
            err[1] += E[j] * k[j][1];
        }
        err[0] *= h;
        err[1] *= h;
        Ok((y5, err, k[6]))
    }
}

fn error_norm(err: &[f64; 2], y: &State, y_new: &State, cfg: &IntegratorConfig) -> f64 {
    let mut norm: f64 = 0.0;
    for i in 0..2 {
        let scale = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
        norm = norm.max((err[i] / scale).abs());
    }
    norm
}

/// Integrate a b- or d-orbit forward from `x = 0`.
pub fn integrate_orbit(
    initial: ProfileState,
    params: &Params,
    config: &IntegratorConfig,
) -> Result<Orbit> {
    config.validate()?;
    if initial.x != 0.0 {
        return Err(Error::InvalidInput(format!(
            "orbits start at x = 0, got {}",
            initial.x
        )));
    }
    if !(initial.h.is_finite() && initial.dh.is_finite()) {
        return Err(Error::InvalidInput("initial state must be finite".into()));
    }
    if initial.dh.abs() < 1e-14
        && (initial.h / FRAC_PI_2 - (initial.h / FRAC_PI_2).round()).abs() < 1e-14
    {
        return Err(Error::InvalidInput(
            "initial state is an equilibrium of the reduced equation".into(),
        ));
    }

    let stepper = Stepper { params };
    let mut orbit = Orbit {
        samples: Vec::new(),
        events: Vec::new(),
        diagnostics: Vec::new(),
    };
    let mut x = 0.0;
    let mut y: State = [initial.h, initial.dh];
    orbit
        .samples
        .push(OrbitSample::from_state(initial, params, None));

    let mut k1 = stepper.rhs(x, &y)?;
    let mut h = initial_step(&y, &k1, config).min(config.max_step);
    let mut err_prev: f64 = 1.0;
    let mut rejected = false;
    // ball tracking: (sign at minimum, min distance, sample index of min)
    let mut ball: Option<(i8, f64, usize)> = None;

    for _step in 0..config.max_steps {
        let clipped = x + h >= config.x_max;
        if clipped {
            h = config.x_max - x;
        }

        let (y_new, err, k_last) = match stepper.step(x, &y, h, &k1) {
            Ok(v) => v,
            Err(e) => {
                // the vector field degenerated inside the step; stop here
                orbit.diagnostics.push(e.to_string());
                return Ok(finish(orbit, ball, EventKind::Truncated, config));
            }
        };
        let err_norm = error_norm(&err, &y, &y_new, config);

        if err_norm <= 1.0 {
            // locate events inside the accepted step
            let located = locate_events(&stepper, x, &y, h, &y_new, &k1, config)?;
            let mut exit: Option<(f64, State, i8)> = None;
            for ev in &located {
                match ev.2 {
                    EventKind::ExitGamma(sign) => {
                        exit = Some((ev.0, ev.1, sign));
                        break;
                    }
                    kind => orbit.events.push(Event { x: ev.0, kind }),
                }
            }

            if let Some((x_e, y_e, sign)) = exit {
                if ball.is_some() {
                    // departing through the wall after shadowing the fixed
                    // point: classify by closest approach
                    return Ok(finish(orbit, ball, EventKind::Truncated, config));
                }
                let state = ProfileState {
                    x: x_e,
                    h: y_e[0],
                    dh: y_e[1],
                };
                let prev = orbit.samples.last().map(|s| s.theta);
                orbit
                    .samples
                    .push(OrbitSample::from_state(state, params, prev));
                orbit.events.push(Event {
                    x: x_e,
                    kind: EventKind::ExitGamma(sign),
                });
                return Ok(orbit);
            }

            x += h;
            y = y_new;
            k1 = k_last;
            let state = ProfileState {
                x,
                h: y[0],
                dh: y[1],
            };
            let prev = orbit.samples.last().map(|s| s.theta);
            orbit
                .samples
                .push(OrbitSample::from_state(state, params, prev));

            if config.convergence_eps > 0.0 {
                let (dist, sign) = fixed_point_distance(&state);
                match ball {
                    None => {
                        if dist < config.convergence_eps {
                            ball = Some((sign, dist, orbit.samples.len() - 1));
                        }
                    }
                    Some((_, min_dist, _)) => {
                        if dist < min_dist {
                            ball = Some((sign, dist, orbit.samples.len() - 1));
                        } else if dist > config.convergence_eps.max(3.0 * min_dist) {
                            return Ok(truncate_converged(orbit, ball.unwrap()));
                        }
                    }
                }
            }

            if clipped || x >= config.x_max {
                return Ok(finish(orbit, ball, EventKind::Truncated, config));
            }

            // PI controller (Hairer's dopri5 defaults)
            let fac = 0.9 * err_norm.max(1e-10).powf(-0.17) * err_prev.powf(0.04);
            let fac = fac.clamp(0.2, if rejected { 1.0 } else { 5.0 });
            err_prev = err_norm.max(1e-4);
            rejected = false;
            h = (h * fac).min(config.max_step);
        } else {
            rejected = true;
            h *= (0.9 * err_norm.powf(-0.2)).clamp(0.1, 0.9);
        }

        if h < 1e-14 {
            orbit
                .diagnostics
                .push(Error::StepSizeUnderflow { x, step: h }.to_string());
            return Ok(finish(orbit, ball, EventKind::Truncated, config));
        }
    }

    orbit.diagnostics.push(format!(
        "max_steps = {} reached at x = {x}",
        config.max_steps
    ));
    Ok(finish(orbit, ball, EventKind::Truncated, config))
}

/// Terminal bookkeeping: an active ball candidate wins over truncation.
fn finish(
    orbit: Orbit,
    ball: Option<(i8, f64, usize)>,
    fallback: EventKind,
    config: &IntegratorConfig,
) -> Orbit {
    if let Some(b) = ball {
        if b.1 < config.convergence_eps {
            return truncate_converged(orbit, b);
        }
    }
    let mut orbit = orbit;
    let x = orbit.last_sample().state.x;
    orbit.events.push(Event { x, kind: fallback });
    orbit
}

fn truncate_converged(mut orbit: Orbit, ball: (i8, f64, usize)) -> Orbit {
    let (sign, _, idx) = ball;
    orbit.samples.truncate(idx + 1);
    let x_c = orbit.samples[idx].state.x;
    orbit.events.retain(|e| e.x <= x_c);
    orbit.events.push(Event {
        x: x_c,
        kind: EventKind::Converged(sign),
    });
    orbit
}

/// Candidate events inside one accepted step, sorted by x.
#[allow(clippy::type_complexity)]
fn locate_events(
    stepper: &Stepper,
    x: f64,
    y: &State,
    h: f64,
    y_new: &State,
    k1: &State,
    config: &IntegratorConfig,
) -> Result<Vec<(f64, State, EventKind)>> {
    let monitors: [(fn(&State) -> f64, EventKind); 4] = [
        (|s: &State| s[0], EventKind::ZeroOfH),
        (|s: &State| s[1], EventKind::ZeroOfDh),
        (|s: &State| s[0] - FRAC_PI_2, EventKind::ExitGamma(1)),
        (|s: &State| s[0] + FRAC_PI_2, EventKind::ExitGamma(-1)),
    ];
    let mut found = Vec::new();
    for (g, kind) in monitors {
        let g0 = g(y);
        let g1 = g(y_new);
        let crossing = (g0 != 0.0 && g0 * g1 < 0.0) || (g1 == 0.0 && g0 != 0.0);
        if !crossing {
            continue;
        }
        // bisect on the sub-step length until the event x-window closes
        let mut lo = 0.0_f64;
        let mut hi = 1.0_f64;
        let mut y_hi = *y_new;
        let mut g_lo = g0;
        while (hi - lo) * h.abs() > config.event_tol {
            let mid = 0.5 * (lo + hi);
            let (y_mid, _, _) = stepper.step(x, y, mid * h, k1)?;
            let g_mid = g(&y_mid);
            if g_lo * g_mid <= 0.0 && g_mid != g_lo {
                hi = mid;
                y_hi = y_mid;
            } else {
                lo = mid;
                g_lo = g_mid;
            }
        }
        found.push((x + hi * h, y_hi, kind));
    }
    found.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(found)
}

/// Deterministic starting step from the scaled norms of state and slope.
fn initial_step(y: &State, f: &State, config: &IntegratorConfig) -> f64 {
    let sc0 = config.abs_tol + config.rel_tol * y[0].abs().max(1.0);
    let sc1 = config.abs_tol + config.rel_tol * y[1].abs().max(1.0);
    let d0 = (y[0] / sc0).hypot(y[1] / sc1);
    let d1 = (f[0] / sc0).hypot(f[1] / sc1);
    if d0 < 1e-10 || d1 < 1e-10 {
        1e-6
    } else {
        (0.01 * d0 / d1).clamp(1e-8, 0.1)
    }
}

/// Quality diagnostic: maximum discrepancy between a re-differentiation of
/// the sampled `h′` (sliding 7-point stencil on the accepted grid) and the
/// right-hand side of the equation.
pub fn energy_error_estimate(orbit: &Orbit, params: &Params) -> f64 {
    let n = orbit.samples.len();
    if n < 9 {
        return 0.0;
    }
    let xs: Vec<f64> = orbit.samples.iter().map(|s| s.state.x).collect();
    let dhs: Vec<f64> = orbit.samples.iter().map(|s| s.state.dh).collect();
    let Ok(ddh_est) = deriv1_scattered(&xs, &dhs) else {
        return 0.0;
    };
    let mut worst: f64 = 0.0;
    // skip the one-sided boundary windows
    for (s, est) in orbit.samples.iter().zip(&ddh_est).skip(3).take(n - 6) {
        if let Ok((_, ddh)) = el_rhs(&s.state, params) {
            worst = worst.max((est - ddh).abs());
        }
    }
    worst
}
