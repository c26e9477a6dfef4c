//! Shooting for boundary-value solutions: b-orbits and d-orbits, rotation
//! numbers, bisection for the shooting parameters `b_k`, and catalogue
//! assembly.
//!
//! The discriminator for bisection is the integer number of zeros of `h`
//! before the orbit leaves `Γ = {|h| < π/2}`: orbits just above `b_k` cross
//! zero `k−1` times and exit, orbits just below cross at least `k` times.
//! Crossing counts are robust to event tolerances, unlike the real-valued
//! rotation number at exit.

use crate::energy;
use crate::error::{Error, Result};
use crate::integrate::{integrate_orbit, EventKind, IntegratorConfig, Orbit};
use crate::model::{in_existence_window, Params};
use crate::profile::{to_r_profile, ProfileState, RProfile, Symmetry};
use std::f64::consts::FRAC_PI_2;

/// Scan floor for the geometric down-scan in `find_bk`.
const SCAN_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShootKind {
    /// `h(0) = 0`, `h′(0) = b` (odd orbit).
    BOrbit,
    /// `h(0) = d`, `h′(0) = 0` (even orbit).
    DOrbit,
}

#[derive(Debug, Clone, Copy)]
pub struct ShootSpec {
    pub kind: ShootKind,
    pub value: f64,
}

impl ShootSpec {
    pub fn b_orbit(b: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidInput(format!(
                "b must be positive and finite, got {b}"
            )));
        }
        Ok(Self {
            kind: ShootKind::BOrbit,
            value: b,
        })
    }

    pub fn d_orbit(d: f64) -> Result<Self> {
        if !(d.is_finite() && d > 0.0 && d < FRAC_PI_2) {
            return Err(Error::InvalidInput(format!(
                "d must lie in (0, π/2), got {d}"
            )));
        }
        Ok(Self {
            kind: ShootKind::DOrbit,
            value: d,
        })
    }

    pub fn initial_state(&self) -> ProfileState {
        match self.kind {
            ShootKind::BOrbit => ProfileState {
                x: 0.0,
                h: 0.0,
                dh: self.value,
            },
            ShootKind::DOrbit => ProfileState {
                x: 0.0,
                h: self.value,
                dh: 0.0,
            },
        }
    }

    pub fn symmetry(&self) -> Symmetry {
        match self.kind {
            ShootKind::BOrbit => Symmetry::Odd,
            ShootKind::DOrbit => Symmetry::Even,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    ExitPlus,
    ExitMinus,
    ConvergedPlus,
    ConvergedMinus,
    Undecided,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::ExitPlus => "ExitPlus",
            Classification::ExitMinus => "ExitMinus",
            Classification::ConvergedPlus => "ConvergedPlus",
            Classification::ConvergedMinus => "ConvergedMinus",
            Classification::Undecided => "Undecided",
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(
            self,
            Classification::ConvergedPlus | Classification::ConvergedMinus
        )
    }
}

/// Terminal summary of an integrated orbit.
#[derive(Debug, Clone, Copy)]
pub struct OrbitOutcome {
    pub classification: Classification,
    /// Exit / termination coordinate.
    pub x_e: f64,
    /// Rotation number `Ω = −(θ(x_e) − θ(0))/π`.
    pub omega: f64,
    /// Zeros of `h` on `(0, x_e)`.
    pub zero_count: u32,
}

fn outcome_of(orbit: &Orbit) -> OrbitOutcome {
    let classification = match orbit.terminal().map(|e| e.kind) {
        Some(EventKind::ExitGamma(1)) => Classification::ExitPlus,
        Some(EventKind::ExitGamma(_)) => Classification::ExitMinus,
        Some(EventKind::Converged(1)) => Classification::ConvergedPlus,
        Some(EventKind::Converged(_)) => Classification::ConvergedMinus,
        _ => Classification::Undecided,
    };
    let theta0 = orbit.samples.first().map(|s| s.theta).unwrap_or(0.0);
    let theta_e = orbit.last_sample().theta;
    OrbitOutcome {
        classification,
        x_e: orbit.last_sample().state.x,
        omega: -(theta_e - theta0) / std::f64::consts::PI,
        zero_count: orbit.zero_count(),
    }
}

/// Integrate one orbit and classify its terminal behavior.
pub fn run_orbit(
    spec: &ShootSpec,
    params: &Params,
    config: &IntegratorConfig,
) -> Result<(Orbit, OrbitOutcome)> {
    let orbit = integrate_orbit(spec.initial_state(), params, config)?;
    let outcome = outcome_of(&orbit);
    Ok((orbit, outcome))
}

/// Smallest closed-form `b` with `W(0) > 0`, which forces a monotone exit
/// through `h = π/2` with `Ω < 1/2`: `√((m−1)/(p−1))·(1 + 1e−6)`.
pub fn upper_bracket(params: &Params) -> f64 {
    ((params.mf() - 1.0) / (params.p() - 1.0)).sqrt() * (1.0 + 1e-6)
}

/// A located shooting parameter with its reconstructed solution.
#[derive(Debug, Clone)]
pub struct ShootResult {
    pub params: Params,
    /// Solution index (`Ω(b_k) = k − 1/2`).
    pub k: u32,
    pub b_k: f64,
    pub bracket_width: f64,
    pub orbit: Orbit,
    pub outcome: OrbitOutcome,
    pub solution: RProfile,
    /// p-energy of the reconstructed solution (x-chart quadrature).
    pub energy: f64,
    pub warnings: Vec<String>,
}

fn probe_config(config: &IntegratorConfig) -> IntegratorConfig {
    IntegratorConfig {
        convergence_eps: 0.0,
        max_step: f64::INFINITY,
        ..*config
    }
}

fn probe_count(b: f64, params: &Params, cfg: &IntegratorConfig) -> Result<u32> {
    let orbit = integrate_orbit(
        ProfileState {
            x: 0.0,
            h: 0.0,
            dh: b,
        },
        params,
        cfg,
    )?;
    Ok(orbit.zero_count())
}

/// Locate `b_k`: the boundary between orbits with `k−1` zeros of `h` and
/// orbits with at least `k`, then rerun the bracket midpoint with tightened
/// tolerances and dense output for reconstruction.
pub fn find_bk(
    params: &Params,
    k: u32,
    b_tol: f64,
    config: &IntegratorConfig,
) -> Result<ShootResult> {
    if k < 1 {
        return Err(Error::InvalidInput("k must be >= 1".into()));
    }
    if !(b_tol.is_finite() && b_tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "b_tol must be positive, got {b_tol}"
        )));
    }
    let mut warnings = Vec::new();
    if !in_existence_window(params) {
        warnings.push(format!(
            "(p, m) = ({}, {}) lies outside the existence window p < m < 2 + p + 2√p; attempting anyway",
            params.p(),
            params.m()
        ));
    }

    // the bisection pins b to the separatrix of one specific discrete flow,
    // so the probes must run under exactly the configuration of the final
    // reconstruction pass (tolerances and step cap included); otherwise the
    // two flows' separatrices differ by the integrator bias and the final
    // orbit departs early
    let final_base = IntegratorConfig {
        rel_tol: (config.rel_tol / 100.0).max(1e-13),
        abs_tol: (config.abs_tol / 100.0).max(1e-15),
        max_step: config.max_step.min(0.02),
        ..*config
    };
    let probe_cfg = probe_config(&final_base);
    let mut b_hi = upper_bracket(params);
    // the closed-form upper end should have no zeros at all; widen upward
    // defensively if roundoff says otherwise
    let mut tries = 0;
    while probe_count(b_hi, params, &probe_cfg)? >= k {
        b_hi *= 2.0;
        tries += 1;
        if tries > 4 {
            return Err(Error::InvalidInput(
                "no zero-free orbit found above the closed-form bracket".into(),
            ));
        }
    }

    // geometric down-scan for the lower end
    let mut b_lo = b_hi;
    loop {
        b_lo /= 2.0;
        if b_lo < SCAN_FLOOR {
            return Err(Error::BracketNotFound {
                k,
                floor: SCAN_FLOOR,
            });
        }
        if probe_count(b_lo, params, &probe_cfg)? >= k {
            break;
        }
        b_hi = b_lo;
    }

    // bisection on the crossing count; a shadowing orbit can approach the
    // fixed point no closer than roughly Δb^{1/m}, so when the midpoint
    // fails to enter the convergence ball the bracket is tightened further,
    // down to the floating-point floor
    let ulp_floor = 8.0 * b_hi.abs() * f64::EPSILON;
    let mut width_goal = b_tol.max(ulp_floor);

    let (b_k, orbit, outcome) = 'ladder: loop {
        while b_hi - b_lo > width_goal {
            let mid = 0.5 * (b_lo + b_hi);
            if mid <= b_lo || mid >= b_hi {
                break;
            }
            if probe_count(mid, params, &probe_cfg)? >= k {
                b_lo = mid;
            } else {
                b_hi = mid;
            }
        }
        let b_k = 0.5 * (b_lo + b_hi);

        // final run: tightened tolerances, dense output, convergence ball on
        let spec = ShootSpec::b_orbit(b_k)?;
        let mut final_cfg = final_base;
        let mut closest = f64::INFINITY;
        for _attempt in 0..=4 {
            let (orbit, outcome) = run_orbit(&spec, params, &final_cfg)?;
            if outcome.classification.is_converged() {
                break 'ladder (b_k, orbit, outcome);
            }
            closest = orbit.closest_approach();
            if outcome.classification != Classification::Undecided {
                break;
            }
            // connecting orbits only converge asymptotically; widen the range
            final_cfg.x_max *= 2.0;
        }
        if width_goal <= ulp_floor {
            return Err(Error::NonConvergent {
                k,
                b_lo,
                b_hi,
                closest,
            });
        }
        width_goal = (width_goal / 1000.0).max(ulp_floor);
    };
    let bracket_width = b_hi - b_lo;

    if outcome.zero_count != k - 1 {
        warnings.push(format!(
            "midpoint orbit has {} zeros, expected {} — bracket may straddle a different transition",
            outcome.zero_count,
            k - 1
        ));
    }
    let expected_omega = k as f64 - 0.5;
    if (outcome.omega - expected_omega).abs() > 1e-3 {
        warnings.push(format!(
            "rotation number {:.6} differs from {} by more than 1e-3 (ball radius {:.1e} limits the terminal phase)",
            outcome.omega,
            expected_omega,
            final_base.convergence_eps
        ));
    }

    let solution = to_r_profile(&orbit.samples, Symmetry::Odd)?;
    let (energy, _) = energy::energy_x(&orbit.samples, params)?;

    Ok(ShootResult {
        params: *params,
        k,
        b_k,
        bracket_width,
        orbit,
        outcome,
        solution,
        energy,
        warnings,
    })
}

/// `find_bk` for `k = 1..=k_max`; failed entries carry their error.
pub fn solve_catalogue(
    params: &Params,
    k_max: u32,
    b_tol: f64,
    config: &IntegratorConfig,
) -> Vec<(u32, Result<ShootResult>)> {
    (1..=k_max)
        .map(|k| (k, find_bk(params, k, b_tol, config)))
        .collect()
}

/// Zero counts of `n` probe orbits with `b` equally spaced in
/// `(0, upper_bracket]`; the raw material for transition scans.
pub fn scan_zero_counts(
    params: &Params,
    n: usize,
    config: &IntegratorConfig,
) -> Result<Vec<(f64, u32)>> {
    let probe_cfg = probe_config(config);
    let upper = upper_bracket(params);
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let b = upper * i as f64 / n as f64;
        out.push((b, probe_count(b, params, &probe_cfg)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::IntegratorConfig;
    use crate::model::Params;
    use crate::profile::identity_profile;

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    #[test]
    fn identity_b_orbit_outcome() {
        let params = Params::new(3.0, 5).unwrap();
        let (_, outcome) = run_orbit(&ShootSpec::b_orbit(1.0).unwrap(), &params, &cfg()).unwrap();
        assert_eq!(outcome.classification, Classification::ConvergedPlus);
        assert!(
            (outcome.omega - 0.5).abs() < 2e-2,
            "omega = {}",
            outcome.omega
        );
        assert_eq!(outcome.zero_count, 0);
    }

    #[test]
    fn supercritical_orbit_exits_plus() {
        let params = Params::new(2.0, 3).unwrap();
        let (_, outcome) = run_orbit(&ShootSpec::b_orbit(3.0).unwrap(), &params, &cfg()).unwrap();
        assert_eq!(outcome.classification, Classification::ExitPlus);
        assert_eq!(outcome.zero_count, 0);
        assert!(outcome.omega < 0.5);
    }

    #[test]
    fn small_b_has_large_rotation_number() {
        let params = Params::new(2.0, 3).unwrap();
        let (_, outcome) = run_orbit(&ShootSpec::b_orbit(1e-5).unwrap(), &params, &cfg()).unwrap();
        assert!(outcome.omega > 2.0, "omega = {}", outcome.omega);
    }

    #[test]
    fn upper_bracket_values() {
        let b = upper_bracket(&Params::new(2.0, 3).unwrap());
        assert!((b - 2.0_f64.sqrt() * (1.0 + 1e-6)).abs() < 1e-14);
        let b = upper_bracket(&Params::new(3.0, 5).unwrap());
        assert!((b - 2.0_f64.sqrt() * (1.0 + 1e-6)).abs() < 1e-14);
        let b = upper_bracket(&Params::new(5.0, 5).unwrap());
        assert!((b - (1.0 + 1e-6)).abs() < 1e-14);
    }

    #[test]
    fn find_b1_recovers_the_identity() {
        for (p, m) in [(3.0, 5u32), (2.0, 3u32)] {
            let params = Params::new(p, m).unwrap();
            let result = find_bk(&params, 1, 1e-8, &cfg()).unwrap();
            assert!(
                (result.b_k - 1.0).abs() < 1e-6,
                "p={p} m={m}: b1 = {}",
                result.b_k
            );
            assert!(result.bracket_width <= 1e-8);
            assert!(result.outcome.classification.is_converged());
            // the reconstructed solution is r(t) = t, to within the
            // convergence-ball resolution of the default configuration
            for s in &result.solution.samples {
                assert!((s.r - s.t).abs() < 2e-2, "r({}) = {}", s.t, s.r);
            }
            assert_eq!(result.solution.k_end, 1);
        }
    }

    #[test]
    fn second_solution_exists_below_b1() {
        let params = Params::new(2.0, 3).unwrap();
        let result = find_bk(&params, 2, 1e-8, &cfg()).unwrap();
        assert!(result.b_k > 0.0 && result.b_k < 1.0, "b2 = {}", result.b_k);
        assert_eq!(result.outcome.zero_count, 1);
        assert!(
            (result.outcome.omega - 1.5).abs() < 1e-2,
            "omega = {}",
            result.outcome.omega
        );
        assert_eq!(
            result.outcome.classification,
            Classification::ConvergedMinus
        );
        assert_eq!(result.solution.k_end, 0);
    }

    #[test]
    fn catalogue_is_strictly_decreasing() {
        let params = Params::new(3.0, 5).unwrap();
        let results = solve_catalogue(&params, 3, 1e-8, &cfg());
        let mut prev = f64::INFINITY;
        for (k, r) in results {
            let r = r.unwrap_or_else(|e| panic!("k={k}: {e}"));
            assert!(r.b_k < prev, "b_{k} = {} not below {prev}", r.b_k);
            assert!(r.b_k > 0.0);
            prev = r.b_k;
        }
    }

    #[test]
    fn nonexistence_regime_has_no_second_bracket() {
        let params = Params::new(2.0, 7).unwrap();
        match find_bk(&params, 2, 1e-6, &cfg()) {
            Err(Error::BracketNotFound { k: 2, .. }) => {}
            other => panic!("expected BracketNotFound, got {other:?}"),
        }
    }

    #[test]
    fn lyapunov_exit_certificate() {
        // W(x0) > 0 somewhere implies no h' zeros after x0 (m > p)
        let params = Params::new(2.0, 3).unwrap();
        for b in [0.3, 0.8, 1.2, 2.5] {
            let (orbit, _) = run_orbit(&ShootSpec::b_orbit(b).unwrap(), &params, &cfg()).unwrap();
            let mut x0: Option<f64> = None;
            for s in &orbit.samples {
                if s.w_val > 1e-8 {
                    x0 = Some(s.state.x);
                    break;
                }
            }
            if let Some(x0) = x0 {
                for e in &orbit.events {
                    if e.kind == EventKind::ZeroOfDh {
                        assert!(e.x <= x0, "b={b}: h' zero at {} after W > 0 at {x0}", e.x);
                    }
                }
            }
        }
    }

    #[test]
    fn no_positive_minima_inside_gamma() {
        // at every h' zero with |h| < π/2 − 1e-6, sign(h'') = −sign(h)
        let params = Params::new(3.0, 5).unwrap();
        for b in [0.2, 0.5, 0.9] {
            let (orbit, _) = run_orbit(&ShootSpec::b_orbit(b).unwrap(), &params, &cfg()).unwrap();
            for e in &orbit.events {
                if e.kind != EventKind::ZeroOfDh {
                    continue;
                }
                // nearest sample to the event gives h there
                let s = orbit
                    .samples
                    .iter()
                    .min_by(|a, b| {
                        (a.state.x - e.x)
                            .abs()
                            .partial_cmp(&(b.state.x - e.x).abs())
                            .unwrap()
                    })
                    .unwrap();
                if s.state.h.abs() >= FRAC_PI_2 - 1e-6 {
                    continue;
                }
                let state = ProfileState {
                    x: e.x,
                    h: s.state.h,
                    dh: 0.0,
                };
                let (_, ddh) = crate::profile::el_rhs(&state, &params).unwrap();
                assert!(
                    ddh * s.state.h < 0.0,
                    "b={b}: h''={ddh} h={} at x={}",
                    s.state.h,
                    e.x
                );
            }
        }
    }

    #[test]
    fn omega_and_zero_count_are_consistent() {
        let params = Params::new(2.0, 3).unwrap();
        for b in [0.05, 0.2, 0.7, 1.4, 2.2] {
            let (orbit, outcome) =
                run_orbit(&ShootSpec::b_orbit(b).unwrap(), &params, &cfg()).unwrap();
            // omega is recomputable from the stored phase samples
            let theta0 = orbit.samples[0].theta;
            let theta_e = orbit.last_sample().theta;
            let recomputed = -(theta_e - theta0) / std::f64::consts::PI;
            assert!((recomputed - outcome.omega).abs() < 1e-9);
            if matches!(
                outcome.classification,
                Classification::ExitPlus | Classification::ConvergedPlus
            ) {
                let zc = outcome.zero_count as f64;
                assert!(
                    outcome.omega > zc - 0.5 && outcome.omega <= zc + 0.5,
                    "b={b}: omega {} vs zero count {zc}",
                    outcome.omega
                );
            }
        }
    }

    #[test]
    fn d_orbit_phase_starts_at_zero() {
        let params = Params::new(2.0, 3).unwrap();
        let (orbit, outcome) =
            run_orbit(&ShootSpec::d_orbit(0.4).unwrap(), &params, &cfg()).unwrap();
        assert_eq!(orbit.samples[0].theta, 0.0);
        assert!(outcome.x_e > 0.0);
    }

    #[test]
    fn reflected_d_orbits_mirror_each_other() {
        // h -> −h equivariance: the orbit from (−d, 0) is the negative of
        // the orbit from (d, 0)
        let params = Params::new(3.0, 5).unwrap();
        let c = IntegratorConfig {
            convergence_eps: 0.0,
            x_max: 6.0,
            ..cfg()
        };
        let a = integrate_orbit(
            ProfileState {
                x: 0.0,
                h: 0.4,
                dh: 0.0,
            },
            &params,
            &c,
        )
        .unwrap();
        let b = integrate_orbit(
            ProfileState {
                x: 0.0,
                h: -0.4,
                dh: 0.0,
            },
            &params,
            &c,
        )
        .unwrap();
        for (sa, sb) in a.samples.iter().zip(&b.samples) {
            assert!((sa.state.x - sb.state.x).abs() < 1e-12);
            assert!((sa.state.h + sb.state.h).abs() < 1e-8, "x = {}", sa.state.x);
            assert!((sa.state.dh + sb.state.dh).abs() < 1e-8);
        }
    }

    #[test]
    fn scan_locates_the_single_transition_at_2_3() {
        // dense scan over (0, upper]: for k=2 at (2,3) there is exactly one
        // 1 -> 2 transition below b1
        let params = Params::new(2.0, 3).unwrap();
        let scan = scan_zero_counts(&params, 400, &cfg()).unwrap();
        let b2 = find_bk(&params, 2, 1e-8, &cfg()).unwrap().b_k;
        let mut transitions = Vec::new();
        for w in scan.windows(2) {
            let lo_count = w[1].1;
            let hi_count = w[0].1;
            if lo_count != hi_count
                && (1..=2).contains(&hi_count.min(lo_count))
                && lo_count.max(hi_count) >= 2
            {
                transitions.push((w[0].0, w[1].0));
            }
        }
        let hits: Vec<_> = transitions
            .iter()
            .filter(|(a, b)| (*a..=*b).contains(&b2) || (*b..=*a).contains(&b2))
            .collect();
        assert_eq!(hits.len(), 1, "transitions {transitions:?}, b2 = {b2}");
    }

    #[test]
    fn identity_solution_profile_is_accurate_at_tight_settings() {
        let params = Params::new(2.0, 3).unwrap();
        let tight = IntegratorConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            ..cfg()
        };
        let result = find_bk(&params, 1, 1e-13, &tight).unwrap();
        assert!((result.b_k - 1.0).abs() < 1e-9, "b1 = {:.17e}", result.b_k);
        // profile tracks the closed form well into the shadowing range
        for s in &result.orbit.samples {
            if s.state.x > 8.0 {
                break;
            }
            let id = identity_profile(s.state.x);
            assert!(
                (s.state.h - id.h).abs() < 1e-6,
                "x = {}: h deviates by {:.2e}",
                s.state.x,
                (s.state.h - id.h).abs()
            );
        }
    }
}
