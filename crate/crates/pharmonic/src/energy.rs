//! p-energy quadrature in both charts and the second-variation quadratic
//! form.
//!
//! The x-chart energy is `E_p = (1/p)∫ A^{p/2}·cosh^{p−m}x dx` over the
//! whole line; the t-chart form is
//! `E_p = (1/p)∫₀^π (ṙ² + (m−1)sin²r/sin²t)^{p/2} sin^{m−1}t dt`.
//! Sampled profiles are reconstructed by cubic Hermite interpolation
//! (derivative data travels with the samples) and integrated by composite
//! Gauss–Legendre on the sample partition; the 7/5-point difference plus a
//! half-resolution Richardson pass provide the error estimate.

use crate::error::{Error, Result};
use crate::model::Params;
use crate::numerics::{
    deriv1_uniform, deriv2_uniform, gamma_half, gl_panel, CubicHermite, GL5, GL7,
};
use crate::profile::{el_rhs, OrbitSample, ProfileState, RProfile, RSample};
use std::f64::consts::PI;

/// Energy of one profile evaluated in both charts.
#[derive(Debug, Clone, Copy)]
pub struct EnergyReport {
    pub value_x_chart: f64,
    pub value_t_chart: f64,
    pub quadrature_error: f64,
}

/// Closed-form identity-map energy `(1/p)·m^{p/2}·√π·Γ(m/2)/Γ((m+1)/2)`.
pub fn identity_energy_closed(params: &Params) -> f64 {
    let m = params.m();
    let p = params.p();
    (1.0 / p) * params.mf().powf(p / 2.0) * PI.sqrt() * gamma_half(m) / gamma_half(m + 1)
}

fn integrand_x(h: f64, dh: f64, x: f64, params: &Params) -> f64 {
    let c = h.cos();
    let a = dh * dh + (params.mf() - 1.0) * c * c;
    a.powf(params.p() / 2.0) * x.cosh().powf(params.p() - params.mf())
}

/// x-chart energy of a half-line orbit (x ≥ 0) extended by its reflection
/// symmetry; the integrand is even either way, so the value is twice the
/// half-line integral. Returns `(value, error_estimate)`.
pub fn energy_x(samples: &[OrbitSample], params: &Params) -> Result<(f64, f64)> {
    if samples.len() < 3 {
        return Err(Error::InvalidInput(
            "energy quadrature needs at least 3 samples".into(),
        ));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.state.x).collect();
    let hs: Vec<f64> = samples.iter().map(|s| s.state.h).collect();
    let dhs: Vec<f64> = samples.iter().map(|s| s.state.dh).collect();
    // second derivatives from the equation itself; at a degenerate sample
    // the integrand vanishes, so a zero slope is harmless there
    let ddhs: Vec<f64> = samples
        .iter()
        .map(|s| el_rhs(&s.state, params).map(|(_, ddh)| ddh).unwrap_or(0.0))
        .collect();

    let quad = |stride: usize| -> Result<(f64, f64)> {
        let mut sxs: Vec<f64> = xs.iter().step_by(stride).copied().collect();
        let mut shs: Vec<f64> = hs.iter().step_by(stride).copied().collect();
        let mut sdhs: Vec<f64> = dhs.iter().step_by(stride).copied().collect();
        let mut sddhs: Vec<f64> = ddhs.iter().step_by(stride).copied().collect();
        if sxs.last() != xs.last() {
            sxs.push(*xs.last().unwrap());
            shs.push(*hs.last().unwrap());
            sdhs.push(*dhs.last().unwrap());
            sddhs.push(*ddhs.last().unwrap());
        }
        let h_interp = CubicHermite::new(&sxs, &shs, &sdhs)?;
        let dh_interp = CubicHermite::new(&sxs, &sdhs, &sddhs)?;
        let mut f = |x: f64| integrand_x(h_interp.value(x), dh_interp.value(x), x, params);
        let mut value = 0.0;
        let mut err = 0.0;
        for w in sxs.windows(2) {
            let v7 = gl_panel(&mut f, w[0], w[1], &GL7);
            let v5 = gl_panel(&mut f, w[0], w[1], &GL5);
            value += v7;
            err += (v7 - v5).abs();
        }
        Ok((value, err))
    };

    let (full, err_gl) = quad(1)?;
    let (half, _) = quad(2)?;
    let err_interp = (full - half).abs() / 15.0;

    // tail beyond the last sample: for a decayed profile the integrand
    // falls off like e^{−m(x−x_end)}
    let last = samples.last().unwrap();
    let f_end = integrand_x(last.state.h, last.state.dh, last.state.x, params);
    let tail = f_end / params.mf();
    let p = params.p();
    let value = 2.0 * full / p;
    if f_end > (1e-10f64).max(1e-9 * value.abs()) {
        return Err(Error::TailNotConverged(format!(
            "integrand {f_end:.3e} at the right end x = {}; profile must decay (m > p and terminal state near a fixed point)",
            last.state.x
        )));
    }
    let err = 2.0 * (err_gl + err_interp + tail) / p;
    Ok((value, err))
}

fn integrand_t(r: f64, dr: f64, t: f64, params: &Params) -> f64 {
    let q = r.sin() / t.sin();
    let core = dr * dr + (params.mf() - 1.0) * q * q;
    core.powf(params.p() / 2.0) * t.sin().powf(params.mf() - 1.0)
}

/// t-chart energy of a reconstructed profile. The integrand has poles at
/// `t ∈ {0, π}` unless `r` lands on a multiple of π there; Gauss–Legendre
/// nodes never touch panel endpoints, and the sub-node pole mass scales
/// like `t^m`, which is accounted for in the error estimate.
pub fn energy_t(profile: &RProfile, params: &Params) -> Result<(f64, f64)> {
    let s = &profile.samples;
    if s.len() < 3 {
        return Err(Error::InvalidInput(
            "energy quadrature needs at least 3 samples".into(),
        ));
    }
    // pole regularity: where the profile reaches the poles, r must sit on a
    // multiple of π
    let tol = 1e-6;
    for end in [&s[0], &s[s.len() - 1]] {
        let at_pole = end.t < 0.05 || end.t > PI - 0.05;
        let regular = (end.r / PI - (end.r / PI).round()).abs() * PI <= tol;
        if at_pole && !regular {
            return Err(Error::PoleSingularity { r0: end.r, tol });
        }
    }

    let ts: Vec<f64> = s.iter().map(|v| v.t).collect();
    let rs: Vec<f64> = s.iter().map(|v| v.r).collect();
    let drs: Vec<f64> = s.iter().map(|v| v.dr).collect();

    let quad = |stride: usize| -> Result<(f64, f64)> {
        let mut sts: Vec<f64> = ts.iter().step_by(stride).copied().collect();
        let mut srs: Vec<f64> = rs.iter().step_by(stride).copied().collect();
        let mut sdrs: Vec<f64> = drs.iter().step_by(stride).copied().collect();
        if sts.last() != ts.last() {
            sts.push(*ts.last().unwrap());
            srs.push(*rs.last().unwrap());
            sdrs.push(*drs.last().unwrap());
        }
        let r_interp = CubicHermite::new(&sts, &srs, &sdrs)?;
        let mut f = |t: f64| integrand_t(r_interp.value(t), r_interp.slope(t), t, params);
        let mut value = 0.0;
        let mut err = 0.0;
        for w in sts.windows(2) {
            let v7 = gl_panel(&mut f, w[0], w[1], &GL7);
            let v5 = gl_panel(&mut f, w[0], w[1], &GL5);
            value += v7;
            err += (v7 - v5).abs();
        }
        Ok((value, err))
    };

    let (full, err_gl) = quad(1)?;
    let (half, _) = quad(2)?;
    let err_interp = (full - half).abs() / 15.0;

    // pole mass not covered by the sample range: integrand ~ C·t^{m−1}
    let m = params.mf();
    let p = params.p();
    let pole = |end: &RSample, gap: f64| -> f64 {
        let c = (m * end.dr * end.dr).powf(p / 2.0);
        c * gap.max(0.0).powf(m) / m
    };
    let tail = pole(&s[0], s[0].t) + pole(&s[s.len() - 1], PI - s[s.len() - 1].t);

    Ok((full / p, (err_gl + err_interp + tail) / p))
}

/// Both charts on one profile, with the combined error estimate.
pub fn energy_report(
    samples: &[OrbitSample],
    profile: &RProfile,
    params: &Params,
) -> Result<EnergyReport> {
    let (vx, ex) = energy_x(samples, params)?;
    let (vt, et) = energy_t(profile, params)?;
    Ok(EnergyReport {
        value_x_chart: vx,
        value_t_chart: vt,
        quadrature_error: ex.max(et),
    })
}

/// A critical-point profile sampled on a uniform grid, as required by the
/// fixed-stencil derivative model of the second variation.
#[derive(Debug, Clone)]
pub struct SampledProfile {
    pub x0: f64,
    pub dx: f64,
    pub h: Vec<f64>,
    pub dh: Vec<f64>,
}

impl SampledProfile {
    pub fn from_fn(x0: f64, dx: f64, n: usize, f: impl Fn(f64) -> ProfileState) -> Self {
        let mut h = Vec::with_capacity(n);
        let mut dh = Vec::with_capacity(n);
        for i in 0..n {
            let s = f(x0 + dx * i as f64);
            h.push(s.h);
            dh.push(s.dh);
        }
        Self { x0, dx, h, dh }
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + self.dx * i as f64
    }

    /// Max interior discrepancy between the stencil derivative of `h′` and
    /// the right-hand side of the equation. Samples with `A < 1e-12` sit at
    /// a fixed point where the equation degenerates and are skipped.
    pub fn criticality_residual(&self, params: &Params) -> Result<f64> {
        let ddh_est = deriv1_uniform(&self.dh, self.dx)?;
        let mut worst: f64 = 0.0;
        for (i, est) in ddh_est.iter().enumerate().take(self.len() - 2).skip(2) {
            let state = ProfileState {
                x: self.x(i),
                h: self.h[i],
                dh: self.dh[i],
            };
            if crate::profile::a_value(&state, params) < 1e-12 {
                continue;
            }
            let (_, ddh) = el_rhs(&state, params)?;
            worst = worst.max((est - ddh).abs());
        }
        Ok(worst)
    }
}

/// Second variation of the energy at the profile in direction `ξ`:
///
/// ```text
/// Q(ξ) = −∫ ξ·A^{p/2−1}·[ ξ″ + (p−m)·tanh x·ξ′ + (m−1)·cos 2h·ξ
///        + ((p−2)/2)·ξ′·(log A)′
///        + (p−2)·h′·d/dx( (h′ξ′ − ((m−1)/2)·sin 2h·ξ) / A ) ]·cosh^{p−m}x dx
/// ```
///
/// evaluated exactly as displayed (no integration by parts); all derivatives
/// of sampled data use the fixed 4th-order stencil.
pub fn second_variation(profile: &SampledProfile, xi: &[f64], params: &Params) -> Result<f64> {
    let n = profile.len();
    if xi.len() != n {
        return Err(Error::InvalidInput(format!(
            "direction has {} samples, profile {}",
            xi.len(),
            n
        )));
    }
    if n < 9 {
        return Err(Error::GridTooCoarse(
            "second variation needs at least 9 samples".into(),
        ));
    }
    if xi[0].abs() >= 1e-8 || xi[n - 1].abs() >= 1e-8 {
        return Err(Error::InvalidInput(
            "direction must decay below 1e-8 at the domain ends".into(),
        ));
    }
    let residual = profile.criticality_residual(params)?;
    if residual > 1e-4 {
        return Err(Error::NonCriticalProfile {
            residual,
            max: 1e-4,
        });
    }

    let p = params.p();
    let m = params.mf();
    let dx = profile.dx;
    let xi_p = deriv1_uniform(xi, dx)?;
    let xi_pp = deriv2_uniform(xi, dx)?;
    let a: Vec<f64> = (0..n)
        .map(|i| {
            let c = profile.h[i].cos();
            profile.dh[i] * profile.dh[i] + (m - 1.0) * c * c
        })
        .collect();
    if a.iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidInput(
            "profile touches a degenerate point; A must stay positive".into(),
        ));
    }
    let log_a: Vec<f64> = a.iter().map(|v| v.ln()).collect();
    let dlog_a = deriv1_uniform(&log_a, dx)?;
    let g: Vec<f64> = (0..n)
        .map(|i| {
            (profile.dh[i] * xi_p[i] - 0.5 * (m - 1.0) * (2.0 * profile.h[i]).sin() * xi[i]) / a[i]
        })
        .collect();
    let dg = deriv1_uniform(&g, dx)?;

    let w: Vec<f64> = (0..n)
        .map(|i| {
            let x = profile.x(i);
            let bracket = xi_pp[i]
                + (p - m) * x.tanh() * xi_p[i]
                + (m - 1.0) * (2.0 * profile.h[i]).cos() * xi[i]
                + 0.5 * (p - 2.0) * xi_p[i] * dlog_a[i]
                + (p - 2.0) * profile.dh[i] * dg[i];
            xi[i] * a[i].powf(p / 2.0 - 1.0) * bracket * x.cosh().powf(p - m)
        })
        .collect();

    // exact integral of the piecewise-cubic reconstruction: trapezoid plus
    // the telescoped endpoint-derivative correction
    let dw = deriv1_uniform(&w, dx)?;
    let trapz: f64 = w.iter().sum::<f64>() - 0.5 * (w[0] + w[n - 1]);
    let q = trapz * dx + dx * dx / 12.0 * (dw[0] - dw[n - 1]);
    Ok(-q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Params;
    use crate::numerics::{quad_uniform, UniformGrid};
    use crate::profile::{identity_profile, sample_closed_form, to_r_profile, RSample, Symmetry};
    use crate::spectrum::{eigenfunction, eigenvalue_chain};
    use std::f64::consts::FRAC_PI_2;

    fn identity_samples(params: &Params) -> Vec<crate::profile::OrbitSample> {
        let xs: Vec<f64> = (0..=3500).map(|i| 0.01 * i as f64).collect();
        sample_closed_form(identity_profile, &xs, params)
    }

    #[test]
    fn closed_form_energy_values() {
        let e = identity_energy_closed(&Params::new(2.0, 3).unwrap());
        assert!((e - 3.0 * PI / 4.0).abs() < 1e-14, "E(2,3) = {e}");
        // m = 2, p = 2: (1/2)·2·∫ sin t dt = 2, and the closed form agrees
        let e22 = identity_energy_closed(&Params::new(2.0, 2).unwrap());
        assert!((e22 - 2.0).abs() < 1e-14, "E(2,2) = {e22}");
        let (q, _) = quad_uniform(
            |x: f64| {
                let s = identity_profile(x);
                integrand_x(s.h, s.dh, x, &Params::new(2.0, 2).unwrap())
            },
            -40.0,
            40.0,
            400,
        );
        assert!((q / 2.0 - e22).abs() < 1e-10, "quadrature {q}");
    }

    #[test]
    fn closed_form_matches_direct_quadrature_on_grid() {
        for (p, m) in [
            (2.0, 3u32),
            (2.0, 6),
            (3.0, 5),
            (4.0, 5),
            (4.0, 8),
            (2.5, 4),
        ] {
            let params = Params::new(p, m).unwrap();
            let closed = identity_energy_closed(&params);
            let (q, _) = quad_uniform(
                |x: f64| {
                    let s = identity_profile(x);
                    integrand_x(s.h, s.dh, x, &params)
                },
                -40.0,
                40.0,
                400,
            );
            assert!(
                (q / p - closed).abs() < 1e-9 * closed,
                "p={p} m={m}: {} vs {closed}",
                q / p
            );
        }
    }

    #[test]
    fn energy_x_of_identity_orbit() {
        for (p, m) in [(2.0, 3u32), (3.0, 5), (4.0, 8)] {
            let params = Params::new(p, m).unwrap();
            let (value, err) = energy_x(&identity_samples(&params), &params).unwrap();
            let closed = identity_energy_closed(&params);
            assert!(
                (value - closed).abs() < 1e-8,
                "p={p} m={m}: {value} vs {closed} (err {err:e})"
            );
            assert!(
                (value - closed).abs() <= 10.0 * err.max(1e-12),
                "estimate too optimistic"
            );
        }
    }

    #[test]
    fn energy_x_of_fixed_point_profile_is_zero() {
        let params = Params::new(2.0, 3).unwrap();
        let xs: Vec<f64> = (0..=100).map(|i| 0.3 * i as f64).collect();
        let samples = sample_closed_form(
            |x| ProfileState {
                x,
                h: FRAC_PI_2,
                dh: 0.0,
            },
            &xs,
            &params,
        );
        let (value, _) = energy_x(&samples, &params).unwrap();
        assert!(value.abs() < 1e-20, "value {value:e}");
    }

    #[test]
    fn energy_x_rejects_undecayed_profiles() {
        let params = Params::new(2.0, 3).unwrap();
        let xs: Vec<f64> = (0..=50).map(|i| 0.05 * i as f64).collect();
        let samples = sample_closed_form(identity_profile, &xs, &params);
        assert!(matches!(
            energy_x(&samples, &params),
            Err(Error::TailNotConverged(_))
        ));
    }

    #[test]
    fn energy_t_of_the_diagonal_profile() {
        // r(t) = t at (2,3): (1/2)·3·∫ sin²t dt = 3π/4
        let params = Params::new(2.0, 3).unwrap();
        let n = 2000;
        let samples: Vec<RSample> = (0..=n)
            .map(|i| {
                let t = PI * i as f64 / n as f64;
                RSample { t, r: t, dr: 1.0 }
            })
            .collect();
        let profile = RProfile { samples, k_end: 1 };
        let (value, err) = energy_t(&profile, &params).unwrap();
        assert!(
            (value - 3.0 * PI / 4.0).abs() < 1e-8,
            "value {value} (err {err:e})"
        );
    }

    #[test]
    fn energy_t_matches_energy_x_for_identity() {
        for (p, m) in [(2.0, 3u32), (3.0, 5), (4.0, 8)] {
            let params = Params::new(p, m).unwrap();
            let samples = identity_samples(&params);
            let profile = to_r_profile(&samples, Symmetry::Odd).unwrap();
            let report = energy_report(&samples, &profile, &params).unwrap();
            assert!(
                (report.value_x_chart - report.value_t_chart).abs() < 1e-8,
                "p={p} m={m}: x {} vs t {}",
                report.value_x_chart,
                report.value_t_chart
            );
            assert!(
                (report.value_x_chart - report.value_t_chart).abs()
                    <= 10.0 * report.quadrature_error.max(1e-12)
            );
        }
    }

    #[test]
    fn energy_t_of_the_zero_map() {
        let params = Params::new(2.0, 3).unwrap();
        let n = 500;
        let samples: Vec<RSample> = (0..=n)
            .map(|i| RSample {
                t: PI * i as f64 / n as f64,
                r: 0.0,
                dr: 0.0,
            })
            .collect();
        let (value, _) = energy_t(&RProfile { samples, k_end: 0 }, &params).unwrap();
        assert_eq!(value, 0.0);
    }

    #[test]
    fn energy_t_rejects_irregular_poles() {
        let params = Params::new(2.0, 3).unwrap();
        let n = 500;
        let samples: Vec<RSample> = (0..=n)
            .map(|i| RSample {
                t: PI * i as f64 / n as f64,
                r: 0.3,
                dr: 0.0,
            })
            .collect();
        assert!(matches!(
            energy_t(&RProfile { samples, k_end: 0 }, &params),
            Err(Error::PoleSingularity { .. })
        ));
    }

    fn identity_sampled_profile() -> SampledProfile {
        SampledProfile::from_fn(-25.0, 5e-3, 10001, identity_profile)
    }

    #[test]
    fn second_variation_vanishes_on_the_zero_direction() {
        let params = Params::new(3.0, 5).unwrap();
        let profile = identity_sampled_profile();
        let xi = vec![0.0; profile.len()];
        let q = second_variation(&profile, &xi, &params).unwrap();
        assert_eq!(q, 0.0);
    }

    #[test]
    fn second_variation_requires_a_critical_profile() {
        let params = Params::new(2.0, 3).unwrap();
        let profile = SampledProfile::from_fn(-25.0, 5e-3, 10001, |x| {
            let s = identity_profile(x);
            // not a solution: amplitude scaled
            ProfileState {
                x,
                h: 0.9 * s.h,
                dh: 0.9 * s.dh,
            }
        });
        let xi: Vec<f64> = (0..profile.len())
            .map(|i| eigenfunction(1, 3, profile.x(i)))
            .collect();
        assert!(matches!(
            second_variation(&profile, &xi, &params),
            Err(Error::NonCriticalProfile { .. })
        ));
    }

    #[test]
    fn rayleigh_identity_reproduces_the_spectrum() {
        // Q(ξ_j) = λ̂_j·m^{p/2−1}·∫ ξ_j² sech^m dx
        for (p, m) in [(2.0, 3u32), (3.0, 5), (5.0, 3), (2.0, 6)] {
            let params = Params::new(p, m).unwrap();
            let profile = identity_sampled_profile();
            for j in 1..=4u32 {
                let xi: Vec<f64> = (0..profile.len())
                    .map(|i| eigenfunction(j, m, profile.x(i)))
                    .collect();
                let q = second_variation(&profile, &xi, &params).unwrap();
                let (norm, _) = quad_uniform(
                    |x: f64| eigenfunction(j, m, x).powi(2) / x.cosh().powf(f64::from(m)),
                    -25.0,
                    25.0,
                    500,
                );
                let lambda = eigenvalue_chain(j, &params);
                let expect = lambda * f64::from(m).powf(p / 2.0 - 1.0) * norm;
                let rel = (q - expect).abs() / expect.abs().max(1e-12);
                assert!(
                    rel < 1e-6,
                    "p={p} m={m} j={j}: Q={q} expect={expect} rel={rel:e}"
                );
            }
        }
    }

    #[test]
    fn second_variation_sign_tests() {
        // p > m: positive on a family of compact bumps; p < m: negative on ξ1
        let stable = Params::new(5.0, 3).unwrap();
        let profile = identity_sampled_profile();
        for k in 0..10 {
            let c = -4.0 + 0.9 * k as f64;
            let w = 0.6 + 0.15 * (k % 4) as f64;
            let xi: Vec<f64> = (0..profile.len())
                .map(|i| {
                    let x = profile.x(i);
                    (-(x - c) * (x - c) / (w * w)).exp()
                })
                .collect();
            let q = second_variation(&profile, &xi, &stable).unwrap();
            assert!(q > 0.0, "bump {k}: Q = {q}");
        }
        let unstable = Params::new(2.0, 3).unwrap();
        let xi: Vec<f64> = (0..profile.len())
            .map(|i| eigenfunction(1, 3, profile.x(i)))
            .collect();
        let q = second_variation(&profile, &xi, &unstable).unwrap();
        assert!(q < 0.0, "Q(ξ1) = {q}");
    }

    #[test]
    fn grid_helper_covers_the_span() {
        let g = UniformGrid::span(-25.0, 25.0, 5e-3);
        assert!(g.dx <= 5e-3);
        assert_eq!(g.x(0), -25.0);
        assert!((g.x_end() - 25.0).abs() < 1e-12);
    }
}
