//! Shared numerical machinery: composite Gauss–Legendre quadrature, cubic
//! Hermite interpolation, fixed 4th-order difference stencils, Fornberg
//! weights for scattered nodes, and exact half-integer gamma values.

use crate::error::{Error, Result};

/// Gauss–Legendre nodes/weights on [-1, 1], 5 points (exact to degree 9).
pub const GL5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (0.0, 128.0 / 225.0),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (0.906_179_845_938_664, 0.236_926_885_056_189_08),
];

/// Gauss–Legendre nodes/weights on [-1, 1], 7 points (exact to degree 13).
#[allow(clippy::excessive_precision)] // keep the tabulated digits
pub const GL7: [(f64, f64); 7] = [
    (-0.949_107_912_342_758_5, 0.129_484_966_168_869_7),
    (-0.741_531_185_599_394_4, 0.279_705_391_489_276_7),
    (-0.405_845_151_377_397_2, 0.381_830_050_505_118_94),
    (0.0, 0.417_959_183_673_469_4),
    (0.405_845_151_377_397_2, 0.381_830_050_505_118_94),
    (0.741_531_185_599_394_4, 0.279_705_391_489_276_7),
    (0.949_107_912_342_758_5, 0.129_484_966_168_869_7),
];

/// Integrate `f` over one panel [a, b] with the given rule.
pub fn gl_panel(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, rule: &[(f64, f64)]) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for &(xi, wi) in rule {
        acc += wi * f(mid + half * xi);
    }
    acc * half
}

/// Composite quadrature over the panels defined by `breaks` (ascending).
/// Returns `(value, error_estimate)` where the estimate is the summed
/// absolute difference between the 7- and 5-point rules per panel.
pub fn quad_panels(mut f: impl FnMut(f64) -> f64, breaks: &[f64]) -> (f64, f64) {
    let mut value = 0.0;
    let mut err = 0.0;
    for w in breaks.windows(2) {
        let v7 = gl_panel(&mut f, w[0], w[1], &GL7);
        let v5 = gl_panel(&mut f, w[0], w[1], &GL5);
        value += v7;
        err += (v7 - v5).abs();
    }
    (value, err)
}

/// Composite quadrature over [a, b] split into `n` equal panels.
pub fn quad_uniform(f: impl FnMut(f64) -> f64, a: f64, b: f64, n: usize) -> (f64, f64) {
    let breaks: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    quad_panels(f, &breaks)
}

/// Cubic Hermite value on [x0, x1] with endpoint values/derivatives.
pub fn hermite_value(x0: f64, x1: f64, f0: f64, d0: f64, f1: f64, d1: f64, x: f64) -> f64 {
    let dx = x1 - x0;
    let s = (x - x0) / dx;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 1.0 - 3.0 * s2 + 2.0 * s3;
    let h10 = s - 2.0 * s2 + s3;
    let h01 = 3.0 * s2 - 2.0 * s3;
    let h11 = s3 - s2;
    h00 * f0 + h10 * dx * d0 + h01 * f1 + h11 * dx * d1
}

/// Derivative of the cubic Hermite interpolant at `x`.
pub fn hermite_slope(x0: f64, x1: f64, f0: f64, d0: f64, f1: f64, d1: f64, x: f64) -> f64 {
    let dx = x1 - x0;
    let s = (x - x0) / dx;
    let s2 = s * s;
    let dh00 = (-6.0 * s + 6.0 * s2) / dx;
    let dh10 = 1.0 - 4.0 * s + 3.0 * s2;
    let dh01 = (6.0 * s - 6.0 * s2) / dx;
    let dh11 = 3.0 * s2 - 2.0 * s;
    dh00 * f0 + dh10 * d0 + dh01 * f1 + dh11 * d1
}

/// Piecewise cubic Hermite interpolant over ascending nodes with known
/// values and first derivatives.
pub struct CubicHermite<'a> {
    xs: &'a [f64],
    fs: &'a [f64],
    ds: &'a [f64],
}

impl<'a> CubicHermite<'a> {
    pub fn new(xs: &'a [f64], fs: &'a [f64], ds: &'a [f64]) -> Result<Self> {
        if xs.len() < 2 || xs.len() != fs.len() || xs.len() != ds.len() {
            return Err(Error::InvalidInput(
                "hermite interpolant needs >= 2 matching nodes".into(),
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "hermite nodes must be strictly increasing".into(),
            ));
        }
        Ok(Self { xs, fs, ds })
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        let i = self.segment(x);
        hermite_value(
            self.xs[i],
            self.xs[i + 1],
            self.fs[i],
            self.ds[i],
            self.fs[i + 1],
            self.ds[i + 1],
            x,
        )
    }

    pub fn slope(&self, x: f64) -> f64 {
        let i = self.segment(x);
        hermite_slope(
            self.xs[i],
            self.xs[i + 1],
            self.fs[i],
            self.ds[i],
            self.fs[i + 1],
            self.ds[i + 1],
            x,
        )
    }
}

/// First derivative of uniformly sampled data, 4th order: 5-point central
/// stencil inside, one-sided 5-point variants at the boundary.
pub fn deriv1_uniform(f: &[f64], dx: f64) -> Result<Vec<f64>> {
    let n = f.len();
    if n < 5 {
        return Err(Error::GridTooCoarse(format!(
            "need >= 5 samples for the 4th-order stencil, got {n}"
        )));
    }
    let mut out = vec![0.0; n];
    out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * dx);
    out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * dx);
    for i in 2..n - 2 {
        out[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * dx);
    }
    out[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5])
        / (12.0 * dx);
    out[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4]
        + 3.0 * f[n - 5])
        / (12.0 * dx);
    Ok(out)
}

/// Second derivative of uniformly sampled data, 4th order central stencil.
/// The two samples at each end reuse the nearest interior value; callers
/// that care restrict to the interior.
pub fn deriv2_uniform(f: &[f64], dx: f64) -> Result<Vec<f64>> {
    let n = f.len();
    if n < 5 {
        return Err(Error::GridTooCoarse(format!(
            "need >= 5 samples for the 4th-order stencil, got {n}"
        )));
    }
    let mut out = vec![0.0; n];
    for i in 2..n - 2 {
        out[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2])
            / (12.0 * dx * dx);
    }
    out[0] = out[2];
    out[1] = out[2];
    out[n - 2] = out[n - 3];
    out[n - 1] = out[n - 3];
    Ok(out)
}

/// Fornberg finite-difference weights: for nodes `xs` and evaluation point
/// `z`, returns weights for derivatives of order 0..=m as rows.
pub fn fornberg_weights(z: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// First derivative on scattered nodes using a sliding 7-point Fornberg
/// stencil (6th order on smooth data).
pub fn deriv1_scattered(xs: &[f64], fs: &[f64]) -> Result<Vec<f64>> {
    let n = xs.len();
    let w = 7usize;
    if n < w {
        return Err(Error::GridTooCoarse(format!(
            "need >= {w} samples, got {n}"
        )));
    }
    let mut out = vec![0.0; n];
    for i in 0..n {
        let lo = i.saturating_sub(w / 2).min(n - w);
        let weights = fornberg_weights(xs[i], &xs[lo..lo + w], 1);
        out[i] = weights[1]
            .iter()
            .zip(&fs[lo..lo + w])
            .map(|(c, f)| c * f)
            .sum();
    }
    Ok(out)
}

/// Γ(k/2) for positive integer k, via the exact half-integer recursion.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k > 0, "gamma_half needs a positive numerator");
    let even = k.is_multiple_of(2);
    let mut value = if even {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let mut j = if even { 2 } else { 1 };
    while j < k {
        value *= j as f64 / 2.0;
        j += 2;
    }
    value
}

/// Uniform grid description shared by stencil-based operations.
#[derive(Debug, Clone, Copy)]
pub struct UniformGrid {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
}

impl UniformGrid {
    /// Grid spanning [a, b] with spacing at most `max_dx`.
    pub fn span(a: f64, b: f64, max_dx: f64) -> Self {
        let n = ((b - a) / max_dx).ceil() as usize + 1;
        let n = n.max(5);
        Self {
            x0: a,
            dx: (b - a) / (n - 1) as f64,
            n,
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + self.dx * i as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    pub fn x_end(&self) -> f64 {
        self.x(self.n - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_rules_are_exact_on_polynomials() {
        // degree-9 monomial for GL5, degree-13 for GL7; exact values are
        // 2/(d+1) on [-1,1] for even degree, 0 for odd
        let mut f9 = |x: f64| x.powi(8);
        let v5 = gl_panel(&mut f9, -1.0, 1.0, &GL5);
        assert!((v5 - 2.0 / 9.0).abs() < 1e-14, "GL5 on x^8: {v5}");
        let mut f13 = |x: f64| x.powi(12);
        let v7 = gl_panel(&mut f13, -1.0, 1.0, &GL7);
        assert!((v7 - 2.0 / 13.0).abs() < 1e-14, "GL7 on x^12: {v7}");

        let (s, err) = quad_uniform(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 8);
        assert!((s - 2.0).abs() < 1e-13, "composite sin integral: {s}");
        assert!(err < 1e-10);
    }

    #[test]
    fn stencils_match_analytic_derivatives() {
        let dx = 1e-2;
        let xs: Vec<f64> = (0..101).map(|i| i as f64 * dx).collect();
        let fs: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
        let d1 = deriv1_uniform(&fs, dx).unwrap();
        let d2 = deriv2_uniform(&fs, dx).unwrap();
        for (i, x) in xs.iter().enumerate() {
            assert!((d1[i] - x.exp()).abs() < 2e-8, "d1 at {x}: {}", d1[i]);
            if i >= 2 && i + 2 < xs.len() {
                assert!((d2[i] - x.exp()).abs() < 2e-6, "d2 at {x}: {}", d2[i]);
            }
        }
    }

    #[test]
    fn fornberg_reduces_to_classical_weights_on_uniform_nodes() {
        let xs = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let w = fornberg_weights(0.0, &xs, 2);
        let expect1 = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
        let expect2 = [
            -1.0 / 12.0,
            16.0 / 12.0,
            -30.0 / 12.0,
            16.0 / 12.0,
            -1.0 / 12.0,
        ];
        for i in 0..5 {
            assert!((w[1][i] - expect1[i]).abs() < 1e-14);
            assert!((w[2][i] - expect2[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn scattered_derivative_on_nonuniform_nodes() {
        let xs: Vec<f64> = (0..60)
            .map(|i| 0.05 * i as f64 + 0.01 * (i as f64).sin())
            .collect();
        let fs: Vec<f64> = xs.iter().map(|x| (2.0 * x).sin()).collect();
        let d = deriv1_scattered(&xs, &fs).unwrap();
        for (i, x) in xs.iter().enumerate() {
            // one-sided windows at the ends carry a larger constant
            let tol = if i < 3 || i + 3 >= xs.len() {
                1e-5
            } else {
                1e-7
            };
            assert!(
                (d[i] - 2.0 * (2.0 * x).cos()).abs() < tol,
                "at {x}: {}",
                d[i]
            );
        }
    }

    #[test]
    fn hermite_reproduces_cubics_exactly() {
        let f = |x: f64| 2.0 * x * x * x - x * x + 3.0 * x - 5.0;
        let d = |x: f64| 6.0 * x * x - 2.0 * x + 3.0;
        for &x in &[0.1, 0.35, 0.72, 0.99] {
            let v = hermite_value(0.0, 1.0, f(0.0), d(0.0), f(1.0), d(1.0), x);
            let s = hermite_slope(0.0, 1.0, f(0.0), d(0.0), f(1.0), d(1.0), x);
            assert!((v - f(x)).abs() < 1e-13);
            assert!((s - d(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_half_integer_values() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((gamma_half(1) - sqrt_pi).abs() < 1e-15); // Γ(1/2)
        assert!((gamma_half(2) - 1.0).abs() < 1e-15); // Γ(1)
        assert!((gamma_half(3) - sqrt_pi / 2.0).abs() < 1e-15); // Γ(3/2)
        assert!((gamma_half(6) - 2.0).abs() < 1e-15); // Γ(3)
        assert!((gamma_half(7) - 15.0 * sqrt_pi / 8.0).abs() < 1e-14); // Γ(7/2)
    }
}
