//! Jacobi spectrum of the identity map: Gegenbauer closed forms, residual
//! verification against the spectral ODE, and a collocation eigensolver.
//!
//! Two closed-form candidates exist for the scaled eigenvalues λ̂_j and they
//! disagree for `p ≠ 2`, `j ≥ 2`:
//!
//! * `theorem`: λ̂_j = −2m + p + j(j+m−1),
//! * `chain`:   λ̂_j = (m+p−2)(j−1)(j+m)/m + p − m,
//!
//! the latter obtained by composing the `ξ = f/cosh` substitution with the
//! Gegenbauer eigenvalue `(j−1)(j−1+2α)`, `α = (m+1)/2`. Both are always
//! computed and reported; a finite-difference residual against the spectral
//! ODE and an independent collocation eigensolver adjudicate.

use crate::error::{Error, Result};
use crate::model::Params;
use crate::numerics::{deriv1_uniform, deriv2_uniform, UniformGrid};
use nalgebra::DMatrix;

/// Gegenbauer family `C_n^{(α)}` used by the identity-map eigenfunctions;
/// for sphere dimension `m` the order is `α = (m+1)/2`.
#[derive(Debug, Clone, Copy)]
pub struct GegenbauerBasis {
    pub alpha: f64,
    pub n_max: u32,
}

impl GegenbauerBasis {
    pub fn for_dimension(m: u32, n_max: u32) -> Self {
        Self {
            alpha: (f64::from(m) + 1.0) / 2.0,
            n_max,
        }
    }

    pub fn eval(&self, n: u32, s: f64) -> Result<f64> {
        gegenbauer(n, self.alpha, s)
    }
}

/// `C_n^{(α)}(s)` by the forward three-term recurrence
/// `n·Cₙ = 2(n+α−1)·s·Cₙ₋₁ − (n+2α−2)·Cₙ₋₂`, stable for `|s| ≤ 1`.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN orders must be rejected
pub fn gegenbauer(n: u32, alpha: f64, s: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!(
            "Gegenbauer order must be positive, got {alpha}"
        )));
    }
    if s.abs() > 1.0 {
        return Err(Error::InvalidInput(format!(
            "Gegenbauer argument |s| ≤ 1 required, got {s}"
        )));
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * alpha * s;
    for k in 2..=n {
        let kf = f64::from(k);
        let next = (2.0 * (kf + alpha - 1.0) * s * cur - (kf + 2.0 * alpha - 2.0) * prev) / kf;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// The direct closed-form candidate for λ̂_j: `−2m + p + j(j+m−1)`.
pub fn eigenvalue_theorem(j: u32, params: &Params) -> f64 {
    let jf = f64::from(j);
    let m = params.mf();
    -2.0 * m + params.p() + jf * (jf + m - 1.0)
}

/// The substitution-chain candidate for λ̂_j, from composing the
/// `ξ = f/cosh` ansatz with the Gegenbauer eigenvalue:
/// `(m+p−2)(j−1)(j+m)/m + p − m`.
pub fn eigenvalue_chain(j: u32, params: &Params) -> f64 {
    let jf = f64::from(j);
    let m = params.mf();
    (m + params.p() - 2.0) * (jf - 1.0) * (jf + m) / m + params.p() - m
}

/// Eigenfunction `ξ_j(x) = sech x · C_{j−1}^{((m+1)/2)}(tanh x)`.
pub fn eigenfunction(j: u32, m: u32, x: f64) -> f64 {
    assert!(j >= 1, "eigenfunctions are indexed from 1");
    let alpha = (f64::from(m) + 1.0) / 2.0;
    let c = gegenbauer(j - 1, alpha, x.tanh()).expect("|tanh| < 1");
    c / x.cosh()
}

/// Max-norm residual of the identity-map spectral ODE applied to sampled
/// `ξ` with candidate eigenvalue `λ̂`, derivatives by 4th-order central
/// differences. The grid must span at least [−20, 20] with spacing ≤ 1e−2.
pub fn jacobi_residual(
    xi: &[f64],
    lambda_hat: f64,
    params: &Params,
    grid: &UniformGrid,
) -> Result<f64> {
    if xi.len() != grid.n {
        return Err(Error::InvalidInput(format!(
            "{} samples on a grid of {} points",
            xi.len(),
            grid.n
        )));
    }
    if grid.dx > 1e-2 {
        return Err(Error::GridTooCoarse(format!(
            "spacing {} exceeds 1e-2",
            grid.dx
        )));
    }
    if grid.x0 > -20.0 || grid.x_end() < 20.0 {
        return Err(Error::GridTooCoarse(format!(
            "grid [{}, {}] must span at least [-20, 20]",
            grid.x0,
            grid.x_end()
        )));
    }
    let p = params.p();
    let m = params.mf();
    let xi_p = deriv1_uniform(xi, grid.dx)?;
    let xi_pp = deriv2_uniform(xi, grid.dx)?;
    // inner flux (cosh x / m)(ξ' − (m−1)·tanh x·ξ), differentiated once more
    let inner: Vec<f64> = (0..grid.n)
        .map(|i| {
            let x = grid.x(i);
            (x.cosh() / m) * (xi_p[i] - (m - 1.0) * x.tanh() * xi[i])
        })
        .collect();
    let inner_p = deriv1_uniform(&inner, grid.dx)?;

    let mut worst: f64 = 0.0;
    for i in 4..grid.n.saturating_sub(4) {
        let x = grid.x(i);
        let sech = 1.0 / x.cosh();
        let tanh = x.tanh();
        let r = xi_pp[i] + (2.0 - m) * tanh * xi_p[i]
            - (m - 1.0) * (tanh * tanh - sech * sech) * xi[i]
            + (p - 2.0) * sech * inner_p[i]
            + lambda_hat * sech * sech * xi[i];
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// First `j_max` scaled eigenvalues from a collocation discretization of
/// the transformed equation `(1−s²)u″ − (m+2)s·u′ + μu = 0` on `s ∈ (−1,1)`
/// (Chebyshev–Gauss nodes, natural boundary behavior), mapped back through
/// `λ̂ = (m+p−2)·μ/m + p − m`. Values are checked under grid doubling.
pub fn eigenvalue_numeric(params: &Params, j_max: u32, n_grid: usize) -> Result<Vec<f64>> {
    let n = n_grid.max(8 * j_max as usize);
    let coarse = collocation_eigenvalues(params, j_max, n)?;
    let fine = collocation_eigenvalues(params, j_max, 2 * n)?;
    for (j, (a, b)) in coarse.iter().zip(&fine).enumerate() {
        if (a - b).abs() > 1e-6 {
            return Err(Error::EigensolveFailed(format!(
                "eigenvalue {} changed by {:.3e} under grid doubling",
                j + 1,
                (a - b).abs()
            )));
        }
    }
    Ok(fine)
}

fn collocation_eigenvalues(params: &Params, j_max: u32, n: usize) -> Result<Vec<f64>> {
    // Chebyshev–Gauss nodes s_i = cos((2i+1)π/2n) with barycentric weights
    // w_i ∝ (−1)^i sin((2i+1)π/2n)
    let nodes: Vec<f64> = (0..n)
        .map(|i| ((2 * i + 1) as f64 * std::f64::consts::PI / (2.0 * n as f64)).cos())
        .collect();
    let weights: Vec<f64> = (0..n)
        .map(|i| {
            let th = (2 * i + 1) as f64 * std::f64::consts::PI / (2.0 * n as f64);
            if i % 2 == 0 {
                th.sin()
            } else {
                -th.sin()
            }
        })
        .collect();

    let mut d1 = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = (weights[j] / weights[i]) / (nodes[i] - nodes[j]);
                d1[(i, j)] = v;
                diag -= v;
            }
        }
        d1[(i, i)] = diag;
    }
    let d2 = &d1 * &d1;

    // L u = (1−s²)u″ − (m+2)s·u′; the eigenproblem is L u + μ u = 0
    let m = params.mf();
    let mut op = DMatrix::zeros(n, n);
    for i in 0..n {
        let s = nodes[i];
        for j in 0..n {
            op[(i, j)] = -((1.0 - s * s) * d2[(i, j)] - (m + 2.0) * s * d1[(i, j)]);
        }
    }

    let eigen = op.complex_eigenvalues();
    let mut mus: Vec<f64> = eigen
        .iter()
        .map(|z| {
            if z.im.abs() > 1e-6 * (1.0 + z.re.abs()) {
                // rounding can produce tiny imaginary parts; anything larger
                // means the discretization broke down
                f64::NAN
            } else {
                z.re
            }
        })
        .collect();
    if mus.iter().any(|v| v.is_nan()) {
        return Err(Error::EigensolveFailed(
            "complex eigenvalues from the collocation matrix".into(),
        ));
    }
    mus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let p = params.p();
    Ok(mus
        .into_iter()
        .take(j_max as usize)
        .map(|mu| (m + p - 2.0) * mu / m + p - m)
        .collect())
}

/// Which closed form the residual test selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectedFormula {
    /// `p = 2`: the two forms coincide.
    Both,
    Theorem,
    Chain,
}

impl SelectedFormula {
    pub fn as_str(&self) -> &'static str {
        match self {
            SelectedFormula::Both => "both",
            SelectedFormula::Theorem => "theorem",
            SelectedFormula::Chain => "chain",
        }
    }
}

/// One spectral line: both closed forms, the optional numeric value, the
/// unscaled eigenvalue `λ = m^{p/2−1}·λ̂` of the selected form, and both
/// residuals.
#[derive(Debug, Clone, Copy)]
pub struct EigenPair {
    pub j: u32,
    pub lambda_hat_theorem: f64,
    pub lambda_hat_chain: f64,
    pub lambda_hat_numeric: Option<f64>,
    pub lambda_unscaled: f64,
    pub residual_theorem: f64,
    pub residual_chain: f64,
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub params: Params,
    /// Gegenbauer order `(m+1)/2`.
    pub alpha: f64,
    pub selected: SelectedFormula,
    pub pairs: Vec<EigenPair>,
}

impl SpectrumReport {
    /// Adjudicated λ̂_j of the j-th line (1-based).
    pub fn lambda_hat(&self, j: u32) -> f64 {
        let pair = &self.pairs[(j - 1) as usize];
        match self.selected {
            SelectedFormula::Theorem => pair.lambda_hat_theorem,
            _ => pair.lambda_hat_chain,
        }
    }
}

/// Compute the full report: closed forms, residuals, selection, and (when
/// requested) the numeric adjudication.
pub fn spectrum_report(params: &Params, j_max: u32, with_numeric: bool) -> Result<SpectrumReport> {
    if j_max < 1 {
        return Err(Error::InvalidInput("j_max must be >= 1".into()));
    }
    let m = params.m();
    // spacing balances the stencil truncation (∝ dx⁴·ξ⁽⁶⁾, worst at large
    // j and m) against rounding in the chained stencils (∝ 1/dx²)
    let grid = UniformGrid::span(-25.0, 25.0, 2e-3);
    let xs = grid.xs();
    let numeric = if with_numeric {
        Some(eigenvalue_numeric(params, j_max, 8 * j_max as usize)?)
    } else {
        None
    };

    let mut pairs = Vec::with_capacity(j_max as usize);
    let mut worst_theorem: f64 = 0.0;
    let mut worst_chain: f64 = 0.0;
    for j in 1..=j_max {
        let mut xi: Vec<f64> = xs.iter().map(|&x| eigenfunction(j, m, x)).collect();
        // eigenfunctions are defined up to scale; unit sup-norm makes the
        // residuals comparable across j and m
        let sup = xi.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for v in &mut xi {
            *v /= sup;
        }
        let lt = eigenvalue_theorem(j, params);
        let lc = eigenvalue_chain(j, params);
        let rt = jacobi_residual(&xi, lt, params, &grid)?;
        let rc = jacobi_residual(&xi, lc, params, &grid)?;
        worst_theorem = worst_theorem.max(rt);
        worst_chain = worst_chain.max(rc);
        pairs.push(EigenPair {
            j,
            lambda_hat_theorem: lt,
            lambda_hat_chain: lc,
            lambda_hat_numeric: numeric.as_ref().map(|v| v[(j - 1) as usize]),
            lambda_unscaled: 0.0,
            residual_theorem: rt,
            residual_chain: rc,
        });
    }

    let selected = if (params.p() - 2.0).abs() < 1e-12 {
        SelectedFormula::Both
    } else if worst_chain <= worst_theorem {
        SelectedFormula::Chain
    } else {
        SelectedFormula::Theorem
    };

    let scale = params.mf().powf(params.p() / 2.0 - 1.0);
    for pair in &mut pairs {
        let hat = match selected {
            SelectedFormula::Theorem => pair.lambda_hat_theorem,
            _ => pair.lambda_hat_chain,
        };
        pair.lambda_unscaled = scale * hat;
    }

    Ok(SpectrumReport {
        params: *params,
        alpha: (params.mf() + 1.0) / 2.0,
        selected,
        pairs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
    Marginal,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Stable => "Stable",
            Verdict::Unstable => "Unstable",
            Verdict::Marginal => "Marginal",
        }
    }
}

/// Stability of the identity map from the sign of the smallest adjudicated
/// eigenvalue; λ̂₁ = p − m decides since λ̂_j increases in j.
pub fn stability_verdict(params: &Params, j_max: u32) -> Result<Verdict> {
    if j_max < 3 {
        return Err(Error::InvalidInput(
            "j_max must be >= 3 for a stability verdict".into(),
        ));
    }
    let report = spectrum_report(params, j_max, false)?;
    let min = (1..=j_max)
        .map(|j| report.lambda_hat(j))
        .fold(f64::INFINITY, f64::min);
    Ok(if min.abs() <= 1e-9 {
        Verdict::Marginal
    } else if min > 0.0 {
        Verdict::Stable
    } else {
        Verdict::Unstable
    })
}
