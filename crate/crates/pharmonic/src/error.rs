//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    InvalidInput(String),

    /// The ODE denominator `(p−1)h′² + (m−1)cos²h` fell below the floor.
    /// This happens exactly at the fixed points `(h, h′) = (±π/2 + kπ, 0)`.
    #[error("degenerate point at x = {x}: denominator {denominator:.3e} below floor {floor:.3e}")]
    DegeneratePoint {
        x: f64,
        denominator: f64,
        floor: f64,
    },

    #[error("step size underflow at x = {x} (h = {step:.3e})")]
    StepSizeUnderflow { x: f64, step: f64 },

    #[error("no zero-count transition for k = {k} down to b = {floor:.3e}")]
    BracketNotFound { k: u32, floor: f64 },

    #[error("midpoint orbit for k = {k} did not converge (bracket [{b_lo:.17e}, {b_hi:.17e}], closest approach {closest:.3e}); raise x_max or convergence_eps")]
    NonConvergent {
        k: u32,
        b_lo: f64,
        b_hi: f64,
        closest: f64,
    },

    #[error("profile tail not converged: {0}")]
    TailNotConverged(String),

    #[error("r(0) = {r0} is not pole-regular (must be a multiple of pi within {tol:.1e})")]
    PoleSingularity { r0: f64, tol: f64 },

    #[error("profile is not a critical point: ODE residual {residual:.3e} exceeds {max:.3e}")]
    NonCriticalProfile { residual: f64, max: f64 },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("eigensolver did not converge: {0}")]
    EigensolveFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
