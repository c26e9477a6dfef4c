//! Rotationally symmetric p-harmonic self-maps of the round m-sphere.
//!
//! The equivariant ansatz `(t, φ) ↦ (r(t), φ)` reduces the p-harmonic map
//! equation on the sphere to a second-order ODE in the colatitude `t`. After
//! the regularizing change of variables `t = 2·arctan(eˣ)`, `h(x) = r(t) − π/2`
//! the problem becomes a shooting problem on the whole line:
//!
//! * [`model`] — problem parameters `(p, m)` and closed-form regime analysis
//!   (existence window, winding window, linearization exponents),
//! * [`profile`] — the reduced ODE, the Lyapunov function `W`, the phase
//!   `θ = atan2(h′, h)`, the identity-map profile, and chart transforms,
//! * [`integrate`] — adaptive embedded Runge–Kutta integration with event
//!   location and orbit classification,
//! * [`shooting`] — b-orbits, rotation numbers, bisection for the shooting
//!   parameters `b_k`, and boundary-value reconstruction `r(t)`,
//! * [`spectrum`] — the Jacobi spectrum of the identity map: Gegenbauer
//!   closed forms, finite-difference residuals, and a collocation eigensolver,
//! * [`energy`] — p-energy quadrature in both charts and the second-variation
//!   quadratic form.

pub mod energy;
pub mod error;
pub mod integrate;
pub mod model;
pub mod numerics;
pub mod profile;
pub mod shooting;
pub mod spectrum;

pub use error::{Error, Result};
pub use integrate::{
    energy_error_estimate, integrate_orbit, Event, EventKind, IntegratorConfig, Orbit,
};
pub use model::{
    in_existence_window, in_winding_window, regime, validate_params, Params, Regime, RegimeReport,
};
pub use num_complex::Complex64;
pub use profile::{
    identity_profile, t_of_x, x_of_t, OrbitSample, ProfileState, RProfile, RSample, Symmetry,
};
pub use shooting::{
    find_bk, run_orbit, scan_zero_counts, solve_catalogue, upper_bracket, Classification,
    OrbitOutcome, ShootResult, ShootSpec,
};
pub use spectrum::{
    eigenfunction, eigenvalue_chain, eigenvalue_numeric, eigenvalue_theorem, gegenbauer,
    jacobi_residual, spectrum_report, stability_verdict, EigenPair, SelectedFormula,
    SpectrumReport, Verdict,
};
