//! Resolution diagnostics for the shooting solver.
//!
//! For each cell this measures how well the located b₁ recovers the
//! identity map: the bisection floor on b, the closest approach to the
//! fixed point (which bounds any convergence-ball radius), and the growth
//! of the profile deviation along the unstable direction.
//!
//! Run with `cargo run --release --example calibrate`.

use pharmonic::{
    find_bk, identity_profile, integrate_orbit, solve_catalogue, IntegratorConfig, Params,
    ProfileState,
};

fn catalogue_diagnostics() {
    for (p, m) in [(2.0, 3u32), (3.0, 5)] {
        let params = Params::new(p, m).unwrap();
        let cfg = IntegratorConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            convergence_eps: 3e-3,
            ..Default::default()
        };
        println!("catalogue ({p}, {m}), b_tol = 1e-15, eps = 3e-3:");
        for (k, r) in solve_catalogue(&params, 4, 1e-15, &cfg) {
            match r {
                Ok(r) => println!(
                    "  k={k}: b={:.12}  omega={:.8}  |omega-(k-1/2)|={:.2e}  closest={:.2e}  zeros={}  E={:.8}",
                    r.b_k,
                    r.outcome.omega,
                    (r.outcome.omega - (k as f64 - 0.5)).abs(),
                    r.orbit.closest_approach(),
                    r.outcome.zero_count,
                    r.energy,
                ),
                Err(e) => println!("  k={k}: {e}"),
            }
        }
    }
}

fn scan_timing() {
    use std::time::Instant;
    for (p, m) in [(2.0, 7u32), (3.0, 12)] {
        let params = Params::new(p, m).unwrap();
        let cfg = IntegratorConfig::default();
        let t0 = Instant::now();
        let scan = pharmonic::scan_zero_counts(&params, 10_000, &cfg).unwrap();
        let transitions: Vec<usize> = scan
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0].1 != w[1].1)
            .map(|(i, _)| i)
            .collect();
        let counts: std::collections::BTreeSet<u32> = scan.iter().map(|v| v.1).collect();
        println!(
            "({p}, {m}): scan 1e4 in {:.1?}, counts {:?}, {} transitions",
            t0.elapsed(),
            counts,
            transitions.len()
        );
    }
}

fn main() {
    scan_timing();
    catalogue_diagnostics();
    let cells = [(2.0, 3u32), (2.0, 6), (3.0, 5), (4.0, 8)];
    println!("cell        b1 - 1            closest     sup|dh| on [0,6]  [0,8]      [0,10]");
    for (p, m) in cells {
        let params = Params::new(p, m).unwrap();
        let cfg = IntegratorConfig {
            rel_tol: 1e-13,
            abs_tol: 1e-15,
            convergence_eps: 5e-2,
            ..Default::default()
        };
        let result = match find_bk(&params, 1, 1e-16, &cfg) {
            Ok(r) => r,
            Err(e) => {
                println!("({p}, {m}): {e}");
                continue;
            }
        };
        // re-integrate the located b without the ball, far past x = 10
        let probe = IntegratorConfig {
            convergence_eps: 0.0,
            x_max: 14.0,
            max_step: 0.01,
            ..cfg
        };
        let orbit = integrate_orbit(
            ProfileState {
                x: 0.0,
                h: 0.0,
                dh: result.b_k,
            },
            &params,
            &probe,
        )
        .unwrap();
        let sup = |x_hi: f64| {
            orbit
                .samples
                .iter()
                .filter(|s| s.state.x <= x_hi)
                .map(|s| (s.state.h - identity_profile(s.state.x).h).abs())
                .fold(0.0f64, f64::max)
        };
        println!(
            "({p}, {m}):   {:+.3e}    {:.3e}   {:.3e}   {:.3e}   {:.3e}",
            result.b_k - 1.0,
            result.orbit.closest_approach(),
            sup(6.0),
            sup(8.0),
            sup(10.0),
        );
    }
}
