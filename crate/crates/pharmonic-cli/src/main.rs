use clap::{Parser, Subcommand};
use pharmonic::{
    find_bk, regime, run_orbit, spectrum_report, stability_verdict, validate_params, Params,
    ShootSpec,
};
use pharmonic_cli::artifact::{self, print_json};
use pharmonic_cli::config::RunConfig;
use pharmonic_cli::{atlas, exit_code, write_profile};
use std::path::PathBuf;

/// Numerical laboratory for rotationally symmetric p-harmonic self-maps of
/// the m-sphere.
#[derive(Parser)]
#[command(name = "pharmonic", version, about)]
struct Cli {
    /// JSON configuration file (CLI flags override its entries)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Existence/winding windows and linearization exponents for a range of m
    Window {
        #[arg(long)]
        p: f64,
        /// Smallest sphere dimension to report (default 2)
        #[arg(long)]
        m_min: Option<u32>,
        /// Largest sphere dimension to report (default: just past the winding window)
        #[arg(long)]
        m_max: Option<u32>,
    },
    /// Integrate a single b- or d-orbit and classify it
    Shoot {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        m: f64,
        /// Initial slope h'(0) of an odd orbit
        #[arg(long)]
        b: Option<f64>,
        /// Initial angle h(0) of an even orbit
        #[arg(long)]
        d: Option<f64>,
        /// Override the integration range
        #[arg(long)]
        x_max: Option<f64>,
        /// Profile output path (default <output_dir>/orbit.<ext>)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate the k-th shooting parameter and reconstruct the solution
    Solve {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        m: f64,
        #[arg(long)]
        k: u32,
        /// Bisection width target on b (default from config)
        #[arg(long)]
        tol: Option<f64>,
        /// Profile output path (default <output_dir>/solution.<ext>)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep an integer (p, m) grid; JSON Lines on stdout
    Atlas {
        /// Inclusive p range, lo:hi
        #[arg(long)]
        p_range: String,
        /// Inclusive m range, lo:hi
        #[arg(long)]
        m_range: String,
        #[arg(long, default_value_t = 2)]
        k_max: u32,
        /// Worker threads (output bytes are independent of this)
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Jacobi spectrum of the identity map
    Spectrum {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        m: f64,
        #[arg(long)]
        j_max: Option<u32>,
        /// Also run the collocation eigensolver
        #[arg(long)]
        numeric: bool,
    },
    /// Stability verdict for the identity map
    Stability {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        m: f64,
    },
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

fn load_params(p: f64, m: f64) -> Result<Params, i32> {
    validate_params(p, m).map_err(|e| {
        eprintln!("{e}");
        2
    })
}

fn run(cli: Cli) -> i32 {
    let mut config = match RunConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    if let Err(e) = config.validate() {
        eprintln!("{e}");
        return 2;
    }

    match cli.command {
        Command::Window { p, m_min, m_max } => {
            if !(p.is_finite() && p >= 2.0) {
                eprintln!("p must be ≥ 2");
                return 2;
            }
            let lo = m_min.unwrap_or(2).max(2);
            let hi = m_max
                .unwrap_or_else(|| (pharmonic::model::winding_upper(p).ceil() as u32 + 2).max(lo));
            if hi < lo {
                eprintln!("m_max must be ≥ m_min");
                return 2;
            }
            let rows: Vec<_> = (lo..=hi)
                .map(|m| {
                    let params = Params::new(p, m).expect("validated above");
                    (m, regime(&params), pharmonic::in_existence_window(&params))
                })
                .collect();
            print_json(&artifact::window_json(p, &rows, &config));
            0
        }

        Command::Shoot {
            p,
            m,
            b,
            d,
            x_max,
            out,
        } => {
            let params = match load_params(p, m) {
                Ok(p) => p,
                Err(code) => return code,
            };
            if let Some(x) = x_max {
                config.x_max = x;
            }
            if let Err(e) = config.validate() {
                eprintln!("{e}");
                return 2;
            }
            let spec = match (b, d) {
                (Some(b), None) => ShootSpec::b_orbit(b),
                (None, Some(d)) => ShootSpec::d_orbit(d),
                _ => {
                    eprintln!("exactly one of --b or --d is required");
                    return 2;
                }
            };
            let spec = match spec {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{e}");
                    return 2;
                }
            };
            match run_orbit(&spec, &params, &config.integrator()) {
                Ok((orbit, outcome)) => {
                    let path = match write_profile(&orbit, out.as_deref(), "orbit", &config) {
                        Ok(p) => p,
                        Err(e) => {
                            eprintln!("{e}");
                            return 3;
                        }
                    };
                    print_json(&artifact::shoot_json(
                        &params, &outcome, &orbit, &path, &config,
                    ));
                    0
                }
                Err(e) => {
                    print_json(&artifact::error_json(Some(&params), &e, &config));
                    exit_code(&e)
                }
            }
        }

        Command::Solve { p, m, k, tol, out } => {
            let params = match load_params(p, m) {
                Ok(p) => p,
                Err(code) => return code,
            };
            if k < 1 {
                eprintln!("k must be ≥ 1");
                return 2;
            }
            if let Some(t) = tol {
                config.b_tol = t;
            }
            if let Err(e) = config.validate() {
                eprintln!("{e}");
                return 2;
            }
            match find_bk(&params, k, config.b_tol, &config.integrator()) {
                Ok(result) => {
                    let path =
                        match write_profile(&result.orbit, out.as_deref(), "solution", &config) {
                            Ok(p) => p,
                            Err(e) => {
                                eprintln!("{e}");
                                return 3;
                            }
                        };
                    print_json(&artifact::solve_json(&result, &path, &config));
                    0
                }
                Err(e) => {
                    print_json(&artifact::error_json(Some(&params), &e, &config));
                    exit_code(&e)
                }
            }
        }

        Command::Atlas {
            p_range,
            m_range,
            k_max,
            jobs,
        } => {
            let (p_range, m_range) =
                match (atlas::parse_range(&p_range), atlas::parse_range(&m_range)) {
                    (Ok(p), Ok(m)) => (p, m),
                    (Err(e), _) | (_, Err(e)) => {
                        eprintln!("{e}");
                        return 2;
                    }
                };
            if p_range.0 < 2 || m_range.0 < 2 {
                eprintln!("p and m ranges must start at 2 or above");
                return 2;
            }
            print!("{}", atlas::run(p_range, m_range, k_max, jobs, &config));
            0
        }

        Command::Spectrum {
            p,
            m,
            j_max,
            numeric,
        } => {
            let params = match load_params(p, m) {
                Ok(p) => p,
                Err(code) => return code,
            };
            let j_max = j_max.unwrap_or(config.j_max).max(1);
            match spectrum_report(&params, j_max, numeric) {
                Ok(report) => {
                    print_json(&artifact::spectrum_json(&report, &config));
                    0
                }
                Err(e) => {
                    print_json(&artifact::error_json(Some(&params), &e, &config));
                    exit_code(&e)
                }
            }
        }

        Command::Stability { p, m } => {
            let params = match load_params(p, m) {
                Ok(p) => p,
                Err(code) => return code,
            };
            match stability_verdict(&params, config.j_max.max(3)) {
                Ok(verdict) => {
                    let mut value = artifact::header(Some(&params), &config);
                    value
                        .as_object_mut()
                        .unwrap()
                        .insert("verdict".into(), serde_json::json!(verdict.as_str()));
                    print_json(&value);
                    0
                }
                Err(e) => {
                    print_json(&artifact::error_json(Some(&params), &e, &config));
                    exit_code(&e)
                }
            }
        }
    }
}
