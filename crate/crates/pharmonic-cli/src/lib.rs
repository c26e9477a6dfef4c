//! Command-line surface for the p-harmonic self-map laboratory: regime
//! windows, single orbits, located solutions, parameter atlases, Jacobi
//! spectra, and stability verdicts.

pub mod artifact;
pub mod atlas;
pub mod config;
pub mod csvio;

use config::{ProfileFormat, RunConfig};
use pharmonic::{Error as LibError, Orbit};
use std::path::{Path, PathBuf};

/// Stable exit codes: 0 success, 2 usage, 3 numeric failure, 4 no solution.
pub fn exit_code(err: &LibError) -> i32 {
    match err {
        LibError::InvalidInput(_) => 2,
        LibError::BracketNotFound { .. } => 4,
        _ => 3,
    }
}

/// Write the orbit profile in the configured format; returns the path as
/// printed into the JSON artifact.
pub fn write_profile(
    orbit: &Orbit,
    out: Option<&Path>,
    stem: &str,
    config: &RunConfig,
) -> Result<String, String> {
    let path: PathBuf = match out {
        Some(p) => p.to_path_buf(),
        None => {
            let ext = match config.format {
                ProfileFormat::Csv => "csv",
                ProfileFormat::Json => "json",
            };
            config.output_dir.join(format!("{stem}.{ext}"))
        }
    };
    match config.format {
        ProfileFormat::Csv => csvio::write_profile_csv(&path, orbit)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        ProfileFormat::Json => {
            let text =
                serde_json::to_string_pretty(&csvio::profile_json(orbit)).expect("json serializes");
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir)
                        .map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
                }
            }
            std::fs::write(&path, text)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        }
    }
    Ok(path.display().to_string())
}

/// Recompute outcome fields from profile CSV rows; the artifact invariant
/// is that these agree with the outcome JSON to 1e-9.
pub fn outcome_from_rows(rows: &[csvio::CsvRow]) -> Option<(f64, u32, f64)> {
    let first = rows.first()?;
    let last = rows.last()?;
    let omega = -(last.theta - first.theta) / std::f64::consts::PI;
    let mut zeros = 0u32;
    for w in rows.windows(2) {
        if (w[0].h != 0.0 && w[0].h * w[1].h < 0.0) || (w[1].h == 0.0 && w[0].h != 0.0) {
            zeros += 1;
        }
    }
    Some((omega, zeros, last.x))
}
