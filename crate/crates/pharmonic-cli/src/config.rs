//! Run configuration: defaults, JSON config file, CLI overrides.
//!
//! Precedence is CLI flag > config file > default, and the effective
//! configuration is echoed into every artifact.

use pharmonic::IntegratorConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub x_max: f64,
    pub max_steps: usize,
    pub event_tol: f64,
    pub convergence_eps: f64,
    pub b_tol: f64,
    pub j_max: u32,
    pub output_dir: PathBuf,
    pub format: ProfileFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        let integrator = IntegratorConfig::default();
        Self {
            rel_tol: integrator.rel_tol,
            abs_tol: integrator.abs_tol,
            x_max: integrator.x_max,
            max_steps: integrator.max_steps,
            event_tol: integrator.event_tol,
            convergence_eps: integrator.convergence_eps,
            b_tol: 1e-9,
            j_max: 6,
            output_dir: PathBuf::from("."),
            format: ProfileFormat::Csv,
        }
    }
}

/// Partial configuration as read from `--config <file>`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub x_max: Option<f64>,
    pub max_steps: Option<usize>,
    pub event_tol: Option<f64>,
    pub convergence_eps: Option<f64>,
    pub b_tol: Option<f64>,
    pub j_max: Option<u32>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<ProfileFormat>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let mut config = RunConfig::default();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            let file: FileConfig = serde_json::from_str(&text)
                .map_err(|e| format!("invalid config {}: {e}", path.display()))?;
            config.apply(file);
        }
        Ok(config)
    }

    pub fn apply(&mut self, file: FileConfig) {
        if let Some(v) = file.rel_tol {
            self.rel_tol = v;
        }
        if let Some(v) = file.abs_tol {
            self.abs_tol = v;
        }
        if let Some(v) = file.x_max {
            self.x_max = v;
        }
        if let Some(v) = file.max_steps {
            self.max_steps = v;
        }
        if let Some(v) = file.event_tol {
            self.event_tol = v;
        }
        if let Some(v) = file.convergence_eps {
            self.convergence_eps = v;
        }
        if let Some(v) = file.b_tol {
            self.b_tol = v;
        }
        if let Some(v) = file.j_max {
            self.j_max = v;
        }
        if let Some(v) = file.output_dir {
            self.output_dir = v;
        }
        if let Some(v) = file.format {
            self.format = v;
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("x_max", self.x_max),
            ("event_tol", self.event_tol),
            ("b_tol", self.b_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if self.convergence_eps < 0.0 || !self.convergence_eps.is_finite() {
            return Err(format!(
                "convergence_eps must be ≥ 0, got {}",
                self.convergence_eps
            ));
        }
        if self.x_max <= 1.0 {
            return Err(format!("x_max must exceed 1, got {}", self.x_max));
        }
        if self.max_steps == 0 {
            return Err("max_steps must be positive".into());
        }
        Ok(())
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            x_max: self.x_max,
            max_steps: self.max_steps,
            event_tol: self.event_tol,
            convergence_eps: self.convergence_eps,
            max_step: f64::INFINITY,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
