//! JSON artifact assembly. Every artifact embeds the tool version, the
//! effective run configuration, and the problem parameters.

use crate::config::RunConfig;
use pharmonic::{Orbit, OrbitOutcome, Params, RegimeReport, ShootResult, SpectrumReport};
use serde_json::{json, Value};

pub const TOOL: &str = "pharmonic";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn header(params: Option<&Params>, config: &RunConfig) -> Value {
    json!({
        "tool": TOOL,
        "version": VERSION,
        "params": params.map(|p| json!({"p": p.p(), "m": p.m()})),
        "config": config.to_json(),
    })
}

fn merge(base: Value, extra: Value) -> Value {
    let (Value::Object(mut base), Value::Object(extra)) = (base, extra) else {
        unreachable!("artifacts are json objects");
    };
    base.extend(extra);
    Value::Object(base)
}

pub fn complex_pair(z: pharmonic::Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn window_json(p: f64, rows: &[(u32, RegimeReport, bool)], config: &RunConfig) -> Value {
    let first = &rows.first().expect("at least one m row").1;
    let rows: Vec<Value> = rows
        .iter()
        .map(|(m, r, in_window)| {
            json!({
                "m": m,
                "discriminant": r.discriminant,
                "alpha_plus": complex_pair(r.alpha_plus),
                "alpha_minus": complex_pair(r.alpha_minus),
                "regime": r.regime.as_str(),
                "in_existence_window": in_window,
            })
        })
        .collect();
    merge(
        header(None, config),
        json!({
            "p": p,
            "existence_lower": p,
            "existence_upper": first.existence_upper,
            "winding_upper": first.winding_upper,
            "rows": rows,
        }),
    )
}

pub fn outcome_json(outcome: &OrbitOutcome, orbit: &Orbit) -> Value {
    json!({
        "classification": outcome.classification.as_str(),
        "omega": outcome.omega,
        "zero_count": outcome.zero_count,
        "x_e": outcome.x_e,
        "steps": orbit.samples.len(),
        "diagnostics": orbit.diagnostics,
    })
}

pub fn shoot_json(
    params: &Params,
    outcome: &OrbitOutcome,
    orbit: &Orbit,
    profile_path: &str,
    config: &RunConfig,
) -> Value {
    merge(
        header(Some(params), config),
        merge(
            outcome_json(outcome, orbit),
            json!({ "profile": profile_path }),
        ),
    )
}

pub fn solve_json(result: &ShootResult, profile_path: &str, config: &RunConfig) -> Value {
    merge(
        header(Some(&result.params), config),
        json!({
            "k": result.k,
            "b": result.b_k,
            "bracket_width": result.bracket_width,
            "classification": result.outcome.classification.as_str(),
            "omega": result.outcome.omega,
            "zero_count": result.outcome.zero_count,
            "x_e": result.outcome.x_e,
            "k_end": result.solution.k_end,
            "energy": result.energy,
            "warnings": result.warnings,
            "profile": profile_path,
        }),
    )
}

pub fn spectrum_json(report: &SpectrumReport, config: &RunConfig) -> Value {
    let pairs: Vec<Value> = report
        .pairs
        .iter()
        .map(|e| {
            json!({
                "j": e.j,
                "lambda_hat_theorem": e.lambda_hat_theorem,
                "lambda_hat_chain": e.lambda_hat_chain,
                "lambda_hat_numeric": e.lambda_hat_numeric,
                "lambda_hat": match report.selected {
                    pharmonic::SelectedFormula::Theorem => e.lambda_hat_theorem,
                    _ => e.lambda_hat_chain,
                },
                "lambda_unscaled": e.lambda_unscaled,
                "residual_theorem": e.residual_theorem,
                "residual_chain": e.residual_chain,
            })
        })
        .collect();
    merge(
        header(Some(&report.params), config),
        json!({
            "gegenbauer_order": report.alpha,
            "selected_formula": report.selected.as_str(),
            "eigenvalues": pairs,
        }),
    )
}

pub fn error_json(params: Option<&Params>, err: &pharmonic::Error, config: &RunConfig) -> Value {
    merge(header(params, config), json!({ "error": err.to_string() }))
}

pub fn print_json(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("json serializes")
    );
}
