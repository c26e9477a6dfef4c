//! Parameter sweep over an integer (p, m) grid: one JSON line per
//! (p, m, k), preceded by a header line. Cells are solved by a bounded
//! worker pool sharing nothing; lines are emitted in (p, m, k) order, so
//! the output bytes do not depend on the job count.

use crate::artifact::{TOOL, VERSION};
use crate::config::RunConfig;
use pharmonic::{find_bk, in_existence_window, regime, Params};
use serde_json::json;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub fn parse_range(text: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| format!("range must be lo:hi, got {text:?}"))?;
    let lo: u32 = lo
        .parse()
        .map_err(|e| format!("bad range start {lo:?}: {e}"))?;
    let hi: u32 = hi
        .parse()
        .map_err(|e| format!("bad range end {hi:?}: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {text:?}"));
    }
    Ok((lo, hi))
}

fn cell_lines(p: u32, m: u32, k_max: u32, config: &RunConfig) -> Vec<String> {
    let mut lines = Vec::with_capacity(k_max as usize);
    let params = match Params::new(f64::from(p), m) {
        Ok(params) => params,
        Err(e) => {
            let line = json!({"p": p, "m": m, "error": e.to_string()});
            return vec![serde_json::to_string(&line).unwrap()];
        }
    };
    let report = regime(&params);
    let integrator = config.integrator();
    for k in 1..=k_max {
        let base = json!({
            "p": p,
            "m": m,
            "k": k,
            "regime": report.regime.as_str(),
            "in_window": in_existence_window(&params),
        });
        let line = match find_bk(&params, k, config.b_tol, &integrator) {
            Ok(result) => {
                let mut obj = base;
                let extra = json!({
                    "b": result.b_k,
                    "bracket_width": result.bracket_width,
                    "omega": result.outcome.omega,
                    "zero_count": result.outcome.zero_count,
                    "k_end": result.solution.k_end,
                    "energy": result.energy,
                    "warnings": result.warnings,
                });
                obj.as_object_mut()
                    .unwrap()
                    .extend(extra.as_object().unwrap().clone());
                obj
            }
            Err(e) => {
                let mut obj = base;
                obj.as_object_mut()
                    .unwrap()
                    .insert("error".into(), json!(e.to_string()));
                obj
            }
        };
        lines.push(serde_json::to_string(&line).unwrap());
    }
    lines
}

/// The full JSONL text for the sweep.
pub fn run(
    p_range: (u32, u32),
    m_range: (u32, u32),
    k_max: u32,
    jobs: usize,
    config: &RunConfig,
) -> String {
    let cells: Vec<(u32, u32)> = (p_range.0..=p_range.1)
        .flat_map(|p| (m_range.0..=m_range.1).map(move |m| (p, m)))
        .collect();
    let results: Mutex<Vec<Option<Vec<String>>>> = Mutex::new(vec![None; cells.len()]);
    let next = AtomicUsize::new(0);
    let jobs = jobs.max(1).min(cells.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cells.len() {
                    break;
                }
                let (p, m) = cells[i];
                let lines = cell_lines(p, m, k_max, config);
                results.lock().unwrap()[i] = Some(lines);
            });
        }
    });

    let header = json!({
        "tool": TOOL,
        "version": VERSION,
        "config": config.to_json(),
        "p_range": [p_range.0, p_range.1],
        "m_range": [m_range.0, m_range.1],
        "k_max": k_max,
    });
    let mut out = serde_json::to_string(&header).unwrap();
    out.push('\n');
    for lines in results.into_inner().unwrap() {
        for line in lines.expect("every cell computed") {
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("2:4").unwrap(), (2, 4));
        assert!(parse_range("4:2").is_err());
        assert!(parse_range("2").is_err());
        assert!(parse_range("a:b").is_err());
    }
}
