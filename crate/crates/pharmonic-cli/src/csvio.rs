//! Profile CSV: one row per accepted step, fixed header
//! `x,h,dh,A,W,theta,rho,t,r`, floats with 17 significant digits, LF line
//! endings.

use pharmonic::{t_of_x, Orbit};
use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::Path;

pub const CSV_HEADER: &str = "x,h,dh,A,W,theta,rho,t,r";

pub fn profile_csv(orbit: &Orbit) -> String {
    let mut out = String::with_capacity(orbit.samples.len() * 180 + 64);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in &orbit.samples {
        let row = [
            s.state.x,
            s.state.h,
            s.state.dh,
            s.a_val,
            s.w_val,
            s.theta,
            s.rho,
            t_of_x(s.state.x),
            s.state.h + FRAC_PI_2,
        ];
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            out.push_str(&format!("{v:.16e}"));
            first = false;
        }
        out.push('\n');
    }
    out
}

pub fn write_profile_csv(path: &Path, orbit: &Orbit) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(profile_csv(orbit).as_bytes())
}

/// Samples as a JSON array, for `format = json` profile artifacts.
pub fn profile_json(orbit: &Orbit) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = orbit
        .samples
        .iter()
        .map(|s| {
            serde_json::json!({
                "x": s.state.x,
                "h": s.state.h,
                "dh": s.state.dh,
                "A": s.a_val,
                "W": s.w_val,
                "theta": s.theta,
                "rho": s.rho,
                "t": t_of_x(s.state.x),
                "r": s.state.h + FRAC_PI_2,
            })
        })
        .collect();
    serde_json::Value::Array(rows)
}

#[derive(Debug, Clone, Copy)]
pub struct CsvRow {
    pub x: f64,
    pub h: f64,
    pub dh: f64,
    pub a: f64,
    pub w: f64,
    pub theta: f64,
    pub rho: f64,
    pub t: f64,
    pub r: f64,
}

pub fn read_profile_csv(text: &str) -> Result<Vec<CsvRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(format!("bad csv header: {other:?}")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1)))
            .collect::<Result<_, _>>()?;
        if fields.len() != 9 {
            return Err(format!(
                "row {}: expected 9 fields, got {}",
                i + 1,
                fields.len()
            ));
        }
        rows.push(CsvRow {
            x: fields[0],
            h: fields[1],
            dh: fields[2],
            a: fields[3],
            w: fields[4],
            theta: fields[5],
            rho: fields[6],
            t: fields[7],
            r: fields[8],
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_pinned() {
        assert_eq!(CSV_HEADER, "x,h,dh,A,W,theta,rho,t,r");
    }

    #[test]
    fn floats_round_trip_exactly() {
        let v = std::f64::consts::PI / 7.0;
        let s = format!("{v:.16e}");
        assert_eq!(s.parse::<f64>().unwrap(), v);
    }
}
