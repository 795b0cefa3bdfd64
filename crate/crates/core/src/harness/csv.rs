//! SER curve CSV files.

use std::fmt::Write as _;
use std::path::Path;

use crate::pipelines::{SerCurve, SerPoint};
use crate::{Error, Result};

pub const SER_HEADER: &str = "es_n0_db,trials,errors,ser,ci_low,ci_high";

/// Plain decimal with six significant digits (`0.000123400`, `0.500000`).
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.5}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (5 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn write_ser_csv(curve: &SerCurve) -> String {
    let mut out = String::from(SER_HEADER);
    out.push('\n');
    for p in &curve.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            p.es_n0_db,
            p.trials,
            p.errors,
            sig6(p.ser),
            sig6(p.ci_low),
            sig6(p.ci_high)
        );
    }
    out
}

/// Parses a CSV written by [`write_ser_csv`]; `path` is used in errors.
pub fn read_ser_csv(text: &str, path: &Path) -> Result<SerCurve> {
    let err = |msg: String| Error::Schema {
        path: path.to_path_buf(),
        msg,
    };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == SER_HEADER => {}
        Some(h) => return Err(err(format!("header `{h}` != `{SER_HEADER}`"))),
        None => return Err(err("empty file".into())),
    }
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(err(format!(
                "line {row}: expected 6 fields, got {}",
                fields.len()
            )));
        }
        let real = |j: usize| -> Result<f64> {
            fields[j]
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("line {row}: bad number `{}`", fields[j])))
        };
        let count = |j: usize| -> Result<u64> {
            fields[j]
                .trim()
                .parse::<u64>()
                .map_err(|_| err(format!("line {row}: bad count `{}`", fields[j])))
        };
        let (es_n0_db, trials, errors) = (real(0)?, count(1)?, count(2)?);
        let (ser, ci_low, ci_high) = (real(3)?, real(4)?, real(5)?);
        if trials == 0 || errors > trials {
            return Err(err(format!(
                "line {row}: need 0 <= errors <= trials, trials > 0"
            )));
        }
        if !(0.0..=1.0).contains(&ser) || ci_low > ser || ser > ci_high {
            return Err(err(format!("line {row}: bounds do not bracket ser")));
        }
        points.push(SerPoint {
            es_n0_db,
            trials,
            errors,
            ser,
            ci_low,
            ci_high,
        });
    }
    if points.is_empty() {
        return Err(err("no data rows".into()));
    }
    Ok(SerCurve { points })
}

/// Per-iteration mean training loss.
pub fn write_loss_csv(losses: &[f64]) -> String {
    let mut out = String::from("iteration,loss\n");
    for (i, l) in losses.iter().enumerate() {
        let _ = writeln!(out, "{i},{l:.10e}");
    }
    out
}

/// Learned constellation points, one row per symbol index.
pub fn write_constellation_csv(points: &[num_complex::Complex64]) -> String {
    let mut out = String::from("symbol,re,im\n");
    for (i, p) in points.iter().enumerate() {
        let _ = writeln!(out, "{i},{:.16e},{:.16e}", p.re, p.im);
    }
    out
}
