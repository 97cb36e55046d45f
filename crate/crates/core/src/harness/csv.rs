use std::fs;
use std::path::Path;

use super::SummaryStats;
use crate::error::{Error, Result};

const HEADER: &str = "iteration,mean_best_fitness";

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros removed,
/// exponent form outside `[1e-4, 1e17)`.
pub fn format_g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exponent) = sci.split_once('e').expect("exponent form");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if !(-4..17).contains(&exponent) {
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exponent.abs())
    } else {
        let decimals = (16 - exponent) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn render_csv(stats: &SummaryStats) -> String {
    let mut out = String::with_capacity(16 + stats.mean_curve.len() * 28);
    out.push_str(HEADER);
    out.push('\n');
    for (i, v) in stats.mean_curve.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, format_g17(*v)));
    }
    out
}

/// Writes the mean convergence curve to `path`.
pub fn write_csv(stats: &SummaryStats, path: &Path) -> Result<()> {
    fs::write(path, render_csv(stats)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
