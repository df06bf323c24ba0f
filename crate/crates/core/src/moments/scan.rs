//! δ-scans of the formula routes with Keating–Snaith-style ratios.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::QuadSpec;
use crate::zeta_line::{Guards, MomentReport};

use super::formulas::{formula_k1_opts, formula_k2_opts, formula_k3_opts};

/// One grid point of a scan. On failure only `delta` and `error` are set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub delta: f64,
    pub value: Option<f64>,
    pub main: Option<f64>,
    /// k = 1: the part of the value outside the main term; k = 2: `R̃₁, R̃₂`;
    /// k = 3: `|R₁|, …, |R₅|`.
    pub remainders: Vec<f64>,
    /// `value·δ / log(1/δ)^{k²}`, absent at `δ = 1`.
    pub ratio_keating_snaith: Option<f64>,
    /// `Σ|remainders| / |main|`.
    pub remainder_fraction: Option<f64>,
    pub error: Option<String>,
}

fn part(report: &MomentReport, name: &str) -> f64 {
    report.breakdown.get(name).map(|c| c.re).unwrap_or(f64::NAN)
}

fn row_for(k: u32, delta: f64, spec: &QuadSpec, guards: Guards) -> Result<ScanRow> {
    let (report, main, remainders) = match k {
        1 => {
            let r = formula_k1_opts(delta, spec, guards)?;
            let (m, rest) = (part(&r, "main"), part(&r, "remainder"));
            (r, m, vec![rest])
        }
        2 => {
            let r = formula_k2_opts(delta, spec, guards)?;
            let m = part(&r, "main");
            let rest = vec![part(&r, "r1_tilde"), part(&r, "r2_tilde")];
            (r, m, rest)
        }
        3 => {
            let (r, parts) = formula_k3_opts(delta, spec, guards)?;
            let rest = parts.remainders.iter().map(|c| c.norm()).collect();
            (r, parts.main_term, rest)
        }
        _ => return Err(Error::Range(format!("scan supports k in 1..=3, got {k}"))),
    };
    let log_inv = (1.0 / delta).ln();
    let ratio = (log_inv != 0.0).then(|| report.value * delta / log_inv.powi((k * k) as i32));
    let fraction = remainders.iter().map(|r| r.abs()).sum::<f64>() / main.abs();
    Ok(ScanRow {
        delta,
        value: Some(report.value),
        main: Some(main),
        remainders,
        ratio_keating_snaith: ratio,
        remainder_fraction: Some(fraction),
        error: None,
    })
}

/// Evaluates the formula route for `k` at each δ, in grid order. Failures are
/// recorded in the row and the scan continues.
pub fn scan_delta(k: u32, delta_grid: &[f64], spec: &QuadSpec) -> Result<Vec<ScanRow>> {
    scan_delta_opts(k, delta_grid, spec, Guards::Enforce)
}

pub fn scan_delta_opts(
    k: u32,
    delta_grid: &[f64],
    spec: &QuadSpec,
    guards: Guards,
) -> Result<Vec<ScanRow>> {
    if !(1..=3).contains(&k) {
        return Err(Error::Range(format!("scan supports k in 1..=3, got {k}")));
    }
    spec.validate()?;
    if delta_grid.is_empty() {
        return Err(Error::Range("scan needs at least one δ".into()));
    }
    let increasing = delta_grid.windows(2).all(|w| w[1] > w[0]);
    let decreasing = delta_grid.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::Range(format!(
            "δ grid must be strictly monotone, got {delta_grid:?}"
        )));
    }
    Ok(delta_grid
        .iter()
        .map(|&delta| {
            row_for(k, delta, spec, guards).unwrap_or_else(|e| ScanRow {
                delta,
                value: None,
                main: None,
                remainders: Vec::new(),
                ratio_keating_snaith: None,
                remainder_fraction: None,
                error: Some(e.to_string()),
            })
        })
        .collect())
}
