//! Serialization of run results. Every float is rounded to 15 significant
//! digits and then written in its shortest round-trip form, so identical
//! runs produce identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use zeta_moments::moments::{PolyMomentResult, ScanRow};
use zeta_moments::verify::VerifyResult;
use zeta_moments::zeta_line::MomentReport;
use zeta_moments::QuadSpec;

/// `x` rounded to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Shortest text that parses back to `round15(x)`.
pub fn fmt15(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{:?}", round15(x))
}

fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(f) = n.as_f64().filter(|_| n.is_f64()) {
                *v = serde_json::Number::from_f64(round15(f))
                    .map(Value::Number)
                    .unwrap_or(Value::Null);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Pretty JSON with every float rounded by [`round15`].
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report types serialize");
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("json value serializes");
    s.push('\n');
    s
}

fn spec_header() -> [&'static str; 5] {
    [
        "abs_tol",
        "rel_tol",
        "max_depth",
        "tail_cutoff",
        "series_tol",
    ]
}

fn spec_cells(spec: &QuadSpec) -> [String; 5] {
    [
        fmt15(spec.abs_tol),
        fmt15(spec.rel_tol),
        spec.max_depth.to_string(),
        fmt15(spec.tail_cutoff),
        fmt15(spec.series_tol),
    ]
}

fn opt_cell(x: Option<f64>) -> String {
    x.map(fmt15).unwrap_or_default()
}

fn csv_string(header: Vec<String>, rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory csv write");
    for row in rows {
        w.write_record(&row).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv output is utf-8")
}

/// A moment evaluation as emitted by `moment`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentOutput {
    pub k: u32,
    pub delta: f64,
    pub method: String,
    pub value: f64,
    pub err_estimate: f64,
    pub breakdown: BTreeMap<String, [f64; 2]>,
    pub wall_time_ms: f64,
    pub spec: QuadSpec,
}

impl MomentOutput {
    pub fn new(report: &MomentReport, wall_time_ms: f64, spec: QuadSpec) -> Self {
        Self {
            k: report.k,
            delta: report.delta,
            method: report.method.to_string(),
            value: report.value,
            err_estimate: report.err_estimate,
            breakdown: report
                .breakdown
                .iter()
                .map(|(k, c)| (k.clone(), [c.re, c.im]))
                .collect(),
            wall_time_ms,
            spec,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut header: Vec<String> = [
            "k",
            "delta",
            "method",
            "value",
            "err_estimate",
            "wall_time_ms",
        ]
        .map(String::from)
        .to_vec();
        header.extend(spec_header().map(String::from));
        let mut row = vec![
            self.k.to_string(),
            fmt15(self.delta),
            self.method.clone(),
            fmt15(self.value),
            fmt15(self.err_estimate),
            fmt15(self.wall_time_ms),
        ];
        row.extend(spec_cells(&self.spec));
        for (name, [re, im]) in &self.breakdown {
            header.push(format!("{name}_re"));
            header.push(format!("{name}_im"));
            row.push(fmt15(*re));
            row.push(fmt15(*im));
        }
        csv_string(header, vec![row])
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "M_{}(delta = {}) by {}",
            2 * self.k,
            fmt15(self.delta),
            self.method
        );
        let _ = writeln!(s, "  value         {}", fmt15(self.value));
        let _ = writeln!(s, "  err_estimate  {}", fmt15(self.err_estimate));
        let _ = writeln!(s, "  wall_time_ms  {}", fmt15(self.wall_time_ms));
        let _ = writeln!(s, "  breakdown:");
        for (name, [re, im]) in &self.breakdown {
            let _ = writeln!(s, "    {name:<16} {:>24} {:>24}", fmt15(*re), fmt15(*im));
        }
        s.push_str(&spec_text(&self.spec));
        s
    }
}

fn spec_text(spec: &QuadSpec) -> String {
    let cells = spec_cells(spec);
    let parts: Vec<String> = spec_header()
        .iter()
        .zip(cells.iter())
        .map(|(h, c)| format!("{h}={c}"))
        .collect();
    format!("  spec: {}\n", parts.join(" "))
}

/// A suite run as emitted by `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub suite: String,
    pub passed: usize,
    pub failed: usize,
    pub rows: Vec<VerifyResult>,
    pub spec: QuadSpec,
}

impl VerifyOutput {
    pub fn new(suite: &str, rows: Vec<VerifyResult>, spec: QuadSpec) -> Self {
        let passed = rows.iter().filter(|r| r.pass).count();
        Self {
            suite: suite.to_string(),
            passed,
            failed: rows.len() - passed,
            rows,
            spec,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn to_csv(&self) -> String {
        let mut header: Vec<String> = [
            "identity",
            "lhs_re",
            "lhs_im",
            "rhs_re",
            "rhs_im",
            "abs_diff",
            "rel_diff",
            "tolerance",
            "kind",
            "pass",
            "details",
        ]
        .map(String::from)
        .to_vec();
        header.extend(spec_header().map(String::from));
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let details: Vec<String> = r
                    .details
                    .iter()
                    .map(|(k, v)| format!("{k}={}", fmt15(*v)))
                    .collect();
                let mut row = vec![
                    r.identity.clone(),
                    fmt15(r.lhs.re),
                    fmt15(r.lhs.im),
                    fmt15(r.rhs.re),
                    fmt15(r.rhs.im),
                    fmt15(r.abs_diff),
                    fmt15(r.rel_diff),
                    fmt15(r.tolerance),
                    serde_json::to_value(r.kind)
                        .ok()
                        .and_then(|v| v.as_str().map(String::from))
                        .unwrap_or_default(),
                    r.pass.to_string(),
                    details.join(";"),
                ];
                row.extend(spec_cells(&self.spec));
                row
            })
            .collect();
        csv_string(header, rows)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "suite {}: {} passed, {} failed",
            self.suite, self.passed, self.failed
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "  [{}] {}\n        lhs {} {:+}i  rhs {} {:+}i  |diff| {}  tol {} ({:?})",
                if r.pass { "pass" } else { "FAIL" },
                r.identity,
                fmt15(r.lhs.re),
                round15(r.lhs.im),
                fmt15(r.rhs.re),
                round15(r.rhs.im),
                fmt15(r.abs_diff),
                fmt15(r.tolerance),
                r.kind,
            );
            for (k, v) in &r.details {
                let _ = writeln!(s, "        {k:<16} {}", fmt15(*v));
            }
        }
        s.push_str(&spec_text(&self.spec));
        s
    }
}

/// A δ-scan as emitted by `scan`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOutput {
    pub k: u32,
    pub rows: Vec<ScanRow>,
    pub spec: QuadSpec,
}

fn remainder_columns(k: u32) -> usize {
    match k {
        3 => 5,
        2 => 2,
        _ => 1,
    }
}

impl ScanOutput {
    pub fn to_csv(&self) -> String {
        let n = remainder_columns(self.k);
        let mut header: Vec<String> = vec!["delta".into(), "value".into(), "main".into()];
        header.extend((1..=n).map(|j| format!("r{j}")));
        header.extend(["ratio_keating_snaith", "remainder_fraction", "error"].map(String::from));
        header.extend(spec_header().map(String::from));
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut row = vec![fmt15(r.delta), opt_cell(r.value), opt_cell(r.main)];
                row.extend((0..n).map(|j| opt_cell(r.remainders.get(j).copied())));
                row.push(opt_cell(r.ratio_keating_snaith));
                row.push(opt_cell(r.remainder_fraction));
                row.push(r.error.clone().unwrap_or_default());
                row.extend(spec_cells(&self.spec));
                row
            })
            .collect();
        csv_string(header, rows)
    }

    /// Inverse of [`ScanOutput::to_csv`] up to the 15-digit rounding.
    pub fn from_csv(k: u32, text: &str) -> Result<Self, String> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let header = rdr.headers().map_err(|e| e.to_string())?.clone();
        let col = |name: &str| {
            header
                .iter()
                .position(|h| h == name)
                .ok_or(format!("missing column {name}"))
        };
        let num = |cell: &str| -> Result<Option<f64>, String> {
            if cell.is_empty() {
                Ok(None)
            } else {
                cell.parse::<f64>()
                    .map(Some)
                    .map_err(|e| format!("{cell:?}: {e}"))
            }
        };
        let n = remainder_columns(k);
        let (c_delta, c_value, c_main) = (col("delta")?, col("value")?, col("main")?);
        let c_r: Vec<usize> = (1..=n)
            .map(|j| col(&format!("r{j}")))
            .collect::<Result<_, _>>()?;
        let (c_ratio, c_frac, c_err) = (
            col("ratio_keating_snaith")?,
            col("remainder_fraction")?,
            col("error")?,
        );
        let c_spec: Vec<usize> = spec_header()
            .iter()
            .map(|h| col(h))
            .collect::<Result<_, _>>()?;
        let mut rows = Vec::new();
        let mut spec = QuadSpec::default();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            let mut remainders = Vec::new();
            for &c in &c_r {
                if let Some(x) = num(&rec[c])? {
                    remainders.push(x);
                }
            }
            let err = &rec[c_err];
            rows.push(ScanRow {
                delta: num(&rec[c_delta])?.ok_or("empty delta")?,
                value: num(&rec[c_value])?,
                main: num(&rec[c_main])?,
                remainders,
                ratio_keating_snaith: num(&rec[c_ratio])?,
                remainder_fraction: num(&rec[c_frac])?,
                error: (!err.is_empty()).then(|| err.to_string()),
            });
            let cell = |i: usize| {
                num(&rec[c_spec[i]]).and_then(|x| x.ok_or("empty spec cell".to_string()))
            };
            spec = QuadSpec {
                abs_tol: cell(0)?,
                rel_tol: cell(1)?,
                max_depth: rec[c_spec[2]]
                    .parse()
                    .map_err(|e| format!("max_depth: {e}"))?,
                tail_cutoff: cell(3)?,
                series_tol: cell(4)?,
            };
        }
        Ok(Self { k, rows, spec })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scan k={} ({} rows)", self.k, self.rows.len());
        let _ = writeln!(
            s,
            "  {:>10} {:>24} {:>24} {:>16} {:>16}",
            "delta", "value", "main", "ratio", "rem_fraction"
        );
        for r in &self.rows {
            if let Some(e) = &r.error {
                let _ = writeln!(s, "  {:>10} error: {e}", fmt15(r.delta));
                continue;
            }
            let _ = writeln!(
                s,
                "  {:>10} {:>24} {:>24} {:>16} {:>16}",
                fmt15(r.delta),
                opt_cell(r.value),
                opt_cell(r.main),
                opt_cell(r.ratio_keating_snaith),
                opt_cell(r.remainder_fraction)
            );
            let rem: Vec<String> = r.remainders.iter().map(|x| fmt15(*x)).collect();
            let _ = writeln!(s, "  {:>10} remainders: {}", "", rem.join(", "));
        }
        s.push_str(&spec_text(&self.spec));
        s
    }
}

/// The closed-form table emitted by `table`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableOutput {
    pub rows: Vec<PolyMomentResult>,
    pub spec: QuadSpec,
}

impl TableOutput {
    pub fn to_csv(&self) -> String {
        let mut header: Vec<String> = ["n", "lhs", "lhs_err", "rhs", "abs_diff", "t_coeffs"]
            .map(String::from)
            .to_vec();
        header.extend(spec_header().map(String::from));
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let coeffs: Vec<String> = r.t_coeffs.iter().map(|t| t.to_string()).collect();
                let mut row = vec![
                    r.n.to_string(),
                    fmt15(r.lhs),
                    fmt15(r.lhs_err),
                    fmt15(r.rhs),
                    fmt15((r.lhs - r.rhs).abs()),
                    coeffs.join(";"),
                ];
                row.extend(spec_cells(&self.spec));
                row
            })
            .collect();
        csv_string(header, rows)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "  {:>2} {:>24} {:>24} {:>12}  T_(2N,j), j = 2..2N",
            "N", "lhs", "rhs", "|diff|"
        );
        for r in &self.rows {
            let coeffs: Vec<String> = r.t_coeffs.iter().map(|t| t.to_string()).collect();
            let _ = writeln!(
                s,
                "  {:>2} {:>24} {:>24} {:>12}  {}",
                r.n,
                fmt15(r.lhs),
                fmt15(r.rhs),
                fmt15((r.lhs - r.rhs).abs()),
                coeffs.join(" ")
            );
        }
        s.push_str(&spec_text(&self.spec));
        s
    }
}
