//! Identity checks: each [`VerifyResult`] compares two independently
//! computed sides of one identity.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::autocorr::{
    a_continuation, a_cutplane, b_conv, b_conv_fourier, b_fourier, b_integral, mellin_a_numeric,
    q_function,
};
use crate::eisenstein::{check_feq_iii, psi_from_a, psi_upper};
use crate::error::{Error, Result};
use crate::moments::{
    closed_form_poly, formula_k1, formula_k2, formula_k3, m4_single_integral, multi_integral_form,
};
use crate::numerics::QuadSpec;
use crate::zeta_line::moment_direct;

/// How the discrepancy is compared with the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceKind {
    /// `|lhs − rhs| <= tol`
    Absolute,
    /// `|lhs − rhs| <= tol·|rhs|`
    Relative,
    /// `|lhs − rhs| <= tol·(1 + |rhs|)`
    Scaled,
}

/// One identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyResult {
    pub identity: String,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_diff: f64,
    pub rel_diff: f64,
    pub tolerance: f64,
    pub kind: ToleranceKind,
    pub pass: bool,
    /// Named intermediate quantities, e.g. the parts of a moment formula.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
}

impl VerifyResult {
    pub fn new(
        identity: impl Into<String>,
        lhs: Complex64,
        rhs: Complex64,
        tolerance: f64,
        kind: ToleranceKind,
    ) -> Self {
        let abs_diff = (lhs - rhs).norm();
        let scale = rhs.norm();
        let rel_diff = if scale > 0.0 {
            abs_diff / scale
        } else {
            abs_diff
        };
        let bound = match kind {
            ToleranceKind::Absolute => tolerance,
            ToleranceKind::Relative => tolerance * scale,
            ToleranceKind::Scaled => tolerance * (1.0 + scale),
        };
        Self {
            identity: identity.into(),
            lhs,
            rhs,
            abs_diff,
            rel_diff,
            tolerance,
            kind,
            pass: abs_diff <= bound,
            details: BTreeMap::new(),
        }
    }

    pub fn absolute(identity: impl Into<String>, lhs: Complex64, rhs: Complex64, tol: f64) -> Self {
        Self::new(identity, lhs, rhs, tol, ToleranceKind::Absolute)
    }

    pub fn relative(identity: impl Into<String>, lhs: Complex64, rhs: Complex64, tol: f64) -> Self {
        Self::new(identity, lhs, rhs, tol, ToleranceKind::Relative)
    }

    pub fn scaled(identity: impl Into<String>, lhs: Complex64, rhs: Complex64, tol: f64) -> Self {
        Self::new(identity, lhs, rhs, tol, ToleranceKind::Scaled)
    }

    pub fn with_details(mut self, details: BTreeMap<String, f64>) -> Self {
        self.details = details;
        self
    }

    /// Check on real quantities.
    pub fn real(
        identity: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tol: f64,
        kind: ToleranceKind,
    ) -> Self {
        Self::new(
            identity,
            Complex64::new(lhs, 0.0),
            Complex64::new(rhs, 0.0),
            tol,
            kind,
        )
    }
}

/// Named groups of identity checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Transforms,
    FunctionalEquations,
    BettinConrey,
    Convolution,
    TheoremK1,
    TheoremK2,
    TheoremK3,
    ClosedForm,
    All,
}

impl Suite {
    pub const INDIVIDUAL: [Suite; 8] = [
        Suite::Transforms,
        Suite::FunctionalEquations,
        Suite::BettinConrey,
        Suite::Convolution,
        Suite::TheoremK1,
        Suite::TheoremK2,
        Suite::TheoremK3,
        Suite::ClosedForm,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Transforms => "transforms",
            Suite::FunctionalEquations => "functional-equations",
            Suite::BettinConrey => "bettin-conrey",
            Suite::Convolution => "convolution",
            Suite::TheoremK1 => "theorem-k1",
            Suite::TheoremK2 => "theorem-k2",
            Suite::TheoremK3 => "theorem-k3",
            Suite::ClosedForm => "closed-form",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::INDIVIDUAL
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|x| x.as_str() == s)
            .copied()
            .ok_or_else(|| Error::Range(format!("unknown suite {s:?}")))
    }
}

/// Inputs of a suite run. `deltas` replaces the default δ grid of the
/// moment suites when non-empty.
#[derive(Debug, Clone, Default)]
pub struct SuiteConfig {
    pub spec: QuadSpec,
    pub deltas: Vec<f64>,
}

impl SuiteConfig {
    fn deltas_or(&self, default: &[f64]) -> Vec<f64> {
        if self.deltas.is_empty() {
            default.to_vec()
        } else {
            self.deltas.clone()
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn real(x: f64) -> Complex64 {
    c(x, 0.0)
}

/// Deterministic equidistributed points `(frac(nα), frac(nβ))`, used in
/// place of random draws so that reports are reproducible.
fn weyl(n: usize, offset: usize) -> impl Iterator<Item = (f64, f64)> {
    const ALPHA: f64 = 0.618_033_988_749_894_8;
    const BETA: f64 = 0.414_213_562_373_095_1;
    (offset + 1..=offset + n).map(|i| ((i as f64 * ALPHA).fract(), (i as f64 * BETA).fract()))
}

/// `r e^{iθ}` with `r` log-uniform in `[r0, r1]` and `θ` uniform in `[t0, t1]`.
fn polar_points(
    n: usize,
    offset: usize,
    (r0, r1): (f64, f64),
    (t0, t1): (f64, f64),
) -> Vec<Complex64> {
    weyl(n, offset)
        .map(|(a, b)| Complex64::from_polar(r0 * (r1 / r0).powf(a), t0 + (t1 - t0) * b))
        .collect()
}

fn transforms(cfg: &SuiteConfig) -> Result<Vec<VerifyResult>> {
    let spec = &cfg.spec;
    let mut rows = Vec::new();
    for z in [real(0.0), real(0.7), real(1.5), real(-0.4), c(0.3, 0.5)] {
        rows.push(VerifyResult::absolute(
            format!("B integral = B Fourier at z={z}"),
            b_integral(z, spec)?,
            b_fourier(z, spec)?,
            1e-8,
        ));
    }
    for s in [
        c(0.5, 0.0),
        c(0.5, 1.0),
        c(0.5, -2.5),
        c(0.25, 0.0),
        c(0.75, 0.5),
    ] {
        rows.push(VerifyResult::relative(
            format!("Mellin of A = Q at s={s}"),
            mellin_a_numeric(s, spec)?,
            q_function(s)?,
            1e-6,
        ));
    }
    Ok(rows)
}

fn functional_equations(cfg: &SuiteConfig) -> Result<Vec<VerifyResult>> {
    let spec = &cfg.spec;
    let mut rows = Vec::new();
    let mut inversion = polar_points(20, 0, (0.1, 10.0), (-1.5, 1.5));
    inversion.extend(
        polar_points(10, 20, (0.1, 10.0), (0.2, 2.9))
            .into_iter()
            .enumerate()
            .map(|(i, z)| if i % 2 == 0 { z } else { z.conj() }),
    );
    for z in inversion {
        let za = z * a_continuation(z, spec)?;
        rows.push(VerifyResult::scaled(
            format!("A(1/z) = z A(z) at z={z:.6}"),
            a_continuation(1.0 / z, spec)?,
            za,
            1e-8,
        ));
    }
    for z in polar_points(10, 40, (0.05, 20.0), (-3.0, 3.0)) {
        rows.push(VerifyResult::absolute(
            format!("A(conj z) = conj A(z) at z={z:.6}"),
            a_continuation(z.conj(), spec)?,
            a_cutplane(z, spec)?.conj(),
            1e-9,
        ));
    }
    let mut symmetric = vec![c(0.0, 1.0), Complex64::from_polar(1.0, 0.8), c(0.3, 1.5)];
    symmetric.extend(polar_points(10, 60, (0.3, 3.0), (0.15, PI - 0.15)));
    for z in symmetric {
        rows.push(check_feq_iii(z, spec)?);
    }
    Ok(rows)
}

fn bettin_conrey(cfg: &SuiteConfig) -> Result<Vec<VerifyResult>> {
    let spec = &cfg.spec;
    let mut points = vec![c(0.0, 1.0), c(0.5, 0.5)];
    points.extend(weyl(8, 80).map(|(a, b)| c(-2.0 + 4.0 * a, 0.3 + 2.7 * b)));
    points
        .into_iter()
        .map(|z| {
            Ok(VerifyResult::scaled(
                format!("psi series = psi from A at z={z:.6}"),
                psi_from_a(z, spec)?,
                psi_upper(z, spec.series_tol)?,
                1e-7,
            ))
        })
        .collect()
}

fn convolution(cfg: &SuiteConfig) -> Result<Vec<VerifyResult>> {
    let spec = &cfg.spec;
    let mut rows = Vec::new();
    for (k, z, tol) in [(2, 0.0, 1e-7), (2, 1.0, 1e-7), (3, 0.0, 1e-5)] {
        rows.push(VerifyResult::real(
            format!("B^(*{k}) two routes at z={z}"),
            b_conv(z, k, spec)?.value,
            b_conv_fourier(z, k, spec)?.value,
            tol,
            ToleranceKind::Absolute,
        ));
    }
    Ok(rows)
}

fn theorem_k1(cfg: &SuiteConfig) -> Result<Vec<VerifyResult>> {
    let spec = &cfg.spec;
    let mut rows = Vec::new();
    for delta in cfg.deltas_or(&[0.3, 0.8, 1.2]) {
        let direct = moment_direct(1, delta, spec)?.value;
        let rot = Complex64::from_polar(1.0, delta);
        let cont =
            -2.0 * c(0.0, 1.0) * Complex64::from_polar(1.0, 0.5 * delta) * a_cutplane(-rot, spec)?;
        rows.push(VerifyResult::real(
            format!("M2 = -2i e^(i delta/2) A(-e^(i delta)) at delta={delta}"),
            cont.re,
            direct,
            1e-7,
            ToleranceKind::Relative,
        ));
        rows.push(VerifyResult::real(
            format!("Im of the A form of M2 vanishes at delta={delta}"),
            cont.im,
            0.0,
            1e-8,
            ToleranceKind::Absolute,
        ));
    }
    let (d2, d3) = if cfg.deltas.is_empty() {
        (vec![0.5], vec![0.8])
    } else {
        (cfg.deltas.clone(), cfg.deltas.clone())
    };
    for delta in d2 {
        let direct = moment_direct(2, delta, spec)?.value;
        rows.push(VerifyResult::real(
            format!("M4 single ray integral at delta={delta}"),
            multi_integral_form(2, delta, spec)?.value,
            direct,
            1e-5,
            ToleranceKind::Relative,
        ));
        rows.push(VerifyResult::real(
            format!("M4 = (4/pi) int_0^1 |A(-u e^(i delta))|^2 du at delta={delta}"),
            m4_single_integral(delta, spec)?.value,
            direct,
            1e-5,
            ToleranceKind::Relative,
        ));
    }
    for delta in d3 {
        rows.push(VerifyResult::real(
            format!("M6 double ray integral at delta={delta}"),
            multi_integral_form(3, delta, spec)?.value,
            moment_direct(3, delta, spec)?.value,
            1e-3,
            ToleranceKind::Relative,
        ));
    }
    Ok(rows)
}

/// Largest `|R̃₂(δ)|` over δ ∈ {0.1, 0.2, …, 1.0}.
pub fn r2_tilde_bound(spec: &QuadSpec) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 1..=10 {
        let r = formula_k2(0.1 * i as f64, spec)?;
        worst = worst.max(r.breakdown["r2_tilde"].re.abs());
    }
    Ok(worst)
}

/// Fitted constant allowed for `sup |R̃₂|`.
pub const R2_TILDE_BOUND: f64 = 20.0;

fn theorem_k2(cfg: &SuiteConfig) -> Result<Vec<VerifyResult>> {
    let spec = &cfg.spec;
    let mut rows = Vec::new();
    for delta in cfg.deltas_or(&[0.3, 0.5]) {
        rows.push(VerifyResult::real(
            format!("M2 Eisenstein form at delta={delta}"),
            formula_k1(delta, spec)?.value,
            moment_direct(1, delta, spec)?.value,
            1e-6,
            ToleranceKind::Relative,
        ));
        let f = formula_k2(delta, spec)?;
        let details = f.breakdown.iter().map(|(k, v)| (k.clone(), v.re)).collect();
        rows.push(
            VerifyResult::real(
                format!("M4 Eisenstein form at delta={delta}"),
                f.value,
                moment_direct(2, delta, spec)?.value,
                1e-6,
                ToleranceKind::Relative,
            )
            .with_details(details),
        );
    }
    if cfg.deltas.is_empty() {
        rows.push(VerifyResult::real(
            "sup |R2~| over delta in 0.1..1.0 within fitted constant",
            r2_tilde_bound(spec)?,
            0.0,
            R2_TILDE_BOUND,
            ToleranceKind::Absolute,
        ));
    }
    Ok(rows)
}

fn theorem_k3(cfg: &SuiteConfig) -> Result<Vec<VerifyResult>> {
    let spec = &cfg.spec;
    cfg.deltas_or(&[0.5, 0.8])
        .into_iter()
        .map(|delta| {
            let (report, parts) = formula_k3(delta, spec)?;
            let mut details = BTreeMap::new();
            details.insert("main_term".to_string(), parts.main_term);
            details.insert("remainder_term".to_string(), parts.remainder_term);
            details.insert("orientation_gap".to_string(), parts.orientation_gap);
            details.insert("m_re".to_string(), parts.main_m.re);
            details.insert("m_im".to_string(), parts.main_m.im);
            for (j, r) in parts.remainders.iter().enumerate() {
                details.insert(format!("r{}_re", j + 1), r.re);
                details.insert(format!("r{}_im", j + 1), r.im);
            }
            Ok(VerifyResult::real(
                format!("M6 Eisenstein form at delta={delta}"),
                report.value,
                moment_direct(3, delta, spec)?.value,
                1e-4,
                ToleranceKind::Relative,
            )
            .with_details(details))
        })
        .collect()
}

fn closed_form(cfg: &SuiteConfig) -> Result<Vec<VerifyResult>> {
    (0..=4)
        .map(|n| {
            let r = closed_form_poly(n, &cfg.spec)?;
            Ok(VerifyResult::real(
                format!("polynomial moment closed form N={n}"),
                r.lhs,
                r.rhs,
                1e-7,
                ToleranceKind::Relative,
            ))
        })
        .collect()
}

/// Runs every check in `suite`, in a fixed order.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<VerifyResult>> {
    cfg.spec.validate()?;
    match suite {
        Suite::Transforms => transforms(cfg),
        Suite::FunctionalEquations => functional_equations(cfg),
        Suite::BettinConrey => bettin_conrey(cfg),
        Suite::Convolution => convolution(cfg),
        Suite::TheoremK1 => theorem_k1(cfg),
        Suite::TheoremK2 => theorem_k2(cfg),
        Suite::TheoremK3 => theorem_k3(cfg),
        Suite::ClosedForm => closed_form(cfg),
        Suite::All => {
            let mut rows = Vec::new();
            for s in Suite::INDIVIDUAL {
                rows.extend(run_suite(s, cfg)?);
            }
            Ok(rows)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_kinds() {
        let one = Complex64::new(1.0, 0.0);
        let r = VerifyResult::relative("x", one * 100.5, one * 100.0, 1e-2);
        assert!(r.pass);
        assert!((r.rel_diff - 0.005).abs() < 1e-15);
        assert!(!VerifyResult::absolute("x", one * 100.5, one * 100.0, 1e-2).pass);
        assert!(VerifyResult::scaled("x", one * 1e-3, one * 0.0, 1e-2).pass);
        assert!(!VerifyResult::real("x", f64::NAN, 1.0, 1.0, ToleranceKind::Absolute).pass);
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::INDIVIDUAL.iter().chain([Suite::All].iter()) {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), *s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn point_sets_respect_domains() {
        for z in polar_points(20, 0, (0.1, 10.0), (-1.5, 1.5)) {
            assert!(z.re > 0.0 && z.norm() >= 0.1 - 1e-12 && z.norm() <= 10.0 + 1e-12);
        }
        for z in polar_points(10, 60, (0.3, 3.0), (0.15, PI - 0.15)) {
            assert!(z.im > 0.0);
        }
    }

    #[test]
    fn fast_suites_pass() {
        let cfg = SuiteConfig::default();
        for s in [
            Suite::Transforms,
            Suite::FunctionalEquations,
            Suite::BettinConrey,
            Suite::ClosedForm,
        ] {
            let rows = run_suite(s, &cfg).unwrap();
            assert!(
                rows.iter().all(|r| r.pass),
                "{s}: {:?}",
                rows.iter().find(|r| !r.pass)
            );
        }
        assert_eq!(run_suite(Suite::ClosedForm, &cfg).unwrap().len(), 5);
    }
}
