//! `ζ(s)` in the critical strip by Euler–Maclaurin summation, the moment
//! weight `e^{k(π−δ)t}/cosh(πt)^k`, and direct quadrature of the weighted
//! moments `M₂ₖ(δ)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quad::{integrate_panels, uniform_points};
use crate::numerics::{bernoulli, ln_cosh, Envelope, QuadResult, QuadSpec, QuadValue};

/// Largest `|Im s|` accepted by [`zeta`].
pub const MAX_ORDINATE: f64 = 500.0;

/// Smallest δ accepted by the moment routines unless guards are overridden.
pub const DELTA_FLOOR: f64 = 0.05;

const MAX_CORRECTIONS: usize = 30;

// B_{2k} / (2k)! for k = 1..=MAX_CORRECTIONS.
fn em_coefficients() -> &'static [f64; MAX_CORRECTIONS] {
    static TABLE: OnceLock<[f64; MAX_CORRECTIONS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [0.0; MAX_CORRECTIONS];
        let mut fact = num_bigint::BigInt::from(1u32);
        let mut n = 0u32;
        for (k, slot) in out.iter_mut().enumerate() {
            let m = 2 * (k as u32 + 1);
            while n < m {
                n += 1;
                fact *= n;
            }
            let b = bernoulli(m as usize).expect("index within table");
            let q = b / num_rational::BigRational::from_integer(fact.clone());
            *slot = crate::numerics::ratio_to_f64(&q);
        }
        out
    })
}

/// Euler–Maclaurin with `N` summed terms; `None` when the correction series
/// cannot reach `tol` at this `N`.
fn em_sum(s: Complex64, n_terms: usize, tol: f64) -> Option<Complex64> {
    let nf = n_terms as f64;
    let mut head = Complex64::new(0.0, 0.0);
    for n in 1..n_terms {
        let ln_n = (n as f64).ln();
        head += (-s * ln_n).exp();
    }
    let ln_nf = nf.ln();
    let n_pow = (-s * ln_nf).exp();
    head += n_pow * 0.5 + n_pow * nf / (s - 1.0);

    // T_k = B_{2k}/(2k)! · s(s+1)…(s+2k−2) · N^{1−s−2k}
    let coeffs = em_coefficients();
    let inv_n2 = 1.0 / (nf * nf);
    let mut poch_pow = s * n_pow / nf;
    let sigma = s.re;
    for (k, &c) in coeffs.iter().enumerate() {
        let term = poch_pow * c;
        // Remainder after the previous terms is at most
        // |s+2k−1| / (σ+2k−1) · |T_k|.
        let m = 2.0 * k as f64 + 1.0;
        if (sigma + m) > 0.0 && term.norm() * (s + m).norm() / (sigma + m) <= tol {
            return Some(head);
        }
        head += term;
        poch_pow *= (s + m) * (s + m + 1.0) * inv_n2;
    }
    None
}

/// Euler–Maclaurin evaluation without the strip guard (used for `ζ(j)` at
/// odd integers `j ≥ 3` and by the critical-line integrals).
pub(crate) fn zeta_em(s: Complex64, tol: f64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole(s));
    }
    let mut n_terms = 20usize.max(s.im.abs().ceil() as usize);
    for _ in 0..8 {
        if let Some(v) = em_sum(s, n_terms, tol) {
            return Ok(v);
        }
        n_terms *= 2;
    }
    Err(Error::ToleranceNotMet {
        value: em_sum(s, n_terms, f64::INFINITY).unwrap_or_default(),
        err_estimate: f64::NAN,
        evaluations: n_terms,
    })
}

/// Riemann zeta function for `0 < Re s <= 2`, `|Im s| <= 500`.
pub fn zeta(s: Complex64, tol: f64) -> Result<Complex64> {
    if !(s.re > 0.0 && s.re <= 2.0 && s.im.abs() <= MAX_ORDINATE) {
        return Err(Error::Domain(format!(
            "zeta is evaluated for 0 < Re s <= 2, |Im s| <= {MAX_ORDINATE}; got {s}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Range(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    zeta_em(s, tol)
}

/// `ζ(1/2 + it)` together with its squared modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub t: f64,
    pub value: Complex64,
    pub sq_modulus: f64,
}

const LINE_TOL: f64 = 1e-15;

impl CriticalPoint {
    pub fn at(t: f64) -> Result<Self> {
        let value = zeta(Complex64::new(0.5, t), LINE_TOL)?;
        Ok(Self {
            t,
            value,
            sq_modulus: value.norm_sqr(),
        })
    }
}

/// `|ζ(1/2+it)|²` with no ordinate limit; non-finite on failure so that the
/// quadrature reports it.
pub(crate) fn zeta_sq_on_line(t: f64) -> f64 {
    zeta_em(Complex64::new(0.5, t), LINE_TOL)
        .map(|z| z.norm_sqr())
        .unwrap_or(f64::NAN)
}

/// `e^{k(π−δ)t} / cosh(πt)^k`, evaluated in log-space.
pub fn weight(k: u32, delta: f64, t: f64) -> f64 {
    let k = k as f64;
    (k * (PI - delta) * t - k * ln_cosh(PI * t)).exp()
}

/// Evaluation route that produced a moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Direct,
    FormulaK1,
    FormulaK2,
    FormulaK3,
    MultiIntegral,
    ClosedForm,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::FormulaK1 => "formula_k1",
            Method::FormulaK2 => "formula_k2",
            Method::FormulaK3 => "formula_k3",
            Method::MultiIntegral => "multi_integral",
            Method::ClosedForm => "closed_form",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "direct" => Method::Direct,
            "formula_k1" => Method::FormulaK1,
            "formula_k2" => Method::FormulaK2,
            "formula_k3" => Method::FormulaK3,
            "multi_integral" => Method::MultiIntegral,
            "closed_form" => Method::ClosedForm,
            other => return Err(Error::Range(format!("unknown method {other:?}"))),
        })
    }
}

/// One evaluation of `M₂ₖ(δ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub k: u32,
    pub delta: f64,
    pub method: Method,
    pub value: f64,
    pub err_estimate: f64,
    /// Named contributions (main term, remainders, residuals).
    pub breakdown: BTreeMap<String, Complex64>,
}

/// Whether desk-scale guards on δ are enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Guards {
    #[default]
    Enforce,
    Override,
}

pub(crate) fn check_delta(delta: f64, lo: f64, hi: f64, what: &str, guards: Guards) -> Result<()> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Domain(format!(
            "{what}: delta must be positive, got {delta}"
        )));
    }
    if delta >= hi {
        return Err(Error::Domain(format!(
            "{what}: delta must be below {hi:.6}, got {delta}"
        )));
    }
    if delta < lo && guards == Guards::Enforce {
        return Err(Error::Guard(format!(
            "{what}: delta {delta} is below the desk-scale floor {lo}"
        )));
    }
    Ok(())
}

/// Integral over the real line of an integrand whose modulus is bounded by
/// `left` for `t < 0` and `right` for `t > 0` (both in `|t|`).
///
/// Panels are 0.25 wide on `|t| <= 2` and 1 wide beyond, so the adaptive
/// rule starts out resolving the dips near each zero of ζ.
pub(crate) fn line_integral<V, F>(
    f: F,
    left: Envelope,
    right: Envelope,
    spec: &QuadSpec,
) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    let tail_tol = 0.25 * spec.abs_tol;
    let t_minus = left.cutoff(tail_tol).max(2.0);
    let t_plus = right.cutoff(tail_tol).max(2.0);
    let mut points = uniform_points(-t_minus, -2.0, 1.0);
    points.pop();
    points.extend(uniform_points(-2.0, 2.0, 0.25));
    points.extend(uniform_points(2.0, t_plus, 1.0).into_iter().skip(1));
    let inner = QuadSpec {
        abs_tol: 0.5 * spec.abs_tol,
        ..*spec
    };
    let mut res = integrate_panels(f, &points, &inner)?;
    res.err_estimate += left.tail(t_minus) + right.tail(t_plus);
    Ok(res)
}

/// Envelope of `|ζ(1/2+it)|^{2k}`·weight on either side: `2^k (1+|t|)^{4k}`
/// times the exponential decay of the weight.
fn moment_envelopes(k: u32, delta: f64) -> (Envelope, Envelope) {
    let scale = 2f64.powi(k as i32);
    let poly = 4.0 * k as f64;
    let kf = k as f64;
    (
        Envelope {
            scale,
            rate: kf * (2.0 * PI - delta),
            poly,
        },
        Envelope {
            scale,
            rate: kf * delta,
            poly,
        },
    )
}

/// `M₂ₖ(δ)` by quadrature of `|ζ(1/2+it)|^{2k} e^{k(π−δ)t}/cosh(πt)^k`.
pub fn moment_direct(k: u32, delta: f64, spec: &QuadSpec) -> Result<MomentReport> {
    moment_direct_opts(k, delta, spec, Guards::Enforce)
}

pub fn moment_direct_opts(
    k: u32,
    delta: f64,
    spec: &QuadSpec,
    guards: Guards,
) -> Result<MomentReport> {
    if !(1..=3).contains(&k) {
        return Err(Error::Range(format!(
            "moment_direct supports k in 1..=3, got {k}"
        )));
    }
    spec.validate()?;
    check_delta(delta, DELTA_FLOOR, PI, "moment_direct", guards)?;
    let spec = if k == 3 {
        spec.with_depth(spec.max_depth.max(40))
    } else {
        *spec
    };
    let (left, right) = moment_envelopes(k, delta);
    let res = line_integral(
        |t| zeta_sq_on_line(t).powi(k as i32) * weight(k, delta, t),
        left,
        right,
        &spec,
    )?;
    let mut breakdown = BTreeMap::new();
    breakdown.insert("integral".to_string(), Complex64::new(res.value, 0.0));
    Ok(MomentReport {
        k,
        delta,
        method: Method::Direct,
        value: res.value,
        err_estimate: res.err_estimate,
        breakdown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zeta_half() {
        let z = zeta(c(0.5, 0.0), 1e-15).unwrap();
        assert!((z.re + 1.460_354_508_809_586_8).abs() < 1e-14);
        assert_eq!(z.im, 0.0);
    }

    #[test]
    fn zeta_two() {
        let z = zeta(c(2.0, 0.0), 1e-15).unwrap();
        assert!((z.re - PI * PI / 6.0).abs() < 1e-14);
    }

    #[test]
    fn zeta_independent_of_n() {
        for &s in &[c(0.5, 0.0), c(0.5, 14.134_725), c(0.3, 40.0), c(1.5, -7.0)] {
            let a = em_sum(s, 60, 1e-16).unwrap();
            let b = em_sum(s, 150, 1e-16).unwrap();
            assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()), "s={s}");
        }
    }

    #[test]
    fn zeta_reference_values() {
        // 30-digit reference evaluations.
        let cases = [
            (c(0.5, 1.0), c(0.14393642707718907, -0.722099743531673)),
            (c(0.5, 100.0), c(2.692619885681324, -0.020386029602598162)),
            (c(0.25, -30.0), c(-0.5864827888392179, 0.6111496310764428)),
            (c(1.0, 3.0), c(0.6288517339518256, -0.10747576015058644)),
        ];
        for (s, want) in cases {
            let got = zeta(s, 1e-15).unwrap();
            assert!(
                (got - want).norm() <= 1e-13 * want.norm(),
                "s={s} got={got}"
            );
        }
    }

    #[test]
    fn zeta_conjugate_symmetry() {
        let a = zeta(c(0.5, 1.0), 1e-15).unwrap();
        let b = zeta(c(0.5, -1.0), 1e-15).unwrap();
        assert!((a - b.conj()).norm() < 1e-15);
        for i in 0..40 {
            let t = 0.37 + 4.9 * i as f64;
            let p = CriticalPoint::at(t).unwrap();
            let q = CriticalPoint::at(-t).unwrap();
            assert!((p.sq_modulus - q.sq_modulus).abs() <= 1e-12 * (1.0 + p.sq_modulus));
            let direct = p.value.re * p.value.re + p.value.im * p.value.im;
            assert!((p.sq_modulus - direct).abs() <= 1e-14 * direct);
        }
    }

    #[test]
    fn zeta_errors() {
        assert!(matches!(zeta(c(1.0, 0.0), 1e-12), Err(Error::Pole(_))));
        assert!(matches!(zeta(c(-0.5, 0.0), 1e-12), Err(Error::Domain(_))));
        assert!(matches!(zeta(c(0.5, 600.0), 1e-12), Err(Error::Domain(_))));
        assert!(matches!(zeta(c(2.5, 0.0), 1e-12), Err(Error::Domain(_))));
    }

    #[test]
    fn odd_integer_through_unguarded_path() {
        let z3 = zeta_em(c(3.0, 0.0), 1e-16).unwrap();
        assert!((z3.re - 1.202_056_903_159_594_3).abs() < 1e-15);
    }

    #[test]
    fn weight_values() {
        assert!((weight(1, PI / 2.0, 0.0) - 1.0).abs() < 1e-15);
        let ratio = weight(1, 0.7, 50.0) / (-0.7 * 50.0f64).exp();
        assert!((ratio - 2.0).abs() < 1e-12);
        // exp(3(π−0.5)(−10)) / cosh(10π)³ in log form
        let want = (3.0 * (PI - 0.5) * -10.0 - 3.0 * (10.0 * PI).cosh().ln()).exp();
        let got = weight(3, 0.5, -10.0);
        assert!((got - want).abs() <= 1e-12 * want);
        assert!(weight(3, 0.5, -400.0) >= 0.0);
        assert!(weight(2, 0.1, 300.0) > 0.0);
    }

    #[test]
    fn direct_moment_golden_values() {
        let spec = QuadSpec::default();
        let cases = [
            (1, 0.8, 2.407_845_744_148_115_15),
            (1, 0.3, 5.484_540_913_952_648_87),
            (1, 1.2, 2.001_083_735_197_022_53),
            (2, 0.5, 4.124_632_367_110_735_61),
            (2, 0.3, 5.238_570_968_832_756_76),
            (3, 0.8, 6.746_799_977_109_487_27),
            (3, 0.5, 8.204_035_755_726_644_06),
        ];
        for (k, d, want) in cases {
            let r = moment_direct(k, d, &spec).unwrap();
            assert!(r.value > 0.0);
            assert!(
                (r.value - want).abs() <= 1e-9 * want,
                "k={k} δ={d} got={}",
                r.value
            );
            assert!(r.err_estimate <= spec.target(r.value) + 1e-9);
        }
    }

    #[test]
    fn direct_moment_near_pi() {
        let r = moment_direct(1, 3.0, &QuadSpec::default()).unwrap();
        assert!(r.value > 0.0);
        assert!(
            (r.value - 1.523_226_853_241_009_6).abs() < 1e-9,
            "{}",
            r.value
        );
    }

    #[test]
    fn direct_moment_guards() {
        let spec = QuadSpec::default();
        assert!(matches!(
            moment_direct(2, 0.01, &spec),
            Err(Error::Guard(_))
        ));
        assert!(matches!(
            moment_direct(2, 0.0, &spec),
            Err(Error::Domain(_))
        ));
        assert!(matches!(moment_direct(4, 0.5, &spec), Err(Error::Range(_))));
    }

    #[test]
    fn direct_moment_decreases_in_delta() {
        let spec = QuadSpec::default();
        let mut prev = f64::INFINITY;
        for i in 1..=15 {
            let d = 0.1 * i as f64;
            let r = moment_direct(1, d, &spec).unwrap();
            assert!(r.value + r.err_estimate < prev, "δ={d}");
            prev = r.value - r.err_estimate;
        }
    }
}
