//! Exact formulas for `M₂`, `M₄` and `M₆` in terms of `S₀` and the smooth
//! part `R` of `A` near the negative axis.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::autocorr::{a_continuation_q, a_cutplane};
use crate::eisenstein::{s0, s_at_y, RTable};
use crate::error::{Error, Result};
use crate::numerics::quad::uniform_points;
use crate::numerics::{integrate_panels, FirstError, QuadResult, QuadSpec, EULER_GAMMA, I, LN_2PI};
use crate::zeta_line::{check_delta, Guards, Method, MomentReport, DELTA_FLOOR};

/// Floor on δ for [`formula_k3`] unless guards are overridden.
pub const K3_FLOOR: f64 = 0.2;

/// Beyond this `y = −log u` every remainder integrand is below `e^{−40}`.
const REMAINDER_Y_MAX: f64 = 44.0;

pub(crate) fn check_formula_delta(
    delta: f64,
    what: &str,
    floor: f64,
    guards: Guards,
) -> Result<()> {
    check_delta(delta, floor, PI / 2.0, what, guards)
}

/// Smallest `y` (on a grid of 0.01) past which `|S(e^{−y})| <= tol`, from
/// `|S₀(w)| <= q/(1−q)²` with `q = e^{−2π Im w}`.
pub(crate) fn s_cutoff(delta: f64, tol: f64) -> f64 {
    let s = delta.sin();
    let mut y = 0.0;
    loop {
        let inv_u = f64::exp(y);
        let q = (-2.0 * PI * s * inv_u).exp();
        if 2.0 * PI * inv_u * q / ((1.0 - q) * (1.0 - q)) <= tol {
            return y;
        }
        y += 0.01;
    }
}

fn y_points(y_s: f64, y_max: f64) -> Vec<f64> {
    let mut pts = if y_s > 0.0 {
        uniform_points(0.0, y_s, 0.1)
    } else {
        vec![0.0]
    };
    let mid = y_s.max(12.0);
    if mid > y_s {
        pts.extend(uniform_points(y_s, mid, 1.0).into_iter().skip(1));
    }
    pts.extend(uniform_points(mid, y_max, 4.0).into_iter().skip(1));
    pts
}

/// `M₂(δ)` through `4π e^{iδ/2} S₀(e^{iδ}) + 2i e^{−iδ/2}(log 2π − γ − iπ/2
/// − A(e^{−iδ}) + iδ)`, cross-checked against `−2i e^{iδ/2} A(−e^{iδ})`.
///
/// The breakdown holds both complex forms and the imaginary residual of the
/// reported one.
pub fn formula_k1(delta: f64, spec: &QuadSpec) -> Result<MomentReport> {
    formula_k1_opts(delta, spec, Guards::Enforce)
}

pub fn formula_k1_opts(delta: f64, spec: &QuadSpec, guards: Guards) -> Result<MomentReport> {
    spec.validate()?;
    check_delta(delta, DELTA_FLOOR, PI, "formula_k1", guards)?;
    let half = Complex64::from_polar(1.0, 0.5 * delta);
    let rot = Complex64::from_polar(1.0, delta);

    let cont = a_continuation_q(-rot, spec)?;
    let continuation = -2.0 * I * half * cont.value;

    let main = 4.0 * PI * half * s0(rot, spec.series_tol)?;
    let a_conj = a_cutplane(rot.conj(), spec)?;
    let titchmarsh =
        main + 2.0 * I * half.conj() * (LN_2PI - EULER_GAMMA - I * (PI / 2.0) - a_conj + I * delta);

    let mut breakdown = BTreeMap::new();
    breakdown.insert("continuation".into(), continuation);
    breakdown.insert("titchmarsh".into(), titchmarsh);
    breakdown.insert("main".into(), Complex64::new(main.re, 0.0));
    breakdown.insert(
        "remainder".into(),
        Complex64::new(titchmarsh.re - main.re, 0.0),
    );
    breakdown.insert("imag_residual".into(), Complex64::new(titchmarsh.im, 0.0));
    Ok(MomentReport {
        k: 1,
        delta,
        method: Method::FormulaK1,
        value: titchmarsh.re,
        err_estimate: 2.0 * cont.err_estimate + (titchmarsh - continuation).norm(),
        breakdown,
    })
}

fn k2_main(delta: f64, spec: &QuadSpec) -> Result<QuadResult<f64>> {
    let s = delta.sin();
    let rate = 4.0 * PI * s;
    let target = 1e-3 * spec.abs_tol / (16.0 * PI);
    // ∫_U^∞ |S₀(e^{iδ}u)|² du <= e^{−4πU sinδ} / ((1−q_U)⁴ · 4π sinδ)
    let mut u_max = 1.0;
    loop {
        let q = (-2.0 * PI * s * u_max).exp();
        if (-rate * u_max).exp() / ((1.0 - q).powi(4) * rate) <= target {
            break;
        }
        u_max += 0.25;
    }
    if u_max <= 1.0 {
        return Ok(QuadResult {
            value: 0.0,
            err_estimate: target,
            evaluations: 0,
        });
    }
    let rot = Complex64::from_polar(1.0, delta);
    let errors = FirstError::new();
    let res = integrate_panels(
        |u: f64| errors.take(s0(rot * u, spec.series_tol)).norm_sqr(),
        &uniform_points(1.0, u_max, 0.25),
        &spec.tightened(1.0 / (16.0 * PI)),
    );
    let mut res = errors.finish(res)?;
    res.value *= 16.0 * PI;
    res.err_estimate = 16.0 * PI * res.err_estimate + 1e-3 * spec.abs_tol;
    Ok(res)
}

/// `M₄(δ) = 16π ∫₁^∞ |S₀(e^{iδ}u)|² du + R̃₁ + R̃₂` with
/// `R̃₁ = (8/π) Re ∫₀¹ conj(S)R du` and `R̃₂ = (4/π) ∫₀¹ |R|² du`.
pub fn formula_k2(delta: f64, spec: &QuadSpec) -> Result<MomentReport> {
    formula_k2_opts(delta, spec, Guards::Enforce)
}

pub fn formula_k2_opts(delta: f64, spec: &QuadSpec, guards: Guards) -> Result<MomentReport> {
    spec.validate()?;
    check_formula_delta(delta, "formula_k2", DELTA_FLOOR, guards)?;
    let main = k2_main(delta, spec)?;
    let table = RTable::new(delta, spec)?;
    let y_s = s_cutoff(delta, 1e-3 * spec.abs_tol);
    let errors = FirstError::new();
    let inner = spec.tightened(0.25);
    let r1 = if y_s > 0.0 {
        let res = integrate_panels(
            |y: f64| {
                let s = errors.take(s_at_y(y, delta, spec.series_tol));
                (s.conj() * table.at_y(y)).re * (-y).exp()
            },
            &uniform_points(0.0, y_s, 0.1),
            &inner,
        );
        errors.finish(res)?
    } else {
        QuadResult {
            value: 0.0,
            err_estimate: 0.0,
            evaluations: 0,
        }
    };
    let r2 = integrate_panels(
        |y: f64| table.at_y(y).norm_sqr() * (-y).exp(),
        &y_points(0.0, REMAINDER_Y_MAX),
        &inner,
    )?;
    let r1_tilde = 8.0 / PI * r1.value;
    let r2_tilde = 4.0 / PI * r2.value;

    let mut breakdown = BTreeMap::new();
    breakdown.insert("main".into(), Complex64::new(main.value, 0.0));
    breakdown.insert("r1_tilde".into(), Complex64::new(r1_tilde, 0.0));
    breakdown.insert("r2_tilde".into(), Complex64::new(r2_tilde, 0.0));
    Ok(MomentReport {
        k: 2,
        delta,
        method: Method::FormulaK2,
        value: main.value + r1_tilde + r2_tilde,
        err_estimate: main.err_estimate + 8.0 / PI * r1.err_estimate + 4.0 / PI * r2.err_estimate,
        breakdown,
    })
}

/// Parts of the sixth-moment formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct K3Breakdown {
    pub delta: f64,
    /// `M = ∫₁^∞∫₁^∞ S₀(e^{iδ}u) S₀(e^{iδ}v) S₀(−e^{−iδ}uv) du dv`.
    pub main_m: Complex64,
    /// The same integral with every argument reflected, `S₀(−e^{−iδ}u)
    /// S₀(−e^{−iδ}v) S₀(e^{iδ}uv)`, computed independently.
    pub main_m_reflected: Complex64,
    /// `R₁, …, R₅`.
    pub remainders: [Complex64; 5],
    /// `96π Re(e^{iδ/2} M)`.
    pub main_term: f64,
    /// `|96π Re(e^{iδ/2} M) − 96π Re(e^{−iδ/2} M_reflected)|`.
    pub orientation_gap: f64,
    /// `−(12/π²) Re(i e^{iδ/2} Σ Rⱼ)`.
    pub remainder_term: f64,
    pub assembled: f64,
}

impl K3Breakdown {
    fn from_parts(
        delta: f64,
        main_m: Complex64,
        main_m_reflected: Complex64,
        remainders: [Complex64; 5],
    ) -> Self {
        let half = Complex64::from_polar(1.0, 0.5 * delta);
        let main_term = 96.0 * PI * (half * main_m).re;
        let reflected_term = 96.0 * PI * (half.conj() * main_m_reflected).re;
        let rho: Complex64 = remainders.iter().sum();
        let remainder_term = -12.0 / (PI * PI) * (I * half * rho).re;
        Self {
            delta,
            main_m,
            main_m_reflected,
            remainders,
            main_term,
            orientation_gap: (main_term - reflected_term).abs(),
            remainder_term,
            assembled: main_term + remainder_term,
        }
    }

    /// The assembled value recomputed from the stored integrals.
    pub fn recompute(&self) -> f64 {
        Self::from_parts(
            self.delta,
            self.main_m,
            self.main_m_reflected,
            self.remainders,
        )
        .assembled
    }

    /// `|Rⱼ| / main_term` for each remainder.
    pub fn remainder_fractions(&self) -> [f64; 5] {
        self.remainders.map(|r| r.norm() / self.main_term.abs())
    }
}

fn k3_main(delta: f64, spec: &QuadSpec) -> Result<QuadResult<[Complex64; 2]>> {
    let s = delta.sin();
    let q0 = (-2.0 * PI * s).exp();
    // |S₀(w)| <= q/(1−q)² bounds the triple product by
    // (1−q₀)^{−6} e^{−2π sinδ (u + v + uv)}; the level set is widened by 1.5.
    let prefactor = (1.0 - q0).powi(-6);
    let level = 1.5 * (prefactor / (1e-3 * spec.abs_tol)).ln() / (2.0 * PI * s);
    let u_max = 0.5 * (level - 1.0);
    if u_max <= 1.0 {
        let zero = Complex64::new(0.0, 0.0);
        return Ok(QuadResult {
            value: [zero; 2],
            err_estimate: 0.0,
            evaluations: 0,
        });
    }
    let rot = Complex64::from_polar(1.0, delta);
    let refl = -rot.conj();
    let tol = spec.series_tol;
    let errors = FirstError::new();
    let inner_spec = spec.tightened(0.1);
    let outer = |u: f64| -> [Complex64; 2] {
        let v_max = (level - u) / (1.0 + u);
        if v_max <= 1.0 {
            return [Complex64::new(0.0, 0.0); 2];
        }
        let su = errors.take(s0(rot * u, tol));
        let su_refl = errors.take(s0(refl * u, tol));
        let res = integrate_panels(
            |v: f64| {
                let a = su * errors.take(s0(rot * v, tol)) * errors.take(s0(refl * (u * v), tol));
                let b =
                    su_refl * errors.take(s0(refl * v, tol)) * errors.take(s0(rot * (u * v), tol));
                [a, b]
            },
            &uniform_points(1.0, v_max, (0.25 / u).min(0.25)),
            &inner_spec,
        );
        errors.take(res.map(|r| r.value))
    };
    let res = integrate_panels(outer, &uniform_points(1.0, u_max, 0.25), spec);
    let mut res = errors.finish(res)?;
    res.err_estimate += 1e-3 * spec.abs_tol + (u_max - 1.0) * inner_spec.abs_tol;
    Ok(res)
}

/// Memo of the last outer-point values, since the inner integral revisits
/// the same outer abscissa many times.
struct OuterCache {
    key: f64,
    s: Complex64,
    r: Complex64,
}

fn k3_remainders(
    delta: f64,
    table: &RTable,
    spec: &QuadSpec,
) -> Result<QuadResult<[Complex64; 5]>> {
    let y_s = s_cutoff(delta, 1e-3 * spec.abs_tol);
    let tol = spec.series_tol;
    let zero = Complex64::new(0.0, 0.0);
    let errors = FirstError::new();
    // the S-factors vanish to below tolerance past y_s
    let s_of = |y: f64| -> Complex64 {
        if y < y_s {
            errors.take(s_at_y(y, delta, tol))
        } else {
            zero
        }
    };
    let pts = y_points(y_s, REMAINDER_Y_MAX);
    let inner_spec = spec.tightened(0.1);
    let cache = RefCell::new(OuterCache {
        key: f64::NAN,
        s: zero,
        r: zero,
    });
    let outer = |y: f64| -> [Complex64; 5] {
        {
            let mut c = cache.borrow_mut();
            if c.key != y {
                *c = OuterCache {
                    key: y,
                    s: s_of(y),
                    r: table.at_y(y),
                };
            }
        }
        let (su, ru) = {
            let c = cache.borrow();
            (c.s, c.r)
        };
        let res = integrate_panels(
            |w: f64| {
                let (sv, rv) = (s_of(w), table.at_y(w));
                let (suv, ruv) = (s_of(y + w).conj(), table.at_y(y + w).conj());
                let e = (-y - w).exp();
                [
                    2.0 * su * rv * suv * e,
                    su * sv * ruv * e,
                    ru * rv * suv * e,
                    2.0 * ru * sv * ruv * e,
                    ru * rv * ruv * e,
                ]
            },
            &pts,
            &inner_spec,
        );
        errors.take(res.map(|r| r.value))
    };
    let res = integrate_panels(outer, &pts, spec);
    let mut res = errors.finish(res)?;
    res.err_estimate += REMAINDER_Y_MAX * inner_spec.abs_tol;
    Ok(res)
}

/// `M₆(δ) = 96π Re ∫₁^∞∫₁^∞ e^{iδ/2} S₀(e^{iδ}u) S₀(e^{iδ}v) S₀(−e^{−iδ}uv)
/// du dv − (12/π²) Re(i e^{iδ/2} Σⱼ Rⱼ)`.
///
/// The main integral is also computed with every `S₀` argument reflected;
/// the two must give the same real part to 1e−12 or an
/// [`Error::Inconsistent`] is returned.
pub fn formula_k3(delta: f64, spec: &QuadSpec) -> Result<(MomentReport, K3Breakdown)> {
    formula_k3_opts(delta, spec, Guards::Enforce)
}

pub fn formula_k3_opts(
    delta: f64,
    spec: &QuadSpec,
    guards: Guards,
) -> Result<(MomentReport, K3Breakdown)> {
    spec.validate()?;
    let floor = match guards {
        Guards::Enforce => K3_FLOOR,
        Guards::Override => DELTA_FLOOR,
    };
    check_formula_delta(delta, "formula_k3", floor, Guards::Enforce)?;
    let main = k3_main(delta, spec)?;
    let table = RTable::new(delta, spec)?;
    let rem = k3_remainders(delta, &table, spec)?;
    let parts = K3Breakdown::from_parts(delta, main.value[0], main.value[1], rem.value);
    if parts.orientation_gap > 1e-12 * parts.main_term.abs().max(1.0) {
        return Err(Error::Inconsistent(format!(
            "orientations of the sixth-moment main term differ by {:e}",
            parts.orientation_gap
        )));
    }

    let mut breakdown = BTreeMap::new();
    breakdown.insert("M".into(), parts.main_m);
    breakdown.insert("main".into(), Complex64::new(parts.main_term, 0.0));
    breakdown.insert(
        "remainder_term".into(),
        Complex64::new(parts.remainder_term, 0.0),
    );
    breakdown.insert(
        "orientation_gap".into(),
        Complex64::new(parts.orientation_gap, 0.0),
    );
    for (j, r) in parts.remainders.iter().enumerate() {
        breakdown.insert(format!("r{}", j + 1), *r);
    }
    let report = MomentReport {
        k: 3,
        delta,
        method: Method::FormulaK3,
        value: parts.assembled,
        err_estimate: 96.0 * PI * main.err_estimate + 12.0 / (PI * PI) * rem.err_estimate,
        breakdown,
    };
    Ok((report, parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta_line::moment_direct;

    fn direct(k: u32, delta: f64) -> f64 {
        moment_direct(k, delta, &QuadSpec::default()).unwrap().value
    }

    #[test]
    fn k1_matches_direct() {
        let spec = QuadSpec::default();
        for &d in &[0.3, 0.8, 1.2, 2.0] {
            let r = formula_k1(d, &spec).unwrap();
            let m = direct(1, d);
            assert!((r.value - m).abs() <= 1e-7 * m, "δ={d}");
            let cont = r.breakdown["continuation"];
            let titch = r.breakdown["titchmarsh"];
            assert!((cont - titch).norm() <= 1e-8);
            assert!(titch.im.abs() <= 1e-8 && cont.im.abs() <= 1e-8);
        }
    }

    #[test]
    fn k2_matches_direct() {
        let spec = QuadSpec::default();
        for &d in &[0.2, 0.3, 0.5] {
            let r = formula_k2(d, &spec).unwrap();
            let m = direct(2, d);
            assert!((r.value - m).abs() <= 1e-6 * m, "δ={d}: {} vs {m}", r.value);
        }
    }

    #[test]
    fn k2_main_dominates_first_remainder_at_small_delta() {
        let r = formula_k2(0.2, &QuadSpec::default()).unwrap();
        assert!(r.breakdown["main"].re / r.breakdown["r1_tilde"].re.abs() >= 1.0);
    }

    #[test]
    fn k2_second_remainder_bounded() {
        let spec = QuadSpec::default();
        for i in 1..=10 {
            let d = 0.1 * i as f64;
            let r = formula_k2(d, &spec).unwrap();
            assert!(r.breakdown["r2_tilde"].re.abs() <= 20.0, "δ={d}");
        }
    }

    #[test]
    fn guards() {
        let spec = QuadSpec::default();
        assert!(matches!(formula_k2(0.01, &spec), Err(Error::Guard(_))));
        assert!(matches!(formula_k2(1.6, &spec), Err(Error::Domain(_))));
        assert!(matches!(formula_k3(0.1, &spec), Err(Error::Guard(_))));
        assert!(matches!(
            formula_k3_opts(0.01, &spec, Guards::Override),
            Err(Error::Guard(_))
        ));
        assert!(matches!(formula_k1(-0.1, &spec), Err(Error::Domain(_))));
        assert!(formula_k2_opts(0.04, &spec, Guards::Override).is_ok());
    }

    #[test]
    fn s_cutoff_bounds_s_term() {
        for &d in &[0.1, 0.5, 1.2] {
            let y = s_cutoff(d, 1e-12);
            for k in 0..20 {
                let s = s_at_y(y + 0.1 * k as f64, d, 1e-16).unwrap();
                assert!(s.norm() <= 1e-12, "δ={d}");
            }
        }
        assert!(s_cutoff(0.1, 1e-12) > s_cutoff(0.5, 1e-12));
    }

    #[test]
    fn k3_matches_direct_and_parts_are_consistent() {
        let spec = QuadSpec::default();
        let (r, parts) = formula_k3(0.8, &spec).unwrap();
        let m = direct(3, 0.8);
        assert!((r.value - m).abs() <= 1e-4 * m);
        assert!((parts.recompute() - parts.assembled).abs() <= 1e-12 * parts.assembled.abs());
        assert!(parts.orientation_gap <= 1e-12);
        assert!(
            (parts.main_m - parts.main_m_reflected.conj()).norm()
                <= 1e-12 * (1.0 + parts.main_m.norm())
        );
        assert!(parts.remainders[4].norm() <= 50.0);
    }
}
