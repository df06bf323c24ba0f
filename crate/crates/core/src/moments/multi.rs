//! `M₂ₖ(δ)` as a `(k−1)`-fold integral of products of `A` along the ray
//! `−e^{iδ}·ℝ₊`, after the substitution `uⱼ = e^{xⱼ}`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::autocorr::a_cutplane;
use crate::eisenstein::R_CONSTANT;
use crate::error::{Error, Result};
use crate::numerics::quad::{integrate_nested, uniform_points};
use crate::numerics::{integrate_panels, ChebTable, QuadResult, QuadSpec};
use crate::zeta_line::{Guards, Method, MomentReport};

use super::formulas::check_formula_delta;

/// Floor on δ for the two-dimensional integral (k = 3).
pub const MULTI_K3_FLOOR: f64 = 0.3;
/// Floor on δ for the one-dimensional integral (k = 2).
pub const MULTI_K2_FLOOR: f64 = 0.1;

const TABLE_HALF_WIDTH: f64 = 36.0;
const K2_HALF_WIDTH: f64 = 44.0;
const K3_HALF_WIDTH: f64 = 40.0;

/// `g(x) = A(−e^{iδ} e^x)`, tabulated for `|x| <= 36`. Past that, `A(w)` is
/// `c − ½ log w` (small `w`) or `(c + ½ log w)/w` (large `w`) up to
/// `O(e^{−36})`.
pub struct RayTable {
    delta: f64,
    table: ChebTable,
}

impl RayTable {
    pub fn new(delta: f64, spec: &QuadSpec) -> Result<Self> {
        if !(delta > 0.0 && delta < PI) {
            return Err(Error::Domain(format!(
                "ray table needs 0 < delta < π, got {delta}"
            )));
        }
        let rot = -Complex64::from_polar(1.0, delta);
        let inner = spec.tightened(0.01);
        let table = ChebTable::build(
            |x| a_cutplane(rot * x.exp(), &inner),
            -TABLE_HALF_WIDTH,
            TABLE_HALF_WIDTH,
            (0.1 * spec.abs_tol).max(1e-13),
        )?;
        Ok(Self { delta, table })
    }

    pub fn at(&self, x: f64) -> Complex64 {
        if x.abs() <= TABLE_HALF_WIDTH {
            return self.table.eval(x);
        }
        let log_w = Complex64::new(x, self.delta - PI);
        if x < 0.0 {
            R_CONSTANT - 0.5 * log_w
        } else {
            (R_CONSTANT + 0.5 * log_w) * (-log_w).exp()
        }
    }
}

fn report(
    k: u32,
    delta: f64,
    value: Complex64,
    res_err: f64,
    scale: f64,
    extra: &[(&str, Complex64)],
) -> MomentReport {
    let mut breakdown = BTreeMap::new();
    breakdown.insert("integral".to_string(), value);
    breakdown.insert("imag_residual".to_string(), Complex64::new(value.im, 0.0));
    for (name, v) in extra {
        breakdown.insert((*name).to_string(), *v);
    }
    MomentReport {
        k,
        delta,
        method: Method::MultiIntegral,
        value: value.re,
        err_estimate: scale * res_err + value.im.abs(),
        breakdown,
    }
}

/// `M₄(δ) = (4/π) ∫₀¹ |A(−ue^{iδ})|² du`.
pub fn m4_single_integral(delta: f64, spec: &QuadSpec) -> Result<QuadResult<f64>> {
    let ray = RayTable::new(delta, spec)?;
    m4_single_from(&ray, spec)
}

fn m4_single_from(ray: &RayTable, spec: &QuadSpec) -> Result<QuadResult<f64>> {
    let mut res = integrate_panels(
        |x: f64| ray.at(x).norm_sqr() * x.exp(),
        &uniform_points(-K2_HALF_WIDTH, 0.0, 0.5),
        &spec.tightened(0.25),
    )?;
    res.value *= 4.0 / PI;
    res.err_estimate *= 4.0 / PI;
    Ok(res)
}

/// `M₂ₖ(δ) = 2 e^{ik(δ−π)/2} / π^{k−1} ∫ A(−e^{iδ}/∏uⱼ) ∏ A(−uⱼe^{iδ}) duⱼ/uⱼ`
/// for `k ∈ {2, 3}`. The complex value before projection is kept in the
/// breakdown; for `k = 2` the breakdown also carries the single-integral
/// reduction.
pub fn multi_integral_form(k: u32, delta: f64, spec: &QuadSpec) -> Result<MomentReport> {
    multi_integral_form_opts(k, delta, spec, Guards::Enforce)
}

pub fn multi_integral_form_opts(
    k: u32,
    delta: f64,
    spec: &QuadSpec,
    guards: Guards,
) -> Result<MomentReport> {
    spec.validate()?;
    let floor = match k {
        2 => MULTI_K2_FLOOR,
        3 => MULTI_K3_FLOOR,
        _ => {
            return Err(Error::Range(format!(
                "multi-integral form supports k in {{2, 3}}, got {k}"
            )))
        }
    };
    check_formula_delta(delta, "multi_integral_form", floor, guards)?;
    let ray = RayTable::new(delta, spec)?;
    let kf = k as f64;
    let prefactor =
        2.0 * Complex64::from_polar(1.0, 0.5 * kf * (delta - PI)) / PI.powi(k as i32 - 1);
    if k == 2 {
        let res = integrate_panels(
            |x: f64| ray.at(-x) * ray.at(x),
            &uniform_points(-K2_HALF_WIDTH, K2_HALF_WIDTH, 0.5),
            &spec.tightened(0.25),
        )?;
        let single = m4_single_from(&ray, spec)?;
        let value = prefactor * res.value;
        Ok(report(
            2,
            delta,
            value,
            res.err_estimate,
            prefactor.norm(),
            &[("single_integral", Complex64::new(single.value, 0.0))],
        ))
    } else {
        let pts = uniform_points(-K3_HALF_WIDTH, K3_HALF_WIDTH, 1.0);
        let res = integrate_nested(
            |x1: f64, x2: f64| ray.at(-x1 - x2) * ray.at(x1) * ray.at(x2),
            &pts,
            |_| pts.clone(),
            &spec.tightened(0.25),
        )?;
        Ok(report(
            3,
            delta,
            prefactor * res.value,
            res.err_estimate,
            prefactor.norm(),
            &[],
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autocorr::a_continuation;
    use crate::zeta_line::moment_direct;

    #[test]
    fn ray_table_matches_continuation_and_asymptotics() {
        let spec = QuadSpec::default();
        let d = 0.7;
        let ray = RayTable::new(d, &spec).unwrap();
        let rot = -Complex64::from_polar(1.0, d);
        for &x in &[-3.0, -0.4, 0.0, 1.3, 5.0] {
            let a = a_continuation(rot * f64::exp(x), &spec).unwrap();
            assert!((ray.at(x) - a).norm() <= 1e-8 * (1.0 + a.norm()), "x={x}");
        }
        for &edge in &[-TABLE_HALF_WIDTH, TABLE_HALF_WIDTH] {
            let inside = ray.at(edge);
            let outside = ray.at(edge * (1.0 + 1e-12));
            assert!((inside - outside).norm() <= 1e-9 * (1.0 + inside.norm()));
        }
    }

    #[test]
    fn k2_multi_integral_and_single_integral() {
        let spec = QuadSpec::default();
        let r = multi_integral_form(2, 0.5, &spec).unwrap();
        let m = moment_direct(2, 0.5, &spec).unwrap().value;
        assert!((r.value - m).abs() <= 1e-5 * m);
        assert!(r.breakdown["imag_residual"].re.abs() <= 1e-6 * m);
        let single = m4_single_integral(0.5, &spec).unwrap().value;
        assert!((single - m).abs() <= 1e-5 * m);
    }

    #[test]
    fn k3_multi_integral() {
        let spec = QuadSpec::default();
        let r = multi_integral_form(3, 0.8, &spec).unwrap();
        let m = moment_direct(3, 0.8, &spec).unwrap().value;
        assert!((r.value - m).abs() <= 1e-3 * m);
        assert!(r.breakdown["imag_residual"].re.abs() <= 1e-6 * m);
    }

    #[test]
    fn rejects_other_k_and_low_delta() {
        let spec = QuadSpec::default();
        assert!(matches!(
            multi_integral_form(4, 0.5, &spec),
            Err(Error::Range(_))
        ));
        assert!(matches!(
            multi_integral_form(3, 0.2, &spec),
            Err(Error::Guard(_))
        ));
        assert!(matches!(
            multi_integral_form(2, 0.05, &spec),
            Err(Error::Guard(_))
        ));
    }
}
