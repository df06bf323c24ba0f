//! The divisor series `S₀(z) = Σ d(n) e(nz)` and `E₁ = 1 − 4S₀` on the upper
//! half-plane, the period function `ψ` through two routes, the elementary
//! correction `r`, and the split `A(−ue^{iδ}) = S(u) + R(u)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::autocorr::{a_continuation, a_integral_q};
use crate::error::{Error, Result};
use crate::numerics::{
    divisor_table, e2pi, log_principal, ChebTable, KahanSum, QuadSpec, EULER_GAMMA, I, LN_2PI,
};
use crate::verify::VerifyResult;

/// Smallest `Im z` accepted by [`s0`].
pub const IM_FLOOR: f64 = 1e-4;

/// Largest `u/δ` accepted by [`s_term`].
pub const S_TERM_GUARD: f64 = 1e6;

/// `c = (log 2π − γ)/2`.
pub const R_CONSTANT: f64 = 0.5 * (LN_2PI - EULER_GAMMA);

/// Number of terms needed so that `Σ_{n>N} n e^{−2πny} <= tol`.
pub fn s0_terms(im_z: f64, tol: f64) -> usize {
    let q = (-2.0 * PI * im_z).exp();
    let denom = (1.0 - q) * (1.0 - q);
    let mut n = 0usize;
    // Σ_{n>N} n q^n = q^{N+1} ((N+1) − N q) / (1−q)²
    let mut q_pow = q;
    loop {
        let nf = n as f64;
        if q_pow * ((nf + 1.0) - nf * q) / denom <= tol {
            return n;
        }
        n += 1;
        q_pow *= q;
    }
}

/// `S₀(z) = Σ_{n>=1} d(n) e^{2πinz}` for `Im z >= 1e−4`, truncated where the
/// tail bound (with `d(n) <= n`) drops below `tol`.
pub fn s0(z: Complex64, tol: f64) -> Result<Complex64> {
    if !(z.im >= IM_FLOOR) || !z.re.is_finite() {
        return Err(Error::Domain(format!(
            "S0 needs Im z >= {IM_FLOOR}, got {z}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Range(format!(
            "series tolerance must be positive, got {tol}"
        )));
    }
    let n_max = s0_terms(z.im, tol);
    if n_max == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let table = divisor_table(n_max)?;
    let mut acc = KahanSum::<Complex64>::new();
    for n in 1..=n_max {
        let nf = n as f64;
        acc.add(e2pi(Complex64::new(nf * z.re, nf * z.im)) * table.d(n) as f64);
    }
    Ok(acc.total())
}

/// `E₁(z) = 1 − 4 S₀(z)`.
pub fn e1(z: Complex64, tol: f64) -> Result<Complex64> {
    Ok(1.0 - 4.0 * s0(z, tol)?)
}

/// `ψ(z) = E₁(z) − E₁(−1/z)/z` on the upper half-plane.
pub fn psi_upper(z: Complex64, tol: f64) -> Result<Complex64> {
    if !(z.im > 0.0) {
        return Err(Error::Domain(format!("psi_upper needs Im z > 0, got {z}")));
    }
    let w = -1.0 / z;
    Ok(e1(z, tol)? - e1(w, tol)? / z)
}

/// `r(z) = c(1/z + 1) + (1/2)(1/z − 1) log z`.
pub fn r_func(z: Complex64) -> Result<Complex64> {
    let l = log_principal(z)?;
    let inv = 1.0 / z;
    Ok(R_CONSTANT * (inv + 1.0) + 0.5 * (inv - 1.0) * l)
}

/// `ψ(z) = (4/(iπ)) (A(z) − r(z))` with `A` from the Mellin–Barnes
/// continuation.
pub fn psi_from_a(z: Complex64, spec: &QuadSpec) -> Result<Complex64> {
    let a = a_continuation(z, spec)?;
    Ok((a - r_func(z)?) * (4.0 / (I * PI)))
}

/// Right-hand side of `A(z) + A(−z) = (2πi/z)S₀(−1/z) + log(2π/z) − γ + iπ/2`.
pub fn feq_iii_rhs(z: Complex64, tol: f64) -> Result<Complex64> {
    let s = s0(-1.0 / z, tol)?;
    Ok(2.0 * PI * I * s / z + (LN_2PI - log_principal(z)?) - EULER_GAMMA + I * (PI / 2.0))
}

/// Checks `A(z) + A(−z)` against the Eisenstein side for `z ∈ ℍ`, with `A`
/// from the Mellin–Barnes continuation.
pub fn check_feq_iii(z: Complex64, spec: &QuadSpec) -> Result<VerifyResult> {
    if !(z.im > 0.0) {
        return Err(Error::Domain(format!(
            "the z -> -z symmetry needs Im z > 0, got {z}"
        )));
    }
    let lhs = a_continuation(z, spec)? + a_continuation(-z, spec)?;
    let rhs = feq_iii_rhs(z, spec.series_tol)?;
    Ok(VerifyResult::scaled(
        format!("A(z)+A(-z) = Eisenstein side at z={z:.6}"),
        lhs,
        rhs,
        1e-7,
    ))
}

fn check_sr_args(u: f64, delta: f64) -> Result<()> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::Domain(format!("u must be positive, got {u}")));
    }
    if !(delta > 0.0 && delta < PI / 2.0) {
        return Err(Error::Domain(format!(
            "delta must lie in (0, π/2), got {delta}"
        )));
    }
    Ok(())
}

/// `S(u) = 2πi e^{−iδ} S₀(−e^{−iδ}/u) / u`.
pub fn s_term(u: f64, delta: f64, tol: f64) -> Result<Complex64> {
    check_sr_args(u, delta)?;
    if u / delta > S_TERM_GUARD {
        return Err(Error::Guard(format!(
            "S_term: u/delta = {} exceeds {S_TERM_GUARD}",
            u / delta
        )));
    }
    let rot = Complex64::from_polar(1.0, -delta);
    Ok(2.0 * PI * I * rot * s0(-rot / u, tol)? / u)
}

/// `R(u) = −A(ue^{iδ}) − log u + log 2π − γ + iπ/2 − iδ`.
pub fn r_term(u: f64, delta: f64, spec: &QuadSpec) -> Result<Complex64> {
    check_sr_args(u, delta)?;
    let a = a_integral_q(Complex64::from_polar(u, delta), spec)?.value;
    Ok(r_from_a(a, u.ln(), delta))
}

fn r_from_a(a: Complex64, ln_u: f64, delta: f64) -> Complex64 {
    -a - ln_u + LN_2PI - EULER_GAMMA + I * (PI / 2.0 - delta)
}

/// `A(−ue^{iδ})` split into its Eisenstein and smooth parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SrDecomposition {
    pub u: f64,
    pub delta: f64,
    pub s_part: Complex64,
    pub r_part: Complex64,
}

impl SrDecomposition {
    pub fn new(u: f64, delta: f64, spec: &QuadSpec) -> Result<Self> {
        Ok(Self {
            u,
            delta,
            s_part: s_term(u, delta, spec.series_tol)?,
            r_part: r_term(u, delta, spec)?,
        })
    }

    pub fn total(&self) -> Complex64 {
        self.s_part + self.r_part
    }
}

/// Beyond this `y = −log u` the smooth part is `c + y/2 + i(π−δ)/2` up to
/// `O(e^{−y})`.
const R_TABLE_Y_MAX: f64 = 36.0;

/// `R(e^{−y})` tabulated for one δ.
#[derive(Debug, Clone)]
pub struct RTable {
    delta: f64,
    table: ChebTable,
}

impl RTable {
    pub fn new(delta: f64, spec: &QuadSpec) -> Result<Self> {
        check_sr_args(1.0, delta)?;
        let inner = spec.tightened(0.01);
        let table = ChebTable::build(
            |y| {
                let a = a_integral_q(Complex64::from_polar((-y).exp(), delta), &inner)?.value;
                Ok(r_from_a(a, -y, delta))
            },
            0.0,
            R_TABLE_Y_MAX,
            (0.1 * spec.abs_tol).max(1e-13),
        )?;
        Ok(Self { delta, table })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `R(e^{−y})` for `y >= 0`.
    pub fn at_y(&self, y: f64) -> Complex64 {
        if y <= R_TABLE_Y_MAX {
            self.table.eval(y)
        } else {
            Complex64::new(R_CONSTANT + 0.5 * y, 0.5 * (PI - self.delta))
        }
    }
}

/// `S(e^{−y})` without argument checks; zero once `S₀` is below `tol`.
pub(crate) fn s_at_y(y: f64, delta: f64, tol: f64) -> Result<Complex64> {
    let inv_u = y.exp();
    let rot = Complex64::from_polar(1.0, -delta);
    Ok(2.0 * PI * I * rot * s0(-rot * inv_u, tol)? * inv_u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autocorr::a_cutplane;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn s0_at_i_golden() {
        // reference value from a 30-digit evaluation
        let v = s0(c(0.0, 1.0), 1e-16).unwrap();
        assert!((v.re - 0.001_874_430_477_774_940_9).abs() < 1e-17, "{v}");
        assert!(v.im.abs() < 1e-18);
    }

    #[test]
    fn s0_dominant_term() {
        for &x in &[0.0, 0.3, -0.77] {
            let z = c(x, 10.0);
            let v = s0(z, 1e-300).unwrap();
            let lead = e2pi(z);
            assert!((v - lead).norm() <= 4.0 * (-40.0 * PI).exp());
        }
    }

    #[test]
    fn s0_conjugate_symmetry() {
        for &z in &[c(0.3, 0.7), c(-1.2, 0.05), c(0.49, 2.0)] {
            let a = s0(-z.conj(), 1e-14).unwrap();
            let b = s0(z, 1e-14).unwrap();
            assert!((a - b.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn s0_doubling_stability() {
        for &z in &[c(0.0, 1.0), c(0.25, 0.1), c(-0.4, 0.02), c(0.1, 0.5)] {
            let tol = 1e-12;
            let n = s0_terms(z.im, tol);
            let a = s0(z, tol).unwrap();
            let table = divisor_table(2 * n).unwrap();
            let b: Complex64 = (1..=2 * n)
                .map(|k| e2pi(z * k as f64) * table.d(k) as f64)
                .sum();
            assert!((a - b).norm() <= 2.0 * tol, "z={z}");
        }
    }

    #[test]
    fn s0_rejects_low_im() {
        assert!(matches!(s0(c(0.0, 1e-5), 1e-10), Err(Error::Domain(_))));
    }

    #[test]
    fn e1_values() {
        assert!((e1(c(0.0, 10.0), 1e-15).unwrap() - 1.0).norm() < 1e-25);
        let z = c(0.2, 0.8);
        let s = s0(z, 1e-14).unwrap();
        assert!(((1.0 - e1(z, 1e-14).unwrap()) / 4.0 - s).norm() < 1e-16);
    }

    #[test]
    fn psi_at_i() {
        let e = e1(I, 1e-15).unwrap();
        let p = psi_upper(I, 1e-15).unwrap();
        assert!((p - (1.0 + I) * e).norm() < 1e-15);
    }

    #[test]
    fn r_at_one() {
        let r = r_func(c(1.0, 0.0)).unwrap();
        assert!((r.re - (LN_2PI - EULER_GAMMA)).abs() < 1e-15);
        assert!((r.re - 1.260_661_401_507_812_6).abs() < 1e-15);
        assert!(r_func(c(-1.0, 0.0)).is_err());
    }

    #[test]
    fn r_is_continuous_across_positive_axis() {
        let a = r_func(Complex64::from_polar(1.0, 1e-9)).unwrap();
        let b = r_func(Complex64::from_polar(1.0, -1e-9)).unwrap();
        assert!((a - b).norm() < 1e-8);
    }

    #[test]
    fn psi_two_routes() {
        let spec = QuadSpec::default();
        for &z in &[
            I,
            c(0.5, 0.5),
            c(-0.7, 1.3),
            Complex64::from_polar(1.0, 0.75 * PI),
        ] {
            let a = psi_upper(z, 1e-14).unwrap();
            let b = psi_from_a(z, &spec).unwrap();
            assert!((a - b).norm() <= 1e-7 * (1.0 + a.norm()), "z={z} {a} {b}");
        }
    }

    #[test]
    fn psi_from_a_conjugation() {
        let spec = QuadSpec::default();
        let z = c(2.0, 0.4);
        let a = psi_from_a(z, &spec).unwrap();
        let b = psi_from_a(z.conj(), &spec).unwrap();
        // the factor 4/(iπ) is imaginary, so ψ is anti-symmetric under conjugation
        assert!((a + b.conj()).norm() < 1e-9, "{a} {b}");
    }

    #[test]
    fn feq_iii_points() {
        let spec = QuadSpec::default();
        for &z in &[I, Complex64::from_polar(1.0, 0.8), c(0.3, 1.5)] {
            let v = check_feq_iii(z, &spec).unwrap();
            assert!(v.pass, "{v:?}");
        }
    }

    #[test]
    fn sr_decomposition_matches_continuation() {
        let spec = QuadSpec::default();
        for &u in &[0.1, 0.5, 0.9] {
            for &d in &[0.2, 0.5, 1.0] {
                let sr = SrDecomposition::new(u, d, &spec).unwrap();
                let z = -Complex64::from_polar(u, d);
                let a = a_continuation(z, &spec).unwrap();
                assert!(
                    (sr.total() - a).norm() <= 1e-7 * (1.0 + a.norm()),
                    "u={u} δ={d}"
                );
                let b = a_cutplane(z, &spec).unwrap();
                assert!((sr.total() - b).norm() <= 1e-9 * (1.0 + a.norm()));
            }
        }
    }

    #[test]
    fn s_term_small_u_suppression() {
        let d = 0.3;
        let u = 0.05;
        let s = s_term(u, d, 1e-14).unwrap();
        assert!(s.norm() <= 10.0 / d * (-d / u).exp());
    }

    #[test]
    fn s_term_modulus_identity() {
        let d = 0.5;
        for &w in &[0.5, 1.0, 3.0] {
            let a = s0(-Complex64::from_polar(w, -d), 1e-14).unwrap();
            let b = s0(Complex64::from_polar(w, d), 1e-14).unwrap();
            assert!((a.norm() - b.norm()).abs() < 1e-13);
            assert!((a - b.conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn s_term_golden() {
        // reference value from a 30-digit evaluation
        let s = s_term(1.0, 0.5, 1e-15).unwrap();
        assert!((s - c(-0.109_865_391_130_916_57, 0.312_845_436_621_860_02)).norm() < 1e-14);
    }

    #[test]
    fn psi_two_routes_on_grid() {
        let spec = QuadSpec::default();
        for i in 0..10 {
            let t = i as f64 / 9.0;
            let z = c(-1.5 + 3.0 * t, 0.3 + 2.7 * t);
            assert!(z.im >= 0.3 && z.im <= 3.0);
            let a = psi_upper(z, 1e-14).unwrap();
            let b = psi_from_a(z, &spec).unwrap();
            assert!((a - b).norm() <= 1e-7 * (1.0 + a.norm()), "z={z}");
        }
        let two_i = c(0.0, 2.0);
        let direct = e1(two_i, 1e-15).unwrap() + c(0.0, 0.5) * e1(c(0.0, 0.5), 1e-15).unwrap();
        assert!((psi_upper(two_i, 1e-15).unwrap() - direct).norm() < 1e-14);
    }

    #[test]
    fn s_energy_growth_is_stable() {
        // Q_S² = ∫₀¹ |S(u)|² du against δ⁻¹ log⁴(1/δ)
        let spec = QuadSpec::default();
        let ratios: Vec<f64> = [0.1, 0.2, 0.4]
            .iter()
            .map(|&d: &f64| {
                let q = crate::numerics::integrate_panels(
                    |y: f64| s_at_y(y, d, 1e-14).unwrap().norm_sqr() * (-y).exp(),
                    &crate::numerics::quad::uniform_points(0.0, 8.0, 0.05),
                    &spec,
                )
                .unwrap()
                .value;
                q * d / (1.0 / d).ln().powi(4)
            })
            .collect();
        let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(hi / lo <= 3.0, "{ratios:?}");
    }

    #[test]
    fn s_term_guard() {
        assert!(matches!(s_term(1e6, 0.5, 1e-12), Err(Error::Guard(_))));
    }

    #[test]
    fn r_term_log_bound() {
        let spec = QuadSpec::default();
        let d = 0.3;
        for i in 0..=12 {
            let u = 10f64.powf(-3.0 + 0.25 * i as f64);
            let r = r_term(u, d, &spec).unwrap();
            assert!(r.norm() <= 10.0 * (1.0 + (1.0 / u).ln()), "u={u}");
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(10))]
        #[test]
        fn feq_iii_random(r in 0.3f64..3.0, th in 0.15f64..(PI - 0.15)) {
            let v = check_feq_iii(Complex64::from_polar(r, th), &QuadSpec::default()).unwrap();
            proptest::prop_assert!(v.pass, "{:?}", v);
        }
    }

    #[test]
    fn r_table_matches_direct() {
        let spec = QuadSpec::default();
        let d = 0.5;
        let t = RTable::new(d, &spec).unwrap();
        for &y in &[0.0f64, 0.013, 0.7, 3.3, 17.0, 35.9] {
            let direct = r_term((-y).exp(), d, &spec).unwrap();
            assert!((t.at_y(y) - direct).norm() < 1e-9, "y={y}");
        }
        // past the table the asymptotic form takes over continuously
        let inside = t.at_y(R_TABLE_Y_MAX);
        let outside = t.at_y(R_TABLE_Y_MAX + 1e-9);
        assert!((inside - outside).norm() < 1e-9, "{inside} {outside}");
    }
}
