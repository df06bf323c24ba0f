//! Foundational arithmetic shared by every other module: principal-branch
//! complex functions, Gamma, exact combinatorial sequences, the divisor
//! sieve, and adaptive quadrature.

mod combinatorics;
mod gamma;
mod interp;
pub mod quad;
pub(crate) use quad::FirstError;
mod sieve;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub(crate) use combinatorics::ratio_to_f64;
pub use combinatorics::{bernoulli, bernoulli_f64, binomial, stirling2};
pub use gamma::{gamma, ln_gamma};
pub use interp::ChebTable;
pub use quad::{
    integrate_adaptive, integrate_panels, integrate_semiinfinite, Envelope, QuadResult, QuadValue,
};
pub use sieve::{divisor_sieve, divisor_table, sieve_limit, DivisorTable};

/// Complex numbers used throughout the crate.
pub type ComplexValue = Complex64;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `ln(2π)`.
pub const LN_2PI: f64 = 1.837_877_066_409_345_5;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Quadrature and series-truncation policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    /// Lower bound for the truncation point of semi-infinite integrals.
    pub tail_cutoff: f64,
    /// Truncation tolerance for infinite series.
    pub series_tol: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_depth: 32,
            tail_cutoff: 8.0,
            series_tol: 1e-12,
        }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::Range(format!("{name} must lie in (0, 1), got {v}")))
            }
        };
        unit("abs_tol", self.abs_tol)?;
        unit("rel_tol", self.rel_tol)?;
        unit("series_tol", self.series_tol)?;
        if !(1..=60).contains(&self.max_depth) {
            return Err(Error::Range(format!(
                "max_depth must lie in [1, 60], got {}",
                self.max_depth
            )));
        }
        if !(self.tail_cutoff > 0.0 && self.tail_cutoff.is_finite()) {
            return Err(Error::Range(format!(
                "tail_cutoff must be positive, got {}",
                self.tail_cutoff
            )));
        }
        Ok(())
    }

    /// Same policy with both integration tolerances scaled by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..*self
        }
    }

    pub fn with_depth(&self, max_depth: u32) -> Self {
        Self { max_depth, ..*self }
    }

    /// Acceptance threshold for an integral whose current estimate is `value`.
    pub fn target(&self, value_norm: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value_norm)
    }
}

/// Principal logarithm on the cut plane `C \ (-inf, 0]`.
pub fn log_principal(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("log of non-finite {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::Domain(format!("{z} lies on the branch cut of log")));
    }
    Ok(Complex64::new(z.norm().ln(), z.im.atan2(z.re)))
}

/// `z^w = exp(w log z)` through the principal branch.
pub fn pow_principal(z: Complex64, w: Complex64) -> Result<Complex64> {
    Ok((w * log_principal(z)?).exp())
}

/// `ln cosh(x)` without overflow.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `e^{2πi z}`, with the real part of `z` reduced modulo 1 before scaling.
pub fn e2pi(z: Complex64) -> Complex64 {
    let phase = 2.0 * PI * z.re.rem_euclid(1.0);
    let amp = (-2.0 * PI * z.im).exp();
    Complex64::new(amp * phase.cos(), amp * phase.sin())
}

/// Compensated (Kahan) accumulator.
#[derive(Debug, Clone, Copy)]
pub struct KahanSum<V: QuadValue> {
    sum: V,
    comp: V,
}

impl<V: QuadValue> Default for KahanSum<V> {
    fn default() -> Self {
        Self {
            sum: V::zero(),
            comp: V::zero(),
        }
    }
}

impl<V: QuadValue> KahanSum<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: V) {
        let y = x.sub(self.comp);
        let t = self.sum.add(y);
        self.comp = t.sub(self.sum).sub(y);
        self.sum = t;
    }

    pub fn total(&self) -> V {
        self.sum
    }
}

impl<V: QuadValue> FromIterator<V> for KahanSum<V> {
    fn from_iter<T: IntoIterator<Item = V>>(iter: T) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn log_of_one_and_i() {
        assert_eq!(
            log_principal(Complex64::new(1.0, 0.0)).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        let l = log_principal(I).unwrap();
        assert!(l.re.abs() < 1e-16);
        assert!((l.im - PI / 2.0).abs() < 1e-16);
    }

    #[test]
    fn log_rejects_cut() {
        assert!(log_principal(Complex64::new(-1.0, 0.0)).is_err());
        assert!(log_principal(Complex64::new(0.0, 0.0)).is_err());
        assert!(log_principal(Complex64::new(-3.5, 0.0)).is_err());
        assert!(log_principal(Complex64::new(-1.0, 1e-300)).is_ok());
    }

    #[test]
    fn ln_cosh_matches_direct_in_safe_range() {
        for &x in &[0.0, 0.3, -2.0, 10.0, -30.0] {
            let direct = f64::cosh(x).ln();
            assert!((ln_cosh(x) - direct).abs() < 1e-14 * (1.0 + direct.abs()));
        }
        assert!((ln_cosh(1000.0) - (1000.0 - std::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        assert!(QuadSpec::default().validate().is_ok());
        let bad = QuadSpec {
            abs_tol: 0.0,
            ..QuadSpec::default()
        };
        assert!(bad.validate().is_err());
        assert!(QuadSpec::default().with_depth(61).validate().is_err());
    }

    #[test]
    fn kahan_beats_naive() {
        let mut k = KahanSum::<f64>::new();
        let mut naive = 0.0f64;
        k.add(1.0);
        naive += 1.0;
        for _ in 0..1_000_000 {
            k.add(1e-16);
            naive += 1e-16;
        }
        assert!((k.total() - (1.0 + 1e-10)).abs() < 1e-15);
        assert!((naive - (1.0 + 1e-10)).abs() > 1e-11);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn exp_log_roundtrip(r in 1e-3f64..1e3, theta in -3.1f64..3.1) {
            let z = Complex64::from_polar(r, theta);
            let back = log_principal(z).unwrap().exp();
            prop_assert!((back - z).norm() <= 1e-14 * z.norm());
        }
    }
}
