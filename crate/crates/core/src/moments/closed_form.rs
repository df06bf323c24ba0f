//! The polynomial moments `∫ t^{2N} |ζ(1/2+it)|² dt / cosh(πt)` in closed
//! form.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::autocorr::q_envelope_constant;
use crate::error::{Error, Result};
use crate::numerics::{
    bernoulli, binomial, ln_cosh, ratio_to_f64, stirling2, Envelope, KahanSum, QuadSpec,
    EULER_GAMMA, LN_2PI,
};
use crate::zeta_line::{line_integral, zeta_sq_on_line};

/// Largest `N` accepted by [`t_coeff`].
pub const T_COEFF_MAX: usize = 40;
/// Largest `N` accepted by [`closed_form_poly`].
pub const POLY_MAX: u32 = 6;

/// `T_{N,j} = (j−1)! Σ_{2<=n<=N} C(N,n) 2ⁿ [(−1)ⁿ S(n+1,j) + (−1)ʲ S(n,j−1)]`,
/// zero when `N < 2`.
pub fn t_coeff(n: usize, j: usize) -> Result<BigInt> {
    if n < 2 {
        return Ok(BigInt::zero());
    }
    if n > T_COEFF_MAX || j < 2 || j > n {
        return Err(Error::Range(format!(
            "T_(N,j) needs 2 <= j <= N <= {T_COEFF_MAX}, got N={n}, j={j}"
        )));
    }
    let mut acc = BigInt::zero();
    for m in 2..=n {
        let first = BigInt::from(stirling2(m + 1, j)?);
        let second = BigInt::from(stirling2(m, j - 1)?);
        let bracket = if m.is_multiple_of(2) { first } else { -first }
            + if j.is_multiple_of(2) { second } else { -second };
        acc += BigInt::from(binomial(n as u32, m as u32)) * (BigInt::from(1u8) << m) * bracket;
    }
    let fact: BigInt = (1..j).map(BigInt::from).product();
    Ok(acc * fact)
}

/// One instance of the closed-form identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyMomentResult {
    pub n: u32,
    /// `(−4)^N/2 ∫ t^{2N} |ζ(1/2+it)|² dt / cosh(πt)` by quadrature.
    pub lhs: f64,
    pub lhs_err: f64,
    /// `log 2π − γ − 4N + (4^N/2 − 1)B_{2N} + Σ_{j=2}^{2N} T_{2N,j} ζ(j)Bⱼ/j`.
    pub rhs: f64,
    /// `T_{2N,j}` for `j = 2, …, 2N`.
    pub t_coeffs: Vec<i64>,
}

/// `ζ(j) Bⱼ / j` for `j >= 2`. Odd `j` give zero since `Bⱼ = 0`; for even `j`,
/// `ζ(j) = (−1)^{j/2+1} (2π)^j Bⱼ / (2·j!)`.
fn zeta_bernoulli_term(j: usize) -> Result<f64> {
    let b = bernoulli(j)?;
    if b.is_zero() {
        return Ok(0.0);
    }
    let fact: BigInt = (1..=j).map(BigInt::from).product();
    let sign = if (j / 2) % 2 == 1 { 1 } else { -1 };
    let exact = &b * &b / BigRational::from_integer(fact * 2 * BigInt::from(j) * sign);
    Ok(ratio_to_f64(&exact) * (2.0 * PI).powi(j as i32))
}

/// Right-hand side of the closed-form identity for `N`.
pub fn closed_form_rhs(n: u32) -> Result<(f64, Vec<i64>)> {
    if n > POLY_MAX {
        return Err(Error::Range(format!(
            "closed form needs N <= {POLY_MAX}, got {n}"
        )));
    }
    let two_n = 2 * n as usize;
    let b2n = bernoulli(two_n)?;
    let four_n = BigRational::from_integer(BigInt::from(1u8) << (2 * n as usize));
    let poly_part =
        (four_n / BigRational::from_integer(2.into()) - BigRational::from_integer(1.into())) * b2n;
    let mut sum = KahanSum::<f64>::new();
    sum.add(LN_2PI - EULER_GAMMA - 4.0 * n as f64);
    sum.add(ratio_to_f64(&poly_part));
    let mut coeffs = Vec::new();
    for j in 2..=two_n {
        let t = t_coeff(two_n, j)?;
        let term = zeta_bernoulli_term(j)?;
        sum.add(t.to_f64().unwrap_or(f64::NAN) * term);
        coeffs.push(
            t.to_i64()
                .ok_or_else(|| Error::Range(format!("T_({two_n},{j}) exceeds i64")))?,
        );
    }
    Ok((sum.total(), coeffs))
}

/// Both sides of the closed-form identity for `0 <= N <= 6`.
pub fn closed_form_poly(n: u32, spec: &QuadSpec) -> Result<PolyMomentResult> {
    spec.validate()?;
    let (rhs, t_coeffs) = closed_form_rhs(n)?;
    let p = 2 * n as i32;
    // |ζ|²/cosh(πt) <= (C/π) e^{−π|t|} (1+|t|)^4
    let env = Envelope {
        scale: q_envelope_constant() / PI,
        rate: PI,
        poly: 4.0 + p as f64,
    };
    let res = line_integral(
        |t: f64| zeta_sq_on_line(t) * t.powi(p) * (-ln_cosh(PI * t)).exp(),
        env,
        env,
        &spec.tightened(1.0 / 4f64.powi(n as i32)),
    )?;
    let factor = (-4f64).powi(n as i32) / 2.0;
    Ok(PolyMomentResult {
        n,
        lhs: factor * res.value,
        lhs_err: factor.abs() * res.err_estimate,
        rhs,
        t_coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent expansion of the same sum with machine integers and a
    // separately coded Stirling recurrence.
    fn t_coeff_i128(n: usize, j: usize) -> i128 {
        let mut s = vec![vec![0i128; n + 2]; n + 2];
        s[0][0] = 1;
        for a in 1..=n + 1 {
            for b in 1..=a {
                s[a][b] = b as i128 * s[a - 1][b] + s[a - 1][b - 1];
            }
        }
        let binom = |a: usize, b: usize| -> i128 {
            (0..b).fold(1i128, |acc, i| acc * (a - i) as i128 / (i as i128 + 1))
        };
        let sign = |p: usize| if p.is_multiple_of(2) { 1i128 } else { -1 };
        let sum: i128 = (2..=n)
            .map(|m| binom(n, m) * (1i128 << m) * (sign(m) * s[m + 1][j] + sign(j) * s[m][j - 1]))
            .sum();
        (1..j as i128).product::<i128>() * sum
    }

    #[test]
    fn t_coeff_small_cases() {
        // 1!·C(2,2)·2²·(S(3,2) + S(2,1)) = 4·(3 + 1)
        assert_eq!(t_coeff(2, 2).unwrap(), BigInt::from(16));
        assert_eq!(t_coeff(0, 5).unwrap(), BigInt::zero());
        assert_eq!(t_coeff(1, 1).unwrap(), BigInt::zero());
        assert!(t_coeff(3, 4).is_err());
        assert!(t_coeff(41, 2).is_err());
    }

    #[test]
    fn t_coeff_matches_independent_expansion() {
        for n in 2..=12 {
            for j in 2..=n {
                assert_eq!(
                    t_coeff(n, j).unwrap(),
                    BigInt::from(t_coeff_i128(n, j)),
                    "N={n} j={j}"
                );
            }
        }
    }

    #[test]
    fn t_coeff_large_index_is_exact() {
        let t = t_coeff(40, 20).unwrap();
        assert!(t.bits() > 64);
    }

    #[test]
    fn closed_form_n0() {
        let (rhs, coeffs) = closed_form_rhs(0).unwrap();
        assert!((rhs - (LN_2PI - EULER_GAMMA - 0.5)).abs() < 1e-15);
        assert!(coeffs.is_empty());
    }

    #[test]
    fn closed_form_n1_by_hand() {
        let (rhs, _) = closed_form_rhs(1).unwrap();
        let by_hand =
            LN_2PI - EULER_GAMMA - 4.0 + 1.0 / 6.0 + 16.0 * (PI * PI / 6.0) * (1.0 / 6.0) / 2.0;
        assert!((rhs - by_hand).abs() < 1e-14);
    }

    #[test]
    fn closed_form_identity() {
        let spec = QuadSpec::default();
        for n in 0..=4 {
            let r = closed_form_poly(n, &spec).unwrap();
            assert!(
                (r.lhs - r.rhs).abs() <= 1e-7 * r.rhs.abs(),
                "N={n}: {} vs {}",
                r.lhs,
                r.rhs
            );
        }
        assert!(closed_form_poly(7, &spec).is_err());
    }
}
