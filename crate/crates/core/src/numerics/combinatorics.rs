//! Exact Bernoulli and Stirling numbers.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

const MAX_INDEX: usize = 64;

fn bernoulli_table() -> &'static [BigRational] {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Σ_{k=0}^{m} C(m+1, k) B_k = 0 for m >= 1, with B_0 = 1 (so B_1 = -1/2).
        let mut b: Vec<BigRational> = Vec::with_capacity(MAX_INDEX + 1);
        b.push(BigRational::one());
        for m in 1..=MAX_INDEX {
            let mut acc = BigRational::zero();
            for (k, bk) in b.iter().enumerate() {
                acc +=
                    BigRational::from_integer(BigInt::from(binomial(m as u32 + 1, k as u32))) * bk;
            }
            b.push(-acc / BigRational::from_integer(BigInt::from(m as u64 + 1)));
        }
        b
    })
}

/// Bernoulli number `B_n` as an exact rational, with `B_1 = -1/2`.
pub fn bernoulli(n: usize) -> Result<BigRational> {
    bernoulli_table()
        .get(n)
        .cloned()
        .ok_or_else(|| Error::Range(format!("bernoulli index {n} exceeds {MAX_INDEX}")))
}

/// `B_n` rounded to the nearest double.
pub fn bernoulli_f64(n: usize) -> Result<f64> {
    let b = bernoulli(n)?;
    Ok(ratio_to_f64(&b))
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Stirling number of the second kind `S(n, j)`.
pub fn stirling2(n: usize, j: usize) -> Result<BigUint> {
    if n > MAX_INDEX || j > MAX_INDEX {
        return Err(Error::Range(format!(
            "stirling2({n}, {j}) exceeds index limit {MAX_INDEX}"
        )));
    }
    Ok(stirling_table()[n][j].clone())
}

fn stirling_table() -> &'static [Vec<BigUint>] {
    static TABLE: OnceLock<Vec<Vec<BigUint>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let size = MAX_INDEX + 2;
        let mut s = vec![vec![BigUint::zero(); size]; size];
        s[0][0] = BigUint::one();
        for n in 1..size {
            for j in 1..=n {
                s[n][j] = BigUint::from(j) * &s[n - 1][j] + &s[n - 1][j - 1];
            }
        }
        s
    })
}

/// Exact binomial coefficient.
pub fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}
