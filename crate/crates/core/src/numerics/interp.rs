//! Piecewise Chebyshev interpolation of expensive smooth functions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const DEGREE: usize = 24;
const MAX_PIECES: usize = 4096;

#[derive(Debug, Clone)]
struct Piece {
    lo: f64,
    hi: f64,
    coeffs: Vec<Complex64>,
}

/// Interpolant of a complex function on `[a, b]`, refined piece by piece
/// until the trailing Chebyshev coefficients fall below the tolerance.
#[derive(Debug, Clone)]
pub struct ChebTable {
    pieces: Vec<Piece>,
}

fn fit<F>(f: &F, lo: f64, hi: f64) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let n = DEGREE + 1;
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let theta: Vec<f64> = (0..n).map(|j| PI * (j as f64 + 0.5) / n as f64).collect();
    let values = theta
        .iter()
        .map(|th| f(mid + half * th.cos()))
        .collect::<Result<Vec<_>>>()?;
    let coeffs = (0..n)
        .map(|k| {
            let s: Complex64 = values
                .iter()
                .zip(&theta)
                .map(|(v, th)| v * (k as f64 * th).cos())
                .sum();
            s * (2.0 / n as f64)
        })
        .collect();
    Ok(coeffs)
}

impl ChebTable {
    pub fn build<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Self>
    where
        F: Fn(f64) -> Result<Complex64>,
    {
        if !(a < b) {
            return Err(Error::Range(format!("need a < b, got [{a}, {b}]")));
        }
        let mut done = Vec::new();
        let mut todo = vec![(a, b)];
        while let Some((lo, hi)) = todo.pop() {
            let coeffs = fit(&f, lo, hi)?;
            let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
            let tail =
                coeffs[DEGREE].norm() + coeffs[DEGREE - 1].norm() + coeffs[DEGREE - 2].norm();
            if tail <= tol * scale || hi - lo < 1e-9 * (b - a) {
                done.push(Piece { lo, hi, coeffs });
            } else {
                if done.len() + todo.len() >= MAX_PIECES {
                    return Err(Error::Capacity {
                        needed: done.len() + todo.len() + 1,
                        limit: MAX_PIECES,
                    });
                }
                let mid = 0.5 * (lo + hi);
                todo.push((mid, hi));
                todo.push((lo, mid));
            }
        }
        done.sort_by(|p, q| p.lo.total_cmp(&q.lo));
        Ok(Self { pieces: done })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.pieces[0].lo, self.pieces[self.pieces.len() - 1].hi)
    }

    pub fn pieces(&self) -> usize {
        self.pieces.len()
    }

    /// Value at `x`; points outside the domain are clamped to it.
    pub fn eval(&self, x: f64) -> Complex64 {
        let idx = self
            .pieces
            .partition_point(|p| p.hi < x)
            .min(self.pieces.len() - 1);
        let p = &self.pieces[idx];
        let u = ((2.0 * x - p.lo - p.hi) / (p.hi - p.lo)).clamp(-1.0, 1.0);
        // Clenshaw recurrence, first coefficient halved.
        let mut b1 = Complex64::new(0.0, 0.0);
        let mut b2 = Complex64::new(0.0, 0.0);
        for c in p.coeffs.iter().skip(1).rev() {
            let b0 = c + b1 * (2.0 * u) - b2;
            b2 = b1;
            b1 = b0;
        }
        p.coeffs[0] * 0.5 + b1 * u - b2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_smooth_function() {
        let f = |x: f64| Ok(Complex64::new(x.sin(), (0.3 * x).exp()));
        let t = ChebTable::build(f, 0.0, 20.0, 1e-13).unwrap();
        for i in 0..=400 {
            let x = 0.05 * i as f64;
            let want = f(x).unwrap();
            assert!(
                (t.eval(x) - want).norm() < 1e-11 * want.norm().max(1.0),
                "x={x}"
            );
        }
        assert_eq!(t.domain(), (0.0, 20.0));
    }

    #[test]
    fn refines_near_steep_features() {
        let f = |x: f64| Ok(Complex64::new((1.0 + x).ln(), 0.0));
        let t = ChebTable::build(f, 0.0, 50.0, 1e-12).unwrap();
        assert!(t.pieces() > 1);
        for &x in &[0.0, 1e-3, 0.37, 12.0, 50.0] {
            assert!((t.eval(x).re - (1.0 + x).ln()).abs() < 1e-11);
        }
    }

    #[test]
    fn propagates_errors() {
        let f = |x: f64| {
            if x > 1.0 {
                Err(Error::NonFinite(x))
            } else {
                Ok(Complex64::new(x, 0.0))
            }
        };
        assert!(ChebTable::build(f, 0.0, 2.0, 1e-10).is_err());
    }
}
