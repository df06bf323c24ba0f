use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

// Lanczos coefficients for g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

// B_{2k} / (2k (2k-1)) for k = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

const STIRLING_RADIUS: f64 = 15.0;

/// `ln Γ(z)` for `Re z >= 1/2` (any branch continuous in the right half-plane).
fn ln_gamma_right(z: Complex64) -> Complex64 {
    if z.norm() >= STIRLING_RADIUS {
        ln_gamma_stirling(z)
    } else {
        ln_gamma_lanczos(z)
    }
}

fn ln_gamma_lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut series = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_2PI + (z + 0.5) * t.ln() - t + series.ln()
}

// Large |z|, Re z > 0. The big terms of (z - 1/2) ln z - z are assembled from
// real pieces so that the argument is taken as π/2 - atan(x/y) when |y| > x.
fn ln_gamma_stirling(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let (ln_r, theta_big, theta_small) = if y.abs() > x {
        let q = x / y;
        let ln_r = y.abs().ln() + 0.5 * (q * q).ln_1p();
        (ln_r, y.signum() * PI / 2.0, -q.atan())
    } else {
        let q = y / x;
        (x.ln() + 0.5 * (q * q).ln_1p(), 0.0, q.atan())
    };
    let theta = theta_big + theta_small;
    let re = (x - 0.5) * ln_r - (y * theta_big + y * theta_small) - x + HALF_LN_2PI;
    let im = (x - 0.5) * theta + y * (ln_r - 1.0);
    let w = z.inv();
    let w2 = w * w;
    let mut corr = Complex64::new(0.0, 0.0);
    for &c in STIRLING.iter().rev() {
        corr = corr * w2 + c;
    }
    Complex64::new(re, im) + corr * w
}

/// Complex Gamma function (Lanczos approximation, reflection for `Re z < 1/2`).
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole(z));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("gamma of non-finite {z}")));
    }
    if z.re < 0.5 {
        let s = (PI * z).sin();
        Ok(PI / (s * ln_gamma_right(1.0 - z).exp()))
    } else {
        Ok(ln_gamma_right(z).exp())
    }
}

/// `ln Γ(z)` on the right half-plane `Re z >= 1/2`.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if z.re < 0.5 {
        return Err(Error::Domain(format!(
            "ln_gamma is provided for Re z >= 1/2, got {z}"
        )));
    }
    Ok(ln_gamma_right(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classical_values() {
        let g = gamma(c(0.5, 0.0)).unwrap();
        assert!((g.re - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(c(5.0, 0.0)).unwrap().re - 24.0).abs() < 24.0 * 1e-14);
    }

    #[test]
    fn modulus_on_half_line() {
        // |Γ(1/2+it)|² = π / cosh(πt)
        for &t in &[0.0, 0.7, 3.0, 12.0] {
            let g = gamma(c(0.5, t)).unwrap();
            let expected = PI / (PI * t).cosh();
            assert!((g.norm_sqr() - expected).abs() <= 1e-13 * expected, "t={t}");
        }
    }

    #[test]
    fn poles_rejected() {
        for n in 0..5 {
            assert!(matches!(gamma(c(-(n as f64), 0.0)), Err(Error::Pole(_))));
        }
    }

    // Reference values from a 30-digit evaluation.
    #[test]
    fn matches_reference_values() {
        let cases = [
            ((0.3, 2.5), (0.03583188498415013, -0.020264814365175004)),
            ((-3.7, 1.2), (0.004910735090013594, 0.00996255171918667)),
            (
                (12.5, -40.0),
                (1.3260257788349256e-08, 2.2179141144759094e-08),
            ),
            (
                (0.5, 100.0),
                (-1.091785689781883e-68, 1.0496406864878083e-68),
            ),
            ((45.0, 7.0), (1.630223991732739e+53, 1.527639004513562e+54)),
            (
                (-9.5, 0.25),
                (1.7608577730008292e-06, 1.143057774160034e-06),
            ),
            ((1.0, 0.001), (0.9999990109449864, -0.0005772147574234388)),
            (
                (9.43, -69.83),
                (3.464455807068905e-32, -1.7015767418373445e-31),
            ),
            (
                (29.056, -85.513),
                (-0.0013727139568259386, -0.0025164039685954963),
            ),
            ((22.153, -26.862), (70942099427824.14, 28687928600758.246)),
            (
                (-6.52, 1.487),
                (3.380198127881253e-05, -1.025022582519671e-05),
            ),
            (
                (-7.75, -13.271),
                (6.102410203558202e-19, 4.339656891476696e-19),
            ),
            (
                (-5.809, -81.857),
                (-1.1535770910495802e-69, 3.0531097313865344e-68),
            ),
            (
                (15.471, 65.37),
                (-1.0216706094695659e-17, -3.867026475061163e-18),
            ),
            (
                (-2.572, -55.352),
                (2.1650032619267534e-44, 1.906584777957379e-43),
            ),
            (
                (27.646, 89.542),
                (2.8394115014898793e-08, -1.0301150609544593e-08),
            ),
            (
                (24.626, -20.664),
                (2.134277441813996e+19, 5.953964285618231e+19),
            ),
            (
                (48.575, -90.683),
                (-1.1583788439754011e+33, 3.3471392226215557e+33),
            ),
            (
                (41.508, -42.078),
                (9.257492510538579e+39, 3.3965564146946697e+40),
            ),
            (
                (-1.345, -76.442),
                (4.146846393322851e-56, -4.3036433125648545e-56),
            ),
            (
                (8.509, 63.225),
                (-4.305079036986749e-29, -2.5725384743358965e-29),
            ),
        ];
        for ((zr, zi), (gr, gi)) in cases {
            let got = gamma(c(zr, zi)).unwrap();
            let want = c(gr, gi);
            let rel = (got - want).norm() / want.norm();
            assert!(rel <= 1e-13, "z=({zr},{zi}) rel={rel:e}");
        }
    }

    #[test]
    fn lanczos_and_stirling_agree_near_switch() {
        for k in 0..24 {
            let z = Complex64::from_polar(STIRLING_RADIUS + 0.5, -1.5 + 0.125 * k as f64);
            let d = (ln_gamma_lanczos(z) - ln_gamma_stirling(z)).norm();
            assert!(d < 1e-13, "z={z} diff={d:e}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn reflection(re in 0.01f64..0.99, im in -5.0f64..5.0) {
            let s = c(re, im);
            let lhs = gamma(s).unwrap() * gamma(1.0 - s).unwrap();
            let rhs = PI / (PI * s).sin();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
        }

        #[test]
        fn recurrence_across_reflection_boundary(re in -0.49f64..0.49, im in -8.0f64..8.0) {
            prop_assume!(re.abs() > 1e-3 || im.abs() > 1e-3);
            let z = c(re, im);
            let lhs = gamma(z + 1.0).unwrap();
            let rhs = z * gamma(z).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-13 * lhs.norm());
        }

        #[test]
        fn duplication(re in 0.6f64..20.0, im in -20.0f64..20.0) {
            let z = c(re, im);
            let lhs = gamma(z).unwrap() * gamma(z + 0.5).unwrap();
            let rhs = (std::f64::consts::LN_2 * (1.0 - 2.0 * z)).exp() * PI.sqrt() * gamma(2.0 * z).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
        }
    }
}
