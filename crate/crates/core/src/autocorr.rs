//! The functions `φ₁`, `A`, `B` and `Q`.
//!
//! `A(z) = ∫₀^∞ φ₁(xz)φ₁(x) dx` on `Re z > 0` and `B(v) = e^{v/2}A(e^v)` are
//! evaluated from their integral forms; `A` is continued to the cut plane
//! either through the Mellin–Barnes integral against `Q(1/2−it)` or through
//! the Eisenstein-series functional equation ([`a_cutplane`]).

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::eisenstein;
use crate::error::{Error, Result};
use crate::numerics::quad::{geometric_points, integrate_nested, integrate_panels, uniform_points};
use crate::numerics::{
    bernoulli, gamma, log_principal, ratio_to_f64, ChebTable, Envelope, QuadResult, QuadSpec,
    EULER_GAMMA, I, LN_2PI,
};
use crate::zeta_line::{line_integral, zeta, zeta_sq_on_line};

/// Closest approach to the cut `(−∞, 0]` allowed for continuation routes.
pub const ARG_MARGIN: f64 = 0.05;

const SERIES_RADIUS: f64 = 0.5;
const SERIES_TERMS: usize = 24;

// B_{n+1} / (n+1)! for n = 0..SERIES_TERMS.
fn phi1_coefficients() -> &'static [f64; SERIES_TERMS] {
    static TABLE: OnceLock<[f64; SERIES_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [0.0; SERIES_TERMS];
        let mut fact = num_bigint::BigInt::from(1u32);
        for (n, slot) in out.iter_mut().enumerate() {
            fact *= (n + 1) as u32;
            let b = bernoulli(n + 1).expect("index within table");
            *slot = ratio_to_f64(&(b / num_rational::BigRational::from_integer(fact.clone())));
        }
        out
    })
}

#[inline]
pub(crate) fn phi1_unchecked(z: Complex64) -> Complex64 {
    if z.norm_sqr() <= SERIES_RADIUS * SERIES_RADIUS {
        let c = phi1_coefficients();
        let mut acc = Complex64::new(0.0, 0.0);
        for &coef in c.iter().rev() {
            acc = acc * z + coef;
        }
        acc
    } else if z.re > 0.0 {
        let e = (-z).exp();
        e / (1.0 - e) - 1.0 / z
    } else {
        1.0 / (z.exp() - 1.0) - 1.0 / z
    }
}

/// `φ₁(z) = 1/(e^z − 1) − 1/z`, with the removable singularity `φ₁(0) = −1/2`.
pub fn phi1(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("phi1 of non-finite {z}")));
    }
    if z.re == 0.0 && z.im != 0.0 {
        let n = z.im / (2.0 * PI);
        if n == n.round() {
            return Err(Error::Pole(z));
        }
    }
    Ok(phi1_unchecked(z))
}

/// `∫₀^∞ φ₁(ax)φ₁(bx) dx` for `Re a, Re b > 0`.
///
/// Beyond `X = 40 / min(Re a, Re b)` both factors equal `−1/(ax)` and
/// `−1/(bx)` up to `e^{−40}`, so the remaining tail is `1/(abX)`.
pub(crate) fn phi1_product_integral(
    a: Complex64,
    b: Complex64,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    let min_re = a.re.min(b.re);
    if !(min_re > 0.0) {
        return Err(Error::Domain(format!(
            "phi1 product integral needs Re a, Re b > 0, got a={a}, b={b}"
        )));
    }
    let x_end = 40.0 / min_re;
    let lo = (1.0 / a.norm()).min(1.0 / b.norm()) * 0.25;
    let mut points = vec![0.0];
    if lo < x_end {
        points.extend(geometric_points(lo, x_end));
    } else {
        points.push(x_end);
    }
    // φ₁(cx) oscillates with period 2π/|Im c| only while e^{−cx} matters,
    // that is for x below about 40/Re c.
    let mut refined = vec![points[0]];
    for w in points.windows(2) {
        let width = [a, b]
            .iter()
            .filter(|c| c.im != 0.0 && 40.0 / c.re > w[0])
            .map(|c| 8.0 * PI / c.im.abs())
            .fold(f64::INFINITY, f64::min);
        refined.extend(
            uniform_points(w[0], w[1], width.min(w[1] - w[0]))
                .into_iter()
                .skip(1),
        );
    }
    points = refined;
    let mut res = integrate_panels(
        |x: f64| phi1_unchecked(a * x) * phi1_unchecked(b * x),
        &points,
        spec,
    )?;
    res.value += 1.0 / (a * b * x_end);
    Ok(res)
}

fn check_cut_plane(z: Complex64, what: &str) -> Result<Complex64> {
    let l = log_principal(z)
        .map_err(|_| Error::Domain(format!("{what}: {z} lies on the cut (-inf, 0]")))?;
    Ok(l)
}

/// `A(z)` through the rotated contour `z^{-1/2} ∫ φ₁(x√z)φ₁(x/√z) dx`, valid
/// on the whole cut plane (it is `z^{-1/2} B(log z)`).
pub(crate) fn a_rotated(z: Complex64, spec: &QuadSpec) -> Result<QuadResult> {
    let l = check_cut_plane(z, "A")?;
    let root = (0.5 * l).exp();
    let mut res = phi1_product_integral(root, 1.0 / root, spec)?;
    res.value /= root;
    res.err_estimate /= root.norm();
    Ok(res)
}

pub(crate) fn a_integral_q(z: Complex64, spec: &QuadSpec) -> Result<QuadResult> {
    if !(z.re > 0.0) {
        return Err(Error::Domain(format!("A_integral needs Re z > 0, got {z}")));
    }
    if z.im.abs() <= z.re {
        phi1_product_integral(z, Complex64::new(1.0, 0.0), spec)
    } else {
        // Past |Arg z| = π/4 the direct integrand develops near-poles on the
        // real axis; the contour is rotated by −Arg(z)/2 instead.
        a_rotated(z, spec)
    }
}

/// `A(z) = ∫₀^∞ φ₁(xz)φ₁(x) dx` for `Re z > 0`.
pub fn a_integral(z: Complex64, spec: &QuadSpec) -> Result<Complex64> {
    Ok(a_integral_q(z, spec)?.value)
}

/// Ramanujan's `B(z) = ∫₀^∞ φ₁(xe^{z/2})φ₁(xe^{−z/2}) dx` on `|Im z| < π`.
pub fn b_integral(z: Complex64, spec: &QuadSpec) -> Result<Complex64> {
    if !(z.im.abs() < PI) {
        return Err(Error::Domain(format!("B needs |Im z| < π, got {z}")));
    }
    let a = (0.5 * z).exp();
    Ok(phi1_product_integral(a, 1.0 / a, spec)?.value)
}

/// `Q(s) = Γ(s)ζ(s)Γ(1−s)ζ(1−s)` on `0 < Re s < 1`.
pub fn q_function(s: Complex64) -> Result<Complex64> {
    if !(s.re > 0.0 && s.re < 1.0) {
        return Err(Error::Domain(format!(
            "Q is evaluated for 0 < Re s < 1, got {s}"
        )));
    }
    let t = 1.0 - s;
    Ok(gamma(s)? * zeta(s, 1e-15)? * gamma(t)? * zeta(t, 1e-15)?)
}

/// `Q(1/2 − it) = π|ζ(1/2+it)|² / cosh(πt)`.
pub(crate) fn q_line(t: f64) -> f64 {
    PI * zeta_sq_on_line(t) * (-crate::numerics::ln_cosh(PI * t)).exp()
}

/// `e^{iwt} Q(1/2 − it)`, with the exponentials combined so that large
/// `|t|` cannot overflow.
fn q_line_phase(t: f64, w: Complex64) -> Complex64 {
    let ln = I * w * t - crate::numerics::ln_cosh(PI * t);
    ln.exp() * (PI * zeta_sq_on_line(t))
}

/// `C` in `Q(1/2−it) <= C e^{−π|t|} (1+|t|)^4`, sampled once on `[0, 60]`
/// and doubled.
pub fn q_envelope_constant() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let mut c: f64 = 0.0;
        for i in 0..=1200 {
            let t = 0.05 * i as f64;
            let ratio = q_line(t) * (PI * t).exp() / (1.0 + t).powi(4);
            c = c.max(ratio);
        }
        2.0 * c
    })
}

/// Envelopes `(left, right)` for `scale · e^{ρt} Q(1/2−it)^k`.
pub(crate) fn q_envelopes(k: u32, scale: f64, rho: f64) -> (Envelope, Envelope) {
    let kf = k as f64;
    let c = q_envelope_constant().powi(k as i32) * scale;
    (
        Envelope {
            scale: c,
            rate: kf * PI + rho,
            poly: 4.0 * kf,
        },
        Envelope {
            scale: c,
            rate: kf * PI - rho,
            poly: 4.0 * kf,
        },
    )
}

/// `B(z) = (1/2π) ∫ e^{izt} Q(1/2−it) dt` for `|Im z| <= π − 0.05`.
pub fn b_fourier(z: Complex64, spec: &QuadSpec) -> Result<Complex64> {
    Ok(b_fourier_q(z, spec)?.value)
}

pub(crate) fn b_fourier_q(z: Complex64, spec: &QuadSpec) -> Result<QuadResult> {
    if !(z.im.abs() <= PI - ARG_MARGIN) {
        return Err(Error::Domain(format!(
            "B_fourier needs |Im z| <= π − {ARG_MARGIN}, got {z}"
        )));
    }
    spec.validate()?;
    // |e^{izt}| = e^{−t Im z}
    let (left, right) = q_envelopes(1, 1.0 / (2.0 * PI), -z.im);
    line_integral(|t| q_line_phase(t, z) / (2.0 * PI), left, right, spec)
}

/// `A(z) = (1/2π) ∫ z^{−1/2+it} Q(1/2−it) dt` (Mellin–Barnes continuation)
/// for `|Arg z| <= π − 0.05`.
pub fn a_continuation(z: Complex64, spec: &QuadSpec) -> Result<Complex64> {
    Ok(a_continuation_q(z, spec)?.value)
}

pub(crate) fn a_continuation_q(z: Complex64, spec: &QuadSpec) -> Result<QuadResult> {
    let l = check_cut_plane(z, "A_continuation")?;
    if l.im.abs() > PI - ARG_MARGIN {
        return Err(Error::Domain(format!(
            "A_continuation needs |Arg z| <= π − {ARG_MARGIN}, got Arg = {}",
            l.im
        )));
    }
    spec.validate()?;
    // |z^{−1/2+it}| = |z|^{−1/2} e^{−t Arg z}
    let scale = (-0.5 * l.re).exp() / (2.0 * PI);
    let (left, right) = q_envelopes(1, scale, -l.im);
    line_integral(
        |t| q_line_phase(t, l) * (-0.5 * l).exp() / (2.0 * PI),
        left,
        right,
        spec,
    )
}

/// `A(z)` anywhere on the cut plane: the integral form on `Re z >= 0`, and on
/// the left half-plane the inversion `A(z) = A(1/z)/z`, conjugation, and the
/// Eisenstein functional equation
/// `A(z) = −A(−z) + (2πi/z)S₀(−1/z) + log(2π/z) − γ + iπ/2` for `z ∈ ℍ`,
/// `|z| <= 1`.
pub fn a_cutplane(z: Complex64, spec: &QuadSpec) -> Result<Complex64> {
    check_cut_plane(z, "A")?;
    if z.re >= 0.0 {
        return Ok(if z.re > 0.0 {
            a_integral_q(z, spec)?.value
        } else {
            a_rotated(z, spec)?.value
        });
    }
    if z.im < 0.0 {
        return Ok(a_cutplane(z.conj(), spec)?.conj());
    }
    if z.norm_sqr() > 1.0 {
        let w = 1.0 / z;
        return Ok(a_cutplane(w, spec)? / z);
    }
    let minus = -z;
    let a_minus = a_integral_q(minus, spec)?.value;
    let s0 = eisenstein::s0(-1.0 / z, spec.series_tol)?;
    let log_z = log_principal(z)?;
    Ok(-a_minus + 2.0 * PI * I * s0 / z + (LN_2PI - log_z) - EULER_GAMMA + I * (PI / 2.0))
}

// Asymptotic expansion of A(x) at large real x:
// A(x) ≈ (c + ½ ln x)/x + Σ_m ζ(2m) B_{2m}/(2m) x^{−2m}, c = (ln 2π − γ)/2.
const MELLIN_SPLIT: f64 = 16.0;
const MELLIN_ASYMPTOTIC_TERMS: usize = 8;

fn zeta_even(m: usize) -> f64 {
    // ζ(2m) = (−1)^{m+1} (2π)^{2m} B_{2m} / (2 (2m)!)
    let b = crate::numerics::bernoulli_f64(2 * m).expect("index within table");
    let fact: f64 = (1..=2 * m).map(|i| i as f64).product();
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    sign * (2.0 * PI).powi(2 * m as i32) * b / (2.0 * fact)
}

// ∫_X^∞ x^{α−1} dx and ∫_X^∞ x^{α−1} ln x dx for Re α < 0.
fn power_tail(alpha: Complex64, x: f64) -> (Complex64, Complex64) {
    let xa = (alpha * x.ln()).exp();
    let plain = -xa / alpha;
    let logged = -xa * (x.ln() / alpha - 1.0 / (alpha * alpha));
    (plain, logged)
}

fn mellin_tail(s: Complex64) -> Complex64 {
    let c = 0.5 * (LN_2PI - EULER_GAMMA);
    let x = MELLIN_SPLIT;
    let mut acc = Complex64::new(0.0, 0.0);
    // A(x)·x^{s−1} and A(x)·x^{−s}
    for alpha in [s - 1.0, -s] {
        let (plain, logged) = power_tail(alpha, x);
        acc += c * plain + 0.5 * logged;
    }
    for m in 1..=MELLIN_ASYMPTOTIC_TERMS {
        let b = crate::numerics::bernoulli_f64(2 * m).expect("index within table");
        let coef = zeta_even(m) * b / (2 * m) as f64;
        let two_m = 2.0 * m as f64;
        for alpha in [s - two_m, 1.0 - two_m - s] {
            acc += coef * power_tail(alpha, x).0;
        }
    }
    acc
}

/// Mellin transform `∫₀^∞ A(x) x^{s−1} dx` on `0 < Re s < 1`, folded onto
/// `[1, ∞)` with `A(1/x) = xA(x)`; beyond `x = 16` the large-`x`
/// expansion of `A` is integrated in closed form.
pub fn mellin_a_numeric(s: Complex64, spec: &QuadSpec) -> Result<Complex64> {
    if !(s.re > 0.0 && s.re < 1.0) {
        return Err(Error::Domain(format!(
            "Mellin transform needs 0 < Re s < 1, got {s}"
        )));
    }
    spec.validate()?;
    let inner = spec.tightened(0.01);
    let failure = std::cell::RefCell::new(None);
    let f = |x: f64| -> Complex64 {
        match a_integral_q(Complex64::new(x, 0.0), &inner) {
            Ok(a) => {
                let lx = x.ln();
                a.value * (((s - 1.0) * lx).exp() + (-s * lx).exp())
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(f64::NAN, 0.0)
            }
        }
    };
    let mut points = uniform_points(1.0, 4.0, 0.5);
    points.extend(uniform_points(4.0, MELLIN_SPLIT, 2.0).into_iter().skip(1));
    let body = integrate_panels(f, &points, spec);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(body?.value + mellin_tail(s))
}

// B on the real line, tabulated once for the convolution route.
const B_TABLE_HALF_WIDTH: f64 = 90.0;

fn b_table() -> Result<&'static ChebTable> {
    static TABLE: OnceLock<std::result::Result<ChebTable, Error>> = OnceLock::new();
    TABLE
        .get_or_init(|| {
            let spec = QuadSpec {
                abs_tol: 1e-14,
                rel_tol: 1e-13,
                ..QuadSpec::default()
            };
            ChebTable::build(
                |w| {
                    let a = (0.5 * w).exp();
                    phi1_product_integral(
                        Complex64::new(a, 0.0),
                        Complex64::new(1.0 / a, 0.0),
                        &spec,
                    )
                    .map(|r| r.value)
                },
                -B_TABLE_HALF_WIDTH,
                B_TABLE_HALF_WIDTH,
                1e-13,
            )
        })
        .as_ref()
        .map_err(Clone::clone)
}

fn b_real(table: &ChebTable, w: f64) -> f64 {
    if w.abs() >= B_TABLE_HALF_WIDTH {
        0.0
    } else {
        table.eval(w).re
    }
}

// Half-width of the truncated convolution domain; |B(w)| <= (1 + |w|) e^{−|w|/2}
// makes the neglected mass below 1e−14.
const CONV_HALF_WIDTH: f64 = 80.0;

/// `B^{k⋆}(z)` for real `z` by the `(k−1)`-fold integral
/// `∫ B(z/k − x₁ − … − x_{k−1}) ∏ B(z/k + x_j) dx_j`.
pub fn b_conv(z: f64, k: u32, spec: &QuadSpec) -> Result<QuadResult<f64>> {
    spec.validate()?;
    if !z.is_finite() || z.abs() > 20.0 {
        return Err(Error::Range(format!(
            "B_conv evaluated for |z| <= 20, got {z}"
        )));
    }
    let table = b_table()?;
    let zk = z / k as f64;
    let edge = CONV_HALF_WIDTH;
    match k {
        2 => {
            let mut points = uniform_points(-edge, edge, 1.0);
            points.retain(|p| (p - zk).abs() > 1e-9);
            integrate_panels(
                |x: f64| b_real(table, zk - x) * b_real(table, zk + x),
                &points,
                spec,
            )
        }
        3 => {
            let outer = uniform_points(-edge, edge, 2.0);
            integrate_nested(
                |x1: f64, x2: f64| {
                    b_real(table, zk - x1 - x2) * b_real(table, zk + x1) * b_real(table, zk + x2)
                },
                &outer,
                |x1| {
                    // peak of the first factor sits at x2 = −x1
                    let mut pts = uniform_points(-edge, edge, 2.0);
                    pts.push(-x1);
                    pts.sort_by(f64::total_cmp);
                    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
                    pts
                },
                spec,
            )
        }
        _ => Err(Error::Range(format!(
            "B_conv supports k in {{2, 3}}, got {k}"
        ))),
    }
}

/// `B^{k⋆}(z) = (1/2π) ∫ e^{izt} Q(1/2−it)^k dt` for real `z`.
pub fn b_conv_fourier(z: f64, k: u32, spec: &QuadSpec) -> Result<QuadResult<f64>> {
    if !(1..=3).contains(&k) {
        return Err(Error::Range(format!("B_conv supports k in 1..=3, got {k}")));
    }
    spec.validate()?;
    let (left, right) = q_envelopes(k, 1.0 / (2.0 * PI), 0.0);
    line_integral(
        |t| (z * t).cos() * q_line(t).powi(k as i32) / (2.0 * PI),
        left,
        right,
        spec,
    )
}

/// Largest `|A(z)| / (1 + log(1/|z|))` over the polar grid `radii × args`.
pub fn a_log_growth_constant(radii: &[f64], args: &[f64], spec: &QuadSpec) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &r in radii {
        for &th in args {
            let z = Complex64::from_polar(r, th);
            let a = a_integral(z, spec)?;
            worst = worst.max(a.norm() / (1.0 + (1.0 / r).ln()));
        }
    }
    Ok(worst)
}
