//! Python module `zeta_moments`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use zeta_moments::verify::{run_suite as core_run_suite, Suite, SuiteConfig};
use zeta_moments::zeta_line::Guards;
use zeta_moments::{autocorr, eisenstein, moments, zeta_line, Error};

create_exception!(zeta_moments, ZetaMomentsError, PyException);
create_exception!(zeta_moments, DomainError, ZetaMomentsError);
create_exception!(zeta_moments, GuardError, ZetaMomentsError);
create_exception!(zeta_moments, ToleranceError, ZetaMomentsError);
create_exception!(zeta_moments, CapacityError, ZetaMomentsError);

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Domain(_) | Error::Pole(_) | Error::Range(_) => DomainError::new_err(msg),
        Error::Guard(_) => GuardError::new_err(msg),
        Error::ToleranceNotMet { .. } | Error::NonFinite(_) => ToleranceError::new_err(msg),
        Error::Capacity { .. } => CapacityError::new_err(msg),
        Error::Inconsistent(_) => ZetaMomentsError::new_err(msg),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for zeta_moments::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn guards(override_guards: bool) -> Guards {
    if override_guards {
        Guards::Override
    } else {
        Guards::Enforce
    }
}

/// Quadrature and series-truncation policy.
#[pyclass(name = "QuadSpec", module = "zeta_moments", from_py_object)]
#[derive(Clone, Copy)]
pub struct PyQuadSpec {
    inner: zeta_moments::QuadSpec,
}

#[pymethods]
impl PyQuadSpec {
    #[new]
    #[pyo3(signature = (abs_tol=1e-10, rel_tol=1e-9, max_depth=32, tail_cutoff=8.0, series_tol=1e-12))]
    fn new(
        abs_tol: f64,
        rel_tol: f64,
        max_depth: u32,
        tail_cutoff: f64,
        series_tol: f64,
    ) -> PyResult<Self> {
        let inner = zeta_moments::QuadSpec {
            abs_tol,
            rel_tol,
            max_depth,
            tail_cutoff,
            series_tol,
        };
        inner.validate().py()?;
        Ok(Self { inner })
    }

    #[getter]
    fn abs_tol(&self) -> f64 {
        self.inner.abs_tol
    }

    #[getter]
    fn rel_tol(&self) -> f64 {
        self.inner.rel_tol
    }

    #[getter]
    fn max_depth(&self) -> u32 {
        self.inner.max_depth
    }

    #[getter]
    fn tail_cutoff(&self) -> f64 {
        self.inner.tail_cutoff
    }

    #[getter]
    fn series_tol(&self) -> f64 {
        self.inner.series_tol
    }

    fn __repr__(&self) -> String {
        let s = &self.inner;
        format!(
            "QuadSpec(abs_tol={:e}, rel_tol={:e}, max_depth={}, tail_cutoff={}, series_tol={:e})",
            s.abs_tol, s.rel_tol, s.max_depth, s.tail_cutoff, s.series_tol
        )
    }
}

fn spec_of(spec: Option<PyQuadSpec>) -> zeta_moments::QuadSpec {
    spec.map(|s| s.inner).unwrap_or_default()
}

/// One evaluation of M_{2k}(δ).
#[pyclass(name = "MomentReport", module = "zeta_moments", get_all, frozen)]
pub struct PyMomentReport {
    k: u32,
    delta: f64,
    method: String,
    value: f64,
    err_estimate: f64,
    breakdown: BTreeMap<String, Complex64>,
}

#[pymethods]
impl PyMomentReport {
    fn __repr__(&self) -> String {
        format!(
            "MomentReport(k={}, delta={}, method='{}', value={}, err_estimate={:e})",
            self.k, self.delta, self.method, self.value, self.err_estimate
        )
    }
}

impl From<zeta_line::MomentReport> for PyMomentReport {
    fn from(r: zeta_line::MomentReport) -> Self {
        Self {
            k: r.k,
            delta: r.delta,
            method: r.method.to_string(),
            value: r.value,
            err_estimate: r.err_estimate,
            breakdown: r.breakdown,
        }
    }
}

/// Parts of the sixth-moment formula.
#[pyclass(name = "K3Breakdown", module = "zeta_moments", get_all, frozen)]
pub struct PyK3Breakdown {
    delta: f64,
    main_m: Complex64,
    main_m_reflected: Complex64,
    remainders: Vec<Complex64>,
    main_term: f64,
    orientation_gap: f64,
    remainder_term: f64,
    assembled: f64,
}

impl From<moments::K3Breakdown> for PyK3Breakdown {
    fn from(b: moments::K3Breakdown) -> Self {
        Self {
            delta: b.delta,
            main_m: b.main_m,
            main_m_reflected: b.main_m_reflected,
            remainders: b.remainders.to_vec(),
            main_term: b.main_term,
            orientation_gap: b.orientation_gap,
            remainder_term: b.remainder_term,
            assembled: b.assembled,
        }
    }
}

/// One identity check.
#[pyclass(name = "VerifyResult", module = "zeta_moments", get_all, frozen)]
pub struct PyVerifyResult {
    identity: String,
    lhs: Complex64,
    rhs: Complex64,
    abs_diff: f64,
    rel_diff: f64,
    tolerance: f64,
    kind: String,
    passed: bool,
    details: BTreeMap<String, f64>,
}

#[pymethods]
impl PyVerifyResult {
    fn __repr__(&self) -> String {
        format!(
            "VerifyResult('{}', abs_diff={:e}, tolerance={:e}, passed={})",
            self.identity, self.abs_diff, self.tolerance, self.passed
        )
    }
}

impl From<zeta_moments::verify::VerifyResult> for PyVerifyResult {
    fn from(r: zeta_moments::verify::VerifyResult) -> Self {
        Self {
            identity: r.identity,
            lhs: r.lhs,
            rhs: r.rhs,
            abs_diff: r.abs_diff,
            rel_diff: r.rel_diff,
            tolerance: r.tolerance,
            kind: format!("{:?}", r.kind).to_lowercase(),
            passed: r.pass,
            details: r.details,
        }
    }
}

/// One grid point of a δ-scan.
#[pyclass(name = "ScanRow", module = "zeta_moments", get_all, frozen)]
pub struct PyScanRow {
    delta: f64,
    value: Option<f64>,
    main: Option<f64>,
    remainders: Vec<f64>,
    ratio_keating_snaith: Option<f64>,
    remainder_fraction: Option<f64>,
    error: Option<String>,
}

impl From<moments::ScanRow> for PyScanRow {
    fn from(r: moments::ScanRow) -> Self {
        Self {
            delta: r.delta,
            value: r.value,
            main: r.main,
            remainders: r.remainders,
            ratio_keating_snaith: r.ratio_keating_snaith,
            remainder_fraction: r.remainder_fraction,
            error: r.error,
        }
    }
}

/// Both sides of the polynomial-moment closed form.
#[pyclass(name = "PolyMomentResult", module = "zeta_moments", get_all, frozen)]
pub struct PyPolyMomentResult {
    n: u32,
    lhs: f64,
    lhs_err: f64,
    rhs: f64,
    t_coeffs: Vec<i64>,
}

#[pyfunction]
#[pyo3(signature = (s, tol=1e-15))]
fn zeta(s: Complex64, tol: f64) -> PyResult<Complex64> {
    zeta_line::zeta(s, tol).py()
}

#[pyfunction]
#[pyo3(signature = (z, spec=None))]
fn a_integral(z: Complex64, spec: Option<PyQuadSpec>) -> PyResult<Complex64> {
    autocorr::a_integral(z, &spec_of(spec)).py()
}

#[pyfunction]
#[pyo3(signature = (z, spec=None))]
fn a_continuation(z: Complex64, spec: Option<PyQuadSpec>) -> PyResult<Complex64> {
    autocorr::a_continuation(z, &spec_of(spec)).py()
}

#[pyfunction]
#[pyo3(signature = (z, spec=None))]
fn a_cutplane(z: Complex64, spec: Option<PyQuadSpec>) -> PyResult<Complex64> {
    autocorr::a_cutplane(z, &spec_of(spec)).py()
}

#[pyfunction]
#[pyo3(signature = (z, spec=None))]
fn b_integral(z: Complex64, spec: Option<PyQuadSpec>) -> PyResult<Complex64> {
    autocorr::b_integral(z, &spec_of(spec)).py()
}

#[pyfunction]
#[pyo3(signature = (z, spec=None))]
fn b_fourier(z: Complex64, spec: Option<PyQuadSpec>) -> PyResult<Complex64> {
    autocorr::b_fourier(z, &spec_of(spec)).py()
}

#[pyfunction]
fn q_function(s: Complex64) -> PyResult<Complex64> {
    autocorr::q_function(s).py()
}

#[pyfunction]
#[pyo3(signature = (s, spec=None))]
fn mellin_a_numeric(s: Complex64, spec: Option<PyQuadSpec>) -> PyResult<Complex64> {
    autocorr::mellin_a_numeric(s, &spec_of(spec)).py()
}

/// `(B^{*k}(z) by direct convolution, B^{*k}(z) by the Fourier route)`.
#[pyfunction]
#[pyo3(signature = (z, k, spec=None))]
fn b_conv(z: f64, k: u32, spec: Option<PyQuadSpec>) -> PyResult<(f64, f64)> {
    let spec = spec_of(spec);
    let a = autocorr::b_conv(z, k, &spec).py()?.value;
    let b = autocorr::b_conv_fourier(z, k, &spec).py()?.value;
    Ok((a, b))
}

#[pyfunction]
#[pyo3(signature = (z, tol=1e-12))]
fn s0(z: Complex64, tol: f64) -> PyResult<Complex64> {
    eisenstein::s0(z, tol).py()
}

#[pyfunction]
#[pyo3(signature = (z, tol=1e-12))]
fn e1(z: Complex64, tol: f64) -> PyResult<Complex64> {
    eisenstein::e1(z, tol).py()
}

#[pyfunction]
#[pyo3(signature = (z, tol=1e-12))]
fn psi_upper(z: Complex64, tol: f64) -> PyResult<Complex64> {
    eisenstein::psi_upper(z, tol).py()
}

#[pyfunction]
#[pyo3(signature = (z, spec=None))]
fn psi_from_a(z: Complex64, spec: Option<PyQuadSpec>) -> PyResult<Complex64> {
    eisenstein::psi_from_a(z, &spec_of(spec)).py()
}

#[pyfunction]
fn r_func(z: Complex64) -> PyResult<Complex64> {
    eisenstein::r_func(z).py()
}

#[pyfunction]
#[pyo3(signature = (u, delta, tol=1e-12))]
fn s_term(u: f64, delta: f64, tol: f64) -> PyResult<Complex64> {
    eisenstein::s_term(u, delta, tol).py()
}

#[pyfunction]
#[pyo3(signature = (u, delta, spec=None))]
fn r_term(u: f64, delta: f64, spec: Option<PyQuadSpec>) -> PyResult<Complex64> {
    eisenstein::r_term(u, delta, &spec_of(spec)).py()
}

#[pyfunction]
#[pyo3(signature = (k, delta, spec=None, override_guards=false))]
fn moment_direct(
    k: u32,
    delta: f64,
    spec: Option<PyQuadSpec>,
    override_guards: bool,
) -> PyResult<PyMomentReport> {
    zeta_line::moment_direct_opts(k, delta, &spec_of(spec), guards(override_guards))
        .py()
        .map(Into::into)
}

#[pyfunction]
#[pyo3(signature = (delta, spec=None, override_guards=false))]
fn formula_k1(
    delta: f64,
    spec: Option<PyQuadSpec>,
    override_guards: bool,
) -> PyResult<PyMomentReport> {
    moments::formula_k1_opts(delta, &spec_of(spec), guards(override_guards))
        .py()
        .map(Into::into)
}

#[pyfunction]
#[pyo3(signature = (delta, spec=None, override_guards=false))]
fn formula_k2(
    delta: f64,
    spec: Option<PyQuadSpec>,
    override_guards: bool,
) -> PyResult<PyMomentReport> {
    moments::formula_k2_opts(delta, &spec_of(spec), guards(override_guards))
        .py()
        .map(Into::into)
}

#[pyfunction]
#[pyo3(signature = (delta, spec=None, override_guards=false))]
fn formula_k3(
    delta: f64,
    spec: Option<PyQuadSpec>,
    override_guards: bool,
) -> PyResult<(PyMomentReport, PyK3Breakdown)> {
    let (r, b) = moments::formula_k3_opts(delta, &spec_of(spec), guards(override_guards)).py()?;
    Ok((r.into(), b.into()))
}

#[pyfunction]
#[pyo3(signature = (k, delta, spec=None, override_guards=false))]
fn multi_integral_form(
    k: u32,
    delta: f64,
    spec: Option<PyQuadSpec>,
    override_guards: bool,
) -> PyResult<PyMomentReport> {
    moments::multi_integral_form_opts(k, delta, &spec_of(spec), guards(override_guards))
        .py()
        .map(Into::into)
}

#[pyfunction]
#[pyo3(signature = (n, spec=None))]
fn closed_form_poly(n: u32, spec: Option<PyQuadSpec>) -> PyResult<PyPolyMomentResult> {
    let r = moments::closed_form_poly(n, &spec_of(spec)).py()?;
    Ok(PyPolyMomentResult {
        n: r.n,
        lhs: r.lhs,
        lhs_err: r.lhs_err,
        rhs: r.rhs,
        t_coeffs: r.t_coeffs,
    })
}

/// `T_{N,j}` as an exact Python integer.
#[pyfunction]
fn t_coeff(n: usize, j: usize) -> PyResult<BigInt> {
    moments::t_coeff(n, j).py()
}

#[pyfunction]
#[pyo3(signature = (k, delta_grid, spec=None, override_guards=false))]
fn scan_delta(
    k: u32,
    delta_grid: Vec<f64>,
    spec: Option<PyQuadSpec>,
    override_guards: bool,
) -> PyResult<Vec<PyScanRow>> {
    let rows =
        moments::scan_delta_opts(k, &delta_grid, &spec_of(spec), guards(override_guards)).py()?;
    Ok(rows.into_iter().map(Into::into).collect())
}

/// Runs a named suite (`"transforms"`, `"closed-form"`, `"all"`, ...).
#[pyfunction]
#[pyo3(signature = (suite, spec=None, deltas=None))]
fn run_suite(
    suite: &str,
    spec: Option<PyQuadSpec>,
    deltas: Option<Vec<f64>>,
) -> PyResult<Vec<PyVerifyResult>> {
    let suite: Suite = suite.parse().py()?;
    let cfg = SuiteConfig {
        spec: spec_of(spec),
        deltas: deltas.unwrap_or_default(),
    };
    Ok(core_run_suite(suite, &cfg)
        .py()?
        .into_iter()
        .map(Into::into)
        .collect())
}

#[pymodule]
#[pyo3(name = "zeta_moments")]
fn zeta_moments_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("ZetaMomentsError", py.get_type::<ZetaMomentsError>())?;
    m.add("DomainError", py.get_type::<DomainError>())?;
    m.add("GuardError", py.get_type::<GuardError>())?;
    m.add("ToleranceError", py.get_type::<ToleranceError>())?;
    m.add("CapacityError", py.get_type::<CapacityError>())?;
    m.add_class::<PyQuadSpec>()?;
    m.add_class::<PyMomentReport>()?;
    m.add_class::<PyK3Breakdown>()?;
    m.add_class::<PyVerifyResult>()?;
    m.add_class::<PyScanRow>()?;
    m.add_class::<PyPolyMomentResult>()?;
    m.add_function(wrap_pyfunction!(zeta, m)?)?;
    m.add_function(wrap_pyfunction!(a_integral, m)?)?;
    m.add_function(wrap_pyfunction!(a_continuation, m)?)?;
    m.add_function(wrap_pyfunction!(a_cutplane, m)?)?;
    m.add_function(wrap_pyfunction!(b_integral, m)?)?;
    m.add_function(wrap_pyfunction!(b_fourier, m)?)?;
    m.add_function(wrap_pyfunction!(q_function, m)?)?;
    m.add_function(wrap_pyfunction!(mellin_a_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(b_conv, m)?)?;
    m.add_function(wrap_pyfunction!(s0, m)?)?;
    m.add_function(wrap_pyfunction!(e1, m)?)?;
    m.add_function(wrap_pyfunction!(psi_upper, m)?)?;
    m.add_function(wrap_pyfunction!(psi_from_a, m)?)?;
    m.add_function(wrap_pyfunction!(r_func, m)?)?;
    m.add_function(wrap_pyfunction!(s_term, m)?)?;
    m.add_function(wrap_pyfunction!(r_term, m)?)?;
    m.add_function(wrap_pyfunction!(moment_direct, m)?)?;
    m.add_function(wrap_pyfunction!(formula_k1, m)?)?;
    m.add_function(wrap_pyfunction!(formula_k2, m)?)?;
    m.add_function(wrap_pyfunction!(formula_k3, m)?)?;
    m.add_function(wrap_pyfunction!(multi_integral_form, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_poly, m)?)?;
    m.add_function(wrap_pyfunction!(t_coeff, m)?)?;
    m.add_function(wrap_pyfunction!(scan_delta, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_map_to_exception_classes() {
        Python::initialize();
        Python::attach(|py| {
            assert!(to_py(Error::Guard("low".into())).is_instance_of::<GuardError>(py));
            assert!(to_py(Error::Guard("low".into())).is_instance_of::<ZetaMomentsError>(py));
            assert!(to_py(Error::Range("k".into())).is_instance_of::<DomainError>(py));
            assert!(to_py(Error::NonFinite(1.0)).is_instance_of::<ToleranceError>(py));
            assert!(to_py(Error::Capacity {
                needed: 2,
                limit: 1
            })
            .is_instance_of::<CapacityError>(py));
        });
    }

    #[test]
    fn wrappers_forward_to_core() {
        Python::initialize();
        let r = moment_direct(1, 0.8, None, false).unwrap();
        assert_eq!(r.method, "direct");
        assert!(moment_direct(2, 0.01, None, false).is_err());
        assert!(moment_direct(2, 0.04, None, true).is_ok());
        assert_eq!(t_coeff(2, 2).unwrap(), BigInt::from(16));
        let rows = run_suite("closed-form", None, None).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(run_suite("nope", None, None).is_err());
    }
}
