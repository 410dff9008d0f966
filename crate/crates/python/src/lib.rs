//! Python bindings: radial potentials, product models, monomial norms,
//! kernels and the verification suite.
//!
//! Structured results come back as plain dictionaries built from the same
//! JSON the command-line tool prints.

use std::path::PathBuf;

use partial_bergman as pb;
use pb::kernel::{family_kernel as family_kernel_eval, residue_kernel};
use pb::report::{parse_config, RunConfig};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: pb::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn subspace(name: &str) -> PyResult<pb::Subspace> {
    match name {
        "graded" => Ok(pb::Subspace::Graded),
        "full" => Ok(pb::Subspace::Full),
        other => Err(PyValueError::new_err(format!(
            "subspace must be graded or full, got {other:?}"
        ))),
    }
}

fn options(tol: f64, max_terms: usize) -> pb::KernelOptions {
    pb::KernelOptions { tol, max_terms }
}

#[pyclass(name = "RadialPotential", module = "partial_bergman_py", frozen)]
struct PyRadialPotential(pb::RadialPotential);

#[pymethods]
impl PyRadialPotential {
    #[staticmethod]
    fn punctured_disk() -> Self {
        Self(pb::RadialPotential::punctured_disk())
    }

    #[staticmethod]
    #[pyo3(signature = (m_scale=1, lambda=2.0, xi=1.0))]
    fn family(m_scale: u32, lambda: f64, xi: f64) -> PyResult<Self> {
        pb::make_family(m_scale, lambda, xi).map(Self).map_err(err)
    }

    #[staticmethod]
    fn fubini_study() -> Self {
        Self(pb::RadialPotential::fubini_study())
    }

    #[staticmethod]
    fn flat() -> Self {
        Self(pb::RadialPotential::flat())
    }

    fn scaled(&self, c: f64) -> PyResult<Self> {
        self.0.clone().scaled(c).map(Self).map_err(err)
    }

    #[getter]
    fn domain_end(&self) -> f64 {
        self.0.domain_end()
    }

    fn value(&self, r: f64) -> PyResult<f64> {
        self.0.value(r).map_err(err)
    }

    #[pyo3(signature = (r, n=2))]
    fn determinant(&self, r: f64, n: u32) -> PyResult<f64> {
        pb::metric_determinant(&self.0, r, n).map_err(err)
    }

    #[pyo3(signature = (r, n=2))]
    fn scalar_curvature(&self, r: f64, n: u32) -> PyResult<f64> {
        pb::scalar_curvature(&self.0, r, n).map_err(err)
    }

    #[pyo3(signature = (r, n=2))]
    fn invariants(&self, py: Python<'_>, r: f64, n: u32) -> PyResult<Py<PyAny>> {
        let rep = pb::curvature_invariants(&self.0, r, n).map_err(err)?;
        to_py(py, &rep)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyclass(name = "ProductModel", module = "partial_bergman_py", frozen)]
struct PyProductModel(pb::ProductModel);

#[pymethods]
impl PyProductModel {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        pb::ProductModel::from_json(text).map(Self).map_err(err)
    }

    /// `sign` is "negative", "zero" or "positive".
    #[staticmethod]
    fn theorem_instance(n: u32, sign: &str) -> PyResult<Self> {
        let sign: pb::Sign = sign.parse().map_err(err)?;
        pb::theorem_instance(n, sign).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn total_dim(&self) -> u32 {
        self.0.total_dim
    }

    #[getter]
    fn label(&self) -> String {
        self.0.label()
    }

    fn minimal_level(&self) -> u32 {
        self.0.minimal_level()
    }

    fn scalar_curvature(&self) -> f64 {
        self.0.scalar_curvature()
    }

    fn scalar_curvature_at(&self, t: f64) -> PyResult<f64> {
        self.0.scalar_curvature_at(t).map_err(err)
    }

    fn expected_constant(&self, m: u32) -> PyResult<f64> {
        pb::expected_constant(&self.0, m).map_err(err)
    }

    #[pyo3(signature = (m, t, tol=1e-10, max_terms=1_000_000))]
    fn kernel(
        &self,
        py: Python<'_>,
        m: u32,
        t: f64,
        tol: f64,
        max_terms: usize,
    ) -> PyResult<Py<PyAny>> {
        let eval = self.0.kernel(m, t, &options(tol, max_terms)).map_err(err)?;
        to_py(py, &eval)
    }

    fn __repr__(&self) -> String {
        format!("ProductModel({})", self.0.label())
    }
}

/// `method` is "closed", "quadrature" or "exact"; "exact" needs
/// `j + k - m` to be a non-negative multiple of 3.
#[pyfunction]
#[pyo3(signature = (m, j, k, method="closed"))]
fn norm(py: Python<'_>, m: u32, j: u32, k: u32, method: &str) -> PyResult<Py<PyAny>> {
    let value = match method {
        "closed" => pb::norm_closed(m, j, k),
        "quadrature" => pb::norm_quadrature(m, j, k),
        "exact" => match pb::GradedIndex::new(m, j, k).grade() {
            Some(i) => pb::norm_exact_graded(m, i, j),
            None => Err(pb::Error::Parameter(
                "the exact method needs j + k - m to be a non-negative multiple of 3".into(),
            )),
        },
        other => {
            return Err(PyValueError::new_err(format!(
                "method must be closed, quadrature or exact, got {other:?}"
            )))
        }
    }
    .map_err(err)?;
    to_py(py, &value)
}

/// `∫ cos^{2j+1} sin^{2k+1}` over a quarter turn, as a `"num/den"` string.
#[pyfunction]
fn angular_factor(j: u32, k: u32) -> PyResult<String> {
    pb::angular_factor(j, k).map(|q| q.to_string()).map_err(err)
}

#[pyfunction]
fn log_gamma(x: f64) -> PyResult<f64> {
    pb::log_gamma(x).map_err(err)
}

/// Kernel of `g*` at level `m` and the point with squared moduli `(x1, x2)`.
#[pyfunction]
#[pyo3(signature = (m, x1, x2=0.0, subspace="graded", tol=1e-10, max_terms=1_000_000))]
fn kernel(
    py: Python<'_>,
    m: u32,
    x1: f64,
    x2: f64,
    subspace: &str,
    tol: f64,
    max_terms: usize,
) -> PyResult<Py<PyAny>> {
    let point = pb::Point::new(x1, x2).map_err(err)?;
    let opts = options(tol, max_terms);
    let eval = match self::subspace(subspace)? {
        pb::Subspace::Graded => pb::graded_kernel(m, point, &opts),
        other => residue_kernel(m, point, &other, &opts),
    }
    .map_err(err)?;
    to_py(py, &eval)
}

/// Kernel of the family member with exponent `lam` at level `level`, at
/// `x = xi r^(lam+1)`. No constant is asserted for `lam != 2`.
#[pyfunction]
#[pyo3(signature = (level, lam, x, subspace="graded", tol=1e-10, max_terms=1_000_000))]
fn family_kernel(
    py: Python<'_>,
    level: u32,
    lam: f64,
    x: f64,
    subspace: &str,
    tol: f64,
    max_terms: usize,
) -> PyResult<Py<PyAny>> {
    let eval = family_kernel_eval(
        level,
        lam,
        x,
        &self::subspace(subspace)?,
        &options(tol, max_terms),
    )
    .map_err(err)?;
    to_py(py, &eval)
}

#[pyfunction]
#[pyo3(signature = (m, radii, subspace="graded", tol=1e-10))]
fn constancy(
    py: Python<'_>,
    m: u32,
    radii: Vec<f64>,
    subspace: &str,
    tol: f64,
) -> PyResult<Py<PyAny>> {
    let rep = pb::constancy_report(
        &self::subspace(subspace)?,
        m,
        &radii,
        &pb::KernelOptions::with_tol(tol),
    )
    .map_err(err)?;
    to_py(py, &rep)
}

#[pyfunction]
fn generating_check(py: Python<'_>, m: u32, r: f64, i_max: u32) -> PyResult<Py<PyAny>> {
    to_py(py, &pb::generating_check(m, r, i_max).map_err(err)?)
}

/// Runs the verification suite and returns the report as a dictionary.
/// With `out`, the report is also written there as JSON or CSV.
#[pyfunction]
#[pyo3(signature = (config=None, out=None, format="json"))]
fn verify(
    py: Python<'_>,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    format: &str,
) -> PyResult<Py<PyAny>> {
    let cfg = match config {
        Some(path) => parse_config(path).map_err(err)?,
        None => RunConfig::default(),
    };
    let format: pb::ReportFormat = format.parse().map_err(err)?;
    let report = py.detach(|| pb::run_verification_suite(&cfg));
    if let Some(path) = out {
        pb::export_report(&report, format, path).map_err(err)?;
    }
    let doc = to_py(py, &report)?;
    doc.bind(py).set_item("exit_code", report.exit_code())?;
    Ok(doc)
}

#[pymodule]
fn partial_bergman_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyRadialPotential>()?;
    m.add_class::<PyProductModel>()?;
    m.add_function(wrap_pyfunction!(norm, m)?)?;
    m.add_function(wrap_pyfunction!(angular_factor, m)?)?;
    m.add_function(wrap_pyfunction!(log_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(kernel, m)?)?;
    m.add_function(wrap_pyfunction!(family_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(constancy, m)?)?;
    m.add_function(wrap_pyfunction!(generating_check, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
