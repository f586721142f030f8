//! Python bindings: η construction, ensembles, contours, densities and the
//! comparison statistics.

use nswishart::analytics::{self, Axis, TridiagVariant, DEFAULT_POINTS, DEFAULT_QUAD_POINTS};
use nswishart::sampling::{run_ensemble_with_workers, worker_count, SpectrumOptions};
use nswishart::stats::{self, DensityMode};
use nswishart::{make_eta, EnsembleConfig, EtaKind, EtaSpec, SpectrumSample};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(nswishart, NumericalError, PyRuntimeError, "An iterative numerical method failed.");

fn to_py(e: nswishart::Error) -> PyErr {
    if e.is_numerical() {
        NumericalError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

/// η kind from its config name: `zero`, `diagonal`, `equal`, `tridiagonal` or `dense`.
pub fn eta_kind(kind: &str, c: f64, p: f64, q: f64, rows: Option<Vec<Vec<f64>>>) -> Result<EtaKind, String> {
    match kind {
        "zero" => Ok(EtaKind::Zero),
        "diagonal" => Ok(EtaKind::Diagonal { c }),
        "equal" => Ok(EtaKind::EqualCross { c }),
        "tridiagonal" => Ok(EtaKind::Tridiagonal { c, p, q }),
        "dense" => rows
            .map(|rows| EtaKind::Dense { rows })
            .ok_or_else(|| "dense eta needs rows".to_string()),
        other => Err(format!("unknown eta kind {other:?}")),
    }
}

pub fn density_mode(name: &str) -> Result<DensityMode, String> {
    match name {
        "radial" => Ok(DensityMode::Radial),
        "marginal_x" => Ok(DensityMode::MarginalX),
        "marginal_y" => Ok(DensityMode::MarginalY),
        "planar" => Ok(DensityMode::Planar2D),
        "singular_squared" => Ok(DensityMode::SingularSquared),
        other => Err(format!("unknown density mode {other:?}")),
    }
}

pub fn tridiag_variant(name: &str) -> Result<TridiagVariant, String> {
    match name {
        "symmetric" => Ok(TridiagVariant::Symmetric),
        "anticommuting" => Ok(TridiagVariant::AntiCommuting),
        other => Err(format!("unknown variant {other:?}; use symmetric or anticommuting")),
    }
}

/// Cross-correlation matrix η; `kind` is one of zero, diagonal, equal,
/// tridiagonal (p below, q above the diagonal) or dense.
#[pyclass(name = "EtaMatrix", frozen)]
pub struct PyEta {
    inner: nswishart::EtaMatrix,
    spec: EtaSpec,
}

#[pymethods]
impl PyEta {
    #[new]
    #[pyo3(signature = (kind, n, c = 0.0, p = 0.0, q = 0.0, rows = None))]
    fn new(kind: &str, n: usize, c: f64, p: f64, q: f64, rows: Option<Vec<Vec<f64>>>) -> PyResult<Self> {
        let spec = EtaSpec::new(eta_kind(kind, c, p, q, rows).map_err(PyValueError::new_err)?, n);
        let inner = make_eta(&spec).map_err(to_py)?;
        Ok(PyEta { inner, spec })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn sigma_max(&self) -> f64 {
        self.inner.sigma_max()
    }

    #[getter]
    fn is_normal(&self) -> bool {
        self.inner.is_normal()
    }

    fn eigenvalues(&self) -> PyResult<Vec<Complex64>> {
        self.inner.eigenvalues().map_err(to_py)
    }

    fn to_rows(&self) -> Vec<Vec<f64>> {
        self.inner.data().to_rows()
    }

    fn __repr__(&self) -> String {
        format!("EtaMatrix({:?}, n={})", self.spec.kind, self.spec.n)
    }
}

/// Spectral data of one realization of C.
#[pyclass(name = "Sample", frozen)]
pub struct PySample {
    inner: SpectrumSample,
}

#[pymethods]
impl PySample {
    #[getter]
    fn eigenvalues(&self) -> Vec<Complex64> {
        self.inner.eigenvalues.values.clone()
    }

    #[getter]
    fn singular_values(&self) -> Vec<f64> {
        self.inner.singular_values.clone()
    }

    #[getter]
    fn realization_index(&self) -> usize {
        self.inner.realization_index
    }

    #[getter]
    fn sub_seed(&self) -> u64 {
        self.inner.sub_seed
    }
}

/// Closed boundary curve of the eigenvalue support.
#[pyclass(name = "Contour", frozen)]
pub struct PyContour {
    inner: analytics::ContourCurve,
}

#[pymethods]
impl PyContour {
    #[getter]
    fn points(&self) -> Vec<Complex64> {
        self.inner.points.clone()
    }

    #[getter]
    fn method(&self) -> String {
        format!("{:?}", self.inner.method)
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa
    }

    fn area(&self) -> f64 {
        self.inner.area()
    }

    fn scaled_about(&self, center: Complex64, factor: f64) -> Self {
        PyContour {
            inner: self.inner.scaled_about(center, factor),
        }
    }

    /// Fraction of `points` inside the curve.
    fn contains(&self, points: Vec<Complex64>) -> PyResult<f64> {
        stats::containment_of_points(&points, &self.inner.points).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Normalized histogram; `atom_weight` is the mass of exact zeros.
#[pyclass(name = "Histogram", frozen)]
pub struct PyHistogram {
    inner: stats::Histogram,
}

#[pymethods]
impl PyHistogram {
    #[getter]
    fn edges(&self) -> Vec<f64> {
        self.inner.edges.clone()
    }

    #[getter]
    fn density(&self) -> Vec<f64> {
        self.inner.normalized.clone()
    }

    #[getter]
    fn counts(&self) -> Vec<u64> {
        self.inner.counts.clone()
    }

    #[getter]
    fn atom_weight(&self) -> f64 {
        self.inner.atom_weight
    }

    fn midpoints(&self) -> Vec<f64> {
        self.inner.midpoints()
    }

    /// Σ |density − model(midpoint)|·width for a Python callable `model`.
    #[pyo3(signature = (model, exclude = Vec::new()))]
    fn l1_distance(&self, model: &Bound<'_, PyAny>, exclude: Vec<usize>) -> PyResult<f64> {
        let mids = self.inner.midpoints();
        let values = mids
            .iter()
            .map(|m| model.call1((*m,))?.extract::<f64>())
            .collect::<PyResult<Vec<f64>>>()?;
        let lookup = |x: f64| mids.iter().position(|m| *m == x).map_or(f64::NAN, |i| values[i]);
        Ok(stats::l1_distance_excluding(&self.inner, lookup, &exclude))
    }

    /// Indices of the `k` bins whose centers are closest to `x`.
    fn bins_nearest(&self, x: f64, k: usize) -> Vec<usize> {
        self.inner.bins_nearest(x, k)
    }
}

/// Large-N density for η = c·I.
#[pyclass(name = "DensityModel", frozen)]
pub struct PyDensityModel {
    inner: analytics::DensityModel,
}

#[pymethods]
impl PyDensityModel {
    #[new]
    fn new(c: f64, kappa: f64) -> PyResult<Self> {
        Ok(PyDensityModel {
            inner: analytics::DensityModel::new(c, kappa).map_err(to_py)?,
        })
    }

    /// Center and semi-axes `(x0, a, b)` of the support ellipse.
    fn ellipse(&self) -> (f64, f64, f64) {
        self.inner.ellipse()
    }

    fn density(&self, z: Complex64) -> f64 {
        analytics::density_diagonal(z, &self.inner)
    }

    fn green(&self, z: Complex64) -> PyResult<Complex64> {
        analytics::green_diagonal(z, &self.inner).map_err(to_py)
    }

    #[pyo3(signature = (r, quad_points = DEFAULT_QUAD_POINTS))]
    fn radial(&self, r: f64, quad_points: usize) -> f64 {
        analytics::radial_density(r, &self.inner, quad_points)
    }

    #[pyo3(signature = (x, quad_points = DEFAULT_QUAD_POINTS))]
    fn marginal_x(&self, x: f64, quad_points: usize) -> f64 {
        analytics::marginal_density(Axis::X, x, &self.inner, quad_points)
    }

    #[pyo3(signature = (y, quad_points = DEFAULT_QUAD_POINTS))]
    fn marginal_y(&self, y: f64, quad_points: usize) -> f64 {
        analytics::marginal_density(Axis::Y, y, &self.inner, quad_points)
    }
}

/// Samples `realizations` independent C = A Bᵗ / T; output is independent of `workers`.
#[pyfunction]
#[pyo3(signature = (eta, t, realizations, seed, singular_values = false, workers = None))]
fn run_ensemble(
    py: Python<'_>,
    eta: &PyEta,
    t: usize,
    realizations: usize,
    seed: u64,
    singular_values: bool,
    workers: Option<usize>,
) -> PyResult<Vec<PySample>> {
    let spectrum = SpectrumOptions {
        eigenvalues: true,
        singular_values,
    };
    let config = EnsembleConfig::new(eta.spec.n, t, realizations, seed, eta.spec.clone()).with_spectrum(spectrum);
    let workers = workers.unwrap_or_else(worker_count);
    let samples = py
        .detach(|| run_ensemble_with_workers(&config, workers))
        .map_err(to_py)?;
    Ok(samples.into_iter().map(|inner| PySample { inner }).collect())
}

#[pyfunction]
#[pyo3(signature = (c, kappa, n_points = DEFAULT_POINTS))]
fn ellipse_contour(c: f64, kappa: f64, n_points: usize) -> PyResult<PyContour> {
    let inner = analytics::ellipse_contour(c, kappa, n_points).map_err(to_py)?;
    Ok(PyContour { inner })
}

/// Infinite-N contour for tridiagonal η with p = ±q = ±c0.
#[pyfunction]
#[pyo3(signature = (c, c0, kappa, variant, n_points = DEFAULT_POINTS))]
fn tridiag_contour(c: f64, c0: f64, kappa: f64, variant: &str, n_points: usize) -> PyResult<PyContour> {
    let v = tridiag_variant(variant).map_err(PyValueError::new_err)?;
    let inner = analytics::tridiag_contour(c, c0, kappa, v, n_points).map_err(to_py)?;
    Ok(PyContour { inner })
}

/// Contour of a normal η from its eigenvalues.
#[pyfunction]
#[pyo3(signature = (eigenvalues, kappa, n_points = DEFAULT_POINTS))]
fn spectrum_contour(eigenvalues: Vec<Complex64>, kappa: f64, n_points: usize) -> PyResult<PyContour> {
    let inner = analytics::spectrum_contour(&eigenvalues, kappa, n_points).map_err(to_py)?;
    Ok(PyContour { inner })
}

/// Contour of any admissible η, normal or not.
#[pyfunction]
#[pyo3(signature = (eta, kappa, resolution = DEFAULT_POINTS))]
fn general_contour(py: Python<'_>, eta: &PyEta, kappa: f64, resolution: usize) -> PyResult<PyContour> {
    let inner = py
        .detach(|| analytics::general_contour(&eta.inner, kappa, resolution))
        .map_err(to_py)?;
    Ok(PyContour { inner })
}

#[pyfunction]
fn hausdorff_distance(a: &PyContour, b: &PyContour) -> f64 {
    analytics::hausdorff_distance(&a.inner.points, &b.inner.points)
}

/// Pooled eigenvalue fraction of `samples` inside `contour`.
#[pyfunction]
fn containment_fraction(samples: Vec<PyRef<'_, PySample>>, contour: &PyContour) -> PyResult<f64> {
    let owned: Vec<SpectrumSample> = samples.iter().map(|s| s.inner.clone()).collect();
    stats::containment_fraction(&owned, &contour.inner).map_err(to_py)
}

/// Pooled histogram; `mode` is radial, marginal_x, marginal_y, planar or singular_squared.
#[pyfunction]
#[pyo3(signature = (samples, mode, bins = 50, range = None))]
fn empirical_density(
    samples: Vec<PyRef<'_, PySample>>,
    mode: &str,
    bins: usize,
    range: Option<(f64, f64)>,
) -> PyResult<PyHistogram> {
    let mode = density_mode(mode).map_err(PyValueError::new_err)?;
    let owned: Vec<SpectrumSample> = samples.iter().map(|s| s.inner.clone()).collect();
    let inner = stats::empirical_density_in(&owned, mode, bins, range).map_err(to_py)?;
    Ok(PyHistogram { inner })
}

#[pyfunction]
fn mp_density(x: f64, kappa: f64) -> f64 {
    analytics::mp_density(x, kappa)
}

#[pyfunction]
fn mp_support(kappa: f64) -> (f64, f64) {
    analytics::mp_support(kappa)
}

/// Eigenvalues of the tridiagonal Toeplitz matrix (c on, p below, q above the diagonal).
#[pyfunction]
fn tridiagonal_spectrum(c: f64, p: f64, q: f64, n: usize) -> Vec<Complex64> {
    nswishart::correlation::tridiagonal_spectrum(c, p, q, n)
}

#[pymodule(name = "nswishart")]
fn nswishart_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<PyEta>()?;
    m.add_class::<PySample>()?;
    m.add_class::<PyContour>()?;
    m.add_class::<PyHistogram>()?;
    m.add_class::<PyDensityModel>()?;
    m.add_function(wrap_pyfunction!(run_ensemble, m)?)?;
    m.add_function(wrap_pyfunction!(ellipse_contour, m)?)?;
    m.add_function(wrap_pyfunction!(tridiag_contour, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_contour, m)?)?;
    m.add_function(wrap_pyfunction!(general_contour, m)?)?;
    m.add_function(wrap_pyfunction!(hausdorff_distance, m)?)?;
    m.add_function(wrap_pyfunction!(containment_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_density, m)?)?;
    m.add_function(wrap_pyfunction!(mp_density, m)?)?;
    m.add_function(wrap_pyfunction!(mp_support, m)?)?;
    m.add_function(wrap_pyfunction!(tridiagonal_spectrum, m)?)?;
    Ok(())
}
