// pyo3 0.22 macros trip this lint on every PyResult-returning method
#![allow(clippy::useless_conversion)]

use gauduchon_core::chern::{chern_package, ChernPackage};
use gauduchon_core::gauduchon::{
    curvature_closed_form, curvature_direct, hsc, torsion_decomposition, torsion_norm_profile, GauduchonCurvature,
};
use gauduchon_core::metric_dsl::{compile, parse_metric_dsl};
use gauduchon_core::report::{run_verification_suite, sweep as run_sweep, t_grid, Quantity, SweepConfig, VerifyConfig};
use gauduchon_core::tensorcore::LabeledTensor;
use gauduchon_core::{build_model, evaluate_jet, ChartPoint, Error, MetricField, MetricJet, ModelSpec, C64};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::SingularMetric { .. } | Error::NonPositiveDefinite(_) | Error::ConsistencyFailure { .. } => {
            PyArithmeticError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn matrix(t: &LabeledTensor) -> Vec<Vec<C64>> {
    let m = t.to_matrix();
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn ricci_index(k: usize) -> PyResult<usize> {
    if (1..=4).contains(&k) {
        Ok(k - 1)
    } else {
        Err(PyValueError::new_err("Ricci index must be 1..4"))
    }
}

/// A Hermitian metric on a coordinate chart.
#[pyclass(name = "Metric", frozen)]
struct PyMetric {
    field: MetricField,
}

#[pymethods]
impl PyMetric {
    /// Built-in model: flat, fubini_study, hopf, hopf_lambda, iwasawa, random_poly.
    #[staticmethod]
    #[pyo3(signature = (name, n, lam = 0.0, seed = 1))]
    fn model(name: &str, n: usize, lam: f64, seed: u64) -> PyResult<Self> {
        let spec = ModelSpec { name: name.into(), n, lambda: lam, seed };
        Ok(PyMetric { field: build_model(&spec).map_err(to_py)? })
    }

    #[staticmethod]
    fn from_text(source: &str) -> PyResult<Self> {
        Ok(PyMetric { field: compile(parse_metric_dsl(source).map_err(to_py)?) })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.field.dim()
    }

    #[getter]
    fn name(&self) -> String {
        self.field.name()
    }

    /// `g_{i jbar}` at `z`.
    fn at(&self, z: Vec<C64>) -> PyResult<Vec<Vec<C64>>> {
        let m = self.field.metric_at(&ChartPoint::new(z)).map_err(to_py)?;
        let m = m.matrix();
        Ok((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect())
    }

    /// Chern connection data at `z`.
    fn chern(&self, z: Vec<C64>) -> PyResult<Chern> {
        let jet = self.jet(z, 2)?;
        Ok(Chern { pkg: chern_package(&jet).map_err(to_py)? })
    }

    /// Gauduchon curvature at `z`; `route` is `closed_form` or `direct`.
    #[pyo3(signature = (z, t, route = "closed_form"))]
    fn curvature(&self, z: Vec<C64>, t: f64, route: &str) -> PyResult<Curvature> {
        let jet = self.jet(z, 2)?;
        let curv = match route {
            "closed_form" => curvature_closed_form(t, &chern_package(&jet).map_err(to_py)?),
            "direct" => curvature_direct(t, &jet),
            other => return Err(PyValueError::new_err(format!("unknown route '{other}'"))),
        }
        .map_err(to_py)?;
        Ok(Curvature { curv })
    }

    /// `|T|^2` of the Gauduchon connection at `z`.
    fn torsion_norm2(&self, z: Vec<C64>, t: f64) -> PyResult<f64> {
        gauduchon_core::gauduchon::torsion_norm2(t, &self.jet(z, 1)?).map_err(to_py)
    }

    /// Largest residual of the torsion characterisation at `z`.
    fn torsion_residual(&self, z: Vec<C64>, t: f64) -> PyResult<f64> {
        Ok(torsion_decomposition(t, &self.jet(z, 1)?).map_err(to_py)?.max_residual())
    }

    /// Vertex of the parabola `t -> |T|^2`.
    fn torsion_vertex(&self, z: Vec<C64>) -> PyResult<f64> {
        let prof = torsion_norm_profile(&self.jet(z, 1)?, &[-1.0, 0.0, 0.5, 1.0, 2.0]).map_err(to_py)?;
        Ok(prof.vertex)
    }

    fn __repr__(&self) -> String {
        format!("Metric({}, n={})", self.field.name(), self.field.dim())
    }
}

impl PyMetric {
    fn jet(&self, z: Vec<C64>, order: usize) -> PyResult<MetricJet> {
        evaluate_jet(&self.field, &ChartPoint::new(z), order).map_err(to_py)
    }
}

#[pyclass(frozen)]
struct Chern {
    pkg: ChernPackage,
}

#[pymethods]
impl Chern {
    #[getter]
    fn scal(&self) -> f64 {
        self.pkg.scal
    }

    #[getter]
    fn scal_tilde(&self) -> f64 {
        self.pkg.scal_tilde
    }

    #[getter]
    fn torsion_max(&self) -> f64 {
        self.pkg.torsion.max_abs()
    }

    #[pyo3(signature = (tol = 1e-10))]
    fn is_kahler(&self, tol: f64) -> bool {
        self.pkg.is_kahler(tol)
    }

    /// Chern Ricci form `k` in 1..4, unitary frame.
    fn ricci(&self, k: usize) -> PyResult<Vec<Vec<C64>>> {
        Ok(matrix(&self.pkg.in_frame(self.pkg.ric(ricci_index(k)? + 1))))
    }

    fn bianchi_residual(&self) -> f64 {
        self.pkg.bianchi_residual()
    }
}

#[pyclass(frozen)]
struct Curvature {
    curv: GauduchonCurvature,
}

#[pymethods]
impl Curvature {
    #[getter]
    fn t(&self) -> f64 {
        self.curv.t
    }

    #[getter]
    fn n(&self) -> usize {
        self.curv.n
    }

    #[getter]
    fn scal(&self) -> f64 {
        self.curv.scal
    }

    #[getter]
    fn scal_tilde(&self) -> f64 {
        self.curv.scal_tilde
    }

    /// Gauduchon Ricci form `k` in 1..4, unitary frame.
    fn ricci(&self, k: usize) -> PyResult<Vec<Vec<C64>>> {
        Ok(matrix(&self.curv.ricci[ricci_index(k)?]))
    }

    /// Holomorphic sectional curvature along a coordinate vector.
    fn hsc(&self, v: Vec<C64>) -> PyResult<f64> {
        hsc(&self.curv, &v).map_err(to_py)
    }

    /// Flat list of the (1,1) curvature in the unitary frame, row-major in `(i, j, k, l)`.
    fn r11(&self) -> Vec<C64> {
        self.curv.r11.data.clone()
    }

    fn r20_max(&self) -> f64 {
        self.curv.r20.max_abs()
    }
}

/// Ricci-flat parameter of the Hopf family.
#[pyfunction]
fn lambda_star(t: f64, n: usize) -> PyResult<f64> {
    gauduchon_core::lambda_star(t, n).map_err(to_py)
}

/// Run a verification suite; returns the JSON report.
#[pyfunction]
#[pyo3(signature = (suite = "all", seed = 0, tol = 1e-8, points = 5, mc_samples = 100_000))]
fn verify(py: Python<'_>, suite: &str, seed: u64, tol: f64, points: usize, mc_samples: usize) -> PyResult<String> {
    let cfg = VerifyConfig { suite: suite.into(), seed, tol, points, mc_samples, stable_output: true, ..Default::default() };
    let report = py.allow_threads(|| run_verification_suite(&cfg)).map_err(to_py)?;
    serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// `(t values, aggregated values)` of a quantity on a built-in model.
#[pyfunction]
#[pyo3(signature = (model, n, quantity, a, b, step, points = 5, seed = 0, lam = 0.0, model_seed = 1))]
#[allow(clippy::too_many_arguments)]
fn sweep(
    py: Python<'_>,
    model: &str,
    n: usize,
    quantity: &str,
    a: f64,
    b: f64,
    step: f64,
    points: usize,
    seed: u64,
    lam: f64,
    model_seed: u64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let cfg = SweepConfig {
        model: ModelSpec { name: model.into(), n, lambda: lam, seed: model_seed },
        quantity: quantity.parse::<Quantity>().map_err(to_py)?,
        grid: t_grid(a, b, step).map_err(to_py)?,
        points,
        seed,
        breakdown: false,
    };
    let table = py.allow_threads(|| run_sweep(&cfg)).map_err(to_py)?;
    Ok((table.t, table.values))
}

#[pymodule]
fn gauduchon(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyMetric>()?;
    m.add_class::<Chern>()?;
    m.add_class::<Curvature>()?;
    m.add_function(wrap_pyfunction!(lambda_star, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
