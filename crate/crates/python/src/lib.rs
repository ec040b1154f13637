use std::collections::BTreeMap;
use std::path::PathBuf;

use epslens::chain::{detect_chain, ChainMode, SearchLimits, SearchMode};
use epslens::definability::{build_definition, DefineOutcome, Strategy, TypeFunction, WitnessParams};
use epslens::formula::{evaluate_formula, parse_formula, FiniteStructure};
use epslens::matrix::{Transform, WeightedBipartiteStructure};
use epslens::profile::stability_profile;
use epslens::report::{verify_report, Report};
use epslens::seminorm::{seminorm_audit, AuditOptions};
use epslens::typespace::{cb_analyze, cover_rows, CoverMethod, TopometricSpace};
use epslens::value_space::{embed_finite_metric, MetricTable, ValuePoint};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: epslens::Error) -> PyErr {
    match e {
        epslens::Error::SizeGuard(m) => PyRuntimeError::new_err(format!("size guard: {m}")),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Converts any serializable value to plain Python objects.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

/// A weighted bipartite structure: a table of reals or vectors with
/// labelled rows and columns.
#[pyclass(name = "Matrix", module = "pyepslens", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMatrix {
    inner: WeightedBipartiteStructure,
}

#[pymethods]
impl PyMatrix {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PyMatrix { inner: WeightedBipartiteStructure::from_real_rows(&rows).map_err(err)? })
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        Ok(PyMatrix { inner: WeightedBipartiteStructure::from_csv_str(text).map_err(err)? })
    }

    #[staticmethod]
    fn read_csv(path: PathBuf) -> PyResult<Self> {
        Ok(PyMatrix { inner: WeightedBipartiteStructure::from_csv_path(path).map_err(err)? })
    }

    #[staticmethod]
    fn half_graph(n: usize) -> PyResult<Self> {
        Ok(PyMatrix { inner: WeightedBipartiteStructure::half_graph(n).map_err(err)? })
    }

    #[getter]
    fn n_rows(&self) -> usize {
        self.inner.n_rows()
    }

    #[getter]
    fn n_cols(&self) -> usize {
        self.inner.n_cols()
    }

    #[getter]
    fn diameter(&self) -> f64 {
        self.inner.diameter()
    }

    #[getter]
    fn row_labels(&self) -> Vec<String> {
        self.inner.row_labels().to_vec()
    }

    #[getter]
    fn col_labels(&self) -> Vec<String> {
        self.inner.col_labels().to_vec()
    }

    fn values<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let rows: Vec<&[ValuePoint]> = (0..self.inner.n_rows()).map(|a| self.inner.row(a)).collect();
        to_py(py, &rows)
    }

    fn transpose(&self) -> Self {
        PyMatrix { inner: self.inner.transpose() }
    }

    fn scale(&self, r: f64) -> PyResult<Self> {
        Ok(PyMatrix { inner: self.inner.transform(&Transform::Scale(r)).map_err(err)? })
    }

    fn __add__(&self, other: &PyMatrix) -> PyResult<Self> {
        Ok(PyMatrix { inner: self.inner.transform(&Transform::AddPointwise(&other.inner)).map_err(err)? })
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv_string()
    }

    /// Stability profile eps_1..eps_kmax with certificate chains.
    #[pyo3(signature = (kmax, heuristic = false, seed = 0))]
    fn profile<'py>(&self, py: Python<'py>, kmax: usize, heuristic: bool, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let mode = if heuristic { SearchMode::Heuristic } else { SearchMode::Exact };
        let f = self.inner.clone();
        let p = py.detach(move || stability_profile(&f, kmax, mode, &SearchLimits::from_env(), seed)).map_err(err)?;
        to_py(py, &p)
    }

    /// Searches for a chain of length k+1; returns it or None.
    #[pyo3(signature = (epsilon, k, biconstant_delta = None))]
    fn detect<'py>(&self, py: Python<'py>, epsilon: f64, k: usize, biconstant_delta: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
        let mode = match biconstant_delta {
            Some(delta) => ChainMode::BiConstant { delta },
            None => ChainMode::Plain,
        };
        let d = detect_chain(&self.inner, epsilon, k, mode, SearchMode::Exact, &SearchLimits::from_env()).map_err(err)?;
        to_py(py, &d.chain)
    }

    /// Certified definition of a realized (`row`) or external
    /// (`type_values`) type.
    #[pyo3(signature = (epsilon, row = None, type_values = None, gamma = 0.3, delta = 0.1, strategy = "glue", n_max = 7))]
    #[allow(clippy::too_many_arguments)]
    fn define<'py>(
        &self,
        py: Python<'py>,
        epsilon: f64,
        row: Option<&str>,
        type_values: Option<Vec<f64>>,
        gamma: f64,
        delta: f64,
        strategy: &str,
        n_max: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let f = &self.inner;
        let p = match (row, type_values) {
            (Some(label), None) => TypeFunction::realized(f, f.row_index(label).map_err(err)?).map_err(err)?,
            (None, Some(v)) => TypeFunction::from_values(f, v.into_iter().map(ValuePoint::Real).collect()).map_err(err)?,
            _ => return Err(PyValueError::new_err("give exactly one of row and type_values")),
        };
        let strategy = match strategy {
            "glue" => Strategy::Glue,
            "median" => Strategy::Median { epsilon, n_max },
            s => return Err(PyValueError::new_err(format!("unknown strategy `{s}`"))),
        };
        let params = WitnessParams::new(epsilon, gamma, delta, None).map_err(err)?;
        match build_definition(f, &p, params, strategy).map_err(err)? {
            DefineOutcome::Defined(d) => to_py(py, &serde_json::json!({"outcome": "defined", "definition": d})),
            DefineOutcome::Unstable(ev) => to_py(py, &serde_json::json!({"outcome": "unstable", "evidence": ev})),
        }
    }

    #[pyo3(signature = (epsilon, method = "exact"))]
    fn cover<'py>(&self, py: Python<'py>, epsilon: f64, method: &str) -> PyResult<Bound<'py, PyAny>> {
        let m = match method {
            "exact" => CoverMethod::Exact,
            "greedy" => CoverMethod::Greedy,
            s => return Err(PyValueError::new_err(format!("unknown method `{s}`"))),
        };
        to_py(py, &cover_rows(&self.inner, epsilon, m).map_err(err)?)
    }

    #[pyo3(signature = (other = None, k = 3))]
    fn audit_seminorm<'py>(&self, py: Python<'py>, other: Option<&PyMatrix>, k: usize) -> PyResult<Bound<'py, PyAny>> {
        let opts = AuditOptions { k, ..AuditOptions::default() };
        let r = seminorm_audit(&self.inner, other.map(|o| &o.inner), &opts, &SearchLimits::from_env()).map_err(err)?;
        to_py(py, &r)
    }

    fn __repr__(&self) -> String {
        format!("Matrix({}x{}, diameter {})", self.inner.n_rows(), self.inner.n_cols(), self.inner.diameter())
    }
}

#[pyfunction]
fn verify_ramsey<'py>(py: Python<'py>, s: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &epslens::ramsey::verify_ramsey(s).map_err(err)?)
}

/// Isometric embedding of a finite metric into a sup-norm space.
#[pyfunction]
#[pyo3(signature = (metric, base = 0))]
fn embed_metric(metric: Vec<Vec<f64>>, base: usize) -> PyResult<Vec<Vec<f64>>> {
    let t = MetricTable::new(metric).map_err(err)?;
    let pts = embed_finite_metric(&t, base).map_err(err)?;
    Ok(pts.iter().map(|p| p.coords().unwrap_or_default().to_vec()).collect())
}

/// Cantor-Bendixson analysis of a space given in its JSON form.
#[pyfunction]
#[pyo3(signature = (space_json, epsilon, force_discrete = false))]
fn cb_analysis<'py>(py: Python<'py>, space_json: &str, epsilon: f64, force_discrete: bool) -> PyResult<Bound<'py, PyAny>> {
    let s = TopometricSpace::from_json_str(space_json, force_discrete).map_err(err)?;
    to_py(py, &cb_analyze(&s, epsilon).map_err(err)?)
}

/// Evaluates a formula on a structure given in its JSON form.
#[pyfunction]
#[pyo3(signature = (structure_json, formula, assignment = None))]
fn evaluate<'py>(
    py: Python<'py>,
    structure_json: &str,
    formula: &str,
    assignment: Option<BTreeMap<String, String>>,
) -> PyResult<Bound<'py, PyAny>> {
    let s = FiniteStructure::from_json_str(structure_json).map_err(err)?;
    let f = parse_formula(formula, s.language()).map_err(err)?;
    let v = evaluate_formula(&f, &s, &assignment.unwrap_or_default()).map_err(err)?;
    to_py(py, &v)
}

/// Parses a formula against a structure's language and returns its printed
/// form and value envelope.
#[pyfunction]
fn parse(structure_json: &str, formula: &str) -> PyResult<(String, String)> {
    let s = FiniteStructure::from_json_str(structure_json).map_err(err)?;
    let f = parse_formula(formula, s.language()).map_err(err)?;
    Ok((f.to_string(), f.envelope.to_string()))
}

/// Re-checks every certificate of a JSON report.
#[pyfunction]
fn verify<'py>(py: Python<'py>, report_json: &str) -> PyResult<Bound<'py, PyAny>> {
    let r = Report::from_json_str(report_json).map_err(err)?;
    to_py(py, &verify_report(&r, &SearchLimits::from_env()))
}

/// Runs the command-line front end with the given arguments and returns
/// its exit code.
#[pyfunction]
fn run_cli(args: Vec<String>) -> i32 {
    epslens::cli::run(std::iter::once("epslens".to_string()).chain(args))
}

#[pymodule]
fn pyepslens(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMatrix>()?;
    m.add_function(wrap_pyfunction!(verify_ramsey, m)?)?;
    m.add_function(wrap_pyfunction!(embed_metric, m)?)?;
    m.add_function(wrap_pyfunction!(cb_analysis, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
