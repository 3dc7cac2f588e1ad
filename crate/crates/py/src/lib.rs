//! Python bindings: the validated transition-matrix type, the perturbation
//! sweeps and the GTH benchmark, plus the standalone update kernels and the
//! accuracy statistics.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use markov_perturb_core::algorithms::{self, AlgorithmId};
use markov_perturb_core::chain::{self, PerturbationRow, ProbabilityVector};
use markov_perturb_core::ginverse::{
    fundamental_matrix, make_tu_inverse, mfpt_from_ginverse, to_group_inverse, GeneralizedInverse,
    GinverseSource, GroupInverseMatrix, MfptForm,
};
use markov_perturb_core::metrics;
use markov_perturb_core::perturb::{self, UpdateForm};
use markov_perturb_core::{gth_stationary as gth_core, Error, Mat, PrecisionMode};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::NearSingularUpdate { .. } | Error::SingularSystem { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_precision(label: &str) -> PyResult<PrecisionMode> {
    match label {
        "single" => Ok(PrecisionMode::Single),
        "double" => Ok(PrecisionMode::Double),
        other => Err(PyValueError::new_err(format!(
            "precision must be \"single\" or \"double\", got {other:?}"
        ))),
    }
}

fn parse_algorithm(label: &str) -> PyResult<AlgorithmId> {
    AlgorithmId::parse(label).ok_or_else(|| {
        PyValueError::new_err(format!(
            "algorithm must be one of al1, al2, al3, al4a, al4b, al4c; got {label:?}"
        ))
    })
}

fn mat_from_rows(rows: &[Vec<f64>]) -> PyResult<Mat<f64>> {
    Mat::from_rows(rows).map_err(to_py_err)
}

/// A validated row-stochastic irreducible transition matrix.
#[pyclass(name = "StochasticMatrix", frozen)]
struct PyStochasticMatrix {
    inner: chain::StochasticMatrix<f64>,
}

#[pymethods]
impl PyStochasticMatrix {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let inner = chain::StochasticMatrix::validate(mat_from_rows(&rows)?).map_err(to_py_err)?;
        Ok(PyStochasticMatrix { inner })
    }

    /// The uniform chain on `m` states.
    #[staticmethod]
    fn uniform(m: usize) -> PyResult<Self> {
        if m < 2 {
            return Err(PyValueError::new_err("m must be at least 2"));
        }
        Ok(PyStochasticMatrix {
            inner: chain::StochasticMatrix::uniform(m),
        })
    }

    /// Parse CSV text or a `{"m": .., "rows": [[..]]}` document.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        let mat = markov_perturb_core::io::parse_matrix(text).map_err(to_py_err)?;
        let inner = chain::StochasticMatrix::validate(mat).map_err(to_py_err)?;
        Ok(PyStochasticMatrix { inner })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.mat().row_vecs()
    }

    fn __repr__(&self) -> String {
        format!("StochasticMatrix(m={})", self.inner.m())
    }
}

/// One finished sweep: stationary vector, group inverse, mean first
/// passage times and the per-step trace, all widened to float64.
#[pyclass(name = "AlgorithmResult", frozen)]
struct PyAlgorithmResult {
    #[pyo3(get)]
    algorithm: String,
    #[pyo3(get)]
    precision: String,
    #[pyo3(get)]
    pi: Vec<f64>,
    #[pyo3(get)]
    mfpt: Vec<Vec<f64>>,
    #[pyo3(get)]
    group_inverse: Vec<Vec<f64>>,
    /// `(iteration, denominator, work_norm, invariant_deviation)` per step.
    #[pyo3(get)]
    trace: Vec<(usize, f64, f64, f64)>,
}

impl From<algorithms::AlgorithmResult> for PyAlgorithmResult {
    fn from(r: algorithms::AlgorithmResult) -> Self {
        PyAlgorithmResult {
            algorithm: r.algorithm.label().to_string(),
            precision: r.precision.label().to_string(),
            pi: r.pi,
            mfpt: r.mfpt.row_vecs(),
            group_inverse: r.a_sharp.row_vecs(),
            trace: r
                .trace
                .iter()
                .map(|t| {
                    (
                        t.iteration,
                        t.denominator,
                        t.work_norm,
                        t.invariant_deviation,
                    )
                })
                .collect(),
        }
    }
}

#[pymethods]
impl PyAlgorithmResult {
    fn __repr__(&self) -> String {
        format!(
            "AlgorithmResult(algorithm={:?}, precision={:?}, m={})",
            self.algorithm,
            self.precision,
            self.pi.len()
        )
    }
}

/// Stationary distribution by GTH state reduction.
#[pyfunction]
#[pyo3(signature = (p, precision = "double"))]
fn gth_stationary(p: &PyStochasticMatrix, precision: &str) -> PyResult<Vec<f64>> {
    let precision = parse_precision(precision)?;
    algorithms::gth_at_precision(&p.inner, precision).map_err(to_py_err)
}

/// Run one perturbation sweep (al1, al2, al3, al4a, al4b or al4c).
#[pyfunction]
#[pyo3(signature = (p, algorithm, precision = "double"))]
fn run_algorithm(
    p: &PyStochasticMatrix,
    algorithm: &str,
    precision: &str,
) -> PyResult<PyAlgorithmResult> {
    let id = parse_algorithm(algorithm)?;
    let precision = parse_precision(precision)?;
    algorithms::run_algorithm(&p.inner, id, precision)
        .map(PyAlgorithmResult::from)
        .map_err(to_py_err)
}

/// Run every sweep at one precision; failures surface as exceptions.
#[pyfunction]
#[pyo3(signature = (p, precision = "double"))]
fn run_all(p: &PyStochasticMatrix, precision: &str) -> PyResult<Vec<PyAlgorithmResult>> {
    let precision = parse_precision(precision)?;
    let summary = algorithms::run_all(&p.inner, precision);
    summary
        .runs
        .into_iter()
        .map(|(_, r)| r.map(PyAlgorithmResult::from).map_err(to_py_err))
        .collect()
}

fn group_inverse_of(
    p: &PyStochasticMatrix,
) -> PyResult<(ProbabilityVector<f64>, GroupInverseMatrix<f64>)> {
    let pi = gth_core(&p.inner).map_err(to_py_err)?;
    let ones = vec![1.0; p.inner.m()];
    let z = make_tu_inverse(&p.inner, &ones, pi.entries()).map_err(to_py_err)?;
    let a_sharp = to_group_inverse(&z, &pi);
    Ok((pi, a_sharp))
}

/// Stationary distribution (GTH, double precision).
#[pyfunction]
fn stationary(p: &PyStochasticMatrix) -> PyResult<Vec<f64>> {
    Ok(gth_core(&p.inner).map_err(to_py_err)?.to_f64())
}

/// Group inverse of `I - P` via the projected resolvent.
#[pyfunction]
fn group_inverse(p: &PyStochasticMatrix) -> PyResult<Vec<Vec<f64>>> {
    let (_, a_sharp) = group_inverse_of(p)?;
    Ok(a_sharp.matrix().row_vecs())
}

/// Mean first passage time matrix, from the group inverse.
#[pyfunction]
fn mean_first_passage_times(p: &PyStochasticMatrix) -> PyResult<Vec<Vec<f64>>> {
    let (pi, a_sharp) = group_inverse_of(p)?;
    let g = GeneralizedInverse::from_matrix(a_sharp.into_mat(), GinverseSource::Transform);
    let mfpt = mfpt_from_ginverse(&g, &pi, MfptForm::RowConstant).map_err(to_py_err)?;
    Ok(mfpt.entries().row_vecs())
}

/// Kemeny and Snell's fundamental matrix `[I - P + e pi^T]^{-1}`.
#[pyfunction]
fn fundamental(p: &PyStochasticMatrix) -> PyResult<Vec<Vec<f64>>> {
    let (pi, a_sharp) = group_inverse_of(p)?;
    Ok(fundamental_matrix(&a_sharp, &pi).row_vecs())
}

/// `(A + u v^T)^{-1}` from `A^{-1}` by the rank-one update formula.
#[pyfunction]
fn sherman_morrison_apply(
    a_inv: Vec<Vec<f64>>,
    u: Vec<f64>,
    v: Vec<f64>,
) -> PyResult<Vec<Vec<f64>>> {
    let a_inv = mat_from_rows(&a_inv)?;
    perturb::sherman_morrison_apply(&a_inv, &u, &v)
        .map(|m| m.row_vecs())
        .map_err(to_py_err)
}

/// Stationary vector after replacing row `index` (perturbation `b`),
/// driven by the unperturbed chain's group inverse.
#[pyfunction]
fn stationary_update_row(
    pi: Vec<f64>,
    a_sharp: Vec<Vec<f64>>,
    index: usize,
    b: Vec<f64>,
) -> PyResult<Vec<f64>> {
    let pi = ProbabilityVector::new(pi).map_err(to_py_err)?;
    let a_sharp = mat_from_rows(&a_sharp)?;
    let b = PerturbationRow::new(index, b).map_err(to_py_err)?;
    perturb::stationary_update_row(&pi, &a_sharp, &b, UpdateForm::GroupInverse)
        .map(|v| v.to_f64())
        .map_err(to_py_err)
}

/// Group inverse after replacing row `index`; `pi_i` is that row's
/// stationary probability in the unperturbed chain.
#[pyfunction]
fn group_inverse_update_row(
    a_sharp: Vec<Vec<f64>>,
    pi_i: f64,
    index: usize,
    b: Vec<f64>,
) -> PyResult<Vec<Vec<f64>>> {
    let a_sharp = GroupInverseMatrix::new(mat_from_rows(&a_sharp)?);
    let b = PerturbationRow::new(index, b).map_err(to_py_err)?;
    perturb::group_inverse_update_row(&a_sharp, pi_i, &b)
        .map(|m| m.matrix().row_vecs())
        .map_err(to_py_err)
}

/// Average extra accurate digits of `computed` against `truth`.
#[pyfunction]
fn accurate_digits(truth: Vec<Vec<f64>>, computed: Vec<Vec<f64>>) -> PyResult<f64> {
    let truth = mat_from_rows(&truth)?;
    let computed = mat_from_rows(&computed)?;
    Ok(metrics::accurate_digits(&truth, &computed))
}

/// Average accurate decimal places of `computed` against a rounded
/// `reference`.
#[pyfunction]
fn avg_decimal_places(reference: Vec<f64>, computed: Vec<f64>) -> PyResult<f64> {
    if reference.len() != computed.len() {
        return Err(PyValueError::new_err("length mismatch"));
    }
    Ok(metrics::avg_decimal_places_slice(&reference, &computed))
}

#[pymodule]
fn markov_perturb(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStochasticMatrix>()?;
    m.add_class::<PyAlgorithmResult>()?;
    m.add_function(wrap_pyfunction!(gth_stationary, m)?)?;
    m.add_function(wrap_pyfunction!(run_algorithm, m)?)?;
    m.add_function(wrap_pyfunction!(run_all, m)?)?;
    m.add_function(wrap_pyfunction!(stationary, m)?)?;
    m.add_function(wrap_pyfunction!(group_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(mean_first_passage_times, m)?)?;
    m.add_function(wrap_pyfunction!(fundamental, m)?)?;
    m.add_function(wrap_pyfunction!(sherman_morrison_apply, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_update_row, m)?)?;
    m.add_function(wrap_pyfunction!(group_inverse_update_row, m)?)?;
    m.add_function(wrap_pyfunction!(accurate_digits, m)?)?;
    m.add_function(wrap_pyfunction!(avg_decimal_places, m)?)?;
    Ok(())
}
