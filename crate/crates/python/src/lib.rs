//! Python module `nmecut_py`.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use nmecut::cli::{parse_observable, parse_state};
use nmecut::entangle;
use nmecut::estimator::{self, EstimatorConfig, Mode};
use nmecut::gf::FieldContext;
use nmecut::mub;
use nmecut::qcore::PureState;
use nmecut::qpd;
use nmecut::teleport;

fn py_err(e: nmecut::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Sorted, normalized Schmidt coefficients.
#[pyclass(name = "SchmidtVector", module = "nmecut_py", frozen, from_py_object)]
#[derive(Clone)]
struct PySchmidtVector {
    inner: entangle::SchmidtVector,
}

#[pymethods]
impl PySchmidtVector {
    /// Nonnegative coefficients; rescaled to unit norm and sorted.
    #[new]
    fn new(values: Vec<f64>) -> PyResult<Self> {
        let inner = entangle::SchmidtVector::from_unnormalized(values).map_err(py_err)?;
        Ok(PySchmidtVector { inner })
    }

    #[staticmethod]
    fn maximal(n: usize) -> PyResult<Self> {
        Ok(PySchmidtVector {
            inner: entangle::SchmidtVector::maximal(n).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn separable(n: usize) -> PyResult<Self> {
        Ok(PySchmidtVector {
            inner: entangle::SchmidtVector::separable(n).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn with_robustness(n: usize, r: f64) -> PyResult<Self> {
        Ok(PySchmidtVector {
            inner: entangle::SchmidtVector::with_robustness(n, r).map_err(py_err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn robustness(&self) -> f64 {
        entangle::robustness_pure(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.dim()
    }

    fn __repr__(&self) -> String {
        format!("SchmidtVector{}", self.inner)
    }
}

/// Quasiprobability decomposition of the n-wire identity.
#[pyclass(name = "Qpd", module = "nmecut_py", frozen)]
struct PyQpd {
    inner: qpd::Qpd,
}

#[pymethods]
impl PyQpd {
    #[staticmethod]
    fn baseline(n: usize) -> PyResult<Self> {
        Ok(PyQpd {
            inner: qpd::qpd_baseline(n).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn nme(n: usize, alpha: &PySchmidtVector) -> PyResult<Self> {
        Ok(PyQpd {
            inner: qpd::qpd_nme(n, &alpha.inner).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn streamlined(n: usize, n_e: usize, alpha_e: &PySchmidtVector) -> PyResult<Self> {
        Ok(PyQpd {
            inner: qpd::qpd_streamlined(n, n_e, &alpha_e.inner).map_err(py_err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa()
    }

    #[getter]
    fn coefficients(&self) -> Vec<f64> {
        self.inner.terms().iter().map(|t| t.coefficient).collect()
    }

    #[getter]
    fn probabilities(&self) -> Vec<f64> {
        self.inner.probabilities().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.terms().len()
    }

    /// Largest deviation of the reconstructed superoperator from the identity.
    fn verify(&self) -> PyResult<f64> {
        Ok(qpd::verify_identity(&self.inner)
            .map_err(py_err)?
            .max_abs_error)
    }

    /// Monte Carlo estimate of `tr[O φ]`. `state` is a state spec string
    /// (`plus`, `zero`, `random:<seed>`) or a list of complex amplitudes.
    #[pyo3(signature = (state, observable, shots = 100_000, seed = 0, mode = "trajectory", workers = 1))]
    fn estimate<'py>(
        &self,
        py: Python<'py>,
        state: &Bound<'py, PyAny>,
        observable: &str,
        shots: u64,
        seed: u64,
        mode: &str,
        workers: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let n = self.inner.n();
        let input = if let Ok(spec) = state.extract::<String>() {
            parse_state(&spec, n).map_err(py_err)?
        } else {
            let amps: Vec<Complex64> = state.extract()?;
            PureState::normalized(amps).map_err(py_err)?
        };
        let o = parse_observable(observable, n).map_err(py_err)?;
        let mode: Mode = mode.parse().map_err(py_err)?;
        let cfg = EstimatorConfig {
            shots,
            seed,
            mode,
            workers,
        };
        let res = py
            .detach(|| estimator::estimate(&self.inner, &input, &o, &cfg))
            .map_err(py_err)?;
        let d = PyDict::new(py);
        d.set_item("estimate", res.estimate)?;
        d.set_item("std_error", res.std_error)?;
        d.set_item("kappa", res.kappa)?;
        d.set_item("shots_used", res.shots_used)?;
        d.set_item("term_counts", res.term_counts)?;
        d.set_item("second_moment", res.second_moment)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "Qpd(n={}, terms={}, kappa={})",
            self.inner.n(),
            self.inner.terms().len(),
            self.inner.kappa()
        )
    }
}

#[pyfunction]
fn overhead_nme(n: usize, r: f64) -> PyResult<f64> {
    entangle::overhead_nme(n, r).map_err(py_err)
}

#[pyfunction]
fn overhead_baseline(n: usize) -> PyResult<f64> {
    entangle::overhead_baseline(n).map_err(py_err)
}

#[pyfunction]
fn composite_robustness_pure(alphas: Vec<PySchmidtVector>) -> PyResult<f64> {
    let v: Vec<entangle::SchmidtVector> = alphas.into_iter().map(|a| a.inner).collect();
    entangle::composite_robustness_pure(&v).map_err(py_err)
}

#[pyfunction]
fn advantage_separable_augment(n_e: usize, n_s: usize, r_e: f64) -> PyResult<f64> {
    entangle::advantage_separable_augment(n_e, n_s, r_e).map_err(py_err)
}

/// Schmidt coefficients of `psi` across the split after `n_a` qubits.
#[pyfunction]
fn schmidt_coefficients(psi: Vec<Complex64>, n_a: usize) -> PyResult<Vec<f64>> {
    let state = PureState::new(psi).map_err(py_err)?;
    let d = entangle::schmidt_decompose(&state, n_a).map_err(py_err)?;
    Ok(d.alpha.values().to_vec())
}

#[pyfunction]
fn nme_overlaps(alpha: &PySchmidtVector) -> PyResult<Vec<f64>> {
    teleport::nme_overlaps(&alpha.inner).map_err(py_err)
}

#[pyfunction]
fn prob_correction(alpha: &PySchmidtVector) -> PyResult<Vec<f64>> {
    Ok(qpd::prob_correction(&alpha.inner)
        .map_err(py_err)?
        .probs()
        .to_vec())
}

/// Rows of the basis-change unitary `U_j` on `n` qubits.
#[pyfunction]
fn mub_unitary(n: u32, j: u32) -> PyResult<Vec<Vec<Complex64>>> {
    let ctx = FieldContext::new(n).map_err(py_err)?;
    let j = ctx.element(j).map_err(py_err)?;
    let u = mub::mub_unitary(&ctx, j);
    let m = u.matrix();
    Ok((0..m.nrows())
        .map(|r| m.row(r).iter().copied().collect())
        .collect())
}

/// True when every structural check of the MUB family passes.
#[pyfunction]
#[pyo3(signature = (n, tol = 1e-10))]
fn mub_check(n: u32, tol: f64) -> PyResult<bool> {
    Ok(mub::audit(n, tol).map_err(py_err)?.passed())
}

#[pymodule]
fn nmecut_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PySchmidtVector>()?;
    m.add_class::<PyQpd>()?;
    m.add_function(wrap_pyfunction!(overhead_nme, m)?)?;
    m.add_function(wrap_pyfunction!(overhead_baseline, m)?)?;
    m.add_function(wrap_pyfunction!(composite_robustness_pure, m)?)?;
    m.add_function(wrap_pyfunction!(advantage_separable_augment, m)?)?;
    m.add_function(wrap_pyfunction!(schmidt_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(nme_overlaps, m)?)?;
    m.add_function(wrap_pyfunction!(prob_correction, m)?)?;
    m.add_function(wrap_pyfunction!(mub_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(mub_check, m)?)?;
    Ok(())
}
