use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use paircoh::fock::{build_state, build_state_auto, numeric_photons, numeric_variance};
use paircoh::pair_coherent::{self, LeadingTransform, PairParams};
use paircoh::symplectic::{self, MEMBERSHIP_TOL};
use paircoh::{Error, Mat4};

create_exception!(paircoh_py, DomainError, PyValueError);
create_exception!(paircoh_py, OverflowError, PyArithmeticError);
create_exception!(paircoh_py, NumericalError, PyArithmeticError);

fn to_py(err: Error) -> PyErr {
    let msg = err.to_string();
    match err {
        Error::Domain(_) | Error::ZeroAmplitude | Error::NotSymmetric { .. } | Error::NotUnitary { .. } => {
            DomainError::new_err(msg)
        }
        Error::Overflow(_) => OverflowError::new_err(msg),
        _ => NumericalError::new_err(msg),
    }
}

type Rows = [[f64; 4]; 4];

fn mat(rows: Rows) -> Mat4 {
    Mat4::from_rows(rows)
}

fn leading_dict<'py>(py: Python<'py>, lt: &LeadingTransform) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("psi", lt.psi)?;
    d.set_item("value", lt.value)?;
    d.set_item("transform", lt.transform.mat.0)?;
    let u: Vec<Vec<(f64, f64)>> = lt
        .u
        .entries()
        .iter()
        .map(|r| r.iter().map(|c| (c.re, c.im)).collect())
        .collect();
    d.set_item("u", u)?;
    Ok(d)
}

/// A two-mode pair coherent state `|ζ, q⟩`.
#[pyclass(frozen, name = "PairCoherentState")]
struct PyPairState {
    params: PairParams,
}

#[pymethods]
impl PyPairState {
    #[new]
    #[pyo3(signature = (re, im, q))]
    fn new(re: f64, im: f64, q: i64) -> PyResult<Self> {
        Ok(Self { params: PairParams::new(re, im, q).map_err(to_py)? })
    }

    #[getter]
    fn zeta(&self) -> (f64, f64) {
        (self.params.zeta.re, self.params.zeta.im)
    }

    #[getter]
    fn q(&self) -> u32 {
        self.params.q
    }

    fn photon_numbers(&self) -> PyResult<(f64, f64)> {
        let n = pair_coherent::photon_numbers(&self.params).map_err(to_py)?;
        Ok((n.n1, n.n2))
    }

    fn variance_matrix(&self) -> PyResult<Rows> {
        Ok(pair_coherent::variance_matrix(&self.params).map_err(to_py)?.mat().0)
    }

    /// `(e_down, e_up)`, each doubly degenerate.
    fn spectrum(&self) -> PyResult<(f64, f64)> {
        pair_coherent::analytic_spectrum(&self.params).map_err(to_py)
    }

    fn is_squeezed(&self) -> PyResult<bool> {
        pair_coherent::is_squeezed(&self.params).map_err(to_py)
    }

    /// `(r, d)` with `d = r V rᵀ` diagonal.
    fn diagonalize(&self) -> PyResult<(Rows, Rows)> {
        let d = pair_coherent::diagonalize(&self.params).map_err(to_py)?;
        Ok((d.transform.mat.0, d.diagonal.0))
    }

    fn leading_position_transform<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        leading_dict(py, &pair_coherent::leading_position_transform(&self.params).map_err(to_py)?)
    }

    fn leading_u2_transform<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        leading_dict(py, &pair_coherent::leading_u2_transform(&self.params).map_err(to_py)?)
    }

    fn analyze<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = pair_coherent::analyze(&self.params).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("n1", r.n1)?;
        d.set_item("n2", r.n2)?;
        d.set_item("e_down", r.e_down)?;
        d.set_item("e_up", r.e_up)?;
        d.set_item("theta", r.theta)?;
        d.set_item("phi", r.phi)?;
        d.set_item("psi_star", r.psi_star)?;
        d.set_item("squeezed", r.squeezed)?;
        Ok(d)
    }

    /// Variance matrix and photon numbers from a truncated Fock expansion.
    #[pyo3(signature = (ncut=None))]
    fn numeric_moments(&self, ncut: Option<usize>) -> PyResult<(Rows, (f64, f64))> {
        let state = match ncut {
            Some(n) => build_state(&self.params, n),
            None => build_state_auto(&self.params),
        }
        .map_err(to_py)?;
        let v = numeric_variance(&state).map_err(to_py)?;
        let n = numeric_photons(&state);
        Ok((v.mat().0, (n.n1, n.n2)))
    }

    fn __repr__(&self) -> String {
        format!(
            "PairCoherentState(re={}, im={}, q={})",
            self.params.zeta.re, self.params.zeta.im, self.params.q
        )
    }
}

/// Ascending eigenvalues and column eigenvectors of a symmetric 4×4 matrix.
#[pyfunction]
#[pyo3(signature = (a, tol=paircoh::linalg::DEFAULT_EIGEN_TOL))]
fn sym_eigen(a: Rows, tol: f64) -> PyResult<([f64; 4], Rows)> {
    let s = paircoh::sym_eigen(&mat(a), tol).map_err(to_py)?;
    Ok((s.eigenvalues, s.eigenvectors.0))
}

#[pyfunction]
fn beta_form() -> Rows {
    symplectic::beta_form().0
}

#[pyfunction]
#[pyo3(signature = (s, tol=MEMBERSHIP_TOL))]
fn is_symplectic(s: Rows, tol: f64) -> bool {
    symplectic::is_symplectic(&mat(s), tol)
}

#[pyfunction]
#[pyo3(signature = (s, tol=MEMBERSHIP_TOL))]
fn is_orthogonal(s: Rows, tol: f64) -> bool {
    symplectic::is_orthogonal(&mat(s), tol)
}

#[pyfunction]
fn rotation_r1(theta: f64) -> Rows {
    symplectic::rotation_r1(theta).mat.0
}

#[pyfunction]
fn rotation_r2(phi: f64) -> Rows {
    symplectic::rotation_r2(phi).mat.0
}

#[pyfunction]
fn heterodyne_transform(psi: f64) -> Rows {
    symplectic::heterodyne_u(psi).1.mat.0
}

/// Smallest eigenvalue of `V + (i/2)β`; non-negative for physical states.
#[pyfunction]
fn uncertainty_margin(v: Rows) -> PyResult<f64> {
    symplectic::uncertainty_margin(&mat(v)).map_err(to_py)
}

#[pymodule]
fn paircoh_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyPairState>()?;
    m.add("DomainError", py.get_type::<DomainError>())?;
    m.add("OverflowError", py.get_type::<OverflowError>())?;
    m.add("NumericalError", py.get_type::<NumericalError>())?;
    m.add_function(wrap_pyfunction!(sym_eigen, m)?)?;
    m.add_function(wrap_pyfunction!(beta_form, m)?)?;
    m.add_function(wrap_pyfunction!(is_symplectic, m)?)?;
    m.add_function(wrap_pyfunction!(is_orthogonal, m)?)?;
    m.add_function(wrap_pyfunction!(rotation_r1, m)?)?;
    m.add_function(wrap_pyfunction!(rotation_r2, m)?)?;
    m.add_function(wrap_pyfunction!(heterodyne_transform, m)?)?;
    m.add_function(wrap_pyfunction!(uncertainty_margin, m)?)?;
    Ok(())
}
