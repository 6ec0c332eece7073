//! Python bindings. Matrices are passed as lists of rows; reports come back
//! as dicts or JSON text.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use rigidity::catalog::{self, Chart, PolynomialProfile};
use rigidity::cli::{run_verify, VerifyArgs};
use rigidity::curvature;
use rigidity::energy;
use rigidity::inequalities::{self, EqualityCase, InequalityVerdict};
use rigidity::spectral::{self, SymMatrix};
use rigidity::{Error, Tolerances};

fn to_py(err: Error) -> PyErr {
    match err {
        Error::NonConvergence(_) | Error::OdeStepFailure { .. } | Error::Io(_) => PyRuntimeError::new_err(err.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<SymMatrix> {
    SymMatrix::from_rows(&rows).map_err(to_py)
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn verdict_dict<'py>(py: Python<'py>, v: &InequalityVerdict, case: Option<&EqualityCase>) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("lhs", v.lhs)?;
    d.set_item("rhs", v.rhs)?;
    d.set_item("defect", v.defect)?;
    d.set_item("relative_defect", v.relative_defect)?;
    d.set_item("holds", v.holds)?;
    d.set_item("equality", v.equality)?;
    if let Some(c) = case {
        d.set_item("kind", c.kind.to_string())?;
        d.set_item("multiplicities", c.multiplicities.clone())?;
    }
    Ok(d)
}

fn profile_of(a: &SymMatrix) -> PyResult<spectral::SymFunProfile> {
    let spectrum = spectral::jacobi_eigen(a, &tol()).map_err(to_py)?.spectrum;
    Ok(spectral::symfun_from_spectrum(&spectrum))
}

/// Ascending eigenvalues by cyclic Jacobi.
#[pyfunction]
fn eigenvalues(a: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    Ok(spectral::jacobi_eigen(&matrix(a)?, &tol()).map_err(to_py)?.spectrum.eigenvalues)
}

#[pyfunction]
fn trace_free_project(a: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    Ok(spectral::trace_free_project(&matrix(a)?).rows())
}

/// Elementary symmetric functions `sigma`, normalized `p` and power sums.
/// `route` is "spectrum" or "power_sums".
#[pyfunction]
#[pyo3(signature = (a, route = "spectrum"))]
fn symfun<'py>(py: Python<'py>, a: Vec<Vec<f64>>, route: &str) -> PyResult<Bound<'py, PyDict>> {
    let a = matrix(a)?;
    let p = match route {
        "spectrum" => profile_of(&a)?,
        "power_sums" => spectral::symfun_from_power_sums(&a),
        other => return Err(PyValueError::new_err(format!("unknown route {other:?}"))),
    };
    let d = PyDict::new(py);
    d.set_item("sigma", p.sigma)?;
    d.set_item("p", p.p)?;
    d.set_item("power_sums", p.power_sums)?;
    Ok(d)
}

#[pyfunction]
fn main_inequality<'py>(py: Python<'py>, a: Vec<Vec<f64>>) -> PyResult<Bound<'py, PyDict>> {
    let m = inequalities::main_inequality(&matrix(a)?, &tol()).map_err(to_py)?;
    let d = verdict_dict(py, &m.verdict, Some(&m.case))?;
    d.set_item("bridge_residual", m.bridge_residual)?;
    Ok(d)
}

#[pyfunction]
fn newton_gap<'py>(py: Python<'py>, a: Vec<Vec<f64>>, k: usize) -> PyResult<Bound<'py, PyDict>> {
    let (v, c) = inequalities::newton_gap(&profile_of(&matrix(a)?)?, k, &tol()).map_err(to_py)?;
    verdict_dict(py, &v, Some(&c))
}

#[pyfunction]
fn prop_p3<'py>(py: Python<'py>, a: Vec<Vec<f64>>) -> PyResult<Bound<'py, PyDict>> {
    let (v, c) = inequalities::prop_p3(&profile_of(&matrix(a)?)?, &tol()).map_err(to_py)?;
    verdict_dict(py, &v, Some(&c))
}

#[pyfunction]
fn prop_p4<'py>(py: Python<'py>, a: Vec<Vec<f64>>) -> PyResult<Bound<'py, PyDict>> {
    let (v, c) = inequalities::prop_p4(&profile_of(&matrix(a)?)?, &tol()).map_err(to_py)?;
    verdict_dict(py, &v, Some(&c))
}

#[pyfunction]
fn cubic_bound<'py>(py: Python<'py>, a: Vec<Vec<f64>>) -> PyResult<Bound<'py, PyDict>> {
    let v = inequalities::cubic_bound(&spectral::norms(&matrix(a)?), &tol()).map_err(to_py)?;
    verdict_dict(py, &v, None)
}

/// `q(lambda)` for each shift, followed by the step-two product.
#[pyfunction]
fn lambda_scan(a: Vec<Vec<f64>>, lambdas: Vec<f64>) -> PyResult<Vec<f64>> {
    let scan = inequalities::lambda_scan(&profile_of(&matrix(a)?)?, &lambdas, &tol()).map_err(to_py)?;
    Ok(scan.as_list())
}

#[pyfunction]
fn sigma_norm_identities(a: Vec<Vec<f64>>) -> PyResult<(f64, f64)> {
    inequalities::sigma_norm_identities(&matrix(a)?, &tol()).map_err(to_py)
}

/// `(direct contraction, closed form)` of the Weyl norm.
#[pyfunction]
fn weyl_norm(a: Vec<Vec<f64>>) -> PyResult<(f64, f64)> {
    let a = matrix(a)?;
    let nm = spectral::norms(&a);
    let direct = curvature::weyl_from_gauss_codazzi(&a, &tol()).map_err(to_py)?.norm_sq();
    let closed = curvature::weyl_norm_closed_form(nm.frob_sq, nm.square_frob_sq, a.n()).map_err(to_py)?;
    Ok((direct, closed))
}

#[pyfunction]
fn kn_identity_suite(a: Vec<Vec<f64>>) -> PyResult<[f64; 4]> {
    curvature::kn_identity_suite(&matrix(a)?, &tol()).map_err(to_py)
}

/// Randomized campaign; returns the JSON report.
#[pyfunction]
#[pyo3(signature = (dims, samples, seed, lambdas = 16))]
fn verify(py: Python<'_>, dims: Vec<usize>, samples: usize, seed: u64, lambdas: usize) -> PyResult<String> {
    let args = VerifyArgs { dims, samples, seed, lambdas, out: None };
    rigidity::cli::validate_verify(&args).map_err(PyValueError::new_err)?;
    let report = py.detach(|| run_verify(&args, &tol())).map_err(to_py)?;
    serde_json::to_string_pretty(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Result of an energy evaluation.
#[pyclass(module = "rigidity", frozen)]
struct EnergyReport(energy::EnergyReport);

#[pymethods]
impl EnergyReport {
    #[getter]
    fn e_rot(&self) -> f64 {
        self.0.e_rot
    }
    #[getter]
    fn e_rot_conf(&self) -> f64 {
        self.0.e_rot_conf
    }
    #[getter]
    fn quadrature_scale(&self) -> f64 {
        self.0.quadrature_scale
    }
    #[getter]
    fn conf_scale(&self) -> f64 {
        self.0.conf_scale
    }
    #[getter]
    fn max_relative_defect(&self) -> f64 {
        self.0.max_relative_defect
    }
    #[getter]
    fn min_relative_defect(&self) -> f64 {
        self.0.min_relative_defect
    }
    #[getter]
    fn classification(&self) -> String {
        format!("{:?}", self.0.classification)
    }
    #[getter]
    fn minimal_claimed(&self) -> bool {
        self.0.minimal_claimed
    }
    fn e_rot_is_zero(&self) -> bool {
        self.0.e_rot_is_zero()
    }
    fn e_rot_conf_is_zero(&self) -> bool {
        self.0.e_rot_conf_is_zero()
    }
    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.0).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }
    fn __repr__(&self) -> String {
        format!(
            "EnergyReport(classification={:?}, e_rot={:e}, e_rot_conf={:e})",
            self.0.classification, self.0.e_rot, self.0.e_rot_conf
        )
    }
}

/// Sampled shape-operator field of a hypersurface.
#[pyclass(module = "rigidity", frozen)]
struct ShapeField(catalog::ShapeField);

#[pymethods]
impl ShapeField {
    #[staticmethod]
    fn sphere(n: usize, r: f64, grid: Vec<usize>) -> PyResult<Self> {
        catalog::build_sphere(n, r, &grid, &tol()).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn cylinder(n: usize, r: f64, height: f64, grid: Vec<usize>) -> PyResult<Self> {
        catalog::build_cylinder(n, r, height, &grid, &tol()).map(Self).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (n, grid, profile_tol = 1e-8))]
    fn catenoid(py: Python<'_>, n: usize, grid: Vec<usize>, profile_tol: f64) -> PyResult<Self> {
        py.detach(|| catalog::build_catenoid(n, &grid, profile_tol, &tol())).map(Self).map_err(to_py)
    }

    /// Rotation hypersurface with polynomial profile `sum coeffs[k] t^k`.
    #[staticmethod]
    fn rotation(n: usize, coeffs: Vec<f64>, t_min: f64, t_max: f64, grid: Vec<usize>) -> PyResult<Self> {
        let profile = PolynomialProfile::new(coeffs);
        catalog::build_rotation_hypersurface(n, &profile, t_min, t_max, &grid, &tol()).map(Self).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (semi_axes, grid, margin = 0.3, fd_step = None))]
    fn ellipsoid(py: Python<'_>, semi_axes: Vec<f64>, grid: Vec<usize>, margin: f64, fd_step: Option<f64>) -> PyResult<Self> {
        let chart = Chart::ellipsoid(&semi_axes, margin).map_err(to_py)?;
        py.detach(|| catalog::chart_shape_operator(&chart, &grid, fd_step, &tol())).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        catalog::field_from_json(text, &tol()).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        catalog::ingest_field(path, &tol()).map(Self).map_err(to_py)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        catalog::write_field(&self.0, path).map_err(to_py)
    }

    fn to_json(&self) -> PyResult<String> {
        catalog::field_to_json(&self.0).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn minimal_claimed(&self) -> bool {
        self.0.minimal_claimed
    }

    fn __len__(&self) -> usize {
        self.0.samples.len()
    }

    fn total_weight(&self) -> f64 {
        self.0.total_weight()
    }

    fn shape_operators(&self) -> Vec<Vec<Vec<f64>>> {
        self.0.samples.iter().map(|s| s.shape_operator.rows()).collect()
    }

    /// The same immersion under the ambient metric scaled by `t²`.
    fn rescaled(&self, t: f64) -> PyResult<Self> {
        energy::conformal_rescale(&self.0, t).map(Self).map_err(to_py)
    }

    fn energy(&self, py: Python<'_>) -> PyResult<EnergyReport> {
        py.detach(|| energy::rotational_energy(&self.0, &tol())).map(EnergyReport).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("ShapeField(kind={:?}, n={}, samples={})", self.0.spec.kind, self.0.n(), self.0.samples.len())
    }
}

#[pymodule]
#[pyo3(name = "rigidity")]
fn rigidity_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("quartic_constant_4", inequalities::quartic_constant(4))?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(trace_free_project, m)?)?;
    m.add_function(wrap_pyfunction!(symfun, m)?)?;
    m.add_function(wrap_pyfunction!(main_inequality, m)?)?;
    m.add_function(wrap_pyfunction!(newton_gap, m)?)?;
    m.add_function(wrap_pyfunction!(prop_p3, m)?)?;
    m.add_function(wrap_pyfunction!(prop_p4, m)?)?;
    m.add_function(wrap_pyfunction!(cubic_bound, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_scan, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_norm_identities, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_norm, m)?)?;
    m.add_function(wrap_pyfunction!(kn_identity_suite, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_class::<ShapeField>()?;
    m.add_class::<EnergyReport>()?;
    Ok(())
}
