//! Python bindings: `import loewner` (native module `loewner._loewner`).

use loewner::deterministic as det;
use loewner::stochastic as sto;
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(
    _loewner,
    NumericalError,
    PyArithmeticError,
    "A numerical kernel failed to converge or left the disk."
);

fn to_py(e: loewner::LoewnerError) -> PyErr {
    use loewner::LoewnerError as E;
    match e {
        E::InvalidArgument(_) | E::Parse(_) | E::Domain(_) => PyValueError::new_err(e.to_string()),
        _ => NumericalError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> OrPy<T> for loewner::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

/// Herglotz function p̃, written as in the CLI: `cayley-linear`, `cayley`,
/// `const-i`, `automorphism:A,B`, `exponential`, `taylor:a0,a1,...`.
#[pyclass(name = "HerglotzSpec", module = "loewner", frozen)]
struct PyHerglotzSpec(loewner::HerglotzSpec);

#[pymethods]
impl PyHerglotzSpec {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn automorphism(a: f64, b: f64) -> PyResult<Self> {
        loewner::HerglotzSpec::automorphism(a, b).map(Self).py_err()
    }

    #[staticmethod]
    fn taylor(coefficients: Vec<Complex64>) -> PyResult<Self> {
        loewner::HerglotzSpec::taylor(coefficients).map(Self).py_err()
    }

    fn eval(&self, z: Complex64) -> PyResult<Complex64> {
        self.0.eval(z).py_err()
    }

    fn loewner_field(&self, w: Complex64) -> Complex64 {
        self.0.loewner_field(w)
    }

    fn taylor_coefficients(&self, n: usize) -> Vec<Complex64> {
        self.0.taylor_coefficients(n)
    }

    fn automorphism_parameters(&self) -> Option<(f64, f64)> {
        self.0.automorphism_parameters()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("HerglotzSpec('{}')", self.0)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

#[pyclass(name = "Trajectory", module = "loewner", frozen)]
struct PyTrajectory(loewner::Trajectory);

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.0.times.clone()
    }

    #[getter]
    fn values(&self) -> Vec<Complex64> {
        self.0.values.clone()
    }

    /// `"phi"` or `"psi"`.
    #[getter]
    fn frame(&self) -> &'static str {
        self.0.frame.as_str()
    }

    #[getter]
    fn path_seed(&self) -> Option<u64> {
        self.0.path_seed
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Trajectory(frame='{}', samples={})", self.0.frame.as_str(), self.0.len())
    }
}

/// Brownian path on a uniform grid, reproducible from its seed.
#[pyclass(name = "BrownianPath", module = "loewner", frozen)]
struct PyBrownianPath(sto::BrownianPath);

#[pymethods]
impl PyBrownianPath {
    #[new]
    fn new(seed: u64, dt: f64, n_steps: usize) -> PyResult<Self> {
        sto::sample_brownian(seed, dt, n_steps).map(Self).py_err()
    }

    /// Path ending exactly at `t_end` with step at most `dt`.
    #[staticmethod]
    fn until(seed: u64, dt: f64, t_end: f64) -> PyResult<Self> {
        sto::sample_brownian_until(seed, dt, t_end).map(Self).py_err()
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.0.dt
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values.clone()
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.0.times()
    }

    #[getter]
    fn algorithm_id(&self) -> String {
        self.0.algorithm_id.clone()
    }

    fn b_at(&self, t: f64) -> f64 {
        self.0.b_at(t)
    }

    fn coarsen(&self, factor: usize) -> PyResult<Self> {
        self.0.coarsen(factor).map(Self).py_err()
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    fn __len__(&self) -> usize {
        self.0.values.len()
    }
}

#[pyclass(name = "McEstimate", module = "loewner", frozen, get_all)]
struct PyMcEstimate {
    mean: Complex64,
    std_error: f64,
    n_samples: usize,
}

impl From<sto::McEstimate> for PyMcEstimate {
    fn from(e: sto::McEstimate) -> Self {
        Self { mean: e.mean, std_error: e.std_error, n_samples: e.n_samples }
    }
}

#[pymethods]
impl PyMcEstimate {
    fn agrees_with(&self, value: Complex64, n_se: f64) -> bool {
        (self.mean - value).norm() <= n_se * self.std_error
    }

    fn __repr__(&self) -> String {
        format!("McEstimate(mean={}, std_error={}, n_samples={})", self.mean, self.std_error, self.n_samples)
    }
}

fn mc_config(n_samples: usize, seed: u64, dt: f64) -> PyResult<sto::McConfig> {
    let cfg = sto::McConfig { dt, ..sto::McConfig::new(n_samples, seed) };
    cfg.validate().py_err()?;
    Ok(cfg)
}

fn evolution_config(k: f64, t_end: f64, dt: f64, rtol: f64, atol: f64) -> det::EvolutionConfig {
    let step = if t_end > 0.0 { dt.min(t_end) } else { dt };
    det::EvolutionConfig { rtol, atol, ..det::EvolutionConfig::new(k, t_end, step) }
}

/// `φ_t(z0)` for `τ(t) = e^{ikt}`; samples at `sample_times` or every `dt`.
#[pyfunction]
#[pyo3(signature = (spec, k, z0, t_end, dt=0.01, sample_times=None, rtol=1e-10, atol=1e-12))]
#[allow(clippy::too_many_arguments)]
fn evolve_phi(
    py: Python<'_>,
    spec: &PyHerglotzSpec,
    k: f64,
    z0: Complex64,
    t_end: f64,
    dt: f64,
    sample_times: Option<Vec<f64>>,
    rtol: f64,
    atol: f64,
) -> PyResult<PyTrajectory> {
    let cfg = evolution_config(k, t_end, dt, rtol, atol);
    let times = sample_times.unwrap_or_else(|| loewner::trajectory::uniform_times(t_end, dt));
    py.detach(|| det::evolve_phi(&spec.0, &cfg, z0, &times)).map(PyTrajectory).py_err()
}

/// Rotating-frame `ψ_t(z0) = φ_t(z0)/τ(t)`.
#[pyfunction]
#[pyo3(signature = (spec, k, z0, t_end, dt=0.01, sample_times=None, rtol=1e-10, atol=1e-12))]
#[allow(clippy::too_many_arguments)]
fn evolve_psi(
    py: Python<'_>,
    spec: &PyHerglotzSpec,
    k: f64,
    z0: Complex64,
    t_end: f64,
    dt: f64,
    sample_times: Option<Vec<f64>>,
    rtol: f64,
    atol: f64,
) -> PyResult<PyTrajectory> {
    let cfg = evolution_config(k, t_end, dt, rtol, atol);
    let times = sample_times.unwrap_or_else(|| loewner::trajectory::uniform_times(t_end, dt));
    py.detach(|| det::evolve_psi(&spec.0, &cfg, z0, &times)).map(PyTrajectory).py_err()
}

/// Images of `n_points` points of the circle of radius `1 − 1e−6` under `φ_t`.
#[pyfunction]
#[pyo3(signature = (spec, k, t, n_points=512))]
fn boundary_image(py: Python<'_>, spec: &PyHerglotzSpec, k: f64, t: f64, n_points: usize) -> PyResult<Vec<Complex64>> {
    py.detach(|| det::boundary_image(&spec.0, k, t, n_points)).map(|b| b.points).py_err()
}

/// `{"kind", "D", "fixed_point"}` for `p̃ = A(1+z)/(1−z) + Bi`.
#[pyfunction]
fn classify_semigroup<'py>(py: Python<'py>, a: f64, b: f64, k: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = det::classify_semigroup(a, b, k).py_err()?;
    let d = PyDict::new(py);
    d.set_item("kind", r.kind.as_str())?;
    d.set_item("D", r.discriminant)?;
    d.set_item("fixed_point", r.fixed_point)?;
    Ok(d)
}

/// `{"closed", "ratio", "fraction", "period"}`; `fraction` is `(p, q)` or None.
#[pyfunction]
#[pyo3(signature = (a, b, k, max_denominator=64))]
fn is_closed_trajectory<'py>(
    py: Python<'py>,
    a: f64,
    b: f64,
    k: f64,
    max_denominator: i64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = det::is_closed_trajectory(a, b, k, max_denominator).py_err()?;
    let d = PyDict::new(py);
    d.set_item("closed", r.closed)?;
    d.set_item("ratio", r.ratio)?;
    d.set_item("fraction", r.fraction.map(|f| (f.numerator, f.denominator)))?;
    d.set_item("period", r.period)?;
    Ok(d)
}

#[pyfunction]
fn find_fixed_point(spec: &PyHerglotzSpec, k: f64) -> Option<Complex64> {
    det::find_fixed_point(&spec.0, k)
}

#[pyfunction]
fn koebe_map(k: f64, z: Complex64) -> PyResult<Complex64> {
    det::koebe_map(k, z).py_err()
}

#[pyfunction]
fn koebe_inverse(k: f64, w: Complex64) -> PyResult<Complex64> {
    det::koebe_inverse(k, w).py_err()
}

#[pyfunction]
fn boundary_fixed_points(k: f64) -> Vec<f64> {
    det::boundary_fixed_points(k)
}

#[pyfunction]
fn example1_phi(z: Complex64, t: f64, k: f64) -> Complex64 {
    det::example1_phi(z, t, k)
}

#[pyfunction]
fn example1_psi(z: Complex64, t: f64, k: f64) -> Complex64 {
    det::example1_psi(z, t, k)
}

#[pyfunction]
fn example1_denjoy_wolff(t: f64, k: f64) -> PyResult<Complex64> {
    det::example1_denjoy_wolff(t, k).py_err()
}

/// `φ_t(z0)` for `τ(t) = e^{ikB_t}` at every grid point of `path`.
#[pyfunction]
fn evolve_phi_pathwise(
    py: Python<'_>,
    spec: &PyHerglotzSpec,
    k: f64,
    z0: Complex64,
    path: &PyBrownianPath,
) -> PyResult<PyTrajectory> {
    py.detach(|| sto::evolve_phi_pathwise(&spec.0, k, z0, &path.0, &[])).map(PyTrajectory).py_err()
}

/// `Ψ_t(z0)` by Euler–Maruyama (`"euler"`) or Milstein (`"milstein"`).
#[pyfunction]
#[pyo3(signature = (spec, k, z0, path, scheme="milstein"))]
fn evolve_psi_sde(
    py: Python<'_>,
    spec: &PyHerglotzSpec,
    k: f64,
    z0: Complex64,
    path: &PyBrownianPath,
    scheme: &str,
) -> PyResult<PyTrajectory> {
    let scheme = match scheme {
        "euler" => sto::SdeScheme::Euler,
        "milstein" => sto::SdeScheme::Milstein,
        other => return Err(PyValueError::new_err(format!("unknown scheme '{other}' (euler|milstein)"))),
    };
    py.detach(|| sto::evolve_psi_sde(&spec.0, k, z0, &path.0, scheme)).map(PyTrajectory).py_err()
}

#[pyfunction]
fn example1_pathwise(z: Complex64, k: f64, path: &PyBrownianPath, t: f64) -> PyResult<Complex64> {
    sto::example1_pathwise(z, k, &path.0, t).py_err()
}

#[pyfunction]
fn mean_phi_example1(z: Complex64, t: f64, k: f64) -> Complex64 {
    sto::mean_phi_example1(z, t, k)
}

/// Monte Carlo estimate of `E Ψ_t(z)^power`.
#[pyfunction]
#[pyo3(signature = (spec, k, t, z, n_samples, seed, dt=1e-3, power=1))]
#[allow(clippy::too_many_arguments)]
fn expectation_tt(
    py: Python<'_>,
    spec: &PyHerglotzSpec,
    k: f64,
    t: f64,
    z: Complex64,
    n_samples: usize,
    seed: u64,
    dt: f64,
    power: i32,
) -> PyResult<PyMcEstimate> {
    let cfg = mc_config(n_samples, seed, dt)?;
    py.detach(|| sto::expectation_tt(&spec.0, k, t, z, |w| w.powi(power), &cfg)).map(Into::into).py_err()
}

/// `(times, moments)` with `moments[i][m − 1] = μ_m(times[i])`.
#[pyfunction]
#[pyo3(signature = (spec, k, z, t_end, orders, truncation=32, closure="zero", dt=0.01))]
#[allow(clippy::too_many_arguments)]
fn solve_moment_hierarchy(
    py: Python<'_>,
    spec: &PyHerglotzSpec,
    k: f64,
    z: Complex64,
    t_end: f64,
    orders: usize,
    truncation: usize,
    closure: &str,
    dt: f64,
) -> PyResult<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let closure: sto::Closure = closure.parse().py_err()?;
    let req = sto::MomentRequest { k, z, t_end, orders, truncation, closure };
    let times = loewner::trajectory::uniform_times(t_end, dt);
    let table = py.detach(|| sto::solve_moment_hierarchy(&spec.0, &req, &times)).py_err()?;
    Ok((table.times, table.values))
}

#[pyfunction]
fn mu1_closed_form(z: Complex64, t: f64, k: f64) -> Complex64 {
    sto::mu1_closed_form(z, t, k)
}

/// `{"e1", "e2", "e3", "cov"}` in closed form.
#[pyfunction]
fn covariance_reference<'py>(py: Python<'py>, t: f64, k: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = sto::covariance_reference(t, k);
    let d = PyDict::new(py);
    d.set_item("e1", r.e1)?;
    d.set_item("e2", r.e2)?;
    d.set_item("e3", r.e3)?;
    d.set_item("cov", r.cov)?;
    Ok(d)
}

/// `{"e1", "e2", "e3", "cov"}` as Monte Carlo estimates.
#[pyfunction]
#[pyo3(signature = (t, k, n_samples, seed, dt=1e-3))]
fn covariance_monte_carlo<'py>(
    py: Python<'py>,
    t: f64,
    k: f64,
    n_samples: usize,
    seed: u64,
    dt: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = mc_config(n_samples, seed, dt)?;
    let est = py.detach(|| sto::covariance_monte_carlo(t, k, &cfg)).py_err()?;
    let d = PyDict::new(py);
    d.set_item("e1", PyMcEstimate::from(est.e1))?;
    d.set_item("e2", PyMcEstimate::from(est.e2))?;
    d.set_item("e3", PyMcEstimate::from(est.e3))?;
    d.set_item("cov", PyMcEstimate::from(est.cov))?;
    Ok(d)
}

/// `(c, l0_squared)` with `c = [c₋₁, c₀, …, c_N]`.
#[pyfunction]
fn virasoro_coefficients(spec: &PyHerglotzSpec, k: f64, n: usize) -> (Vec<Complex64>, f64) {
    let form = sto::virasoro_coefficients(&spec.0, k, n);
    (form.coefficients, form.l0_squared)
}

#[pyfunction]
fn find_stochastic_zero(spec: &PyHerglotzSpec, k: f64) -> PyResult<Complex64> {
    sto::find_stochastic_zero(&spec.0, k).py_err()
}

/// `(lower, upper)` bounds on `|φ_t(z)|`, `|z| = r0`, for `cayley`, `cayley-linear` or `one`.
#[pyfunction]
fn growth_bounds(spec: &str, r0: f64, t: f64) -> PyResult<(f64, f64)> {
    let spec: sto::GrowthSpec = spec.parse().py_err()?;
    sto::growth_bounds(spec, r0, t).py_err()
}

#[pyfunction]
fn simulate_boundary_diffusion(a: f64, b: f64, k: f64, theta0: f64, path: &PyBrownianPath) -> PyResult<Vec<f64>> {
    sto::simulate_boundary_diffusion(a, b, k, theta0, &path.0).py_err()
}

#[pyfunction]
fn generator_annihilator(a: f64, b: f64, k: f64, theta: f64, c1: Complex64, c2: Complex64) -> PyResult<Complex64> {
    sto::generator_annihilator(a, b, k, theta, c1, c2).py_err()
}

#[pymodule]
fn _loewner(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add("ALGORITHM_ID", sto::ALGORITHM_ID)?;
    m.add_class::<PyHerglotzSpec>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyBrownianPath>()?;
    m.add_class::<PyMcEstimate>()?;
    m.add_function(wrap_pyfunction!(evolve_phi, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_psi, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_image, m)?)?;
    m.add_function(wrap_pyfunction!(classify_semigroup, m)?)?;
    m.add_function(wrap_pyfunction!(is_closed_trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(find_fixed_point, m)?)?;
    m.add_function(wrap_pyfunction!(koebe_map, m)?)?;
    m.add_function(wrap_pyfunction!(koebe_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_fixed_points, m)?)?;
    m.add_function(wrap_pyfunction!(example1_phi, m)?)?;
    m.add_function(wrap_pyfunction!(example1_psi, m)?)?;
    m.add_function(wrap_pyfunction!(example1_denjoy_wolff, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_phi_pathwise, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_psi_sde, m)?)?;
    m.add_function(wrap_pyfunction!(example1_pathwise, m)?)?;
    m.add_function(wrap_pyfunction!(mean_phi_example1, m)?)?;
    m.add_function(wrap_pyfunction!(expectation_tt, m)?)?;
    m.add_function(wrap_pyfunction!(solve_moment_hierarchy, m)?)?;
    m.add_function(wrap_pyfunction!(mu1_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(covariance_reference, m)?)?;
    m.add_function(wrap_pyfunction!(covariance_monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(virasoro_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(find_stochastic_zero, m)?)?;
    m.add_function(wrap_pyfunction!(growth_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_boundary_diffusion, m)?)?;
    m.add_function(wrap_pyfunction!(generator_annihilator, m)?)?;
    Ok(())
}
