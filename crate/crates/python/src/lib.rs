use interband::decay::{
    decay_amplitude_contour, decay_amplitude_direct, exp_window, spectral_density, tail_constants,
};
use interband::model::{validate_assumptions, Interval, ModelConfig, TwoBandModel};
use interband::resolvent::{g_continued, g_plain, i_pv, ComplexEnergy, Sheet};
use interband::resonance::{solve_pole, trace_resonance_curve, PolePoint, DEFAULT_RESIDUAL_TOL};
use interband::Error;
use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

const TOL: f64 = 1e-10;

fn to_py(err: Error) -> PyErr {
    match err {
        Error::InvalidModel(_)
        | Error::Domain(_)
        | Error::Sector(_)
        | Error::Config(_)
        | Error::DegenerateDensity => PyValueError::new_err(err.to_string()),
        Error::Io(_) => PyIOError::new_err(err.to_string()),
        _ => PyRuntimeError::new_err(err.to_string()),
    }
}

fn parse_sheet(name: &str) -> PyResult<Sheet> {
    match name {
        "physical" => Ok(Sheet::Physical),
        "below" => Ok(Sheet::ContinuedBelow),
        "above" => Ok(Sheet::ContinuedAbove),
        other => Err(PyValueError::new_err(format!(
            "sheet must be 'physical', 'below' or 'above', got '{other}'"
        ))),
    }
}

/// A solved resonance pole.
#[pyclass(name = "Pole", frozen, skip_from_py_object, module = "pyinterband")]
#[derive(Clone)]
struct PyPole {
    inner: PolePoint,
}

#[pymethods]
impl PyPole {
    #[getter]
    fn x(&self) -> f64 {
        self.inner.x
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa
    }

    #[getter]
    fn zeta(&self) -> Complex64 {
        self.inner.zeta
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual
    }

    #[getter]
    fn amplitude(&self) -> Complex64 {
        self.inner.amplitude_a
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.newton_iters
    }

    #[getter]
    fn width(&self) -> f64 {
        self.inner.width()
    }

    fn __repr__(&self) -> String {
        format!(
            "Pole(x={}, kappa={}, zeta={})",
            self.inner.x, self.inner.kappa, self.inner.zeta
        )
    }
}

/// Cosine-crystal two-band model with formfactor `g0² (z-ν) e^{-(z-ν)(1+εy)}`.
#[pyclass(name = "Model", frozen, module = "pyinterband")]
struct PyModel {
    config: ModelConfig,
    model: TwoBandModel,
}

impl PyModel {
    fn from_config(config: ModelConfig) -> PyResult<Self> {
        let model = config.build().map_err(to_py)?;
        Ok(Self { config, model })
    }

    fn pole(&self, x: f64, kappa: f64) -> PyResult<PolePoint> {
        solve_pole(&self.model, x, kappa, None, DEFAULT_RESIDUAL_TOL).map_err(to_py)
    }
}

#[pymethods]
impl PyModel {
    #[new]
    #[pyo3(signature = (i0 = (0.0, 1.0), i1 = (2.0, 3.0), nu = 0.0, g0 = 1.0, eps = 0.0, theta0 = None))]
    fn new(
        i0: (f64, f64),
        i1: (f64, f64),
        nu: f64,
        g0: f64,
        eps: f64,
        theta0: Option<f64>,
    ) -> PyResult<Self> {
        let defaults = ModelConfig::default();
        Self::from_config(ModelConfig {
            i0: Interval { lo: i0.0, hi: i0.1 },
            i1: Interval { lo: i1.0, hi: i1.1 },
            nu,
            g0,
            eps,
            theta0: theta0.unwrap_or(defaults.theta0),
        })
    }

    /// Loads a `key = value` model file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Self::from_config(ModelConfig::from_path(path).map_err(to_py)?)
    }

    fn __repr__(&self) -> String {
        let c = &self.config;
        format!(
            "Model(i0=({}, {}), i1=({}, {}), nu={}, g0={}, eps={}, theta0={})",
            c.i0.lo, c.i0.hi, c.i1.lo, c.i1.hi, c.nu, c.g0, c.eps, c.theta0
        )
    }

    fn v(&self, y: f64, z: f64) -> f64 {
        self.model.v_real(y, z)
    }

    fn u(&self, y: f64) -> f64 {
        self.model.u(y)
    }

    fn u_inv(&self, x: f64) -> f64 {
        self.model.u_inv(x)
    }

    fn threshold_energy(&self, x: f64) -> f64 {
        self.model.threshold_energy(x)
    }

    /// Hypothesis report as a JSON string.
    #[pyo3(signature = (grid_density = 32))]
    fn validate_json(&self, grid_density: usize) -> PyResult<String> {
        let report = validate_assumptions(&self.model, grid_density);
        serde_json_string(&report)
    }

    #[pyo3(signature = (y, zeta, tol = TOL))]
    fn g_plain(&self, py: Python<'_>, y: f64, zeta: Complex64, tol: f64) -> PyResult<Complex64> {
        py.detach(|| g_plain(&self.model, y, zeta, tol))
            .map_err(to_py)
    }

    #[pyo3(signature = (y, zeta, sheet = "below", tol = TOL))]
    fn g_continued(
        &self,
        py: Python<'_>,
        y: f64,
        zeta: Complex64,
        sheet: &str,
        tol: f64,
    ) -> PyResult<Complex64> {
        let energy = ComplexEnergy::new(zeta, parse_sheet(sheet)?);
        py.detach(|| g_continued(&self.model, y, energy, tol))
            .map(|g| g.g_value)
            .map_err(to_py)
    }

    #[pyo3(signature = (y, xi, tol = TOL))]
    fn i_pv(&self, py: Python<'_>, y: f64, xi: f64, tol: f64) -> PyResult<f64> {
        py.detach(|| i_pv(&self.model, y, xi, tol)).map_err(to_py)
    }

    fn solve_pole(&self, py: Python<'_>, x: f64, kappa: f64) -> PyResult<PyPole> {
        py.detach(|| self.pole(x, kappa))
            .map(|inner| PyPole { inner })
    }

    #[pyo3(signature = (kappa, n_points = 101))]
    fn resonance_curve(
        &self,
        py: Python<'_>,
        kappa: f64,
        n_points: usize,
    ) -> PyResult<Vec<PyPole>> {
        let curve = py
            .detach(|| trace_resonance_curve(&self.model, kappa, n_points, DEFAULT_RESIDUAL_TOL))
            .map_err(to_py)?;
        Ok(curve
            .points
            .into_iter()
            .map(|inner| PyPole { inner })
            .collect())
    }

    /// `(xi, W)` samples of the spectral density.
    #[pyo3(signature = (x, kappa, n_points = 4001, tol = TOL))]
    fn spectral_density(
        &self,
        py: Python<'_>,
        x: f64,
        kappa: f64,
        n_points: usize,
        tol: f64,
    ) -> PyResult<Vec<(f64, f64)>> {
        py.detach(|| spectral_density(&self.model, x, kappa, n_points, tol))
            .map(|d| d.samples)
            .map_err(to_py)
    }

    #[pyo3(signature = (x, kappa, t, tol = TOL))]
    fn decay_direct(
        &self,
        py: Python<'_>,
        x: f64,
        kappa: f64,
        t: f64,
        tol: f64,
    ) -> PyResult<Complex64> {
        py.detach(|| decay_amplitude_direct(&self.model, x, kappa, t, tol))
            .map_err(to_py)
    }

    #[pyo3(signature = (x, kappa, t, tol = TOL))]
    fn decay_contour(
        &self,
        py: Python<'_>,
        x: f64,
        kappa: f64,
        t: f64,
        tol: f64,
    ) -> PyResult<Complex64> {
        py.detach(|| {
            let pole = solve_pole(&self.model, x, kappa, None, DEFAULT_RESIDUAL_TOL)?;
            decay_amplitude_contour(&self.model, x, kappa, t, &pole, tol)
        })
        .map_err(to_py)
    }

    /// `(T1, T2)` of the exponential regime.
    #[pyo3(signature = (x, kappa, c6 = 1.0))]
    fn exp_window(&self, py: Python<'_>, x: f64, kappa: f64, c6: f64) -> PyResult<(f64, f64)> {
        let pole = py.detach(|| self.pole(x, kappa))?;
        exp_window(&pole, c6).map_err(to_py)
    }

    /// Threshold tail constants as a JSON string.
    #[pyo3(signature = (x, kappa, tol = TOL))]
    fn tail_constants_json(
        &self,
        py: Python<'_>,
        x: f64,
        kappa: f64,
        tol: f64,
    ) -> PyResult<String> {
        let tail = py
            .detach(|| tail_constants(&self.model, x, kappa, tol))
            .map_err(to_py)?;
        serde_json_string(&tail)
    }
}

fn serde_json_string<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn pyinterband(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyPole>()?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
