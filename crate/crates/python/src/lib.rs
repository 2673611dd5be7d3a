//! Python bindings. Reports cross the boundary as plain dicts built from
//! their JSON form, so Python sees the same field names as the files.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use radial_conformal::asymptotics::AsymptoticsReport;
use radial_conformal::curvature::{Bounds, CurvatureProfile, ProfileSpec};
use radial_conformal::harness::{self, Check, Scenario};
use radial_conformal::io::Trajectory;
use radial_conformal::{exact, Calibration, Dimension, Error, PohozaevReport, Tolerances};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::InvalidPath(_) | Error::OutOfRange { .. } | Error::Serialization(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn dimension(n: u32) -> PyResult<Dimension> {
    Dimension::new(n).map_err(py_err)
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py<T: serde::de::DeserializeOwned>(value: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = if let Ok(s) = value.extract::<String>() {
        s
    } else {
        value.py().import("json")?.call_method1("dumps", (value,))?.extract()?
    };
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn calibration(cal: Option<&Bound<'_, PyAny>>) -> PyResult<Calibration> {
    cal.map_or(Ok(Calibration::default()), from_py)
}

/// Curvature function `K(r)`.
#[pyclass(name = "Profile", module = "radial_conformal", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyProfile {
    inner: CurvatureProfile,
}

#[pymethods]
impl PyProfile {
    #[staticmethod]
    fn constant(value: f64) -> PyResult<Self> {
        Self::from_spec_value(ProfileSpec::Constant { value })
    }

    #[staticmethod]
    fn plateau(inner: f64, outer: f64, radius: f64) -> PyResult<Self> {
        Self::from_spec_value(ProfileSpec::Plateau { inner, outer, radius })
    }

    #[staticmethod]
    fn exp_perturbed(limit: f64, amplitude: f64, rate: f64) -> PyResult<Self> {
        Self::from_spec_value(ProfileSpec::ExpPerturbed { limit, amplitude, rate })
    }

    #[staticmethod]
    fn power_perturbed(limit: f64, amplitude: f64, exponent: f64) -> PyResult<Self> {
        Self::from_spec_value(ProfileSpec::PowerPerturbed { limit, amplitude, exponent })
    }

    /// `{"kind": "constant", "value": 1.0}` and the like, as in config files.
    #[staticmethod]
    fn from_spec(spec: &Bound<'_, PyAny>) -> PyResult<Self> {
        Self::from_spec_value(from_py(spec)?)
    }

    /// A Python callable `f(r) -> (K, K′)`. `lower ≤ K ≤ upper` must hold for `r ≥ radius`.
    #[staticmethod]
    #[pyo3(signature = (name, f, lower, upper, radius=0.0, k_infinity=None))]
    fn custom(name: String, f: Py<PyAny>, lower: f64, upper: f64, radius: f64, k_infinity: Option<f64>) -> PyResult<Self> {
        let bounds = Bounds::new(lower, upper, radius).map_err(py_err)?;
        let inner = CurvatureProfile::custom(name, k_infinity, bounds, move |r| {
            Python::attach(|py| f.call1(py, (r,)).and_then(|v| v.extract::<(f64, f64)>(py)).map_err(|e| e.to_string()))
        })
        .map_err(py_err)?;
        Ok(PyProfile { inner })
    }

    /// `(K(r), K′(r))`.
    fn eval(&self, r: f64) -> PyResult<(f64, f64)> {
        self.inner.eval(r).map_err(py_err)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name()
    }

    #[getter]
    fn k_infinity(&self) -> Option<f64> {
        self.inner.k_infinity()
    }

    fn __repr__(&self) -> String {
        format!("Profile({})", self.inner.name())
    }
}

impl PyProfile {
    fn from_spec_value(spec: ProfileSpec) -> PyResult<Self> {
        Ok(PyProfile { inner: spec.build().map_err(py_err)? })
    }
}

/// Solution `(r, u, u′)` of the radial equation on its adaptive grid.
#[pyclass(name = "RadialSolution", module = "radial_conformal", frozen)]
struct PyRadialSolution {
    inner: radial_conformal::RadialSolution,
}

#[pymethods]
impl PyRadialSolution {
    #[getter]
    fn n(&self) -> u32 {
        self.inner.n().get()
    }

    #[getter]
    fn r(&self) -> Vec<f64> {
        self.inner.grid().iter().map(|p| p.r).collect()
    }

    #[getter]
    fn u(&self) -> Vec<f64> {
        self.inner.grid().iter().map(|p| p.u).collect()
    }

    #[getter]
    fn du(&self) -> Vec<f64> {
        self.inner.grid().iter().map(|p| p.du).collect()
    }

    /// `"reached_rmax"`, `"crossed_zero"`, `"overflow"` or `"step_underflow"`.
    #[getter]
    fn status(&self) -> &'static str {
        use radial_conformal::Status::*;
        match self.inner.status() {
            ReachedRmax => "reached_rmax",
            CrossedZero(_) => "crossed_zero",
            Overflow(_) => "overflow",
            StepUnderflow(_) => "step_underflow",
        }
    }

    #[getter]
    fn range(&self) -> (f64, f64) {
        self.inner.range()
    }

    /// Interpolated `(u, u′)` at `r`.
    fn at(&self, r: f64) -> PyResult<(f64, f64)> {
        self.inner.at(r).map_err(py_err)
    }

    #[pyo3(signature = (calibration=None))]
    fn pohozaev<'py>(&self, py: Python<'py>, calibration: Option<&Bound<'py, PyAny>>) -> PyResult<Bound<'py, PyAny>> {
        let cal = self::calibration(calibration)?;
        let rep = py.detach(|| PohozaevReport::compute(&self.inner, &cal)).map_err(py_err)?;
        to_py(py, &rep)
    }

    #[pyo3(signature = (calibration=None))]
    fn asymptotics<'py>(&self, py: Python<'py>, calibration: Option<&Bound<'py, PyAny>>) -> PyResult<Bound<'py, PyAny>> {
        let cal = self::calibration(calibration)?;
        let rep = py.detach(|| AsymptoticsReport::compute(&self.inner, &cal)).map_err(py_err)?;
        to_py(py, &rep)
    }

    /// `(s, v, v′)` columns of the cylinder picture from `s_min` on.
    fn cylinder(&self, s_min: f64) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let cyl = radial_conformal::cylinder_transform(&self.inner, s_min).map_err(py_err)?;
        Ok((cyl.grid().iter().map(|p| p.s).collect(), cyl.grid().iter().map(|p| p.v).collect(), cyl.grid().iter().map(|p| p.dv).collect()))
    }

    /// The trajectory.json document written by the CLI.
    fn to_json(&self) -> PyResult<String> {
        Trajectory::from_solution(&self.inner).to_json().map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (text, profile=None))]
    fn from_json(text: &str, profile: Option<&PyProfile>) -> PyResult<Self> {
        let t = Trajectory::from_json(text).map_err(py_err)?;
        Ok(PyRadialSolution { inner: t.into_solution(profile.map(|p| p.inner.clone())).map_err(py_err)? })
    }

    fn __len__(&self) -> usize {
        self.inner.grid().len()
    }

    fn __repr__(&self) -> String {
        let (lo, hi) = self.inner.range();
        format!("RadialSolution(n={}, {}, r in [{lo}, {hi}], {} samples)", self.n(), self.status(), self.inner.grid().len())
    }
}

#[pyfunction]
#[pyo3(signature = (n, profile, u0, r_max, rel_tol=1e-10, abs_tol=1e-12))]
fn integrate_radial(py: Python<'_>, n: u32, profile: &PyProfile, u0: f64, r_max: f64, rel_tol: f64, abs_tol: f64) -> PyResult<PyRadialSolution> {
    let n = dimension(n)?;
    let tol = Tolerances::new(rel_tol, abs_tol);
    let inner = py.detach(|| radial_conformal::integrate_radial(n, &profile.inner, u0, r_max, tol)).map_err(py_err)?;
    Ok(PyRadialSolution { inner })
}

/// Integrates the cylinder equation from `(s0, v0, v0′)` to `s_max` and
/// returns the radial pull-back.
#[pyfunction]
#[pyo3(signature = (n, profile, s0, v0, dv0, s_max, rel_tol=1e-10, abs_tol=1e-12))]
#[allow(clippy::too_many_arguments)]
fn integrate_cylinder(
    py: Python<'_>,
    n: u32,
    profile: &PyProfile,
    s0: f64,
    v0: f64,
    dv0: f64,
    s_max: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> PyResult<PyRadialSolution> {
    let n = dimension(n)?;
    let tol = Tolerances::new(rel_tol, abs_tol);
    let inner = py
        .detach(|| {
            let cyl = radial_conformal::integrate_cylinder(n, &profile.inner, s0, v0, dv0, s_max, tol)?;
            radial_conformal::inverse_transform(&cyl)
        })
        .map_err(py_err)?;
    Ok(PyRadialSolution { inner })
}

/// Bisection on `u(0)` across a change of decay class. Returns a dict with
/// the final bracket and both endpoint solutions.
#[pyfunction]
#[pyo3(signature = (n, profile, lo, hi, target, max_iter=60, r_max=1e4, calibration=None))]
#[allow(clippy::too_many_arguments)]
fn shoot<'py>(
    py: Python<'py>,
    n: u32,
    profile: &PyProfile,
    lo: f64,
    hi: f64,
    target: &Bound<'py, PyAny>,
    max_iter: usize,
    r_max: f64,
    calibration: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyDict>> {
    let n = dimension(n)?;
    let target = from_py(target)?;
    let cal = self::calibration(calibration)?;
    let res = py
        .detach(|| radial_conformal::shoot(n, &profile.inner, lo, hi, target, max_iter, r_max, Tolerances::default(), &cal))
        .map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("threshold", res.threshold)?;
    out.set_item("lo", res.lo)?;
    out.set_item("hi", res.hi)?;
    out.set_item("iterations", res.iterations)?;
    out.set_item("lo_solution", PyRadialSolution { inner: res.lo_solution })?;
    out.set_item("hi_solution", PyRadialSolution { inner: res.hi_solution })?;
    Ok(out)
}

/// Outcome of a verification scenario.
#[pyclass(name = "VerificationReport", module = "radial_conformal", frozen)]
struct PyReport {
    inner: harness::VerificationReport,
}

#[pymethods]
impl PyReport {
    /// Worst outcome over all checks: `"Pass"`, `"Inconclusive"` or `"Fail"`.
    #[getter]
    fn overall(&self) -> String {
        format!("{:?}", self.inner.overall())
    }

    /// Like `overall`, with checks whose premises do not apply counted as passed.
    #[getter]
    fn verdict(&self) -> String {
        format!("{:?}", self.inner.verdict())
    }

    /// `{check id: outcome}`.
    #[getter]
    fn outcomes(&self) -> Vec<(String, String)> {
        self.inner.checks.iter().map(|c| (c.check.id().to_string(), format!("{:?}", c.outcome))).collect()
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner)
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(py_err)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        let t = &self.inner.tally;
        format!("VerificationReport({}: {} pass, {} fail, {} inconclusive)", self.inner.scenario, t.pass, t.fail, t.inconclusive)
    }
}

fn scenario(value: &Bound<'_, PyAny>) -> PyResult<Scenario> {
    let mut doc: serde_json::Value = from_py(value)?;
    if let Some(obj) = doc.as_object_mut() {
        obj.entry("checks").or_insert_with(|| serde_json::json!([]));
    }
    let mut s: Scenario = serde_json::from_value(doc).map_err(|e| PyValueError::new_err(e.to_string()))?;
    if s.checks.is_empty() {
        s.checks = Check::ALL.to_vec();
    }
    s.validate().map_err(py_err)?;
    Ok(s)
}

/// Runs a scenario given as a dict or JSON string; an empty `checks` list runs all checks.
#[pyfunction]
#[pyo3(signature = (scenario, profile=None))]
fn run_scenario(py: Python<'_>, scenario: &Bound<'_, PyAny>, profile: Option<&PyProfile>) -> PyResult<PyReport> {
    let s = self::scenario(scenario)?;
    let inner = py
        .detach(|| match profile {
            Some(p) => harness::run_scenario_with_profile(&s, &p.inner),
            None => harness::run_scenario(&s),
        })
        .map_err(py_err)?;
    Ok(PyReport { inner })
}

/// Checks an existing solution against a scenario's catalogue entries.
#[pyfunction]
fn verify_solution(py: Python<'_>, scenario: &Bound<'_, PyAny>, solution: &PyRadialSolution) -> PyResult<PyReport> {
    let s = self::scenario(scenario)?;
    Ok(PyReport { inner: py.detach(|| harness::verify_solution(&s, &solution.inner)) })
}

/// One report per value written at the dotted `path`, in input order.
#[pyfunction]
fn sweep(py: Python<'_>, scenario: &Bound<'_, PyAny>, path: &str, values: Vec<f64>) -> PyResult<Vec<PyReport>> {
    let s = self::scenario(scenario)?;
    let res = py.detach(|| harness::sweep(&s, path, &values)).map_err(py_err)?;
    Ok(res.reports.into_iter().map(|inner| PyReport { inner }).collect())
}

/// Bubble `(u, u′)` at `r`.
#[pyfunction]
fn bubble(n: u32, k: f64, lam: f64, r: f64) -> PyResult<(f64, f64)> {
    exact::ExactSolution::bubble(dimension(n)?, k, lam).map_err(py_err)?;
    Ok(exact::bubble(dimension(n)?, k, lam, r))
}

/// Constant solution of the cylinder equation.
#[pyfunction]
fn constant_cylinder(n: u32, k: f64) -> PyResult<f64> {
    exact::ExactSolution::constant_cylinder(dimension(n)?, k).map_err(py_err)?;
    Ok(exact::constant_cylinder(dimension(n)?, k))
}

/// Separatrix `(v, v′)` at `s`.
#[pyfunction]
#[pyo3(signature = (n, k, s, shift=0.0))]
fn cosh_separatrix(n: u32, k: f64, s: f64, shift: f64) -> PyResult<(f64, f64)> {
    exact::ExactSolution::cosh_separatrix(dimension(n)?, k, shift).map_err(py_err)?;
    Ok(exact::cosh_separatrix(dimension(n)?, k, s, shift))
}

#[pymodule(name = "radial_conformal")]
fn radial_conformal_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProfile>()?;
    m.add_class::<PyRadialSolution>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(integrate_radial, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_cylinder, m)?)?;
    m.add_function(wrap_pyfunction!(shoot, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(verify_solution, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(bubble, m)?)?;
    m.add_function(wrap_pyfunction!(constant_cylinder, m)?)?;
    m.add_function(wrap_pyfunction!(cosh_separatrix, m)?)?;
    m.add("CHECKS", Check::ALL.iter().map(|c| c.id()).collect::<Vec<_>>())?;
    Ok(())
}
