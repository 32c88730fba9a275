//! Python bindings for `prbdim-core`.

use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use prbdim_core::compound::{self, CompoundSpec};
use prbdim_core::dimension::{dimension_prbs, DimensionQuery, DEFAULT_M_CEILING};
use prbdim_core::linkmodel::{self, Environment};
use prbdim_core::{bundled, Error, InterferenceModel, OutdoorModel, RadiusSampler, Region, ScenarioFile};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::CeilingReached { .. } | Error::InfeasibleSplit { .. } | Error::Accuracy { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn spec(weights: Vec<f64>) -> PyResult<CompoundSpec> {
    CompoundSpec::new(weights).map_err(py_err)
}

fn environment(name: &str) -> PyResult<Environment> {
    match name {
        "outdoor" => Ok(Environment::Outdoor),
        "indoor" => Ok(Environment::Indoor),
        _ => Err(PyValueError::new_err(format!("environment must be 'outdoor' or 'indoor', got '{name}'"))),
    }
}

/// `P(Σ n·V_n = k)` for `k = 0..=max_k`, `V_n ~ Poisson(weights[n-1])`.
#[pyfunction]
fn pmf(weights: Vec<f64>, max_k: usize) -> PyResult<Vec<f64>> {
    Ok(compound::pmf(&spec(weights)?, max_k).probabilities().to_vec())
}

/// `P(Σ n·V_n ≥ m)` by the Bell-polynomial route.
#[pyfunction]
fn ccdf_bell(weights: Vec<f64>, m: usize) -> PyResult<f64> {
    Ok(compound::ccdf_bell(&spec(weights)?, m))
}

/// `P(Σ n·V_n ≥ m)` for `m = 0..=m_max`.
#[pyfunction]
fn ccdf_curve(weights: Vec<f64>, m_max: usize) -> PyResult<Vec<f64>> {
    Ok(compound::ccdf_curve(&spec(weights)?, m_max))
}

/// `P(Σ n·V_n ≥ m)` by the Fourier integral route, `m ≥ 1`.
#[pyfunction]
fn ccdf_integral(weights: Vec<f64>, m: usize) -> PyResult<f64> {
    compound::ccdf_integral(&spec(weights)?, m).map_err(py_err)
}

/// Complete exponential Bell polynomial `B_k(x_1..x_k)`.
#[pyfunction]
fn bell_complete(x: Vec<f64>) -> PyResult<f64> {
    compound::bell_complete(&x).map_err(py_err)
}

/// Names of the scenarios shipped with the library.
#[pyfunction]
fn bundled_scenarios() -> Vec<&'static str> {
    bundled::SCENARIOS.iter().map(|(name, _)| *name).collect()
}

/// A validated scenario.
#[pyclass(name = "Scenario", from_py_object)]
#[derive(Clone)]
struct PyScenario {
    inner: prbdim_core::Scenario,
}

#[pymethods]
impl PyScenario {
    /// Parses a TOML scenario document.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let inner = prbdim_core::parse_scenario(text).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn bundled(name: &str) -> PyResult<Self> {
        if bundled::document(name).is_none() {
            return Err(PyKeyError::new_err(format!("no bundled scenario named '{name}'")));
        }
        Ok(Self {
            inner: bundled::scenario(name).map_err(py_err)?,
        })
    }

    fn to_toml(&self) -> String {
        ScenarioFile::from_scenario(&self.inner).to_toml()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.inner.seed = seed;
    }

    #[getter]
    fn realizations(&self) -> usize {
        self.inner.mc_realizations
    }

    #[setter]
    fn set_realizations(&mut self, n: usize) -> PyResult<()> {
        if n == 0 {
            return Err(PyValueError::new_err("at least one realization is required"));
        }
        self.inner.mc_realizations = n;
        Ok(())
    }

    #[getter]
    fn road_intensity(&self) -> f64 {
        self.inner.road_intensity
    }

    #[setter]
    fn set_road_intensity(&mut self, value: f64) {
        self.inner.road_intensity = value;
    }

    /// Copy with a new forecast throughput in Mbit/s.
    fn with_throughput(&self, tau_mbps: f64, outdoor_fraction: f64) -> PyResult<Self> {
        let inner = self.inner.with_throughput(tau_mbps * 1e6, outdoor_fraction);
        inner.validate().map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Copy with other modelling options.
    #[pyo3(signature = (*, outdoor_model=None, sampler=None, region=None, noise_limited=false))]
    fn with_options(
        &self,
        outdoor_model: Option<&str>,
        sampler: Option<&str>,
        region: Option<&str>,
        noise_limited: bool,
    ) -> PyResult<Self> {
        let mut inner = self.inner.clone();
        if let Some(m) = outdoor_model {
            inner.outdoor_model = match m {
                "cox" => OutdoorModel::Cox,
                "ppp" => OutdoorModel::Ppp,
                _ => return Err(PyValueError::new_err(format!("unknown outdoor model '{m}'"))),
            };
        }
        if let Some(s) = sampler {
            inner.sampler = match s {
                "paper" => RadiusSampler::Paper,
                "standard" => RadiusSampler::Standard,
                _ => return Err(PyValueError::new_err(format!("unknown sampler '{s}'"))),
            };
        }
        if let Some(r) = region {
            inner.region = match r {
                "all" => Region::All,
                "center" => Region::Center,
                "middle" => Region::Middle,
                "edge" => Region::Edge,
                _ => return Err(PyValueError::new_err(format!("unknown region '{r}'"))),
            };
        }
        if noise_limited {
            inner.interference = InterferenceModel::noise_limited();
        }
        inner.validate().map_err(py_err)?;
        Ok(Self { inner })
    }

    /// `(δ, κ)`: users per km of road and per km².
    fn intensities(&self) -> PyResult<(f64, f64)> {
        let g = self.inner.geometry().map_err(py_err)?;
        Ok((g.user_intensity_linear, g.user_intensity_area))
    }

    /// SINR in dB at distance `x_km`.
    #[pyo3(signature = (x_km, env="outdoor"))]
    fn sinr_db(&self, x_km: f64, env: &str) -> PyResult<f64> {
        let linear = linkmodel::sinr_at(&self.inner.link, &self.inner.interference, x_km, environment(env)?)
            .map_err(py_err)?;
        Ok(10.0 * linear.log10())
    }

    /// Rate per PRB in bit/s at distance `x_km`.
    #[pyo3(signature = (x_km, env="outdoor"))]
    fn throughput(&self, x_km: f64, env: &str) -> PyResult<f64> {
        linkmodel::throughput_at(&self.inner.link, &self.inner.interference, x_km, environment(env)?).map_err(py_err)
    }

    /// PRBs needed at distance `x_km`.
    #[pyo3(signature = (x_km, env="outdoor"))]
    fn prbs_required(&self, x_km: f64, env: &str) -> PyResult<u32> {
        let s = &self.inner;
        linkmodel::prbs_required(&s.link, &s.interference, &s.service, x_km, environment(env)?).map_err(py_err)
    }

    /// `E(Γ)`, the mean number of requested PRBs.
    fn expected_load(&self) -> PyResult<f64> {
        Ok(self.inner.prepare().map_err(py_err)?.expected_load())
    }

    /// `(pi, stderr)` for `M = 0..=m_max`.
    fn congestion(&self, py: Python<'_>, m_max: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let model = self.inner.prepare().map_err(py_err)?;
        let curve = py.detach(|| model.averaged_congestion(m_max));
        Ok((curve.pi, curve.stderr))
    }

    /// Smallest `M` with `Π(M) ≤ target`.
    #[pyo3(signature = (target, m_ceiling=DEFAULT_M_CEILING))]
    fn dimension<'py>(&self, py: Python<'py>, target: f64, m_ceiling: usize) -> PyResult<Bound<'py, PyDict>> {
        let query = DimensionQuery {
            scenario: self.inner.clone(),
            target_congestion: target,
            m_ceiling,
        };
        let report = py.detach(|| dimension_prbs(&query)).map_err(py_err)?;
        let out = PyDict::new(py);
        out.set_item("required_m", report.required_m)?;
        out.set_item("pi_at", report.pi_at)?;
        out.set_item("pi_before", report.pi_before)?;
        out.set_item("stderr_at", report.stderr_at)?;
        out.set_item("stderr_before", report.stderr_before)?;
        Ok(out)
    }

    /// Empirical curve from `replications` end-to-end snapshots.
    fn simulate<'py>(&self, py: Python<'py>, replications: usize, m_max: usize) -> PyResult<Bound<'py, PyDict>> {
        if replications == 0 {
            return Err(PyValueError::new_err("replications must be positive"));
        }
        let model = self.inner.prepare().map_err(py_err)?;
        let summary = py.detach(|| prbdim_core::simulate::simulate(&model, replications));
        let curve = summary.empirical_ccdf(m_max);
        let out = PyDict::new(py);
        out.set_item("pi", curve.p_hat)?;
        out.set_item("lower", curve.lower)?;
        out.set_item("upper", curve.upper)?;
        out.set_item("mean_gamma", summary.mean_gamma())?;
        out.set_item("mean_outdoor_users", summary.mean_outdoor_users())?;
        out.set_item("mean_indoor_users", summary.mean_indoor_users())?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(road_intensity={}, seed={}, realizations={})",
            self.inner.road_intensity, self.inner.seed, self.inner.mc_realizations
        )
    }
}

#[pymodule]
fn prbdim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", prbdim_core::VERSION)?;
    m.add_class::<PyScenario>()?;
    m.add_function(wrap_pyfunction!(pmf, m)?)?;
    m.add_function(wrap_pyfunction!(ccdf_bell, m)?)?;
    m.add_function(wrap_pyfunction!(ccdf_curve, m)?)?;
    m.add_function(wrap_pyfunction!(ccdf_integral, m)?)?;
    m.add_function(wrap_pyfunction!(bell_complete, m)?)?;
    m.add_function(wrap_pyfunction!(bundled_scenarios, m)?)?;
    Ok(())
}
