use std::path::PathBuf;

use metro_dynamics::analysis::{self, DemandProfile, DiagramParams};
use metro_dynamics::line::{
    build_controlled_system, build_maxplus_affine, build_maxplus_system, closed_form_headway,
    default_initial_departures, place_trains, segmentize, LineConfig, LineModel,
};
use metro_dynamics::{
    generalized_eigenpair, max_cycle_mean as core_max_cycle_mean, simulate, Error, PrecedenceGraph,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

type PhaseRow = (f64, f64, f64, f64, f64, String);

create_exception!(
    pymetro,
    ModelError,
    PyRuntimeError,
    "The dynamics are ill-posed for the requested parameters."
);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidConfig(_)
        | Error::Json(_)
        | Error::Io(_)
        | Error::TrainCount { .. }
        | Error::UnknownProfile(_)
        | Error::DensityOutOfRange { .. }
        | Error::IndexOutOfRange { .. }
        | Error::DimensionMismatch { .. } => PyValueError::new_err(e.to_string()),
        _ => ModelError::new_err(e.to_string()),
    }
}

/// Headway of one train count by three independent methods.
#[pyclass(frozen, get_all, module = "pymetro")]
struct Headways {
    closed_form: f64,
    spectral: f64,
    simulated: f64,
}

#[pymethods]
impl Headways {
    fn __repr__(&self) -> String {
        format!(
            "Headways(closed_form={}, spectral={}, simulated={})",
            self.closed_form, self.spectral, self.simulated
        )
    }
}

/// Stationary averages over platforms from a simulated run.
#[pyclass(frozen, get_all, module = "pymetro")]
struct Stationary {
    headway: f64,
    dwell: f64,
    separation: f64,
    /// Largest relative violation of the headway identities.
    identity_error: f64,
}

#[pymethods]
impl Stationary {
    fn __repr__(&self) -> String {
        format!(
            "Stationary(headway={}, dwell={}, separation={}, identity_error={})",
            self.headway, self.dwell, self.separation, self.identity_error
        )
    }
}

/// A segmented metro loop.
#[pyclass(name = "LineModel", frozen, module = "pymetro")]
struct PyLineModel {
    inner: LineModel,
}

#[pymethods]
impl PyLineModel {
    /// The bundled Paris line 14 configuration.
    #[staticmethod]
    fn paris() -> PyResult<Self> {
        Self::from_json(metro_dynamics::PARIS_LINE14)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let cfg = LineConfig::from_json_str(text).map_err(py_err)?;
        Ok(Self {
            inner: segmentize(&cfg).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        let cfg = LineConfig::from_path(path).map_err(py_err)?;
        Ok(Self {
            inner: segmentize(&cfg).map_err(py_err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Loop length (m).
    #[getter]
    fn length(&self) -> f64 {
        self.inner.length()
    }

    #[getter]
    fn platforms(&self) -> Vec<usize> {
        self.inner.platforms()
    }

    #[getter]
    fn h_min(&self) -> f64 {
        self.inner.h_min()
    }

    fn label(&self, j: usize) -> Option<String> {
        self.inner.label(j).map(str::to_string)
    }

    /// Asymptotic headway (s); infinite for 0 or n trains.
    fn closed_form_headway(&self, m: usize) -> f64 {
        closed_form_headway(&self.inner, m)
    }

    fn optimal_train_count(&self) -> usize {
        analysis::optimal_train_count(&self.inner)
    }

    #[pyo3(signature = (m, events = 5000))]
    fn headways(&self, m: usize, events: usize) -> PyResult<Headways> {
        let model = &self.inner;
        let placement = place_trains(model, m).map_err(py_err)?;
        let a = build_maxplus_system(model, &placement).map_err(py_err)?;
        let spectral = generalized_eigenpair(&a).map_err(py_err)?.mu;
        let sys = build_maxplus_affine(model, &placement).map_err(py_err)?;
        let d0 = default_initial_departures(model, &placement);
        let simulated = simulate(&sys, model, &placement, &d0, events)
            .map_err(py_err)?
            .headway();
        Ok(Headways {
            closed_form: closed_form_headway(model, m),
            spectral,
            simulated,
        })
    }

    /// Simulates `m` trains; with `demand_scale` set, platforms run the
    /// stabilized dwell control at the configured rates times that scale.
    #[pyo3(signature = (m, events = 5000, demand_scale = None))]
    fn simulate(&self, m: usize, events: usize, demand_scale: Option<f64>) -> PyResult<Stationary> {
        let model = &self.inner;
        let placement = place_trains(model, m).map_err(py_err)?;
        let sys = match demand_scale {
            None => build_maxplus_affine(model, &placement),
            Some(c) => analysis::control_params(model, &placement, &model.demand().scaled(c))
                .and_then(|ctrl| build_controlled_system(model, &placement, &ctrl)),
        }
        .map_err(py_err)?;
        let d0 = default_initial_departures(model, &placement);
        let res = simulate(&sys, model, &placement, &d0, events).map_err(py_err)?;
        let avg = res.platform_averages();
        Ok(Stationary {
            headway: res.headway(),
            dwell: avg.w,
            separation: avg.g,
            identity_error: res.identity_report().max_relative(),
        })
    }

    /// Derived line aggregates in SI units (m, s, trains/m, trains/s).
    fn diagram_params(&self) -> Vec<(&'static str, f64)> {
        let p = DiagramParams::from_model(&self.inner);
        vec![
            ("length", p.length),
            ("v", p.v),
            ("w_prime", p.w_prime),
            ("h_min", p.h_min),
            ("f_max", p.f_max),
            ("rho_bar", p.rho_bar),
            ("free_flow_limit", p.free_flow_limit()),
            ("congestion_onset", p.congestion_onset()),
        ]
    }

    /// Rows `(rho, h, f, w, g, phase)` at `steps` interior densities.
    fn phase_diagram(&self, steps: usize) -> PyResult<Vec<PhaseRow>> {
        let p = DiagramParams::from_model(&self.inner);
        let pts = analysis::phase_diagram(&p, steps).map_err(py_err)?;
        Ok(pts
            .into_iter()
            .map(|q| (q.rho, q.h, q.f, q.w, q.g, q.phase.to_string()))
            .collect())
    }

    /// Rows `(m, c, h, h_tilde)` of the controlled demand sweep.
    #[pyo3(signature = (profile = "symmetric", trains = None, scales = None, events = 5000, alpha = 30.0))]
    fn demand_sweep(
        &self,
        py: Python<'_>,
        profile: &str,
        trains: Option<Vec<usize>>,
        scales: Option<Vec<f64>>,
        events: usize,
        alpha: f64,
    ) -> PyResult<Vec<(usize, f64, f64, f64)>> {
        let model = &self.inner;
        let demand = DemandProfile::by_name(profile, model)
            .and_then(|p| p.to_demand(model, alpha))
            .map_err(py_err)?;
        let ms = trains.unwrap_or_else(|| (1..model.n()).collect());
        let cs = scales.unwrap_or_else(|| analysis::DEFAULT_SCALES.to_vec());
        let rows = py
            .detach(|| analysis::sweep_density(model, &demand, &ms, &cs, events))
            .map_err(py_err)?;
        Ok(rows
            .into_iter()
            .map(|r| (r.m, r.c, r.h, r.h_tilde))
            .collect())
    }

    /// Amplification of an injected delay, `(uncontrolled, controlled)`.
    #[pyo3(signature = (m = 4, ratio = 0.1, delay = 30.0, event = 20, horizon = 200, alpha = 30.0))]
    fn instability(
        &self,
        m: usize,
        ratio: f64,
        delay: f64,
        event: usize,
        horizon: usize,
        alpha: f64,
    ) -> PyResult<(f64, f64)> {
        let model = &self.inner;
        let demand = analysis::uniform_ratio_demand(model, ratio, alpha).map_err(py_err)?;
        let cmp = analysis::compare_instability(model, m, &demand, delay, event, horizon)
            .map_err(py_err)?;
        Ok((cmp.uncontrolled.amplification, cmp.controlled.amplification))
    }

    fn __repr__(&self) -> String {
        format!(
            "LineModel(n={}, length={})",
            self.inner.n(),
            self.inner.length()
        )
    }
}

/// Maximum cycle ratio of a graph given as `(from, to, weight, duration)` arcs.
/// Returns the ratio and the nodes of a critical cycle.
#[pyfunction]
fn max_cycle_mean(n: usize, arcs: Vec<(usize, usize, f64, u32)>) -> PyResult<(f64, Vec<usize>)> {
    let mut g = PrecedenceGraph::new(n);
    for (from, to, w, d) in arcs {
        if from >= n || to >= n {
            return Err(PyValueError::new_err(format!(
                "arc {from}->{to} outside 0..{n}"
            )));
        }
        g.add_arc(from, to, w, d);
    }
    let cm = core_max_cycle_mean(&g).map_err(py_err)?;
    Ok((cm.mu, cm.critical_cycle.nodes().to_vec()))
}

#[pymodule]
fn pymetro(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLineModel>()?;
    m.add_class::<Headways>()?;
    m.add_class::<Stationary>()?;
    m.add_function(wrap_pyfunction!(max_cycle_mean, m)?)?;
    m.add("ModelError", m.py().get_type::<ModelError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
