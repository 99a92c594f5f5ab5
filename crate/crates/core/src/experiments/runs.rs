use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    cat_infidelity_entangled, cat_infidelity_pure, observables_timeseries, radius_error, Observable, ObservableTable,
};
use crate::dynamics::{propagate_density, propagate_state, top_population_dm, top_population_pure};
use crate::error::{Error, Result};
use crate::functionals::{alpha_estimate, CompositeFunctional, RadiusTarget};
use crate::krotov::{run_optimization, Initial, IterationRecord, KrotovConfig, StopReason};
use crate::models::{ControlPulse, LindbladSpec, Model, TimeGrid};
use crate::quantum::{purity, CVector, Space, State, StateRef, StateVector, C64};

use super::config::InitialState;

pub(crate) fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    serde_json::to_writer_pretty(BufWriter::new(f), value)?;
    Ok(())
}

pub(crate) fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub(crate) fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Builds the configured initial state on `space`.
pub fn initial_state(init: &InitialState, space: Space) -> Result<State> {
    let state = match init {
        InitialState::Basis { index } => State::Pure(
            StateVector::basis(space, *index).map_err(|e| Error::Config(format!("initial state: {e}")))?,
        ),
        InitialState::Superposition { levels } => {
            if levels.is_empty() || levels.iter().any(|&l| l >= space.dim()) {
                return Err(Error::Config(format!("superposition levels {levels:?} outside dimension {}", space.dim())));
            }
            let mut amps = CVector::zeros(space.dim());
            for &l in levels {
                amps[l] = C64::new(1.0, 0.0);
            }
            State::Pure(StateVector::normalized(space, amps)?)
        }
        InitialState::File { path } => read_json(path)?,
    };
    if state.space() != space {
        return Err(Error::Config(format!("initial state lives on {:?}, model on {space:?}", state.space())));
    }
    Ok(state)
}

/// Cat-state analysis of a single state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateAnalysis {
    /// Distance to the nearest (entangled) cat state; absent for mixed single-mode states.
    pub cat_infidelity: Option<f64>,
    /// Amplitude of the nearest cat state.
    pub cat_alpha: Option<C64>,
    /// `|α|` from the two-photon moment.
    pub alpha_estimate: f64,
    /// `1 - Tr ρ²`.
    pub purity_error: f64,
    pub radius_error: Option<f64>,
    /// Population of the two highest Fock levels.
    pub top_population: f64,
}

pub fn analyze_state(state: StateRef<'_>, alpha_tgt: Option<RadiusTarget>) -> Result<StateAnalysis> {
    let space = state.space();
    let (cat_infidelity, cat_alpha) = match (space, state) {
        (Space::Fock(_), StateRef::Pure(s)) => {
            let fit = cat_infidelity_pure(s)?;
            (Some(fit.infidelity), Some(fit.spec.alpha))
        }
        (Space::Composite(_), _) => {
            let fit = cat_infidelity_entangled(state)?;
            (Some(fit.infidelity), Some(fit.alpha))
        }
        _ => (None, None),
    };
    let (purity_error, top_population) = match state {
        StateRef::Pure(s) => (0.0, top_population_pure(space, s.amplitudes())),
        StateRef::Mixed(d) => (1.0 - purity(d), top_population_dm(space, d.matrix())),
    };
    Ok(StateAnalysis {
        cat_infidelity,
        cat_alpha,
        alpha_estimate: alpha_estimate(state)?,
        purity_error,
        radius_error: alpha_tgt.map(|t| radius_error(state, t)).transpose()?,
        top_population,
    })
}

/// Self-contained record of one optimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub label: String,
    pub model: Model,
    pub grid: TimeGrid,
    pub krotov: KrotovConfig,
    pub functional: CompositeFunctional,
    /// Oscillator decay rate of density-matrix runs.
    pub kappa: Option<f64>,
    pub initial: IterationRecord,
    pub records: Vec<IterationRecord>,
    pub stop: StopReason,
    pub final_state: StateAnalysis,
}

impl RunReport {
    pub fn final_j(&self) -> f64 {
        self.records.last().unwrap_or(&self.initial).j_total
    }
}

/// Inputs of one optimization.
pub(crate) struct Job<'a> {
    pub label: String,
    pub model: Model,
    pub guess: ControlPulse,
    pub functional: CompositeFunctional,
    pub krotov: KrotovConfig,
    pub initial: &'a State,
    pub diss: Option<LindbladSpec>,
    pub alpha_tgt: Option<RadiusTarget>,
}

pub(crate) struct JobOutput {
    pub report: RunReport,
    pub pulse: ControlPulse,
    pub state: State,
}

/// Final state of `pulse`, propagated coherently or under `diss`.
pub(crate) fn final_state(model: &Model, pulse: &ControlPulse, initial: &State, diss: Option<&LindbladSpec>) -> Result<State> {
    let cm = model.control_model();
    Ok(match (diss, initial) {
        (None, State::Pure(psi)) => State::Pure(propagate_state(&cm, pulse, psi, false)?.into_final_state()),
        (Some(d), _) => State::Mixed(propagate_density(&cm, d, pulse, &initial.to_density(), false)?.into_final_state()),
        (None, State::Mixed(rho)) => {
            let zero = LindbladSpec::oscillator_decay(0.0, model.space())?;
            State::Mixed(propagate_density(&cm, &zero, pulse, rho, false)?.into_final_state())
        }
    })
}

/// Observables along the trajectory of `pulse`, every `stride` steps.
pub(crate) fn trajectory_observables(
    model: &Model,
    pulse: &ControlPulse,
    initial: &State,
    diss: Option<&LindbladSpec>,
    which: &[Observable],
    stride: usize,
) -> Result<ObservableTable> {
    let cm = model.control_model();
    match (diss, initial) {
        (None, State::Pure(psi)) => observables_timeseries(&propagate_state(&cm, pulse, psi, true)?.thinned(stride), which),
        (d, _) => {
            let zero;
            let d = match d {
                Some(d) => d,
                None => {
                    zero = LindbladSpec::oscillator_decay(0.0, model.space())?;
                    &zero
                }
            };
            observables_timeseries(&propagate_density(&cm, d, pulse, &initial.to_density(), true)?.thinned(stride), which)
        }
    }
}

/// Observables worth tracking on `space`.
pub fn default_observables(space: Space) -> Vec<Observable> {
    match space {
        Space::Qubit => vec![Observable::Purity, Observable::BlochX, Observable::BlochY, Observable::BlochZ],
        Space::Fock(_) => vec![Observable::OscillatorExcitation, Observable::Radius, Observable::Purity],
        Space::Composite(_) => vec![
            Observable::OscillatorExcitation,
            Observable::QubitExcitation,
            Observable::MutualInformation,
            Observable::Purity,
            Observable::Radius,
            Observable::BlochX,
            Observable::BlochY,
            Observable::BlochZ,
        ],
    }
}

/// Runs `job` and writes `run.json`, `iterations.csv`, `pulse.csv` and
/// `final_state.json` into `dir`.
pub(crate) fn optimize(job: Job<'_>, dir: &Path) -> Result<JobOutput> {
    create_dir(dir)?;
    let cm = job.model.control_model();
    let rho0;
    let initial = match (&job.diss, job.initial) {
        (None, State::Pure(psi)) => Initial::Pure(psi),
        (Some(d), s) => {
            rho0 = s.to_density();
            Initial::Density(&rho0, d)
        }
        (None, State::Mixed(_)) => {
            return Err(Error::Config("a mixed initial state needs dissipative dynamics".into()));
        }
    };
    let run = run_optimization(&cm, &job.guess, &job.functional, initial, &job.krotov)?;
    let state = final_state(&job.model, &run.pulse, job.initial, job.diss.as_ref())?;
    let report = RunReport {
        label: job.label,
        model: job.model,
        grid: job.guess.grid(),
        krotov: job.krotov,
        functional: job.functional,
        kappa: job.diss.as_ref().map(|d| d.kappa()),
        initial: run.initial.clone(),
        records: run.records.clone(),
        stop: run.stop.clone(),
        final_state: analyze_state(state.as_ref(), job.alpha_tgt)?,
    };
    run.write_iterations_csv(dir.join("iterations.csv"))?;
    run.pulse.write_csv(dir.join("pulse.csv"), job.model.time_unit())?;
    write_json(&dir.join("final_state.json"), &state)?;
    write_json(&dir.join("run.json"), &report)?;
    Ok(JobOutput {
        report,
        pulse: run.pulse,
        state,
    })
}
