//! Krotov's method with first-order updates, for pure states and density
//! matrices.
//!
//! One iteration propagates the costate backward under the current pulse,
//! storing it at interval midpoints, then sweeps forward: each sample is
//! updated from the stored costate and the state propagated under the already
//! updated earlier samples, and the state is then stepped with the new sample.

mod problems;
mod shape;

use std::path::Path;

use log::{debug, info};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::CompositeFunctional;
use crate::models::{ControlModel, ControlPulse, LindbladSpec};
use crate::quantum::{DensityMatrix, StateVector, C64};
use problems::{DensityProblem, Problem, PureProblem};
pub use shape::{shape_eval, GuessPulse, PhaseModulation, ShapeFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LineSearch {
    Off,
    /// On a failed step multiply `λ_a` by `factor` and retry, up to
    /// `max_trials` times; after an accepted step divide it by `factor`, never
    /// going below the configured value.
    Backtracking { factor: f64, max_trials: usize },
}

impl Default for LineSearch {
    fn default() -> Self {
        LineSearch::Backtracking {
            factor: 2.0,
            max_trials: 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KrotovConfig {
    /// Inverse step size.
    pub lambda_a: f64,
    pub shape: ShapeFunction,
    pub max_iters: usize,
    /// Stop once the functional drops below this.
    #[serde(default)]
    pub j_tol: f64,
    /// Stop once an accepted iteration improves the functional by less than this.
    #[serde(default)]
    pub dj_tol: f64,
    #[serde(default)]
    pub line_search: LineSearch,
}

impl KrotovConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_a.is_finite() && self.lambda_a > 0.0) {
            return Err(Error::Config(format!("lambda_a must be positive, got {}", self.lambda_a)));
        }
        if !(self.j_tol >= 0.0 && self.dj_tol >= 0.0) {
            return Err(Error::Config("tolerances must be nonnegative".into()));
        }
        if let LineSearch::Backtracking { factor, max_trials } = self.line_search {
            if !(factor > 1.0) || max_trials == 0 {
                return Err(Error::Config("line search needs factor > 1 and at least one trial".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    /// Unweighted value of every term.
    pub j_terms: Vec<(String, f64)>,
    pub j_total: f64,
    pub lambda_used: f64,
    /// `L²` norm of the pulse change.
    pub pulse_change_norm: f64,
    /// False if the functional increased.
    pub monotonic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", content = "detail", rename_all = "snake_case")]
pub enum StopReason {
    BelowTolerance,
    Stalled,
    MaxIterations,
    LineSearchFailed,
    Aborted(String),
}

/// Outcome of [`run_optimization`]: the accepted iterations and the best pulse.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizationRun {
    /// Evaluation of the guess, labelled iteration 0.
    pub initial: IterationRecord,
    pub records: Vec<IterationRecord>,
    pub pulse: ControlPulse,
    pub stop: StopReason,
}

impl OptimizationRun {
    pub fn final_record(&self) -> &IterationRecord {
        self.records.last().unwrap_or(&self.initial)
    }

    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// Writes `iter,J_total,<term>...,lambda`.
    pub fn write_iterations_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["iter".to_string(), "J_total".to_string()];
        header.extend(self.initial.j_terms.iter().map(|(n, _)| n.clone()));
        header.push("lambda".into());
        w.write_record(&header)?;
        for r in std::iter::once(&self.initial).chain(&self.records) {
            let mut row = vec![r.iter.to_string(), format!("{:e}", r.j_total)];
            row.extend(r.j_terms.iter().map(|(_, v)| format!("{v:e}")));
            row.push(format!("{:e}", r.lambda_used));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

/// Backward pass: costates at interval midpoints under `pulse`.
fn backward<P: Problem>(p: &mut P, pulse: &ControlPulse, chi_t: P::Costate) -> Vec<P::Costate> {
    let n = pulse.len();
    let half = 0.5 * pulse.grid().dt();
    let mut chi = chi_t;
    let mut mids = Vec::with_capacity(n);
    for k in (0..n).rev() {
        let eps = pulse.samples()[k];
        p.step_back(&mut chi, eps, half);
        mids.push(chi.clone());
        p.step_back(&mut chi, eps, half);
    }
    mids.reverse();
    mids
}

/// Forward sweep producing the updated pulse and its final state.
fn forward_sweep<P: Problem>(
    p: &mut P,
    old: &ControlPulse,
    chis: &[P::Costate],
    shape: &[f64],
    lambda: f64,
) -> (ControlPulse, P::State) {
    let dt = old.grid().dt();
    let mut new = old.clone();
    let mut x = p.initial();
    for k in 0..old.len() {
        let eps_old = old.samples()[k];
        let mut mid = x.clone();
        p.step(&mut mid, eps_old, 0.5 * dt);
        let (g_re, g_im) = p.sensitivity(&chis[k], &mid);
        let s = shape[k] / lambda;
        let eps = eps_old + C64::new(s * g_re, s * g_im);
        new.samples_mut()[k] = eps;
        p.step(&mut x, eps, dt);
    }
    (new, x)
}

fn final_state<P: Problem>(p: &mut P, pulse: &ControlPulse) -> P::State {
    let dt = pulse.grid().dt();
    let mut x = p.initial();
    for &eps in pulse.samples() {
        p.step(&mut x, eps, dt);
    }
    x
}

fn record(iter: usize, e: &crate::functionals::Evaluation<impl Clone>, lambda: f64, change: f64, prev: Option<f64>) -> IterationRecord {
    IterationRecord {
        iter,
        j_terms: e.terms.clone(),
        j_total: e.total,
        lambda_used: lambda,
        pulse_change_norm: change,
        monotonic: prev.is_none_or(|j| e.total <= j),
    }
}

fn iterate_once<P: Problem>(
    p: &mut P,
    pulse: &ControlPulse,
    config: &KrotovConfig,
) -> Result<(ControlPulse, IterationRecord)> {
    config.validate()?;
    let x = final_state(p, pulse);
    p.check_final(&x)?;
    let e0 = p.evaluate(&x)?;
    let chis = backward(p, pulse, e0.costate.clone());
    let shape = config.shape.at_midpoints(pulse.grid());
    let (new, x_new) = forward_sweep(p, pulse, &chis, &shape, config.lambda_a);
    p.check_final(&x_new)?;
    let e = p.evaluate(&x_new)?;
    let change = new.l2_distance(pulse)?;
    Ok((new, record(1, &e, config.lambda_a, change, Some(e0.total))))
}

fn run<P: Problem>(p: &mut P, guess: &ControlPulse, config: &KrotovConfig) -> Result<OptimizationRun> {
    config.validate()?;
    let shape = config.shape.at_midpoints(guess.grid());
    let x0 = final_state(p, guess);
    p.check_final(&x0)?;
    let mut current = p.evaluate(&x0)?;
    let initial = record(0, &current, 0.0, 0.0, None);
    let mut run = OptimizationRun {
        initial,
        records: vec![],
        pulse: guess.clone(),
        stop: StopReason::MaxIterations,
    };
    if current.total < config.j_tol {
        run.stop = StopReason::BelowTolerance;
        return Ok(run);
    }
    let mut lambda = config.lambda_a;
    for iter in 1..=config.max_iters {
        let chis = backward(p, &run.pulse, current.costate.clone());
        let (factor, trials) = match config.line_search {
            LineSearch::Off => (1.0, 1),
            LineSearch::Backtracking { factor, max_trials } => (factor, max_trials),
        };
        let mut accepted = None;
        for trial in 0..trials {
            let (new, x) = forward_sweep(p, &run.pulse, &chis, &shape, lambda);
            let outcome = p.check_final(&x).and_then(|_| p.evaluate(&x));
            let e = match outcome {
                Ok(e) => e,
                Err(err) if matches!(config.line_search, LineSearch::Off) => {
                    run.stop = StopReason::Aborted(err.to_string());
                    return Ok(run);
                }
                Err(err) => {
                    debug!("iteration {iter}, trial {trial}: {err}; raising lambda");
                    lambda *= factor;
                    continue;
                }
            };
            let ok = e.total <= current.total || matches!(config.line_search, LineSearch::Off);
            if ok {
                accepted = Some((new, e));
                break;
            }
            debug!("iteration {iter}: J rose to {:e} at lambda {lambda:e}", e.total);
            lambda *= factor;
        }
        let Some((new, e)) = accepted else {
            run.stop = StopReason::LineSearchFailed;
            return Ok(run);
        };
        let change = new.l2_distance(&run.pulse)?;
        let rec = record(iter, &e, lambda, change, Some(current.total));
        let dj = current.total - e.total;
        info!("iteration {iter}: J = {:.6e}, lambda = {lambda:.3e}", e.total);
        run.records.push(rec);
        run.pulse = new;
        current = e;
        if let LineSearch::Backtracking { factor, .. } = config.line_search {
            lambda = (lambda / factor).max(config.lambda_a);
        }
        if current.total < config.j_tol {
            run.stop = StopReason::BelowTolerance;
            return Ok(run);
        }
        if dj.abs() < config.dj_tol {
            run.stop = StopReason::Stalled;
            return Ok(run);
        }
    }
    run.stop = StopReason::MaxIterations;
    Ok(run)
}

/// One pure-state iteration at fixed `λ_a`.
pub fn krotov_iterate_pure(
    model: &ControlModel,
    pulse: &ControlPulse,
    functional: &CompositeFunctional,
    psi0: &StateVector,
    config: &KrotovConfig,
) -> Result<(ControlPulse, IterationRecord)> {
    let mut p = PureProblem::new(model, functional, psi0.amplitudes().clone())?;
    iterate_once(&mut p, pulse, config)
}

/// One density-matrix iteration at fixed `λ_a`.
pub fn krotov_iterate_dm(
    model: &ControlModel,
    diss: &LindbladSpec,
    pulse: &ControlPulse,
    functional: &CompositeFunctional,
    rho0: &DensityMatrix,
    config: &KrotovConfig,
) -> Result<(ControlPulse, IterationRecord)> {
    let mut p = DensityProblem::new(model, diss, functional, rho0.matrix().clone())?;
    iterate_once(&mut p, pulse, config)
}

/// Initial state of an optimization; a dissipator is required for mixed dynamics.
#[derive(Debug, Clone, Copy)]
pub enum Initial<'a> {
    Pure(&'a StateVector),
    Density(&'a DensityMatrix, &'a LindbladSpec),
}

/// Iterates until `j_tol`, `dj_tol` or `max_iters`. Numerical failures after
/// the first evaluation end the run early with the best pulse so far.
pub fn run_optimization(
    model: &ControlModel,
    guess: &ControlPulse,
    functional: &CompositeFunctional,
    initial: Initial<'_>,
    config: &KrotovConfig,
) -> Result<OptimizationRun> {
    match initial {
        Initial::Pure(psi0) => {
            let mut p = PureProblem::new(model, functional, psi0.amplitudes().clone())?;
            run(&mut p, guess, config)
        }
        Initial::Density(rho0, diss) => {
            let mut p = DensityProblem::new(model, diss, functional, rho0.matrix().clone())?;
            run(&mut p, guess, config)
        }
    }
}
