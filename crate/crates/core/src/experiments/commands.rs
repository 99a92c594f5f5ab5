use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    cat_infidelity_entangled, cat_infidelity_pure, gabor, pulse_spectrum, pulse_spectrum_padded, wigner, CatFit,
    EntangledCatFit, Spectrum,
};
use crate::error::{Error, Result};
use crate::functionals::{CompositeFunctional, FunctionalTerm, RadiusTarget, StateKind};
use crate::models::{jc_transition_frequencies, ControlPulse, JcModel, LindbladSpec, Model, TimeGrid, Transition};
use crate::quantum::{cat_state, CatStateSpec, Space, State, C64};

use super::config::{Command, ExperimentConfig};
use super::runs::{
    analyze_state, create_dir, default_observables, final_state, initial_state, optimize, read_json,
    trajectory_observables, write_json, Job, RunReport, StateAnalysis,
};

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub version: &'static str,
    pub command: Command,
    pub time_unit: &'static str,
    pub units: &'static str,
}

fn metadata(cfg: &ExperimentConfig) -> Metadata {
    Metadata {
        version: env!("CARGO_PKG_VERSION"),
        command: cfg.experiment,
        time_unit: cfg.model.time_unit(),
        units: match cfg.model {
            Model::Kerr(_) => "times in 1/K, angular frequencies in K",
            Model::JaynesCummings(_) => "times in 1/g, angular frequencies in g; physical g = 2pi x 50 kHz",
            Model::DrivenQubit => "dimensionless",
        },
    }
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    metadata: Metadata,
    config: &'a ExperimentConfig,
    results: &'a T,
}

/// Writes `config.json` (the effective configuration) and `report.json`.
fn finish<T: Serialize>(cfg: &ExperimentConfig, results: &T) -> Result<()> {
    write_json(&cfg.output_dir.join("config.json"), cfg)?;
    write_json(
        &cfg.output_dir.join("report.json"),
        &Envelope {
            metadata: metadata(cfg),
            config: cfg,
            results,
        },
    )
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))
}

fn jc_model(cfg: &ExperimentConfig) -> Result<JcModel> {
    match cfg.model {
        Model::JaynesCummings(m) => Ok(m),
        _ => Err(Error::Config(format!("{} needs a Jaynes-Cummings model", cfg.experiment))),
    }
}

fn radius(alpha: f64) -> Result<RadiusTarget> {
    RadiusTarget::new(alpha).map_err(|e| Error::Config(e.to_string()))
}

/// `J_cs + J_cat + J_|α|`, or without the radius term.
pub fn entangled_cat_functional(alpha_tgt: Option<f64>) -> Result<CompositeFunctional> {
    let mut terms = vec![FunctionalTerm::CoherentVariance { normalized: true }, FunctionalTerm::CatPurity];
    if let Some(a) = alpha_tgt {
        terms.push(FunctionalTerm::Radius { alpha_tgt: radius(a)? });
    }
    CompositeFunctional::of(terms)
}

pub fn entangled_cat_functional_dm(alpha_tgt: f64) -> Result<CompositeFunctional> {
    CompositeFunctional::of([
        FunctionalTerm::CsDm,
        FunctionalTerm::CatMutualInfoDm,
        FunctionalTerm::RadiusDm { alpha_tgt: radius(alpha_tgt)? },
    ])
}

fn check_kind(f: &CompositeFunctional, kind: StateKind, what: &str) -> Result<()> {
    if f.kind() != kind {
        return Err(Error::Config(format!("{what} has the wrong state kind")));
    }
    Ok(())
}

fn run_dir(cfg: &ExperimentConfig, name: &str) -> PathBuf {
    cfg.output_dir.join(name)
}

fn write_spectrum(dir: &Path, name: &str, s: &Spectrum) -> Result<()> {
    s.write_csv(dir.join(name))
}

#[derive(Debug, Clone, Serialize)]
pub struct KerrCompareReport {
    pub cat: RunReport,
    pub state_to_state: RunReport,
    pub cat_fit: CatFit,
    pub state_to_state_fit: CatFit,
    /// Width of the band holding `power_fraction` of the pulse power, in units of K.
    pub spectral_width_cat: f64,
    pub spectral_width_state_to_state: f64,
    pub power_fraction: f64,
}

/// Cat-set functional versus state-to-state optimization towards the even cat
/// of radius `alpha_tgt`, from the same initial state.
pub fn cmd_kerr_compare(cfg: &ExperimentConfig) -> Result<KerrCompareReport> {
    let Model::Kerr(kerr) = cfg.model else {
        return Err(Error::Config("kerr-compare needs a Kerr model".into()));
    };
    let mut cfg = cfg.clone();
    let cat_functional = match cfg.functional.clone() {
        Some(f) => f,
        None => CompositeFunctional::of([FunctionalTerm::CoherentVariance { normalized: true }, FunctionalTerm::CatPhase])?,
    };
    check_kind(&cat_functional, StateKind::Pure, "functional")?;
    cfg.functional = Some(cat_functional.clone());
    create_dir(&cfg.output_dir)?;
    let initial = initial_state(&cfg.initial, cfg.model.space())?;
    let target = cat_state(CatStateSpec::even(C64::new(cfg.alpha_tgt, 0.0)), kerr.space())?;
    let ss_functional = CompositeFunctional::of([FunctionalTerm::StateToState { target }])?;
    let guess = cfg.guess_on(cfg.grid)?;
    let jobs = [("cat", cat_functional), ("state_to_state", ss_functional)];
    let outputs = pool(cfg.workers)?.install(|| {
        jobs.into_par_iter()
            .map(|(name, functional)| {
                let job = Job {
                    label: name.to_string(),
                    model: cfg.model,
                    guess: guess.clone(),
                    functional,
                    krotov: cfg.krotov,
                    initial: &initial,
                    diss: None,
                    alpha_tgt: None,
                };
                optimize(job, &run_dir(&cfg, name))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut fits = vec![];
    let mut widths = vec![];
    for (out, name) in outputs.iter().zip(["cat", "state_to_state"]) {
        let State::Pure(psi) = &out.state else { unreachable!("coherent runs end in pure states") };
        fits.push(cat_infidelity_pure(psi)?);
        wigner(psi, &cfg.analysis.wigner)?.write(cfg.output_dir.join(format!("wigner_{name}.csv")))?;
        let spec = pulse_spectrum(&out.pulse);
        write_spectrum(&cfg.output_dir, &format!("spectrum_{name}.csv"), &spec)?;
        widths.push(spec.width(cfg.analysis.power_fraction) / kerr.k());
    }
    let [cat, ss]: [_; 2] = outputs.try_into().ok().expect("two runs");
    let report = KerrCompareReport {
        cat: cat.report,
        state_to_state: ss.report,
        cat_fit: fits[0],
        state_to_state_fit: fits[1],
        spectral_width_cat: widths[0],
        spectral_width_state_to_state: widths[1],
        power_fraction: cfg.analysis.power_fraction,
    };
    info!(
        "cat infidelity {:.3e} (cat functional) vs {:.3e} (state to state)",
        report.cat_fit.infidelity, report.state_to_state_fit.infidelity
    );
    finish(&cfg, &report)?;
    Ok(report)
}

/// A spectral peak and the closest dressed-state transition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeakMatch {
    pub omega: f64,
    pub magnitude: f64,
    pub transition: Transition,
    /// `||ω| - ω_transition|`.
    pub distance: f64,
    pub aligned: bool,
}

/// Peaks of the padded spectrum matched against transition frequencies; a
/// peak is aligned when it lies within `tolerance` of one. Both signs of
/// frequency are compared by magnitude.
pub fn match_peaks(spectrum: &Spectrum, rel: f64, transitions: &[Transition], tolerance: f64) -> Vec<PeakMatch> {
    spectrum
        .peaks(rel)
        .into_iter()
        .map(|omega| {
            let i = spectrum.frequencies.iter().position(|&f| f == omega).expect("peak on the axis");
            let best = transitions
                .iter()
                .min_by(|a, b| (omega.abs() - a.frequency).abs().total_cmp(&(omega.abs() - b.frequency).abs()))
                .expect("at least one transition");
            let distance = (omega.abs() - best.frequency).abs();
            PeakMatch {
                omega,
                magnitude: spectrum.magnitudes[i],
                transition: *best,
                distance,
                aligned: distance <= tolerance,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumSummary {
    /// Bin width of the unpadded spectrum, used as the alignment tolerance.
    pub bin_width: f64,
    pub width: f64,
    pub peaks: Vec<PeakMatch>,
    pub all_peaks_aligned: bool,
}

fn spectrum_summary(cfg: &ExperimentConfig, pulse: &ControlPulse, jc: Option<&JcModel>) -> Result<(SpectrumSummary, Spectrum)> {
    let plain = pulse_spectrum(pulse);
    let padded = pulse_spectrum_padded(pulse, cfg.analysis.spectrum_padding);
    let peaks = match jc {
        Some(m) => {
            let levels = cfg.analysis.transition_levels.min(m.space().ho().dim() - 2);
            let transitions = jc_transition_frequencies(m, levels)?;
            match_peaks(&padded, cfg.analysis.peak_threshold, &transitions, plain.bin_width())
        }
        None => vec![],
    };
    Ok((
        SpectrumSummary {
            bin_width: plain.bin_width(),
            width: plain.width(cfg.analysis.power_fraction),
            all_peaks_aligned: !peaks.is_empty() && peaks.iter().all(|p| p.aligned),
            peaks,
        },
        padded,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct JcOptimizeReport {
    pub run: RunReport,
    pub entangled_fit: EntangledCatFit,
    pub spectrum: SpectrumSummary,
    pub transitions: Vec<Transition>,
    pub gabor_sigma: f64,
    /// Frequency of the largest Gabor magnitude at each window position.
    pub ridge: Vec<(f64, f64)>,
    /// Fraction of consecutive ridge points whose `|ω|` does not decrease.
    pub ridge_nondecreasing_fraction: f64,
}

/// Optimization towards the entangled cat set from the configured initial state.
pub fn cmd_jc_optimize(cfg: &ExperimentConfig) -> Result<JcOptimizeReport> {
    let jc = jc_model(cfg)?;
    let mut cfg = cfg.clone();
    let functional = match cfg.functional.clone() {
        Some(f) => f,
        None => entangled_cat_functional(Some(cfg.alpha_tgt))?,
    };
    check_kind(&functional, StateKind::Pure, "functional")?;
    cfg.functional = Some(functional.clone());
    create_dir(&cfg.output_dir)?;
    let initial = initial_state(&cfg.initial, cfg.model.space())?;
    let job = Job {
        label: "jc".into(),
        model: cfg.model,
        guess: cfg.guess_on(cfg.grid)?,
        functional,
        krotov: cfg.krotov,
        initial: &initial,
        diss: None,
        alpha_tgt: Some(radius(cfg.alpha_tgt)?),
    };
    let out = pool(cfg.workers)?.install(|| optimize(job, &run_dir(&cfg, "run")))?;
    let entangled_fit = cat_infidelity_entangled(out.state.as_ref())?;
    let (spectrum, padded) = spectrum_summary(&cfg, &out.pulse, Some(&jc))?;
    write_spectrum(&cfg.output_dir, "spectrum.csv", &padded)?;
    let levels = cfg.analysis.transition_levels.min(jc.space().ho().dim() - 2);
    let transitions = jc_transition_frequencies(&jc, levels)?;
    write_json(&cfg.output_dir.join("transitions.json"), &transitions)?;
    let g = gabor(&out.pulse, &cfg.analysis.gabor)?;
    g.write_csv(cfg.output_dir.join("gabor.csv"))?;
    let ridge_w = g.ridge();
    let rises = ridge_w.windows(2).filter(|w| w[1].abs() >= w[0].abs()).count();
    let report = JcOptimizeReport {
        run: out.report,
        entangled_fit,
        spectrum,
        transitions,
        gabor_sigma: g.sigma,
        ridge: g.taus.iter().copied().zip(ridge_w.iter().copied()).collect(),
        ridge_nondecreasing_fraction: rises as f64 / (ridge_w.len() - 1) as f64,
    };
    info!("entangled-cat infidelity {:.3e}", report.entangled_fit.infidelity);
    finish(&cfg, &report)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QslPoint {
    /// `None` for runs without the radius term.
    pub alpha_tgt: Option<f64>,
    pub duration: f64,
    pub n_steps: usize,
    pub alpha_achieved: f64,
    pub cat_infidelity: f64,
    pub j_total: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QslCurve {
    pub alpha_tgt: f64,
    /// Shortest swept duration from which on every run reaches the target.
    pub t_qsl: Option<f64>,
    /// No decrease larger than the tolerance between consecutive durations.
    pub nondecreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QslReport {
    pub points: Vec<QslPoint>,
    pub curves: Vec<QslCurve>,
    /// Free runs never exceed the best pinned run at the same duration by more than the tolerance.
    pub free_below_pinned: Option<bool>,
}

/// Shortest `durations[i]` such that `|achieved[j] - target| <= tol` for all `j >= i`.
pub fn estimate_qsl(durations: &[f64], achieved: &[f64], target: f64, tol: f64) -> Option<f64> {
    let mut t = None;
    for (d, a) in durations.iter().zip(achieved).rev() {
        if (a - target).abs() > tol {
            break;
        }
        t = Some(*d);
    }
    t
}

pub fn is_nondecreasing(values: &[f64], tol: f64) -> bool {
    values.windows(2).all(|w| w[1] >= w[0] - tol)
}

/// Final radius against pulse duration for each target radius, optionally
/// also without the radius term.
pub fn cmd_qsl_scan(cfg: &ExperimentConfig) -> Result<QslReport> {
    jc_model(cfg)?;
    create_dir(&cfg.output_dir)?;
    let s = &cfg.sweep;
    let dt = s.dt.expect("validated");
    let mut durations = s.durations.clone();
    durations.sort_by(f64::total_cmp);
    let mut jobs: Vec<(Option<f64>, usize)> = vec![];
    for &a in &s.alpha_targets {
        jobs.extend((0..durations.len()).map(|i| (Some(a), i)));
    }
    if s.free_mode {
        jobs.extend((0..durations.len()).map(|i| (None, i)));
    }
    let initial = initial_state(&cfg.initial, cfg.model.space())?;
    let points = pool(cfg.workers)?.install(|| {
        jobs.par_iter()
            .map(|&(alpha, i)| {
                let t = durations[i];
                let grid = TimeGrid::new(t, ((t / dt).round() as usize).max(2))?;
                let name = match alpha {
                    Some(a) => format!("alpha_{a}_T{i}"),
                    None => format!("free_T{i}"),
                };
                let job = Job {
                    label: name.clone(),
                    model: cfg.model,
                    guess: cfg.guess_on(grid)?,
                    functional: entangled_cat_functional(alpha)?,
                    krotov: cfg.krotov,
                    initial: &initial,
                    diss: None,
                    alpha_tgt: alpha.map(radius).transpose()?,
                };
                let out = optimize(job, &run_dir(cfg, &name))?;
                info!("{name}: |alpha| = {:.4}", out.report.final_state.alpha_estimate);
                Ok(QslPoint {
                    alpha_tgt: alpha,
                    duration: t,
                    n_steps: grid.n_steps(),
                    alpha_achieved: out.report.final_state.alpha_estimate,
                    cat_infidelity: out.report.final_state.cat_infidelity.unwrap_or(f64::NAN),
                    j_total: out.report.final_j(),
                    iterations: out.report.records.len(),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let curve_of = |alpha: Option<f64>| -> Vec<f64> {
        points.iter().filter(|p| p.alpha_tgt == alpha).map(|p| p.alpha_achieved).collect()
    };
    let curves = s
        .alpha_targets
        .iter()
        .map(|&a| {
            let achieved = curve_of(Some(a));
            QslCurve {
                alpha_tgt: a,
                t_qsl: estimate_qsl(&durations, &achieved, a, s.saturation_tol),
                nondecreasing: is_nondecreasing(&achieved, s.saturation_tol),
            }
        })
        .collect();
    let free_below_pinned = s.free_mode.then(|| {
        let free = curve_of(None);
        (0..durations.len()).all(|i| {
            let best = s
                .alpha_targets
                .iter()
                .map(|&a| curve_of(Some(a))[i])
                .fold(f64::NEG_INFINITY, f64::max);
            free[i] <= best + s.saturation_tol
        })
    });
    let mut w = csv::Writer::from_path(cfg.output_dir.join("qsl.csv"))?;
    w.write_record(["mode", "alpha_tgt", "T", "n_steps", "alpha_achieved", "cat_infidelity", "J", "iterations"])?;
    for p in &points {
        w.write_record([
            if p.alpha_tgt.is_some() { "pinned" } else { "free" }.to_string(),
            p.alpha_tgt.map_or(String::new(), |a| a.to_string()),
            p.duration.to_string(),
            p.n_steps.to_string(),
            p.alpha_achieved.to_string(),
            p.cat_infidelity.to_string(),
            format!("{:e}", p.j_total),
            p.iterations.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(cfg.output_dir.join("qsl.csv"), e))?;
    let report = QslReport {
        points,
        curves,
        free_below_pinned,
    };
    finish(cfg, &report)?;
    Ok(report)
}

/// Final-state errors under dissipative propagation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissipativeMetrics {
    pub j_total: f64,
    pub j_terms: Vec<(String, f64)>,
    pub purity_error: f64,
    pub cat_infidelity: f64,
    pub radius_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DissipativePoint {
    /// Decay rate in units of `1/t_qsl`.
    pub kappa_scaled: f64,
    pub kappa: f64,
    pub coherent: DissipativeMetrics,
    pub reoptimized: DissipativeMetrics,
    pub run: RunReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DissipativeReport {
    pub coherent_run: RunReport,
    pub t_qsl: f64,
    pub points: Vec<DissipativePoint>,
    /// Coherent-pulse purity error rises with κ, up to 5% relative jitter.
    pub purity_error_monotone: bool,
}

fn metrics(functional: &CompositeFunctional, state: &State, tgt: RadiusTarget) -> Result<DissipativeMetrics> {
    let rho = state.to_density();
    let e = functional.evaluate_dm(rho.matrix(), rho.space())?;
    let a = analyze_state((&rho).into(), Some(tgt))?;
    Ok(DissipativeMetrics {
        j_total: e.total,
        j_terms: e.terms,
        purity_error: a.purity_error,
        cat_infidelity: a.cat_infidelity.unwrap_or(f64::NAN),
        radius_error: a.radius_error.unwrap_or(f64::NAN),
    })
}

/// Coherent optimization, then for each decay rate: evaluate the coherent
/// pulse under dissipation and reoptimize it with the density-matrix functional.
pub fn cmd_dissipative_reoptimize(cfg: &ExperimentConfig) -> Result<DissipativeReport> {
    jc_model(cfg)?;
    let mut cfg = cfg.clone();
    let tgt = radius(cfg.alpha_tgt)?;
    let functional = match cfg.functional.clone() {
        Some(f) => f,
        None => entangled_cat_functional(Some(cfg.alpha_tgt))?,
    };
    let functional_dm = match cfg.functional_dm.clone() {
        Some(f) => f,
        None => entangled_cat_functional_dm(cfg.alpha_tgt)?,
    };
    check_kind(&functional, StateKind::Pure, "functional")?;
    check_kind(&functional_dm, StateKind::Density, "functional_dm")?;
    cfg.functional = Some(functional.clone());
    cfg.functional_dm = Some(functional_dm.clone());
    create_dir(&cfg.output_dir)?;
    let initial = initial_state(&cfg.initial, cfg.model.space())?;
    let t_qsl = cfg.sweep.t_qsl.expect("validated");
    let which = cfg.analysis.observables.clone().unwrap_or_else(|| default_observables(cfg.model.space()));
    let stride = cfg.analysis.observable_stride;
    let pool = pool(cfg.workers)?;
    let coherent = pool.install(|| {
        optimize(
            Job {
                label: "coherent".into(),
                model: cfg.model,
                guess: cfg.guess_on(cfg.grid)?,
                functional,
                krotov: cfg.krotov,
                initial: &initial,
                diss: None,
                alpha_tgt: Some(tgt),
            },
            &run_dir(&cfg, "coherent"),
        )
    })?;
    let points = pool.install(|| {
        cfg.sweep
            .kappas
            .par_iter()
            .enumerate()
            .map(|(i, &k)| {
                let kappa = k / t_qsl;
                let diss = LindbladSpec::oscillator_decay(kappa, cfg.model.space())?;
                let dir = run_dir(&cfg, &format!("kappa_{i}"));
                let before = final_state(&cfg.model, &coherent.pulse, &initial, Some(&diss))?;
                let job = Job {
                    label: format!("kappa_{i}"),
                    model: cfg.model,
                    guess: coherent.pulse.clone(),
                    functional: functional_dm.clone(),
                    krotov: cfg.krotov_dm,
                    initial: &initial,
                    diss: Some(diss.clone()),
                    alpha_tgt: Some(tgt),
                };
                let out = optimize(job, &dir)?;
                for (name, pulse) in [("coherent", &coherent.pulse), ("reoptimized", &out.pulse)] {
                    trajectory_observables(&cfg.model, pulse, &initial, Some(&diss), &which, stride)?
                        .write_csv(dir.join(format!("observables_{name}.csv")))?;
                }
                let point = DissipativePoint {
                    kappa_scaled: k,
                    kappa,
                    coherent: metrics(&functional_dm, &before, tgt)?,
                    reoptimized: metrics(&functional_dm, &out.state, tgt)?,
                    run: out.report,
                };
                info!(
                    "kappa {k}: J {:.4e} -> {:.4e}, purity error {:.4e} -> {:.4e}",
                    point.coherent.j_total, point.reoptimized.j_total, point.coherent.purity_error, point.reoptimized.purity_error
                );
                Ok(point)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut order: Vec<&DissipativePoint> = points.iter().collect();
    order.sort_by(|a, b| a.kappa.total_cmp(&b.kappa));
    let purity_error_monotone = order
        .windows(2)
        .all(|w| w[1].coherent.purity_error >= 0.95 * w[0].coherent.purity_error);
    let path = cfg.output_dir.join("dissipative.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record([
        "kappa_scaled",
        "kappa",
        "J_coherent",
        "J_reoptimized",
        "purity_error_coherent",
        "purity_error_reoptimized",
        "cat_infidelity_coherent",
        "cat_infidelity_reoptimized",
        "radius_error_coherent",
        "radius_error_reoptimized",
    ])?;
    for p in &points {
        let (c, r) = (&p.coherent, &p.reoptimized);
        w.write_record(
            [
                p.kappa_scaled,
                p.kappa,
                c.j_total,
                r.j_total,
                c.purity_error,
                r.purity_error,
                c.cat_infidelity,
                r.cat_infidelity,
                c.radius_error,
                r.radius_error,
            ]
            .map(|x| format!("{x:e}")),
        )?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    let report = DissipativeReport {
        coherent_run: coherent.report,
        t_qsl,
        points,
        purity_error_monotone,
    };
    finish(&cfg, &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropagateReport {
    pub pulse: PathBuf,
    pub kappa: Option<f64>,
    pub final_state: StateAnalysis,
    /// Value of the configured functional at the final state, if one is set.
    pub functional_value: Option<f64>,
}

fn functional_value(cfg: &ExperimentConfig, state: &State) -> Result<Option<f64>> {
    let f = match state {
        State::Pure(_) => cfg.functional.as_ref(),
        State::Mixed(_) => cfg.functional_dm.as_ref(),
    };
    f.map(|f| f.value(state.as_ref())).transpose()
}

/// Propagates a stored pulse from the configured initial state; writes the
/// final state and its observables.
pub fn cmd_propagate(cfg: &ExperimentConfig) -> Result<PropagateReport> {
    let pulse_path = cfg.inputs.pulse.clone().ok_or_else(|| Error::Config("propagate needs inputs.pulse".into()))?;
    let (pulse, _) = ControlPulse::read_csv(&pulse_path)?;
    create_dir(&cfg.output_dir)?;
    let space = cfg.model.space();
    let initial = initial_state(&cfg.initial, space)?;
    let diss = match cfg.inputs.kappa {
        Some(k) if k > 0.0 => Some(LindbladSpec::oscillator_decay(k, space)?),
        _ => None,
    };
    let state = final_state(&cfg.model, &pulse, &initial, diss.as_ref())?;
    let which = cfg.analysis.observables.clone().unwrap_or_else(|| default_observables(space));
    trajectory_observables(&cfg.model, &pulse, &initial, diss.as_ref(), &which, cfg.analysis.observable_stride)?
        .write_csv(cfg.output_dir.join("observables.csv"))?;
    write_json(&cfg.output_dir.join("final_state.json"), &state)?;
    let tgt = radius(cfg.alpha_tgt)?;
    let report = PropagateReport {
        pulse: pulse_path,
        kappa: diss.as_ref().map(|d| d.kappa()),
        final_state: analyze_state(state.as_ref(), Some(tgt))?,
        functional_value: functional_value(cfg, &state)?,
    };
    finish(cfg, &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub state: StateAnalysis,
    pub cat_fit: Option<CatFit>,
    pub entangled_fit: Option<EntangledCatFit>,
    pub spectrum: Option<SpectrumSummary>,
}

/// Cat-state analysis of a stored state, plus spectra of an optional stored pulse.
pub fn cmd_analyze(cfg: &ExperimentConfig) -> Result<AnalyzeReport> {
    let path = cfg.inputs.state.clone().ok_or_else(|| Error::Config("analyze needs inputs.state".into()))?;
    let state: State = read_json(&path)?;
    create_dir(&cfg.output_dir)?;
    let space = state.space();
    let (cat_fit, entangled_fit) = match (&state, space) {
        (State::Pure(s), Space::Fock(_)) => (Some(cat_infidelity_pure(s)?), None),
        (_, Space::Composite(_)) => (None, Some(cat_infidelity_entangled(state.as_ref())?)),
        _ => (None, None),
    };
    if space.ho().is_some() {
        wigner(state.as_ref(), &cfg.analysis.wigner)?.write(cfg.output_dir.join("wigner.csv"))?;
    }
    let spectrum = match &cfg.inputs.pulse {
        Some(p) => {
            let (pulse, _) = ControlPulse::read_csv(p)?;
            let jc = match cfg.model {
                Model::JaynesCummings(m) => Some(m),
                _ => None,
            };
            let (summary, padded) = spectrum_summary(cfg, &pulse, jc.as_ref())?;
            write_spectrum(&cfg.output_dir, "spectrum.csv", &padded)?;
            gabor(&pulse, &cfg.analysis.gabor)?.write_csv(cfg.output_dir.join("gabor.csv"))?;
            Some(summary)
        }
        None => None,
    };
    let report = AnalyzeReport {
        state: analyze_state(state.as_ref(), Some(radius(cfg.alpha_tgt)?))?,
        cat_fit,
        entangled_fit,
        spectrum,
    };
    finish(cfg, &report)?;
    Ok(report)
}

/// Runs the configured experiment and returns its results as JSON.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<serde_json::Value> {
    Ok(match cfg.experiment {
        Command::KerrCompare => serde_json::to_value(cmd_kerr_compare(cfg)?)?,
        Command::JcOptimize => serde_json::to_value(cmd_jc_optimize(cfg)?)?,
        Command::QslScan => serde_json::to_value(cmd_qsl_scan(cfg)?)?,
        Command::DissipativeReoptimize => serde_json::to_value(cmd_dissipative_reoptimize(cfg)?)?,
        Command::Propagate => serde_json::to_value(cmd_propagate(cfg)?)?,
        Command::Analyze => serde_json::to_value(cmd_analyze(cfg)?)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qsl_estimate_and_trend() {
        let d = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(estimate_qsl(&d, &[0.5, 0.97, 1.01, 0.99], 1.0, 0.05), Some(2.0));
        assert_eq!(estimate_qsl(&d, &[0.5, 0.97, 0.9, 0.99], 1.0, 0.05), Some(4.0));
        assert_eq!(estimate_qsl(&d, &[0.5, 0.97, 1.0, 0.8], 1.0, 0.05), None);
        assert!(is_nondecreasing(&[0.5, 0.97, 0.95, 1.0], 0.05));
        assert!(!is_nondecreasing(&[0.5, 0.97, 0.9], 0.05));
    }

    #[test]
    fn peaks_are_matched_by_magnitude() {
        let spectrum = Spectrum {
            frequencies: vec![-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5],
            magnitudes: vec![0.0, 1.0, 0.1, 0.0, 0.0, 0.0, 0.6, 0.0],
        };
        let t = |f| Transition { frequency: f, kind: crate::models::TransitionKind::Ground, n: 0 };
        let m = match_peaks(&spectrum, 0.2, &[t(1.0), t(1.4)], 0.2);
        assert_eq!(m.len(), 2);
        assert_eq!((m[0].omega, m[0].transition.frequency), (-1.5, 1.4));
        assert!(m[0].aligned && m[1].aligned && m[1].distance == 0.0);
    }
}
