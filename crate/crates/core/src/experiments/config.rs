use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{GaborConfig, Observable, PhaseSpaceGrid};
use crate::error::{Error, Result};
use crate::functionals::CompositeFunctional;
use crate::krotov::{GuessPulse, KrotovConfig};
use crate::models::{Model, TimeGrid};

const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    KerrCompare,
    JcOptimize,
    QslScan,
    DissipativeReoptimize,
    Propagate,
    Analyze,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::KerrCompare,
        Command::JcOptimize,
        Command::QslScan,
        Command::DissipativeReoptimize,
        Command::Propagate,
        Command::Analyze,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::KerrCompare => "kerr-compare",
            Command::JcOptimize => "jc-optimize",
            Command::QslScan => "qsl-scan",
            Command::DissipativeReoptimize => "dissipative-reoptimize",
            Command::Propagate => "propagate",
            Command::Analyze => "analyze",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }
}

/// Initial state of the dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    /// Basis vector; index 0 is the vacuum (`|0⟩ ⊗ |0⟩` on composite spaces).
    Basis { index: usize },
    /// Equal-weight superposition of basis vectors.
    Superposition { levels: Vec<usize> },
    /// Pure or mixed state stored as JSON.
    File { path: PathBuf },
}

/// Sweep values; which lists are used depends on the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    /// Pulse durations, in the model's time unit.
    #[serde(default)]
    pub durations: Vec<f64>,
    /// Target radii `|α_tgt|`.
    #[serde(default)]
    pub alpha_targets: Vec<f64>,
    /// Time step used to size the grid of each swept duration.
    #[serde(default)]
    pub dt: Option<f64>,
    /// Also run without the radius term.
    #[serde(default)]
    pub free_mode: bool,
    /// Largest `||α| - |α_tgt||` counted as reaching the target.
    #[serde(default = "default_saturation_tol")]
    pub saturation_tol: f64,
    /// Decay rates in units of `1/t_qsl`.
    #[serde(default)]
    pub kappas: Vec<f64>,
    /// Reference duration for `kappas`.
    #[serde(default)]
    pub t_qsl: Option<f64>,
}

fn default_saturation_tol() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSettings {
    pub wigner: PhaseSpaceGrid,
    #[serde(default)]
    pub gabor: GaborConfig,
    /// Zero-padding factor for peak location.
    #[serde(default = "default_padding")]
    pub spectrum_padding: usize,
    /// Peaks below this fraction of the maximum are ignored.
    #[serde(default = "default_peak_threshold")]
    pub peak_threshold: f64,
    /// Highest manifold used for transition markers.
    #[serde(default = "default_transition_levels")]
    pub transition_levels: usize,
    /// Power fraction defining the spectral width.
    #[serde(default = "default_power_fraction")]
    pub power_fraction: f64,
    /// Observables for trajectories; `null` picks a default for the space.
    #[serde(default)]
    pub observables: Option<Vec<Observable>>,
    /// Keep every n-th time step of stored trajectories.
    #[serde(default = "default_stride")]
    pub observable_stride: usize,
}

fn default_padding() -> usize {
    8
}
fn default_peak_threshold() -> f64 {
    0.2
}
fn default_transition_levels() -> usize {
    12
}
fn default_power_fraction() -> f64 {
    0.99
}
fn default_stride() -> usize {
    5
}

/// Files and rates used by `propagate` and `analyze`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    #[serde(default)]
    pub pulse: Option<PathBuf>,
    #[serde(default)]
    pub state: Option<PathBuf>,
    /// Oscillator decay rate; absent or zero means coherent dynamics.
    #[serde(default)]
    pub kappa: Option<f64>,
}

/// A fully resolved experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Command,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub workers: usize,
    pub model: Model,
    pub grid: TimeGrid,
    pub initial: InitialState,
    pub guess: GuessPulse,
    pub krotov: KrotovConfig,
    /// Settings for density-matrix reoptimization.
    pub krotov_dm: KrotovConfig,
    /// Target radius used by radius terms and the state-to-state target.
    pub alpha_tgt: f64,
    /// Pure-state functional; `null` selects the experiment's default.
    pub functional: Option<CompositeFunctional>,
    /// Density-matrix functional; `null` selects the default.
    pub functional_dm: Option<CompositeFunctional>,
    pub sweep: Sweep,
    pub analysis: AnalysisSettings,
    #[serde(default)]
    pub inputs: Inputs,
}

fn kerr_model(dim: usize) -> Value {
    json!({"kind": "kerr", "k": 1.0, "dim": dim})
}

fn jc_model(dim: usize) -> Value {
    json!({"kind": "jaynes_cummings", "g": 1.0, "ho_dim": dim})
}

fn krotov(lambda: f64, iters: usize) -> Value {
    json!({
        "lambda_a": lambda,
        "shape": {"flank_fraction": 0.1},
        "max_iters": iters,
        "j_tol": 1e-6,
        "dj_tol": 0.0,
        "line_search": {"kind": "backtracking", "factor": 2.0, "max_trials": 12}
    })
}

fn modulated_guess(amplitude: f64) -> Value {
    json!({
        "amplitude": amplitude,
        "phase": 0.0,
        "shape": {"flank_fraction": 0.1},
        "modulation": {"harmonics": 3, "depth": 1.0, "seed": 11}
    })
}

/// Default configuration of an experiment, as JSON.
pub fn preset(cmd: Command) -> Value {
    let mut base = json!({
        "experiment": cmd.name(),
        "seed": 11,
        "output_dir": format!("runs/{}", cmd.name()),
        "workers": 1,
        "model": jc_model(30),
        "grid": {"duration": 2.4 * PI, "n_steps": 480},
        "initial": {"kind": "basis", "index": 0},
        "guess": modulated_guess(0.3),
        "krotov": krotov(1.0, 150),
        "krotov_dm": krotov(1.0, 20),
        "alpha_tgt": 1.0,
        "functional": null,
        "functional_dm": null,
        "sweep": {},
        "analysis": {
            "wigner": {"x_range": [-5.0, 5.0], "p_range": [-5.0, 5.0], "n_x": 101, "n_p": 101},
            "gabor": {"sigma": null, "n_tau": 64, "n_omega": 4096}
        },
        "inputs": {}
    });
    let qsl_durations = [0.4, 0.7, 1.0, 1.3, 1.7, 2.2].map(|x: f64| x * PI);
    let patch = match cmd {
        Command::KerrCompare => json!({
            "model": kerr_model(20),
            "grid": {"duration": 3.0, "n_steps": 600},
            "initial": {"kind": "superposition", "levels": [0, 1]},
            "guess": {
                "amplitude": 1.0,
                "phase": 0.0,
                "shape": {"flank_fraction": 0.1},
                "modulation": null
            },
            "krotov": krotov(1.0, 200),
            "alpha_tgt": 1.5
        }),
        Command::JcOptimize => json!({}),
        Command::QslScan => json!({
            "sweep": {
                "durations": qsl_durations,
                "alpha_targets": [1.0, 1.5],
                "dt": PI / 200.0,
                "free_mode": true,
                "saturation_tol": 0.05
            }
        }),
        Command::DissipativeReoptimize => json!({
            "model": jc_model(20),
            "grid": {"duration": 3.5 * PI, "n_steps": 700},
            "krotov": krotov(1.0, 200),
            "alpha_tgt": 1.5,
            "sweep": {"kappas": [0.01, 0.03, 0.1, 0.3], "t_qsl": 1.3 * PI}
        }),
        Command::Propagate | Command::Analyze => json!({}),
    };
    merge(&mut base, patch);
    base
}

/// Recursively overlays `patch` on `base`; objects merge key by key, anything
/// else replaces. An object whose `kind` differs from the base's replaces it whole.
pub fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) if p.get("kind").is_none_or(|k| b.get("kind") == Some(k)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, p) => *b = p,
    }
}

/// Command-line overrides applied after the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    /// The preset of `cmd` with `patch` overlaid and validated.
    pub fn from_value(cmd: Command, patch: Value, overrides: &Overrides) -> Result<Self> {
        if !patch.is_object() {
            return Err(Error::Config("configuration must be a JSON object".into()));
        }
        if let Some(e) = patch.get("experiment") {
            let named: Command = e
                .as_str()
                .ok_or_else(|| Error::Config("'experiment' must be a string".into()))?
                .parse()?;
            if named != cmd {
                return Err(Error::Config(format!("configuration is for {named}, not {cmd}")));
            }
        }
        let mut v = preset(cmd);
        merge(&mut v, patch);
        let mut cfg: ExperimentConfig =
            serde_json::from_value(v).map_err(|e| Error::Config(format!("invalid configuration: {e}")))?;
        if let Some(s) = overrides.seed {
            cfg.seed = s;
        }
        if let Some(o) = &overrides.output_dir {
            cfg.output_dir = o.clone();
        }
        if let Some(w) = overrides.workers {
            cfg.workers = w;
        }
        if let Some(m) = cfg.guess.modulation.as_mut() {
            m.seed = cfg.seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a JSON file and resolves it against the preset of `cmd`.
    pub fn load(cmd: Command, path: impl AsRef<Path>, overrides: &Overrides) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_value(cmd, v, overrides)
    }

    /// The preset of `cmd` unchanged.
    pub fn preset(cmd: Command) -> Result<Self> {
        Self::from_value(cmd, json!({}), &Overrides::default())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        self.krotov.validate()?;
        self.krotov_dm.validate()?;
        self.analysis.wigner.validate()?;
        if !(self.alpha_tgt.is_finite() && self.alpha_tgt > 0.0) {
            return bad(format!("alpha_tgt must be positive, got {}", self.alpha_tgt));
        }
        if self.analysis.spectrum_padding == 0 || self.analysis.observable_stride == 0 {
            return bad("spectrum_padding and observable_stride must be at least 1".into());
        }
        if !(self.analysis.power_fraction > 0.0 && self.analysis.power_fraction <= 1.0) {
            return bad("power_fraction must lie in (0, 1]".into());
        }
        let jc = matches!(self.model, Model::JaynesCummings(_));
        match self.experiment {
            Command::KerrCompare if !matches!(self.model, Model::Kerr(_)) => {
                return bad("kerr-compare needs a Kerr model".into());
            }
            Command::JcOptimize | Command::QslScan | Command::DissipativeReoptimize if !jc => {
                return bad(format!("{} needs a Jaynes-Cummings model", self.experiment));
            }
            _ => {}
        }
        let s = &self.sweep;
        match self.experiment {
            Command::QslScan => {
                if s.durations.is_empty() || s.alpha_targets.is_empty() {
                    return bad("qsl-scan needs nonempty sweep.durations and sweep.alpha_targets".into());
                }
                if s.durations.iter().chain(&s.alpha_targets).any(|x| !(x.is_finite() && *x > 0.0)) {
                    return bad("swept durations and radii must be positive".into());
                }
                if !s.dt.is_some_and(|dt| dt > 0.0) {
                    return bad("qsl-scan needs a positive sweep.dt".into());
                }
                if self.functional.is_some() {
                    return bad("qsl-scan builds its functionals from sweep.alpha_targets".into());
                }
            }
            Command::DissipativeReoptimize => {
                if s.kappas.is_empty() {
                    return bad("dissipative-reoptimize needs a nonempty sweep.kappas".into());
                }
                if s.kappas.iter().any(|k| !(k.is_finite() && *k >= 0.0)) {
                    return bad("swept decay rates must be nonnegative".into());
                }
                if !s.t_qsl.is_some_and(|t| t > 0.0) {
                    return bad("dissipative-reoptimize needs a positive sweep.t_qsl".into());
                }
            }
            Command::Propagate => match &self.inputs.pulse {
                None => return bad("propagate needs inputs.pulse".into()),
                Some(p) => require_file(p)?,
            },
            Command::Analyze => {
                match &self.inputs.state {
                    None => return bad("analyze needs inputs.state".into()),
                    Some(p) => require_file(p)?,
                }
                if let Some(p) = &self.inputs.pulse {
                    require_file(p)?;
                }
            }
            _ => {}
        }
        if let Some(k) = self.inputs.kappa {
            if !(k.is_finite() && k >= 0.0) {
                return bad(format!("inputs.kappa must be nonnegative, got {k}"));
            }
        }
        if let InitialState::File { path } = &self.initial {
            require_file(path)?;
        }
        Ok(())
    }

    /// Guess pulse on `grid` with this configuration's seed.
    pub fn guess_on(&self, grid: TimeGrid) -> Result<crate::models::ControlPulse> {
        self.guess.build(grid)
    }
}

fn require_file(p: &Path) -> Result<()> {
    if !p.is_file() {
        return Err(Error::Config(format!("file not found: {}", p.display())));
    }
    Ok(())
}
