//! Configuration-driven experiments: presets, sweeps over durations and decay
//! rates, and the files each run leaves behind.
//!
//! Every command writes `config.json` (the effective configuration, defaults
//! included) and `report.json` into its output directory, and one
//! subdirectory per optimization holding `run.json`, `iterations.csv`,
//! `pulse.csv` with its `pulse.json` sidecar, and `final_state.json`.

mod commands;
mod config;
mod runs;

pub use commands::{
    cmd_analyze, cmd_dissipative_reoptimize, cmd_jc_optimize, cmd_kerr_compare, cmd_propagate, cmd_qsl_scan,
    entangled_cat_functional, entangled_cat_functional_dm, estimate_qsl, is_nondecreasing, match_peaks, run_experiment,
    AnalyzeReport, DissipativeMetrics, DissipativePoint, DissipativeReport, JcOptimizeReport, KerrCompareReport,
    Metadata, PeakMatch, PropagateReport, QslCurve, QslPoint, QslReport, SpectrumSummary,
};
pub use config::{merge, preset, AnalysisSettings, Command, ExperimentConfig, InitialState, Inputs, Overrides, Sweep};
pub use runs::{analyze_state, default_observables, initial_state, RunReport, StateAnalysis};
