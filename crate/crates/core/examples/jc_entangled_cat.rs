//! Jaynes–Cummings optimization from the ground state towards entangled cat
//! states of radius 1, with the spectral peaks of the optimized pulse.

use catoptron::analysis::{cat_infidelity_entangled, pulse_spectrum, pulse_spectrum_padded};
use catoptron::dynamics::propagate_state;
use catoptron::experiments::{entangled_cat_functional, match_peaks};
use catoptron::krotov::{run_optimization, GuessPulse, Initial, KrotovConfig, LineSearch, PhaseModulation, ShapeFunction};
use catoptron::models::{jc_transition_frequencies, JcModel, Model, TimeGrid};
use catoptron::quantum::{CompositeSpace, StateVector};

fn main() -> catoptron::Result<()> {
    let space = CompositeSpace::new(30)?;
    let jc = JcModel::new(1.0, space)?;
    let model = Model::JaynesCummings(jc).control_model();
    let psi0 = StateVector::basis(space.into(), 0)?;
    let shape = ShapeFunction::sine_squared(0.1)?;
    let grid = TimeGrid::new(2.4 * std::f64::consts::PI, 480)?;
    let modulation = Some(PhaseModulation { harmonics: 3, depth: 1.0, seed: 11 });
    let guess = GuessPulse { amplitude: 0.3, phase: 0.0, shape, modulation }.build(grid)?;
    let config = KrotovConfig { lambda_a: 1.0, shape, max_iters: 150, j_tol: 1e-6, dj_tol: 0.0, line_search: LineSearch::default() };

    let run = run_optimization(&model, &guess, &entangled_cat_functional(Some(1.0))?, Initial::Pure(&psi0), &config)?;
    let psi = propagate_state(&model, &run.pulse, &psi0, false)?.into_final_state();
    let fit = cat_infidelity_entangled(&psi)?;
    println!("entangled-cat infidelity {:.3e}, |alpha| = {:.3}", fit.infidelity, fit.alpha.norm());

    let bin = pulse_spectrum(&run.pulse).bin_width();
    let transitions = jc_transition_frequencies(&jc, 12)?;
    for p in match_peaks(&pulse_spectrum_padded(&run.pulse, 8), 0.2, &transitions, bin) {
        println!(
            "peak at {:+.3} g  nearest transition {:.3} g ({:?}, n = {})  aligned: {}",
            p.omega, p.transition.frequency, p.transition.kind, p.transition.n, p.aligned
        );
    }
    Ok(())
}
