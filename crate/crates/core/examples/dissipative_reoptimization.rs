//! Optimizes coherently, then reoptimizes the pulse under oscillator decay with
//! the density-matrix functional.

use catoptron::analysis::cat_infidelity_entangled;
use catoptron::dynamics::propagate_density;
use catoptron::experiments::{entangled_cat_functional, entangled_cat_functional_dm};
use catoptron::krotov::{run_optimization, GuessPulse, Initial, KrotovConfig, LineSearch, PhaseModulation, ShapeFunction};
use catoptron::models::{JcModel, LindbladSpec, Model, TimeGrid};
use catoptron::quantum::{purity, CompositeSpace, StateVector};

fn main() -> catoptron::Result<()> {
    let space = CompositeSpace::new(15)?;
    let model = Model::JaynesCummings(JcModel::new(1.0, space)?).control_model();
    let psi0 = StateVector::basis(space.into(), 0)?;
    let rho0 = psi0.to_density();
    let shape = ShapeFunction::sine_squared(0.1)?;
    let grid = TimeGrid::new(2.4 * std::f64::consts::PI, 360)?;
    let modulation = Some(PhaseModulation { harmonics: 3, depth: 1.0, seed: 11 });
    let guess = GuessPulse { amplitude: 0.3, phase: 0.0, shape, modulation }.build(grid)?;
    let config = KrotovConfig { lambda_a: 1.0, shape, max_iters: 80, j_tol: 1e-6, dj_tol: 0.0, line_search: LineSearch::default() };
    let coherent = run_optimization(&model, &guess, &entangled_cat_functional(Some(1.0))?, Initial::Pure(&psi0), &config)?;

    let diss = LindbladSpec::oscillator_decay(0.05, space.into())?;
    let dm = entangled_cat_functional_dm(1.0)?;
    let before = propagate_density(&model, &diss, &coherent.pulse, &rho0, false)?.into_final_state();
    let reopt = run_optimization(&model, &coherent.pulse, &dm, Initial::Density(&rho0, &diss), &KrotovConfig { max_iters: 10, ..config })?;
    let after = propagate_density(&model, &diss, &reopt.pulse, &rho0, false)?.into_final_state();
    for (name, rho) in [("coherent pulse", &before), ("reoptimized", &after)] {
        println!(
            "{name:>15}: J = {:.4e}, purity error {:.4e}, cat infidelity {:.4e}",
            dm.value(rho)?,
            1.0 - purity(rho),
            cat_infidelity_entangled(rho)?.infidelity
        );
    }
    Ok(())
}
