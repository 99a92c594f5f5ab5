//! Drives a Kerr resonator from (|0⟩+|1⟩)/√2 towards the set of cat states
//! and writes the Wigner map of the result.

use catoptron::analysis::{cat_infidelity_pure, pulse_spectrum, wigner, PhaseSpaceGrid};
use catoptron::functionals::{CompositeFunctional, FunctionalTerm};
use catoptron::krotov::{run_optimization, GuessPulse, Initial, KrotovConfig, LineSearch, ShapeFunction};
use catoptron::models::{KerrModel, Model, TimeGrid};
use catoptron::quantum::{CVector, FockSpace, StateVector, C64};

fn main() -> catoptron::Result<()> {
    let fock = FockSpace::new(20)?;
    let model = Model::Kerr(KerrModel::new(1.0, fock)?);
    let mut amps = CVector::zeros(20);
    amps[0] = C64::new(1.0, 0.0);
    amps[1] = C64::new(1.0, 0.0);
    let psi0 = StateVector::normalized(fock.into(), amps)?;

    let shape = ShapeFunction::sine_squared(0.1)?;
    let guess = GuessPulse { amplitude: 1.0, phase: 0.0, shape, modulation: None }.build(TimeGrid::new(3.0, 600)?)?;
    let functional = CompositeFunctional::of([FunctionalTerm::CoherentVariance { normalized: true }, FunctionalTerm::CatPhase])?;
    let config = KrotovConfig { lambda_a: 1.0, shape, max_iters: 60, j_tol: 1e-6, dj_tol: 0.0, line_search: LineSearch::default() };

    let run = run_optimization(&model.control_model(), &guess, &functional, Initial::Pure(&psi0), &config)?;
    let psi = catoptron::dynamics::propagate_state(&model.control_model(), &run.pulse, &psi0, false)?.into_final_state();
    let fit = cat_infidelity_pure(&psi)?;
    println!(
        "J: {:.3e} -> {:.3e} after {} iterations; cat infidelity {:.3e} at alpha = {:.3}",
        run.initial.j_total,
        run.final_record().j_total,
        run.iterations(),
        fit.infidelity,
        fit.spec.alpha
    );
    println!("99% power width: {:.1} K", pulse_spectrum(&run.pulse).width(0.99));

    let out = std::env::temp_dir().join("kerr_cat_wigner.csv");
    wigner(&psi, &PhaseSpaceGrid::square(5.0, 81)?)?.write(&out)?;
    println!("Wigner map written to {}", out.display());
    Ok(())
}
