//! Vacuum Rabi oscillation and free decay of a Kerr oscillator.

use catoptron::analysis::{observables_timeseries, Observable};
use catoptron::dynamics::{propagate_density, propagate_state};
use catoptron::models::{ControlPulse, JcModel, KerrModel, LindbladSpec, Model, TimeGrid};
use catoptron::quantum::{CompositeSpace, FockSpace, StateVector};

fn main() -> catoptron::Result<()> {
    let space = CompositeSpace::new(10)?;
    let model = Model::JaynesCummings(JcModel::new(1.0, space)?).control_model();
    // |1⟩ ⊗ |0⟩, the excited qubit with an empty oscillator
    let excited = StateVector::basis(space.into(), space.index(1, 0))?;
    let grid = TimeGrid::new(std::f64::consts::PI, 200)?;
    let pulse = ControlPulse::zeros(grid);

    let traj = propagate_state(&model, &pulse, &excited, true)?;
    let table = observables_timeseries(&traj, &[Observable::QubitExcitation, Observable::OscillatorExcitation])?;
    for (t, row) in table.times.iter().zip(&table.rows).step_by(25) {
        println!("t = {t:.3}  <sz> = {:+.4}  <n> = {:.4}", row[0], row[1]);
    }

    // The Kerr drift conserves the photon number, so only the decay changes ⟨n⟩.
    let fock = FockSpace::new(10)?;
    let kerr = Model::Kerr(KerrModel::new(1.0, fock)?).control_model();
    let three = StateVector::basis(fock.into(), 3)?;
    let diss = LindbladSpec::oscillator_decay(0.2, fock.into())?;
    let traj = propagate_density(&kerr, &diss, &pulse, &three.to_density(), true)?;
    let table = observables_timeseries(&traj, &[Observable::OscillatorExcitation, Observable::Purity])?;
    let last = table.rows.last().expect("stored trajectory");
    println!(
        "decay: <n>(T) = {:.6} (3 exp(-kappa T) = {:.6}), purity {:.4}",
        last[0],
        3.0 * (-0.2 * grid.duration()).exp(),
        last[1]
    );
    Ok(())
}
