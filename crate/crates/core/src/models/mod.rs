//! Physical models, time grids and control pulses.

mod grid;
mod hamiltonians;
mod lindblad;

pub use grid::{ControlPulse, TimeGrid};
pub use hamiltonians::{
    control_derivative, excitation_number, jc_dressed_states, jc_hamiltonian,
    jc_transition_frequencies, kerr_hamiltonian, ControlModel, DressedPair, JcModel, KerrModel,
    Model, Quadrature, Transition, TransitionKind,
};
pub use lindblad::{adjoint_liouvillian_apply, liouvillian_apply, LindbladSpec};
