//! Post-processing: Wigner maps, spectra, Gabor transforms, cat-set
//! infidelities and observable time series.

mod fidelity;
mod observables;
mod simplex;
mod spectrum;
mod wigner;

pub use fidelity::{cat_infidelity_entangled, cat_infidelity_pure, pure_target_fidelity, CatFit, EntangledCatFit};
pub use observables::{
    bloch_coords, observables_timeseries, qubit_state, radius_error, Observable, ObservableTable,
};
pub use simplex::{nelder_mead, Minimum, SimplexOptions};
pub use spectrum::{gabor, pulse_spectrum, pulse_spectrum_padded, GaborConfig, GaborMap, Spectrum};
pub use wigner::{oscillator_density, wigner, wigner_point, PhaseSpaceGrid, WignerMap};
