//! Truncated-Fock-space linear algebra: spaces, states, operators, reference
//! states and reduced-state measures.
//!
//! Composite spaces are always ordered qubit ⊗ oscillator.

mod operators;
mod reduced;
mod reference;
mod space;
mod state;

use nalgebra::{DMatrix, DVector};

pub type C64 = num_complex::Complex64;
pub type CVector = DVector<C64>;
pub type CMatrix = DMatrix<C64>;

pub use operators::{
    annihilation_op, creation_op, embed_ho_op, embed_qubit_op, expectation, hs_inner, kron,
    number_op, parity_projectors, sigma_minus, sigma_plus, sigma_x, sigma_y, sigma_z,
    trace_product, OperatorMatrix,
};
pub use reduced::{
    linear_entropy, mutual_information, partial_trace, purity, von_neumann_entropy, Keep,
    EIGENVALUE_FLOOR,
};
pub(crate) use reduced::{purity_raw, reduced_ho_pure, trace_out_ho, trace_out_qubit};
pub use reference::{
    cat_state, coherent_amplitudes, coherent_state, entangled_cat_state, CatStateSpec, QubitBasis,
    TAIL_WEIGHT_TOL,
};
pub use space::{CompositeSpace, FockSpace, Space};
pub use state::{
    hermiticity_defect, hermitian_eigenvalues, DensityMatrix, State, StateRef, StateVector,
};

/// Shorthand for a real complex number.
#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}
