//! Partial traces and purity/entropy measures.

use super::space::Space;
use super::state::{hermitian_eigenvalues, DensityMatrix};
use super::{CMatrix, CVector, C64};
use crate::error::{Error, Result};

/// Eigenvalues below this contribute nothing to the von Neumann entropy.
pub const EIGENVALUE_FLOOR: f64 = 1e-14;

/// Which factor survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    Qubit,
    Oscillator,
}

/// `Tr_qubit ρ` on raw qubit-first matrices.
pub(crate) fn trace_out_qubit(m: &CMatrix, ho_dim: usize) -> CMatrix {
    CMatrix::from_fn(ho_dim, ho_dim, |n, k| m[(n, k)] + m[(ho_dim + n, ho_dim + k)])
}

/// `Tr_HO ρ` on raw qubit-first matrices.
pub(crate) fn trace_out_ho(m: &CMatrix, ho_dim: usize) -> CMatrix {
    CMatrix::from_fn(2, 2, |p, q| {
        (0..ho_dim).map(|n| m[(p * ho_dim + n, q * ho_dim + n)]).sum()
    })
}

/// Oscillator reduced matrix of the (possibly unnormalized) pure state `amps`.
pub(crate) fn reduced_ho_pure(amps: &CVector, ho_dim: usize) -> CMatrix {
    CMatrix::from_fn(ho_dim, ho_dim, |n, k| {
        amps[n] * amps[k].conj() + amps[ho_dim + n] * amps[ho_dim + k].conj()
    })
}

pub fn partial_trace(rho: &DensityMatrix, keep: Keep) -> Result<DensityMatrix> {
    let Space::Composite(c) = rho.space() else {
        return Err(Error::Space(format!(
            "partial trace needs a composite space, got {:?}",
            rho.space()
        )));
    };
    let d = c.ho().dim();
    Ok(match keep {
        Keep::Oscillator => {
            DensityMatrix::new_unchecked(Space::Fock(c.ho()), trace_out_qubit(rho.matrix(), d))
        }
        Keep::Qubit => DensityMatrix::new_unchecked(Space::Qubit, trace_out_ho(rho.matrix(), d)),
    })
}

/// `Tr(M²)` for any square matrix (real part).
pub(crate) fn purity_raw(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += m[(i, j)] * m[(j, i)];
        }
    }
    acc.re
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    purity_raw(rho.matrix())
}

/// `1 - Tr ρ²`.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    1.0 - purity(rho)
}

pub(crate) fn von_neumann_raw(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m)
        .into_iter()
        .filter(|&l| l > EIGENVALUE_FLOOR)
        .map(|l| -l * l.ln())
        .sum()
}

/// `-Σ λ ln λ`, skipping eigenvalues below [`EIGENVALUE_FLOOR`].
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    von_neumann_raw(rho.matrix())
}

/// `S(ρ_HO) + S(ρ_qubit) - S(ρ)`.
pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    let ho = partial_trace(rho, Keep::Oscillator)?;
    let q = partial_trace(rho, Keep::Qubit)?;
    Ok(von_neumann_entropy(&ho) + von_neumann_entropy(&q) - von_neumann_entropy(rho))
}
