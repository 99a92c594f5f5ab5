//! Density-matrix terms. Gradients are Hermitian matrices `∇` with
//! `δJ = 2 Re Tr(∇ δρ)`, so that `∇ψ` equals half the pure-state gradient on
//! `ρ = |ψ⟩⟨ψ|`.

use super::ops::{re, OscOps};
use super::pure::radius_cost;
use super::DENOMINATOR_FLOOR;
use crate::error::{Error, Result};
use crate::quantum::{kron, purity_raw, trace_out_ho, trace_out_qubit, trace_product, CMatrix, Space};

pub(crate) type ValueGradDm = (f64, CMatrix);

fn half_herm(x: &CMatrix) -> CMatrix {
    (x + x.adjoint()) * re(0.5)
}

/// `1 - |Tr(a²ρ)|² / Tr(a†²a²ρ)`.
pub(crate) fn cs_dm(rho: &CMatrix, ops: &OscOps) -> ValueGradDm {
    let q = trace_product(&ops.n2, rho).re;
    if q < DENOMINATOR_FLOOR {
        return (1.0, CMatrix::zeros(rho.nrows(), rho.ncols()));
    }
    let m = trace_product(&ops.a2, rho);
    let m2 = m.norm_sqr();
    let d_m2 = half_herm(&(&ops.a2 * m.conj()));
    let d_q = &ops.n2 * re(0.5);
    let g = (d_m2 * re(1.0 / q) - d_q * re(m2 / (q * q))) * re(-1.0);
    (1.0 - m2 / q, g)
}

/// `P(ρ_HO) + P(ρ_qubit) - P(ρ)`.
pub(crate) fn mutual_info_dm(rho: &CMatrix, space: Space) -> Result<ValueGradDm> {
    let Space::Composite(c) = space else {
        return Err(Error::Space("mutual-information term needs a composite space".into()));
    };
    let d = c.ho().dim();
    let rho_ho = trace_out_qubit(rho, d);
    let rho_q = trace_out_ho(rho, d);
    let value = purity_raw(&rho_ho) + purity_raw(&rho_q) - purity_raw(rho);
    let g = kron(&CMatrix::identity(2, 2), &rho_ho) + kron(&rho_q, &CMatrix::identity(d, d)) - rho;
    Ok((value, half_herm(&g)))
}

pub(crate) fn radius_dm(rho: &CMatrix, ops: &OscOps, target: f64) -> ValueGradDm {
    let q = trace_product(&ops.n2, rho).re;
    let (v, dq) = radius_cost(q, target);
    (v, &ops.n2 * re(0.5 * dq))
}

/// `1 - ⟨t|ρ|t⟩`.
pub(crate) fn population_dm(rho: &CMatrix, target: &crate::quantum::CVector) -> ValueGradDm {
    let p = target.dotc(&(rho * target)).re;
    let proj = target * target.adjoint();
    (1.0 - p, proj * re(-0.5))
}
