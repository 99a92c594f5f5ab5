//! Pure-state terms. Each returns the value and the Wirtinger gradient
//! `g = ∂J/∂ψ*` of the formula read as a function of unnormalized `ψ`.

use super::ops::{parity, quad, re, OscOps};
use super::DENOMINATOR_FLOOR;
use crate::error::{Error, Result};
use crate::quantum::{reduced_ho_pure, CVector, Space};

pub(crate) type ValueGrad = (f64, CVector);

/// `⟨a†²a²⟩ - |⟨a²⟩|²`.
pub(crate) fn variance(psi: &CVector, ops: &OscOps) -> ValueGrad {
    let a2psi = &ops.a2 * psi;
    let a2dpsi = &ops.a2d * psi;
    let n2psi = &ops.n2 * psi;
    let m = psi.dotc(&a2psi);
    let q = psi.dotc(&n2psi).re;
    let g = &n2psi - (a2psi * m.conj() + a2dpsi * m);
    (q - m.norm_sqr(), g)
}

/// `1 - |⟨a²⟩|²/⟨a†²a²⟩`; value 1 and zero gradient when the denominator
/// vanishes.
pub(crate) fn normalized_variance(psi: &CVector, ops: &OscOps) -> ValueGrad {
    let n2psi = &ops.n2 * psi;
    let q = psi.dotc(&n2psi).re;
    if q < DENOMINATOR_FLOOR {
        return (1.0, CVector::zeros(psi.len()));
    }
    let a2psi = &ops.a2 * psi;
    let a2dpsi = &ops.a2d * psi;
    let m = psi.dotc(&a2psi);
    let m2 = m.norm_sqr();
    let dm2 = a2psi * m.conj() + a2dpsi * m;
    let g = (dm2 * re(1.0 / q) - n2psi * re(m2 / (q * q))) * re(-1.0);
    (1.0 - m2 / q, g)
}

/// `1 - ⟨Π±⟩²`.
pub(crate) fn cat_parity(psi: &CVector, space: Space, even: bool) -> Result<ValueGrad> {
    let p_op = parity(space, even)?;
    let ppsi = &p_op * psi;
    let p = psi.dotc(&ppsi).re;
    Ok((1.0 - p * p, ppsi * re(-2.0 * p)))
}

/// `4 [Re(⟨a⟩/√⟨a²⟩)]²`, invariant under the branch of the square root.
pub(crate) fn cat_phase(psi: &CVector, ops: &OscOps) -> Result<ValueGrad> {
    let a2psi = &ops.a2 * psi;
    let m = psi.dotc(&a2psi);
    if m.norm() < DENOMINATOR_FLOOR {
        return Err(Error::DegenerateDenominator {
            term: "j_cat_phase",
            value: m.norm(),
        });
    }
    let apsi = &ops.a * psi;
    let adpsi = &ops.ad * psi;
    let a2dpsi = &ops.a2d * psi;
    let u = psi.dotc(&apsi);
    let s = m.sqrt();
    let r = u / s;
    let dr = apsi / s - a2psi * (u / (re(2.0) * m * s));
    let drc = adpsi / s.conj() - a2dpsi * (u.conj() / (re(2.0) * m.conj() * s.conj()));
    let w = 2.0 * r.re;
    Ok((w * w, (dr + drc) * re(2.0 * w)))
}

/// `1 - |⟨ψ_tgt|ψ⟩|`.
pub(crate) fn state_to_state(psi: &CVector, target: &CVector) -> ValueGrad {
    let o = target.dotc(psi);
    let phase = if o.norm() < 1e-12 { re(1.0) } else { o / o.norm() };
    (1.0 - o.norm(), target * (phase * re(-0.5)))
}

/// `2 Tr(ρ_HO²) - 1` for a composite pure state.
pub(crate) fn cat_purity(psi: &CVector, space: Space) -> Result<ValueGrad> {
    let Space::Composite(c) = space else {
        return Err(Error::Space("purity term needs a composite space".into()));
    };
    let d = c.ho().dim();
    let rho = reduced_ho_pure(psi, d);
    let p: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
    let mut g = CVector::zeros(psi.len());
    for q in 0..2 {
        let block = psi.rows(q * d, d);
        g.rows_mut(q * d, d).copy_from(&(&rho * block));
    }
    Ok((2.0 * p - 1.0, g * re(4.0)))
}

/// `|α|` estimated as `⟨a†²a²⟩^{1/4}`.
pub(crate) fn alpha_from_q(q: f64) -> f64 {
    q.max(0.0).powf(0.25)
}

/// Radius-pinning cost as a function of `q = ⟨a†²a²⟩`, with `dJ/dq`.
/// The derivative floors `q` to keep it finite at the vacuum.
pub(crate) fn radius_cost(q: f64, target: f64) -> (f64, f64) {
    let t2 = target * target;
    let t4 = t2 * t2;
    let t8 = t4 * t4;
    let x = alpha_from_q(q);
    let value = (q - t4).powi(2) / t8 + (x - target).powi(2) / t2;
    let qf = q.max(DENOMINATOR_FLOOR);
    let xf = qf.powf(0.25);
    let dq = 2.0 * (q - t4) / t8 + 2.0 * (xf - target) / t2 * 0.25 * qf.powf(-0.75);
    (value, dq)
}

pub(crate) fn radius(psi: &CVector, ops: &OscOps, target: f64) -> ValueGrad {
    let n2psi = &ops.n2 * psi;
    let q = psi.dotc(&n2psi).re;
    let (v, dq) = radius_cost(q, target);
    (v, n2psi * re(dq))
}

/// `⟨a†²a²⟩`.
pub(crate) fn two_photon_moment(psi: &CVector, ops: &OscOps) -> f64 {
    quad(psi, &ops.n2).re
}
