//! Coherent, cat and entangled-cat reference states.

use serde::{Deserialize, Serialize};

use super::space::{CompositeSpace, FockSpace, Space};
use super::state::StateVector;
use super::{CVector, C64};
use crate::error::{Error, Result};

/// Largest allowed population of the top Fock level for reference states.
pub const TAIL_WEIGHT_TOL: f64 = 1e-10;

/// Parameters of `(|α⟩ + e^{iφ}|-α⟩)/N_φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatStateSpec {
    pub alpha: C64,
    /// Superposition phase φ in radians.
    pub phase: f64,
}

impl CatStateSpec {
    pub fn new(alpha: C64, phase: f64) -> Self {
        Self { alpha, phase }
    }

    pub fn even(alpha: C64) -> Self {
        Self::new(alpha, 0.0)
    }

    pub fn odd(alpha: C64) -> Self {
        Self::new(alpha, std::f64::consts::PI)
    }

    /// `N_φ = √(2(1 + e^{-2|α|²} cos φ))` for untruncated coherent states.
    pub fn normalization(&self) -> f64 {
        (2.0 * (1.0 + (-2.0 * self.alpha.norm_sqr()).exp() * self.phase.cos())).sqrt()
    }
}

/// Raw coherent amplitudes via `c_{n+1} = c_n α / √(n+1)`, renormalized on
/// the truncated space. No tail check.
pub fn coherent_amplitudes(alpha: C64, dim: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        v[n] = c;
        c = c * alpha / ((n + 1) as f64).sqrt();
    }
    let norm = v.norm();
    v.unscale(norm)
}

fn check_tail(v: &CVector, dim: usize) -> Result<()> {
    let tail = v[dim - 1].norm_sqr();
    if tail >= TAIL_WEIGHT_TOL || !tail.is_finite() {
        return Err(Error::Truncation {
            dim,
            tail_weight: tail,
        });
    }
    Ok(())
}

/// Coherent state `|α⟩` on a truncated Fock space.
pub fn coherent_state(alpha: C64, space: FockSpace) -> Result<StateVector> {
    let v = coherent_amplitudes(alpha, space.dim());
    check_tail(&v, space.dim())?;
    Ok(StateVector::new_unchecked(space.into(), v))
}

/// Unnormalized `|α⟩ + e^{iφ}|-α⟩` from truncated coherent vectors. Uses
/// `c_n(-α) = (-1)^n c_n(α)`.
pub(crate) fn cat_superposition(alpha: C64, phase: f64, dim: usize) -> CVector {
    let plus = coherent_amplitudes(alpha, dim);
    let w = C64::from_polar(1.0, phase);
    CVector::from_fn(dim, |n, _| {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        plus[n] * (C64::new(1.0, 0.0) + w * sign)
    })
}

/// Cat state `(|α⟩ + e^{iφ}|-α⟩)/N_φ`.
pub fn cat_state(spec: CatStateSpec, space: FockSpace) -> Result<StateVector> {
    let n_phi = spec.normalization();
    if !(n_phi >= 1e-8) {
        return Err(Error::DegenerateCat(n_phi));
    }
    let dim = space.dim();
    check_tail(&coherent_amplitudes(spec.alpha, dim), dim)?;
    let v = cat_superposition(spec.alpha, spec.phase, dim);
    let norm = v.norm();
    if !(norm >= 1e-8) {
        return Err(Error::DegenerateCat(norm));
    }
    Ok(StateVector::new_unchecked(space.into(), v.unscale(norm)))
}

/// Orthonormal qubit basis `{|b₊⟩, |b₋⟩}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitBasis {
    plus: [C64; 2],
    minus: [C64; 2],
}

impl QubitBasis {
    pub fn new(plus: [C64; 2], minus: [C64; 2]) -> Result<Self> {
        let nrm = |v: &[C64; 2]| v[0].norm_sqr() + v[1].norm_sqr();
        let overlap = plus[0].conj() * minus[0] + plus[1].conj() * minus[1];
        if (nrm(&plus) - 1.0).abs() > 1e-10
            || (nrm(&minus) - 1.0).abs() > 1e-10
            || overlap.norm() > 1e-10
        {
            return Err(Error::InvalidState("qubit basis is not orthonormal".into()));
        }
        Ok(Self { plus, minus })
    }

    /// `{|0⟩, |1⟩}`.
    pub fn computational() -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Self {
            plus: [one, zero],
            minus: [zero, one],
        }
    }

    /// Basis from Bloch angles of `|b₊⟩` plus a phase on `|b₋⟩`:
    /// `|b₊⟩ = (cos θ/2, e^{iϕ} sin θ/2)`, `|b₋⟩ = e^{iχ}(-e^{-iϕ} sin θ/2, cos θ/2)`.
    pub fn from_angles(theta: f64, phi: f64, chi: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        let plus = [C64::new(c, 0.0), C64::from_polar(s, phi)];
        let g = C64::from_polar(1.0, chi);
        let minus = [-g * C64::from_polar(s, -phi), g * c];
        Self { plus, minus }
    }

    pub fn plus(&self) -> [C64; 2] {
        self.plus
    }

    pub fn minus(&self) -> [C64; 2] {
        self.minus
    }
}

/// `(|b⟩ ⊗ |φ⟩)` amplitudes under the qubit-first ordering.
pub(crate) fn product_amplitudes(qubit: [C64; 2], ho: &CVector) -> CVector {
    let d = ho.len();
    CVector::from_fn(2 * d, |i, _| qubit[i / d] * ho[i % d])
}

/// `(|b₊⟩⊗|cat⁺⟩ + |b₋⟩⊗|cat⁻⟩)/√2` with even/odd cats of displacement `alpha`.
pub fn entangled_cat_state(
    alpha: C64,
    basis: &QubitBasis,
    space: CompositeSpace,
) -> Result<StateVector> {
    let even = cat_state(CatStateSpec::even(alpha), space.ho())?;
    let odd = cat_state(CatStateSpec::odd(alpha), space.ho())?;
    let v = (product_amplitudes(basis.plus, even.amplitudes())
        + product_amplitudes(basis.minus, odd.amplitudes()))
    .unscale(2f64.sqrt());
    StateVector::normalized(Space::Composite(space), v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{
        annihilation_op, expectation, number_op, parity_projectors, partial_trace, purity, Keep,
    };

    fn fock(d: usize) -> FockSpace {
        FockSpace::new(d).unwrap()
    }

    #[test]
    fn coherent_vacuum() {
        let v = coherent_state(C64::new(0.0, 0.0), fock(5)).unwrap();
        assert_eq!(v.amplitudes()[0], C64::new(1.0, 0.0));
        assert!(v.amplitudes().iter().skip(1).all(|z| z.norm() == 0.0));
    }

    #[test]
    fn coherent_norm_and_mean() {
        let v = coherent_state(C64::new(1.5, 0.0), fock(30)).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-10);
        let alpha = C64::new(1.0, 0.5);
        let f = fock(40);
        let v = coherent_state(alpha, f).unwrap();
        let mean = expectation(&annihilation_op(f), &v).unwrap();
        // direct Poisson-series oracle: ⟨a⟩ = Σ √(n+1) c_n* c_{n+1}
        let mut oracle = C64::new(0.0, 0.0);
        let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        for n in 0..39 {
            let next = c * alpha / ((n + 1) as f64).sqrt();
            oracle += c.conj() * next * ((n + 1) as f64).sqrt();
            c = next;
        }
        assert!((mean - oracle).norm() < 1e-12);
        assert!((mean - alpha).norm() < 1e-6);
        let n = expectation(&number_op(fock(30)), &coherent_state(C64::new(1.5, 0.0), fock(30)).unwrap())
            .unwrap();
        assert!((n.re - 2.25).abs() < 1e-6);
    }

    #[test]
    fn truncation_is_detected() {
        assert!(matches!(
            coherent_state(C64::new(3.0, 0.0), fock(10)),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn cat_normalization_and_parity() {
        let spec = CatStateSpec::even(C64::new(1.5, 0.0));
        assert!((spec.normalization() - (2.0 * (1.0 + (-4.5f64).exp())).sqrt()).abs() < 1e-15);
        let raw = cat_superposition(spec.alpha, 0.0, 30);
        assert!((raw.norm() - spec.normalization()).abs() < 1e-9);

        let f = fock(30);
        let even = cat_state(spec, f).unwrap();
        let odd = cat_state(CatStateSpec::odd(spec.alpha), f).unwrap();
        let (pp, pm) = parity_projectors(f);
        assert!(expectation(&pm, &even).unwrap().re.abs() < 1e-12);
        assert!((pp.apply(even.amplitudes()) - even.amplitudes()).norm() < 1e-12);
        assert!((pm.apply(odd.amplitudes()) - odd.amplitudes()).norm() < 1e-12);
        assert!(even.inner(&odd).norm() < 1e-12);
    }

    #[test]
    fn degenerate_cat() {
        let r = cat_state(CatStateSpec::odd(C64::new(1e-10, 0.0)), fock(5));
        assert!(matches!(r, Err(Error::DegenerateCat(_))));
    }

    #[test]
    fn entangled_cat_properties() {
        let c = CompositeSpace::new(30).unwrap();
        let basis = QubitBasis::from_angles(0.7, 1.1, -0.4);
        let alpha = C64::new(1.2, -0.6);
        let psi = entangled_cat_state(alpha, &basis, c).unwrap();
        let rho_q = partial_trace(&psi.to_density(), Keep::Qubit).unwrap();
        assert!((purity(&rho_q) - 0.5).abs() < 1e-10);
        let big_a = crate::quantum::embed_ho_op(&annihilation_op(c.ho()), c).unwrap();
        let a2 = big_a.mul(&big_a).unwrap();
        let m = expectation(&a2, &psi).unwrap();
        assert!((m - alpha * alpha).norm() < 1e-8);
    }

    #[test]
    fn basis_from_angles_is_orthonormal() {
        for (t, p, x) in [(0.0, 0.0, 0.0), (1.0, 2.0, 3.0), (3.1, -1.0, 0.5)] {
            let b = QubitBasis::from_angles(t, p, x);
            assert!(QubitBasis::new(b.plus(), b.minus()).is_ok());
        }
    }
}
