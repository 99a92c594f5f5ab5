#![allow(dead_code)]

use catoptron::functionals::{CompositeFunctional, FunctionalTerm, ParitySign, RadiusTarget};
use catoptron::quantum::{CMatrix, CVector, CompositeSpace, DensityMatrix, FockSpace, Space, StateVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_amplitudes(rng: &mut ChaCha8Rng, d: usize) -> CVector {
    CVector::from_fn(d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_state(rng: &mut ChaCha8Rng, space: Space) -> StateVector {
    StateVector::normalized(space, random_amplitudes(rng, space.dim())).unwrap()
}

/// `G G† / Tr(G G†)` for a Ginibre matrix `G` of the given rank.
pub fn random_density(rng: &mut ChaCha8Rng, space: Space, rank: usize) -> DensityMatrix {
    let d = space.dim();
    let g = CMatrix::from_fn(d, rank, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::new(space, m / tr).unwrap()
}

pub fn relative_error(a: &CVector, b: &CVector) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Central-difference Wirtinger gradient `½(∂J/∂x + i∂J/∂y)`.
pub fn fd_pure_gradient(f: &dyn Fn(&CVector) -> f64, psi: &CVector, h: f64) -> CVector {
    let mut g = CVector::zeros(psi.len());
    for n in 0..psi.len() {
        let mut parts = [0.0; 2];
        for (k, dir) in [C64::new(h, 0.0), C64::new(0.0, h)].into_iter().enumerate() {
            let mut p = psi.clone();
            p[n] += dir;
            let mut m = psi.clone();
            m[n] -= dir;
            parts[k] = (f(&p) - f(&m)) / (2.0 * h);
        }
        g[n] = C64::new(0.5 * parts[0], 0.5 * parts[1]);
    }
    g
}

/// Hermitian basis of `d × d` matrices.
pub fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut out = vec![];
    for i in 0..d {
        for j in i..d {
            let mut m = CMatrix::zeros(d, d);
            if i == j {
                m[(i, i)] = C64::new(1.0, 0.0);
                out.push(m);
            } else {
                m[(i, j)] = C64::new(1.0, 0.0);
                m[(j, i)] = C64::new(1.0, 0.0);
                out.push(m.clone());
                m[(i, j)] = C64::new(0.0, 1.0);
                m[(j, i)] = C64::new(0.0, -1.0);
                out.push(m);
            }
        }
    }
    out
}

pub fn fock(d: usize) -> Space {
    FockSpace::new(d).unwrap().into()
}

pub fn composite(d: usize) -> Space {
    CompositeSpace::new(d).unwrap().into()
}

pub fn single(term: FunctionalTerm) -> CompositeFunctional {
    CompositeFunctional::of([term]).unwrap()
}

/// Every pure-state term with a space it is meant for.
pub fn pure_terms(rng: &mut ChaCha8Rng) -> Vec<(FunctionalTerm, Space)> {
    let f = fock(8);
    let c = composite(5);
    vec![
        (FunctionalTerm::CoherentVariance { normalized: false }, f),
        (FunctionalTerm::CoherentVariance { normalized: true }, f),
        (FunctionalTerm::CoherentVariance { normalized: true }, c),
        (FunctionalTerm::CatParity { sign: ParitySign::Even }, f),
        (FunctionalTerm::CatParity { sign: ParitySign::Odd }, f),
        (FunctionalTerm::CatPhase, f),
        (FunctionalTerm::StateToState { target: random_state(rng, f) }, f),
        (FunctionalTerm::CatPurity, c),
        (FunctionalTerm::Radius { alpha_tgt: RadiusTarget::new(1.5).unwrap() }, c),
    ]
}

pub fn dm_terms(rng: &mut ChaCha8Rng) -> Vec<(FunctionalTerm, Space)> {
    let c = composite(3);
    vec![
        (FunctionalTerm::CsDm, c),
        (FunctionalTerm::CatMutualInfoDm, c),
        (FunctionalTerm::RadiusDm { alpha_tgt: RadiusTarget::new(1.0).unwrap() }, c),
        (FunctionalTerm::PopulationDm { target: random_state(rng, c) }, c),
    ]
}
