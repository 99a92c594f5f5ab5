//! Distance of a state from the cat-state family and from the entangled-cat
//! family, by coarse grid search followed by simplex refinement.

use nalgebra::{Matrix2, SymmetricEigen};
use serde::Serialize;

use super::simplex::{nelder_mead, SimplexOptions};
use crate::error::{Error, Result};
use crate::quantum::{CMatrix, CVector, CatStateSpec, QubitBasis, Space, StateRef, StateVector, C64};

const RADII: usize = 32;
const ANGLES: usize = 32;
const PHASES: usize = 16;
/// Grid points refined by the simplex.
const STARTS: usize = 4;

fn simplex_opts(step: f64) -> SimplexOptions {
    SimplexOptions {
        step,
        x_tol: 1e-10,
        f_tol: 1e-16,
        max_evals: 4000,
    }
}

/// Best cat approximation of a single-mode state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatFit {
    pub infidelity: f64,
    pub spec: CatStateSpec,
}

/// Best entangled-cat approximation of a qubit ⊗ oscillator state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntangledCatFit {
    pub infidelity: f64,
    pub alpha: C64,
    pub basis: QubitBasis,
}

/// Normalized `|α⟩ + e^{iφ}|-α⟩` on `d` levels; `None` when it vanishes.
pub(crate) fn cat_vector(alpha: C64, phase: f64, d: usize) -> Option<CVector> {
    let w = C64::from_polar(1.0, phase);
    let mut p = C64::new(1.0, 0.0);
    let mut v = CVector::zeros(d);
    for n in 0..d {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        v[n] = p * (C64::new(1.0, 0.0) + w * sign);
        p = p * alpha / ((n + 1) as f64).sqrt();
    }
    let norm = v.norm();
    (norm.is_finite() && norm > 1e-300).then(|| v.unscale(norm))
}

fn alpha_scale(mean_n: f64) -> f64 {
    mean_n.max(0.0).sqrt() + 2.0
}

/// Grid of displacements `r e^{iθ}` with `0 < r ≤ r_max`.
fn alpha_grid(r_max: f64) -> Vec<C64> {
    let mut out = Vec::with_capacity(RADII * ANGLES);
    for i in 0..RADII {
        let r = r_max * (i + 1) as f64 / RADII as f64;
        for j in 0..ANGLES {
            out.push(C64::from_polar(r, std::f64::consts::TAU * j as f64 / ANGLES as f64));
        }
    }
    out
}

/// Indices of the `k` best values, ties going to the earlier (smaller-radius) entry.
fn best_indices(values: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

/// Picks the lowest value, preferring the smaller `|α|` among near-ties.
fn pick<T>(cands: Vec<(f64, f64, T)>) -> (f64, T) {
    let best = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let (v, _, t) = cands
        .into_iter()
        .filter(|c| c.0 <= best + 1e-12)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one candidate");
    (v, t)
}

fn wrap_phase(x: f64) -> f64 {
    x.rem_euclid(std::f64::consts::TAU)
}

/// `1 - max |⟨cat(α, φ)|ψ⟩|` over `α ∈ ℂ`, `φ ∈ [0, 2π)` for a single-mode pure state.
pub fn cat_infidelity_pure(psi: &StateVector) -> Result<CatFit> {
    let Space::Fock(f) = psi.space() else {
        return Err(Error::Space("cat infidelity needs a single-mode state".into()));
    };
    let d = f.dim();
    let amps = psi.amplitudes();
    let objective = |x: &[f64]| match cat_vector(C64::new(x[0], x[1]), x[2], d) {
        Some(c) => 1.0 - c.dotc(amps).norm(),
        None => 1.0,
    };
    let mean_n: f64 = amps.iter().enumerate().map(|(n, z)| n as f64 * z.norm_sqr()).sum();
    let r_max = alpha_scale(mean_n);
    let mut points = vec![];
    for a in alpha_grid(r_max) {
        for k in 0..PHASES {
            points.push([a.re, a.im, std::f64::consts::TAU * k as f64 / PHASES as f64]);
        }
    }
    let values: Vec<f64> = points.iter().map(|p| objective(p)).collect();
    let step = r_max / RADII as f64;
    let cands = best_indices(&values, STARTS)
        .into_iter()
        .map(|i| {
            let m = nelder_mead(objective, &points[i], simplex_opts(step));
            let alpha = C64::new(m.x[0], m.x[1]);
            (m.value, alpha.norm(), CatStateSpec::new(alpha, wrap_phase(m.x[2])))
        })
        .collect();
    let (infidelity, spec) = pick(cands);
    Ok(CatFit {
        infidelity: infidelity.max(0.0),
        spec,
    })
}

/// `√⟨ψ|ρ|ψ⟩`, the fidelity between `ρ` and a pure target.
pub fn pure_target_fidelity(rho: &CMatrix, psi: &CVector) -> f64 {
    psi.dotc(&(rho * psi)).re.max(0.0).sqrt()
}

/// Bloch angles `(θ, ϕ, χ)` of [`QubitBasis::from_angles`] reproducing the
/// pair `(plus, minus)` up to one global phase.
fn basis_angles(plus: [C64; 2], minus: [C64; 2]) -> (f64, f64, f64) {
    let theta = 2.0 * plus[0].norm().min(1.0).acos();
    let (gamma, phi) = if plus[0].norm() > 1e-12 {
        let g = plus[0].arg();
        (g, plus[1].arg() - g)
    } else {
        (plus[1].arg(), 0.0)
    };
    let reference = QubitBasis::from_angles(theta, phi, 0.0).minus();
    let overlap = reference[0].conj() * minus[0] + reference[1].conj() * minus[1];
    (theta, phi, overlap.arg() - gamma)
}

/// Stacked basis vectors `e_q ⊗ c` for `q ∈ {0, 1}`, `c ∈ {cat⁺, cat⁻}`,
/// as columns ordered `(+,0), (+,1), (-,0), (-,1)`.
fn branch_columns(alpha: C64, d: usize) -> Option<CMatrix> {
    let even = cat_vector(alpha, 0.0, d)?;
    let odd = cat_vector(alpha, std::f64::consts::PI, d)?;
    let mut b = CMatrix::zeros(2 * d, 4);
    for (j, c) in [&even, &even, &odd, &odd].into_iter().enumerate() {
        let q = j % 2;
        for n in 0..d {
            b[(q * d + n, j)] = c[n];
        }
    }
    Some(b)
}

fn basis_vector(basis: &QubitBasis) -> CVector {
    let (p, m) = (basis.plus(), basis.minus());
    CVector::from_vec(vec![p[0], p[1], m[0], m[1]])
}

/// Nearest unitary `[b₊ b₋]` to the 2×2 matrix with columns `x[0..2]`, `x[2..4]`.
fn nearest_basis(x: &CVector) -> QubitBasis {
    let m = Matrix2::new(x[0], x[2], x[1], x[3]);
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested") * svd.v_t.expect("requested");
    let (t, p, c) = basis_angles([u[(0, 0)], u[(1, 0)]], [u[(0, 1)], u[(1, 1)]]);
    QubitBasis::from_angles(t, p, c)
}

fn composite_dim(space: Space) -> Result<usize> {
    space
        .composite()
        .map(|c| c.ho().dim())
        .ok_or_else(|| Error::Space("entangled-cat infidelity needs a composite state".into()))
}

fn mean_ho_excitation(rho_diag: impl Iterator<Item = f64>, d: usize) -> f64 {
    rho_diag.enumerate().map(|(i, p)| (i % d) as f64 * p).sum()
}

/// `1 - max F` over the entangled-cat family, with `F = |⟨Ψ|ψ⟩|` for pure
/// inputs and `F = √⟨Ψ|ρ|Ψ⟩` for density matrices.
pub fn cat_infidelity_entangled<'a>(state: impl Into<StateRef<'a>>) -> Result<EntangledCatFit> {
    match state.into() {
        StateRef::Pure(s) => entangled_pure(s),
        StateRef::Mixed(rho) => {
            let d = composite_dim(rho.space())?;
            entangled_mixed(rho.matrix(), d)
        }
    }
}

fn entangled_pure(psi: &StateVector) -> Result<EntangledCatFit> {
    let d = composite_dim(psi.space())?;
    let amps = psi.amplitudes();
    // Overlaps ⟨e_q ⊗ c|ψ⟩ arranged as M = [u v]; max over bases is the trace norm / √2.
    let overlaps = |alpha: C64| -> Option<Matrix2<C64>> {
        let b = branch_columns(alpha, d)?;
        let o = b.adjoint() * amps;
        Some(Matrix2::new(o[0], o[2], o[1], o[3]))
    };
    let objective = |x: &[f64]| match overlaps(C64::new(x[0], x[1])) {
        Some(m) => 1.0 - m.singular_values().sum() / 2f64.sqrt(),
        None => 1.0,
    };
    let r_max = alpha_scale(mean_ho_excitation(amps.iter().map(|z| z.norm_sqr()), d));
    let grid = alpha_grid(r_max);
    let values: Vec<f64> = grid.iter().map(|a| objective(&[a.re, a.im])).collect();
    let step = r_max / RADII as f64;
    let cands = best_indices(&values, STARTS)
        .into_iter()
        .map(|i| {
            let m = nelder_mead(objective, &[grid[i].re, grid[i].im], simplex_opts(step));
            let alpha = C64::new(m.x[0], m.x[1]);
            (m.value, alpha.norm(), alpha)
        })
        .collect();
    let (infidelity, alpha) = pick(cands);
    let m = overlaps(alpha).ok_or(Error::DegenerateCat(alpha.norm()))?;
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested") * svd.v_t.expect("requested");
    let (t, p, c) = basis_angles([u[(0, 0)], u[(1, 0)]], [u[(0, 1)], u[(1, 1)]]);
    Ok(EntangledCatFit {
        infidelity: infidelity.max(0.0),
        alpha,
        basis: QubitBasis::from_angles(t, p, c),
    })
}

fn entangled_mixed(rho: &CMatrix, d: usize) -> Result<EntangledCatFit> {
    // ⟨Ψ|ρ|Ψ⟩ = x† R x / 2 with x the stacked basis vectors and R = B†ρB.
    let gram = |alpha: C64| -> Option<CMatrix> {
        let b = branch_columns(alpha, d)?;
        Some(b.adjoint() * rho * &b)
    };
    let value = |r: &CMatrix, basis: &QubitBasis| {
        let x = basis_vector(basis);
        1.0 - (0.5 * x.dotc(&(r * &x)).re).max(0.0).sqrt()
    };
    let objective = |p: &[f64]| match gram(C64::new(p[0], p[1])) {
        Some(r) => value(&r, &QubitBasis::from_angles(p[2], p[3], p[4])),
        None => 1.0,
    };
    let r_max = alpha_scale(mean_ho_excitation(rho.diagonal().iter().map(|z| z.re), d));
    let grid = alpha_grid(r_max);
    let mut starts = Vec::with_capacity(grid.len());
    let mut values = Vec::with_capacity(grid.len());
    for a in &grid {
        let Some(r) = gram(*a) else {
            starts.push([a.re, a.im, 0.0, 0.0, 0.0]);
            values.push(1.0);
            continue;
        };
        let eig = SymmetricEigen::new(r.clone());
        let top = eig.eigenvalues.imax();
        let basis = nearest_basis(&eig.eigenvectors.column(top).into_owned());
        let (t, p, c) = basis_angles(basis.plus(), basis.minus());
        starts.push([a.re, a.im, t, p, c]);
        values.push(value(&r, &basis));
    }
    let step = r_max / RADII as f64;
    let cands = best_indices(&values, STARTS)
        .into_iter()
        .map(|i| {
            let m = nelder_mead(objective, &starts[i], SimplexOptions { max_evals: 6000, ..simplex_opts(step) });
            let alpha = C64::new(m.x[0], m.x[1]);
            (m.value, alpha.norm(), (alpha, QubitBasis::from_angles(m.x[2], m.x[3], m.x[4])))
        })
        .collect();
    let (infidelity, (alpha, basis)) = pick(cands);
    Ok(EntangledCatFit {
        infidelity: infidelity.max(0.0),
        alpha,
        basis,
    })
}
