//! Forward propagation of states and density matrices, and backward
//! propagation of their costates, for piecewise-constant controls.
//!
//! Each interval is propagated with the exact (to rounding) exponential of its
//! constant generator. The backward steps apply the adjoint of the same
//! polynomial, so forward and backward maps are discrete adjoints.

mod expm;

use log::warn;
use nalgebra_sparse::CsrMatrix;

use crate::error::{Error, Result};
use crate::models::{ControlModel, ControlPulse, LindbladSpec, Quadrature, TimeGrid};
use crate::quantum::{
    hermitian_eigenvalues, CMatrix, CVector, DensityMatrix, Space, StateVector, C64,
};
use expm::{csr_from_dense, expmv, norm_bound, spmm, spmv, LinearCombination};

/// Population allowed in the two highest Fock levels before a warning.
pub const TRUNCATION_WARN: f64 = 1e-8;
/// Density propagation aborts if the final state has an eigenvalue below this.
pub const POSITIVITY_ABORT: f64 = -1e-6;

const MINUS_I: C64 = C64::new(0.0, -1.0);
const PLUS_I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);

fn coeffs(eps: C64) -> [C64; 3] {
    [ONE, C64::new(eps.re, 0.0), C64::new(eps.im, 0.0)]
}

/// Stepper for `dψ/dt = -iH(ε)ψ`.
#[derive(Debug, Clone)]
pub struct CoherentPropagator {
    space: Space,
    gen: LinearCombination,
}

impl CoherentPropagator {
    pub fn new(model: &ControlModel) -> Self {
        let terms = [
            model.drift().matrix() * MINUS_I,
            model.derivative(Quadrature::Re).matrix() * MINUS_I,
            model.derivative(Quadrature::Im).matrix() * MINUS_I,
        ];
        Self {
            space: model.space(),
            gen: LinearCombination::new(&terms),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    fn run(&mut self, x: &mut CVector, eps: C64, t: f64) {
        let a = self.gen.assemble(&coeffs(eps));
        let bound = norm_bound(a);
        expmv(x, t, bound, |u, v| spmv(a, u, v));
    }

    /// `ψ ← exp(-iH(ε)dt) ψ`.
    pub fn step(&mut self, psi: &mut CVector, eps: C64, dt: f64) {
        self.run(psi, eps, dt);
    }

    /// `χ ← exp(+iH(ε)dt) χ`, the adjoint of [`CoherentPropagator::step`].
    pub fn step_back(&mut self, chi: &mut CVector, eps: C64, dt: f64) {
        self.run(chi, eps, -dt);
    }
}

/// Stepper for the Lindblad equation and its adjoint.
#[derive(Debug, Clone)]
pub struct DissipativePropagator {
    space: Space,
    kappa: f64,
    /// `G = -iH - κ/2 L†L`.
    gen: LinearCombination,
    gen_adj: LinearCombination,
    l: CsrMatrix<C64>,
    l_adj: CsrMatrix<C64>,
    l_bound: f64,
}

struct LindbladBuffers {
    a: CMatrix,
    b: CMatrix,
}

impl LindbladBuffers {
    fn new(d: usize) -> Self {
        Self {
            a: CMatrix::zeros(d, d),
            b: CMatrix::zeros(d, d),
        }
    }
}

/// `out = G x + x G† + κ L x L†` using only products with the left factor.
/// With `(G, L)` replaced by `(G†, L†)` this is the adjoint map.
fn lindblad_apply(
    g: &CsrMatrix<C64>,
    l: &CsrMatrix<C64>,
    kappa: f64,
    x: &CMatrix,
    out: &mut CMatrix,
    buf: &mut LindbladBuffers,
) {
    spmm(g, x, out);
    buf.a = x.adjoint();
    spmm(g, &buf.a, &mut buf.b);
    *out += buf.b.adjoint();
    if kappa > 0.0 {
        spmm(l, &buf.a, &mut buf.b);
        buf.a = buf.b.adjoint();
        spmm(l, &buf.a, &mut buf.b);
        *out += &buf.b * C64::new(kappa, 0.0);
    }
}

impl DissipativePropagator {
    pub fn new(model: &ControlModel, diss: &LindbladSpec) -> Result<Self> {
        if model.space() != diss.space() {
            return Err(Error::Space(format!(
                "model on {:?}, dissipator on {:?}",
                model.space(),
                diss.space()
            )));
        }
        let kappa = diss.kappa();
        let lm = diss.collapse().matrix();
        let ldl = lm.adjoint() * lm * C64::new(0.5 * kappa, 0.0);
        let h0 = model.drift().matrix();
        let dr = model.derivative(Quadrature::Re).matrix();
        let di = model.derivative(Quadrature::Im).matrix();
        let gen = LinearCombination::new(&[h0 * MINUS_I - &ldl, dr * MINUS_I, di * MINUS_I]);
        let gen_adj = LinearCombination::new(&[h0 * PLUS_I - &ldl, dr * PLUS_I, di * PLUS_I]);
        let l = csr_from_dense(lm);
        let l_bound = norm_bound(&l);
        Ok(Self {
            space: model.space(),
            kappa,
            gen,
            gen_adj,
            l,
            l_adj: csr_from_dense(&lm.adjoint()),
            l_bound,
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `ρ ← exp(𝓛(ε)dt) ρ`.
    pub fn step(&mut self, rho: &mut CMatrix, eps: C64, dt: f64) {
        let g = self.gen.assemble(&coeffs(eps));
        let bound = 2.0 * norm_bound(g) + self.kappa * self.l_bound * self.l_bound;
        let mut buf = LindbladBuffers::new(rho.nrows());
        let (l, kappa) = (&self.l, self.kappa);
        expmv(rho, dt, bound, |u, v| lindblad_apply(g, l, kappa, u, v, &mut buf));
    }

    /// `χ ← exp(𝓛†(ε)dt) χ`, the Hilbert–Schmidt adjoint of [`DissipativePropagator::step`].
    pub fn step_back(&mut self, chi: &mut CMatrix, eps: C64, dt: f64) {
        let g = self.gen_adj.assemble(&coeffs(eps));
        let bound = 2.0 * norm_bound(g) + self.kappa * self.l_bound * self.l_bound;
        let mut buf = LindbladBuffers::new(chi.nrows());
        let (l, kappa) = (&self.l_adj, self.kappa);
        expmv(chi, dt, bound, |u, v| lindblad_apply(g, l, kappa, u, v, &mut buf));
    }
}

/// States at the grid points (or only the final one when not stored).
#[derive(Debug, Clone)]
pub struct Trajectory<S> {
    grid: TimeGrid,
    times: Vec<f64>,
    states: Vec<S>,
    max_top_population: f64,
}

impl<S> Trajectory<S> {
    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn final_state(&self) -> &S {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn into_final_state(mut self) -> S {
        self.states.pop().expect("trajectory is never empty")
    }

    /// Largest population of the two highest Fock levels seen along the way.
    pub fn max_top_population(&self) -> f64 {
        self.max_top_population
    }

    /// Every `stride`-th stored state, always keeping the last one.
    pub fn thinned(&self, stride: usize) -> Self
    where
        S: Clone,
    {
        let stride = stride.max(1);
        let n = self.states.len();
        let keep: Vec<usize> = (0..n).filter(|i| i % stride == 0 || *i == n - 1).collect();
        Trajectory {
            grid: self.grid,
            times: keep.iter().map(|&i| self.times[i]).collect(),
            states: keep.iter().map(|&i| self.states[i].clone()).collect(),
            max_top_population: self.max_top_population,
        }
    }
}

/// Costates at all `N + 1` grid points.
#[derive(Debug, Clone)]
pub struct CostateTrajectory<T> {
    grid: TimeGrid,
    snapshots: Vec<T>,
}

impl<T> CostateTrajectory<T> {
    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn snapshots(&self) -> &[T] {
        &self.snapshots
    }

    pub fn at(&self, k: usize) -> &T {
        &self.snapshots[k]
    }
}

/// Population of the two highest oscillator levels (0 on a bare qubit).
pub fn top_population_pure(space: Space, amps: &CVector) -> f64 {
    top_levels(space).into_iter().map(|i| amps[i].norm_sqr()).sum()
}

pub fn top_population_dm(space: Space, rho: &CMatrix) -> f64 {
    top_levels(space).into_iter().map(|i| rho[(i, i)].re).sum()
}

fn top_levels(space: Space) -> Vec<usize> {
    match space {
        Space::Qubit => vec![],
        Space::Fock(f) => vec![f.dim() - 2, f.dim() - 1],
        Space::Composite(c) => {
            let d = c.ho().dim();
            (0..2).flat_map(|q| [c.index(q, d - 2), c.index(q, d - 1)]).collect()
        }
    }
}

fn check_space(expected: Space, found: Space) -> Result<()> {
    if expected != found {
        return Err(Error::Space(format!("expected {expected:?}, got {found:?}")));
    }
    Ok(())
}

fn warn_truncation(top: f64) {
    if top > TRUNCATION_WARN {
        warn!("top two Fock levels reach population {top:.3e}; consider a larger truncation");
    }
}

fn finite_vec(v: &CVector) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn finite_mat(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Forward Schrödinger propagation.
pub fn propagate_state(
    model: &ControlModel,
    pulse: &ControlPulse,
    psi0: &StateVector,
    store: bool,
) -> Result<Trajectory<StateVector>> {
    check_space(model.space(), psi0.space())?;
    let grid = pulse.grid();
    let dt = grid.dt();
    let space = model.space();
    let mut prop = CoherentPropagator::new(model);
    let mut psi = psi0.amplitudes().clone();
    let mut top = top_population_pure(space, &psi);
    let (mut times, mut states) = (vec![], vec![]);
    if store {
        times.push(0.0);
        states.push(psi0.clone());
    }
    for (k, &eps) in pulse.samples().iter().enumerate() {
        prop.step(&mut psi, eps, dt);
        top = top.max(top_population_pure(space, &psi));
        if store {
            times.push(grid.time(k + 1));
            states.push(StateVector::new_unchecked(space, psi.clone()));
        }
    }
    if !finite_vec(&psi) {
        return Err(Error::NonFinite("propagated state"));
    }
    warn_truncation(top);
    if !store {
        times.push(grid.duration());
        states.push(StateVector::new_unchecked(space, psi));
    }
    Ok(Trajectory {
        grid,
        times,
        states,
        max_top_population: top,
    })
}

/// Backward costate propagation from `χ(T)`.
pub fn propagate_costate_backward(
    model: &ControlModel,
    pulse: &ControlPulse,
    chi_t: &CVector,
) -> Result<CostateTrajectory<CVector>> {
    model.space().check_len(chi_t.len())?;
    let grid = pulse.grid();
    let dt = grid.dt();
    let mut prop = CoherentPropagator::new(model);
    let n = grid.n_steps();
    let mut snapshots = vec![CVector::zeros(0); n + 1];
    let mut chi = chi_t.clone();
    snapshots[n] = chi.clone();
    for k in (0..n).rev() {
        prop.step_back(&mut chi, pulse.samples()[k], dt);
        snapshots[k] = chi.clone();
    }
    if !finite_vec(&chi) {
        return Err(Error::NonFinite("propagated costate"));
    }
    Ok(CostateTrajectory { grid, snapshots })
}

/// Fails if `rho` has an eigenvalue below [`POSITIVITY_ABORT`].
pub(crate) fn check_positivity(rho: &CMatrix) -> Result<()> {
    let herm = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let min = hermitian_eigenvalues(&herm).into_iter().fold(f64::INFINITY, f64::min);
    if min < POSITIVITY_ABORT {
        return Err(Error::Positivity(min));
    }
    Ok(())
}

/// Forward Lindblad propagation. Positivity is checked on the final state.
pub fn propagate_density(
    model: &ControlModel,
    diss: &LindbladSpec,
    pulse: &ControlPulse,
    rho0: &DensityMatrix,
    store: bool,
) -> Result<Trajectory<DensityMatrix>> {
    check_space(model.space(), rho0.space())?;
    let grid = pulse.grid();
    let dt = grid.dt();
    let space = model.space();
    let mut prop = DissipativePropagator::new(model, diss)?;
    let mut rho = rho0.matrix().clone();
    let mut top = top_population_dm(space, &rho);
    let (mut times, mut states) = (vec![], vec![]);
    if store {
        times.push(0.0);
        states.push(rho0.clone());
    }
    for (k, &eps) in pulse.samples().iter().enumerate() {
        prop.step(&mut rho, eps, dt);
        top = top.max(top_population_dm(space, &rho));
        if store {
            times.push(grid.time(k + 1));
            states.push(DensityMatrix::new_unchecked(space, rho.clone()));
        }
    }
    if !finite_mat(&rho) {
        return Err(Error::NonFinite("propagated density matrix"));
    }
    check_positivity(&rho)?;
    warn_truncation(top);
    if !store {
        times.push(grid.duration());
        states.push(DensityMatrix::new_unchecked(space, rho));
    }
    Ok(Trajectory {
        grid,
        times,
        states,
        max_top_population: top,
    })
}

/// Backward propagation of a density-matrix costate under the adjoint Liouvillian.
pub fn propagate_codm_backward(
    model: &ControlModel,
    diss: &LindbladSpec,
    pulse: &ControlPulse,
    chi_t: &CMatrix,
) -> Result<CostateTrajectory<CMatrix>> {
    model.space().check_len(chi_t.nrows())?;
    model.space().check_len(chi_t.ncols())?;
    let grid = pulse.grid();
    let dt = grid.dt();
    let mut prop = DissipativePropagator::new(model, diss)?;
    let n = grid.n_steps();
    let mut snapshots = vec![CMatrix::zeros(0, 0); n + 1];
    let mut chi = chi_t.clone();
    snapshots[n] = chi.clone();
    for k in (0..n).rev() {
        prop.step_back(&mut chi, pulse.samples()[k], dt);
        snapshots[k] = chi.clone();
    }
    if !finite_mat(&chi) {
        return Err(Error::NonFinite("propagated costate"));
    }
    Ok(CostateTrajectory { grid, snapshots })
}
