//! The two dynamical settings the engine drives: Schrödinger and Lindblad.

use crate::dynamics::{check_positivity, CoherentPropagator, DissipativePropagator};
use crate::error::{Error, Result};
use crate::functionals::{CompositeFunctional, Evaluation, StateKind};
use crate::models::{ControlModel, LindbladSpec, Quadrature};
use crate::quantum::{CMatrix, CVector, Space, C64};

pub(crate) trait Problem {
    type State: Clone;
    type Costate: Clone;

    fn initial(&self) -> Self::State;
    fn step(&mut self, x: &mut Self::State, eps: C64, dt: f64);
    fn step_back(&mut self, c: &mut Self::Costate, eps: C64, dt: f64);
    fn evaluate(&self, x: &Self::State) -> Result<Evaluation<Self::Costate>>;
    /// Update direction `(Re, Im)` per quadrature before the `S/λ` factor.
    fn sensitivity(&self, chi: &Self::Costate, x: &Self::State) -> (f64, f64);
    fn check_final(&self, x: &Self::State) -> Result<()>;
}

fn is_zero(m: &CMatrix) -> bool {
    m.iter().all(|z| *z == C64::new(0.0, 0.0))
}

pub(crate) struct PureProblem<'a> {
    prop: CoherentPropagator,
    space: Space,
    functional: &'a CompositeFunctional,
    psi0: CVector,
    d_re: CMatrix,
    d_im: Option<CMatrix>,
}

impl<'a> PureProblem<'a> {
    pub fn new(model: &ControlModel, functional: &'a CompositeFunctional, psi0: CVector) -> Result<Self> {
        if functional.kind() != StateKind::Pure {
            return Err(Error::Config("pure-state optimization needs pure-state terms".into()));
        }
        model.space().check_len(psi0.len())?;
        let d_im = model.derivative(Quadrature::Im).matrix().clone();
        Ok(Self {
            prop: CoherentPropagator::new(model),
            space: model.space(),
            functional,
            psi0,
            d_re: model.derivative(Quadrature::Re).matrix().clone(),
            d_im: (!is_zero(&d_im)).then_some(d_im),
        })
    }
}

impl Problem for PureProblem<'_> {
    type State = CVector;
    type Costate = CVector;

    fn initial(&self) -> CVector {
        self.psi0.clone()
    }

    fn step(&mut self, x: &mut CVector, eps: C64, dt: f64) {
        self.prop.step(x, eps, dt);
    }

    fn step_back(&mut self, c: &mut CVector, eps: C64, dt: f64) {
        self.prop.step_back(c, eps, dt);
    }

    fn evaluate(&self, x: &CVector) -> Result<Evaluation<CVector>> {
        self.functional.evaluate_pure(x, self.space)
    }

    /// `Im⟨χ|D_q|ψ⟩`.
    fn sensitivity(&self, chi: &CVector, x: &CVector) -> (f64, f64) {
        let re = chi.dotc(&(&self.d_re * x)).im;
        let im = self.d_im.as_ref().map_or(0.0, |d| chi.dotc(&(d * x)).im);
        (re, im)
    }

    fn check_final(&self, x: &CVector) -> Result<()> {
        if x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("propagated state"))
        }
    }
}

pub(crate) struct DensityProblem<'a> {
    prop: DissipativePropagator,
    space: Space,
    functional: &'a CompositeFunctional,
    rho0: CMatrix,
    d_re: CMatrix,
    d_im: Option<CMatrix>,
}

impl<'a> DensityProblem<'a> {
    pub fn new(
        model: &ControlModel,
        diss: &LindbladSpec,
        functional: &'a CompositeFunctional,
        rho0: CMatrix,
    ) -> Result<Self> {
        if functional.kind() != StateKind::Density {
            return Err(Error::Config("density-matrix optimization needs density-matrix terms".into()));
        }
        model.space().check_len(rho0.nrows())?;
        let d_im = model.derivative(Quadrature::Im).matrix().clone();
        Ok(Self {
            prop: DissipativePropagator::new(model, diss)?,
            space: model.space(),
            functional,
            rho0,
            d_re: model.derivative(Quadrature::Re).matrix().clone(),
            d_im: (!is_zero(&d_im)).then_some(d_im),
        })
    }
}

/// `Tr(D M)` for dense `D`, `M`.
fn trace_of_product(d: &CMatrix, m: &CMatrix) -> C64 {
    d.iter().zip(m.transpose().iter()).map(|(a, b)| a * b).sum()
}

impl Problem for DensityProblem<'_> {
    type State = CMatrix;
    type Costate = CMatrix;

    fn initial(&self) -> CMatrix {
        self.rho0.clone()
    }

    fn step(&mut self, x: &mut CMatrix, eps: C64, dt: f64) {
        self.prop.step(x, eps, dt);
    }

    fn step_back(&mut self, c: &mut CMatrix, eps: C64, dt: f64) {
        self.prop.step_back(c, eps, dt);
    }

    fn evaluate(&self, x: &CMatrix) -> Result<Evaluation<CMatrix>> {
        self.functional.evaluate_dm(x, self.space)
    }

    /// `Re⟨χ̂, -i[D_q, ρ]⟩ = Im Tr(D_q (ρχ̂† - χ̂†ρ))`.
    fn sensitivity(&self, chi: &CMatrix, x: &CMatrix) -> (f64, f64) {
        let chid = chi.adjoint();
        let m = x * &chid - &chid * x;
        let re = trace_of_product(&self.d_re, &m).im;
        let im = self.d_im.as_ref().map_or(0.0, |d| trace_of_product(d, &m).im);
        (re, im)
    }

    fn check_final(&self, x: &CMatrix) -> Result<()> {
        if !x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("propagated density matrix"));
        }
        check_positivity(x)
    }
}
