//! Final-time cost terms with analytic costates, for pure states and density
//! matrices, composable into weighted sums.
//!
//! Pure-state costates are `χ = -∂J/∂⟨ψ|`. Density-matrix costates are
//! `χ̂ = -∇` with `∇` the Hermitian matrix satisfying `δJ = 2 Re Tr(∇ δρ)`;
//! with this scaling both formalisms produce identical pulse updates.

mod density;
mod ops;
mod pure;

use log::debug;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{CMatrix, CVector, DensityMatrix, Space, StateRef, StateVector, C64};
use ops::{quad, OscOps};

/// Denominators below this are treated as vanishing.
pub const DENOMINATOR_FLOOR: f64 = 1e-10;
/// Value assigned to the phase term while it is inactive because `⟨a²⟩ ≈ 0`.
pub const INACTIVE_PHASE_VALUE: f64 = 4.0;

/// Target cat radius `|α_tgt|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct RadiusTarget(f64);

impl RadiusTarget {
    pub fn new(alpha_abs: f64) -> Result<Self> {
        if !(alpha_abs.is_finite() && alpha_abs > 0.0) {
            return Err(Error::Config(format!("target radius must be positive, got {alpha_abs}")));
        }
        Ok(Self(alpha_abs))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for RadiusTarget {
    type Error = Error;
    fn try_from(x: f64) -> Result<Self> {
        RadiusTarget::new(x)
    }
}

impl From<RadiusTarget> for f64 {
    fn from(t: RadiusTarget) -> f64 {
        t.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParitySign {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Pure,
    Density,
}

/// One cost term. Oscillator operators act as `1 ⊗ a` on composite spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "term", rename_all = "snake_case")]
pub enum FunctionalTerm {
    /// Two-photon variance `⟨a†²a²⟩ - |⟨a²⟩|²`, or `1 - |⟨a²⟩|²/⟨a†²a²⟩` when normalized.
    CoherentVariance {
        #[serde(default = "yes")]
        normalized: bool,
    },
    /// `1 - ⟨Π±⟩²`.
    CatParity { sign: ParitySign },
    /// `4 [Re(⟨a⟩/√⟨a²⟩)]²`, zero on equal-weight superpositions of `±α`.
    CatPhase,
    /// `1 - |⟨ψ_tgt|ψ⟩|`.
    StateToState { target: StateVector },
    /// `2 Tr ρ_HO² - 1`.
    CatPurity,
    /// Radius pinning around `|α_tgt|`.
    Radius { alpha_tgt: RadiusTarget },
    /// Normalized two-photon variance of `ρ`.
    CsDm,
    /// `P(ρ_HO) + P(ρ_qubit) - P(ρ)`.
    CatMutualInfoDm,
    RadiusDm { alpha_tgt: RadiusTarget },
    /// `1 - ⟨ψ_tgt|ρ|ψ_tgt⟩`.
    PopulationDm { target: StateVector },
}

fn yes() -> bool {
    true
}

impl FunctionalTerm {
    pub fn name(&self) -> &'static str {
        match self {
            FunctionalTerm::CoherentVariance { normalized: true } => "j_cs_norm",
            FunctionalTerm::CoherentVariance { normalized: false } => "j_cs",
            FunctionalTerm::CatParity { sign: ParitySign::Even } => "j_cat_even",
            FunctionalTerm::CatParity { sign: ParitySign::Odd } => "j_cat_odd",
            FunctionalTerm::CatPhase => "j_cat_phase",
            FunctionalTerm::StateToState { .. } => "j_ss",
            FunctionalTerm::CatPurity => "j_cat_purity",
            FunctionalTerm::Radius { .. } => "j_alpha",
            FunctionalTerm::CsDm => "j_cs_dm",
            FunctionalTerm::CatMutualInfoDm => "j_cat_mi_dm",
            FunctionalTerm::RadiusDm { .. } => "j_alpha_dm",
            FunctionalTerm::PopulationDm { .. } => "j_pop_dm",
        }
    }

    pub fn kind(&self) -> StateKind {
        match self {
            FunctionalTerm::CsDm
            | FunctionalTerm::CatMutualInfoDm
            | FunctionalTerm::RadiusDm { .. }
            | FunctionalTerm::PopulationDm { .. } => StateKind::Density,
            _ => StateKind::Pure,
        }
    }

    fn target_space_check(&self, space: Space) -> Result<()> {
        if let FunctionalTerm::StateToState { target } | FunctionalTerm::PopulationDm { target } = self {
            if target.space() != space {
                return Err(Error::Space(format!(
                    "target state on {:?}, dynamics on {:?}",
                    target.space(),
                    space
                )));
            }
        }
        Ok(())
    }

    /// Value and Wirtinger gradient `∂J/∂ψ*` at an unnormalized pure state.
    pub(crate) fn pure_grad(&self, psi: &CVector, space: Space) -> Result<(f64, CVector)> {
        self.target_space_check(space)?;
        match self {
            FunctionalTerm::CoherentVariance { normalized } => {
                let ops = OscOps::new(space)?;
                Ok(if *normalized {
                    pure::normalized_variance(psi, &ops)
                } else {
                    pure::variance(psi, &ops)
                })
            }
            FunctionalTerm::CatParity { sign } => pure::cat_parity(psi, space, *sign == ParitySign::Even),
            FunctionalTerm::CatPhase => pure::cat_phase(psi, &OscOps::new(space)?),
            FunctionalTerm::StateToState { target } => Ok(pure::state_to_state(psi, target.amplitudes())),
            FunctionalTerm::CatPurity => pure::cat_purity(psi, space),
            FunctionalTerm::Radius { alpha_tgt } => Ok(pure::radius(psi, &OscOps::new(space)?, alpha_tgt.value())),
            _ => Err(Error::Config(format!("{} needs a density matrix", self.name()))),
        }
    }

    /// Value and Hermitian gradient at a density matrix.
    pub(crate) fn dm_grad(&self, rho: &CMatrix, space: Space) -> Result<(f64, CMatrix)> {
        self.target_space_check(space)?;
        match self {
            FunctionalTerm::CsDm => Ok(density::cs_dm(rho, &OscOps::new(space)?)),
            FunctionalTerm::CatMutualInfoDm => density::mutual_info_dm(rho, space),
            FunctionalTerm::RadiusDm { alpha_tgt } => {
                Ok(density::radius_dm(rho, &OscOps::new(space)?, alpha_tgt.value()))
            }
            FunctionalTerm::PopulationDm { target } => Ok(density::population_dm(rho, target.amplitudes())),
            _ => Err(Error::Config(format!("{} needs a pure state", self.name()))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedTerm {
    #[serde(flatten)]
    pub term: FunctionalTerm,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

impl From<FunctionalTerm> for WeightedTerm {
    fn from(term: FunctionalTerm) -> Self {
        WeightedTerm { term, weight: 1.0 }
    }
}

/// Weighted sum of terms sharing one state kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<WeightedTerm>", into = "Vec<WeightedTerm>")]
pub struct CompositeFunctional {
    terms: Vec<WeightedTerm>,
    kind: StateKind,
}

impl TryFrom<Vec<WeightedTerm>> for CompositeFunctional {
    type Error = Error;
    fn try_from(terms: Vec<WeightedTerm>) -> Result<Self> {
        CompositeFunctional::new(terms)
    }
}

impl From<CompositeFunctional> for Vec<WeightedTerm> {
    fn from(f: CompositeFunctional) -> Self {
        f.terms
    }
}

/// Values of a functional at one state, with the boundary costate.
#[derive(Debug, Clone)]
pub struct Evaluation<C> {
    /// `(name, unweighted value)` per term.
    pub terms: Vec<(String, f64)>,
    pub total: f64,
    pub costate: C,
}

impl CompositeFunctional {
    pub fn new(terms: Vec<WeightedTerm>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Config("functional has no terms".into()))?
            .term
            .kind();
        for t in &terms {
            if t.term.kind() != first {
                return Err(Error::Config("cannot mix pure-state and density-matrix terms".into()));
            }
            if !(t.weight.is_finite() && t.weight > 0.0) {
                return Err(Error::Config(format!("weight of {} must be positive", t.term.name())));
            }
        }
        Ok(Self { terms, kind: first })
    }

    /// Unit-weight composite.
    pub fn of(terms: impl IntoIterator<Item = FunctionalTerm>) -> Result<Self> {
        Self::new(terms.into_iter().map(WeightedTerm::from).collect())
    }

    pub fn terms(&self) -> &[WeightedTerm] {
        &self.terms
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn term_names(&self) -> Vec<String> {
        self.terms.iter().map(|t| t.term.name().to_string()).collect()
    }

    /// Pure-state evaluation. A degenerate phase term counts as
    /// [`INACTIVE_PHASE_VALUE`] and contributes no costate.
    pub fn evaluate_pure(&self, psi: &CVector, space: Space) -> Result<Evaluation<CVector>> {
        space.check_len(psi.len())?;
        let mut costate = CVector::zeros(psi.len());
        let mut names = Vec::with_capacity(self.terms.len());
        let mut total = 0.0;
        for wt in &self.terms {
            let (v, g) = match wt.term.pure_grad(psi, space) {
                Ok(x) => x,
                Err(Error::DegenerateDenominator { term, value }) => {
                    debug!("{term} inactive: denominator {value:e}");
                    (INACTIVE_PHASE_VALUE, CVector::zeros(psi.len()))
                }
                Err(e) => return Err(e),
            };
            total += wt.weight * v;
            costate -= g * C64::new(wt.weight, 0.0);
            names.push((wt.term.name().to_string(), v));
        }
        Ok(Evaluation {
            terms: names,
            total,
            costate,
        })
    }

    pub fn evaluate_dm(&self, rho: &CMatrix, space: Space) -> Result<Evaluation<CMatrix>> {
        space.check_len(rho.nrows())?;
        let mut costate = CMatrix::zeros(rho.nrows(), rho.ncols());
        let mut names = Vec::with_capacity(self.terms.len());
        let mut total = 0.0;
        for wt in &self.terms {
            let (v, g) = wt.term.dm_grad(rho, space)?;
            total += wt.weight * v;
            costate -= g * C64::new(wt.weight, 0.0);
            names.push((wt.term.name().to_string(), v));
        }
        Ok(Evaluation {
            terms: names,
            total,
            costate,
        })
    }

    pub fn value<'a>(&self, state: impl Into<StateRef<'a>>) -> Result<f64> {
        Ok(match state.into() {
            StateRef::Pure(s) => self.evaluate_pure(s.amplitudes(), s.space())?.total,
            StateRef::Mixed(d) => self.evaluate_dm(d.matrix(), d.space())?.total,
        })
    }
}

/// Boundary costate of a pure-state or density-matrix functional.
#[derive(Debug, Clone, PartialEq)]
pub enum Costate {
    Pure(CVector),
    Mixed(CMatrix),
}

/// `χ(T) = -∂J/∂⟨ψ|` or `χ̂(T) = -∇J`, summed over weighted terms.
pub fn costate<'a>(functional: &CompositeFunctional, state: impl Into<StateRef<'a>>) -> Result<Costate> {
    match (functional.kind(), state.into()) {
        (StateKind::Pure, StateRef::Pure(s)) => {
            Ok(Costate::Pure(functional.evaluate_pure(s.amplitudes(), s.space())?.costate))
        }
        (StateKind::Density, StateRef::Mixed(d)) => {
            Ok(Costate::Mixed(functional.evaluate_dm(d.matrix(), d.space())?.costate))
        }
        (StateKind::Density, StateRef::Pure(s)) => {
            let d = s.to_density();
            Ok(Costate::Mixed(functional.evaluate_dm(d.matrix(), d.space())?.costate))
        }
        (StateKind::Pure, StateRef::Mixed(_)) => {
            Err(Error::Config("pure-state functional applied to a density matrix".into()))
        }
    }
}

fn single(term: FunctionalTerm, psi: &StateVector) -> Result<f64> {
    Ok(term.pure_grad(psi.amplitudes(), psi.space())?.0)
}

pub fn j_cs_variance(psi: &StateVector) -> Result<f64> {
    single(FunctionalTerm::CoherentVariance { normalized: false }, psi)
}

pub fn j_cs_normalized(psi: &StateVector) -> Result<f64> {
    single(FunctionalTerm::CoherentVariance { normalized: true }, psi)
}

pub fn j_cat_parity(psi: &StateVector, sign: ParitySign) -> Result<f64> {
    single(FunctionalTerm::CatParity { sign }, psi)
}

/// Fails with [`Error::DegenerateDenominator`] when `|⟨a²⟩| < 1e-10`.
pub fn j_cat_phase(psi: &StateVector) -> Result<f64> {
    single(FunctionalTerm::CatPhase, psi)
}

pub fn j_ss(psi: &StateVector, target: &StateVector) -> Result<f64> {
    single(FunctionalTerm::StateToState { target: target.clone() }, psi)
}

/// Two-photon variance with `Â = 1 ⊗ a`; the state must be composite.
pub fn j_cs_bipartite(psi: &StateVector, normalized: bool) -> Result<f64> {
    if psi.space().composite().is_none() {
        return Err(Error::Space("bipartite variance needs a composite space".into()));
    }
    single(FunctionalTerm::CoherentVariance { normalized }, psi)
}

pub fn j_cat_purity(psi: &StateVector) -> Result<f64> {
    single(FunctionalTerm::CatPurity, psi)
}

/// `⟨a†²a²⟩^{1/4}` (with `Â` on composite spaces).
pub fn alpha_estimate<'a>(state: impl Into<StateRef<'a>>) -> Result<f64> {
    let state = state.into();
    let ops = OscOps::new(state.space())?;
    let q = match state {
        StateRef::Pure(s) => quad(s.amplitudes(), &ops.n2).re,
        StateRef::Mixed(d) => crate::quantum::trace_product(&ops.n2, d.matrix()).re,
    };
    Ok(pure::alpha_from_q(q))
}

pub fn j_alpha<'a>(state: impl Into<StateRef<'a>>, tgt: RadiusTarget) -> Result<f64> {
    let state = state.into();
    let ops = OscOps::new(state.space())?;
    let q = match state {
        StateRef::Pure(s) => pure::two_photon_moment(s.amplitudes(), &ops),
        StateRef::Mixed(d) => crate::quantum::trace_product(&ops.n2, d.matrix()).re,
    };
    Ok(pure::radius_cost(q, tgt.value()).0)
}

pub fn j_cs_dm(rho: &DensityMatrix) -> Result<f64> {
    Ok(FunctionalTerm::CsDm.dm_grad(rho.matrix(), rho.space())?.0)
}

pub fn j_cat_mutualinfo_dm(rho: &DensityMatrix) -> Result<f64> {
    Ok(FunctionalTerm::CatMutualInfoDm.dm_grad(rho.matrix(), rho.space())?.0)
}
