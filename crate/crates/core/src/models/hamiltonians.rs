use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{
    annihilation_op, embed_ho_op, embed_qubit_op, sigma_minus, sigma_plus, sigma_x,
    CMatrix, CVector, CompositeSpace, FockSpace, OperatorMatrix, Space, StateVector, C64,
};

/// Kerr resonator with two-photon drive, `H = -K a†a†aa + ε a² + ε* a†²`.
/// Times are measured in units of `1/K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKerr", into = "RawKerr")]
pub struct KerrModel {
    k: f64,
    space: FockSpace,
}

#[derive(Serialize, Deserialize)]
struct RawKerr {
    k: f64,
    dim: usize,
}

impl TryFrom<RawKerr> for KerrModel {
    type Error = Error;
    fn try_from(raw: RawKerr) -> Result<Self> {
        KerrModel::new(raw.k, FockSpace::new(raw.dim)?)
    }
}

impl From<KerrModel> for RawKerr {
    fn from(m: KerrModel) -> Self {
        RawKerr {
            k: m.k,
            dim: m.space.dim(),
        }
    }
}

impl KerrModel {
    pub fn new(k: f64, space: FockSpace) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Config(format!("Kerr strength must be positive, got {k}")));
        }
        Ok(Self { k, space })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }
}

/// Resonant Jaynes–Cummings system with a qubit drive,
/// `H = g(σ₊⊗a + σ₋⊗a†) + ε σ₊⊗1 + ε* σ₋⊗1`. Times in units of `1/g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJc", into = "RawJc")]
pub struct JcModel {
    g: f64,
    space: CompositeSpace,
}

#[derive(Serialize, Deserialize)]
struct RawJc {
    g: f64,
    ho_dim: usize,
}

impl TryFrom<RawJc> for JcModel {
    type Error = Error;
    fn try_from(raw: RawJc) -> Result<Self> {
        JcModel::new(raw.g, CompositeSpace::new(raw.ho_dim)?)
    }
}

impl From<JcModel> for RawJc {
    fn from(m: JcModel) -> Self {
        RawJc {
            g: m.g,
            ho_dim: m.space.ho().dim(),
        }
    }
}

impl JcModel {
    pub fn new(g: f64, space: CompositeSpace) -> Result<Self> {
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::Config(format!("coupling must be positive, got {g}")));
        }
        Ok(Self { g, space })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn space(&self) -> CompositeSpace {
        self.space
    }
}

/// Real or imaginary part of the complex control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    Re,
    Im,
}

/// `H(ε) = H₀ + Re ε · D_re + Im ε · D_im`, the form shared by every model here.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlModel {
    drift: OperatorMatrix,
    d_re: OperatorMatrix,
    d_im: OperatorMatrix,
}

impl ControlModel {
    pub fn new(drift: OperatorMatrix, d_re: OperatorMatrix, d_im: OperatorMatrix) -> Result<Self> {
        for (name, op) in [("drift", &drift), ("d_re", &d_re), ("d_im", &d_im)] {
            if op.space() != drift.space() {
                return Err(Error::Space(format!("{name} lives on {:?}", op.space())));
            }
            if !op.is_hermitian() {
                return Err(Error::InvalidState(format!("{name} must be Hermitian")));
            }
        }
        Ok(Self { drift, d_re, d_im })
    }

    pub fn space(&self) -> Space {
        self.drift.space()
    }

    pub fn drift(&self) -> &OperatorMatrix {
        &self.drift
    }

    pub fn derivative(&self, q: Quadrature) -> &OperatorMatrix {
        match q {
            Quadrature::Re => &self.d_re,
            Quadrature::Im => &self.d_im,
        }
    }

    pub fn hamiltonian(&self, eps: C64) -> OperatorMatrix {
        let m = self.drift.matrix() + self.d_re.matrix() * C64::new(eps.re, 0.0)
            + self.d_im.matrix() * C64::new(eps.im, 0.0);
        OperatorMatrix::from_parts(self.space(), m, true)
    }
}

fn herm(space: Space, m: CMatrix) -> OperatorMatrix {
    OperatorMatrix::from_parts(space, m, true)
}

impl From<&KerrModel> for ControlModel {
    fn from(m: &KerrModel) -> Self {
        let a = annihilation_op(m.space).matrix().clone();
        let ad = a.adjoint();
        let a2 = &a * &a;
        let ad2 = &ad * &ad;
        let s: Space = m.space.into();
        let drift = (&ad2 * &a2) * C64::new(-m.k, 0.0);
        let d_re = &a2 + &ad2;
        let d_im = (&a2 - &ad2) * C64::new(0.0, 1.0);
        ControlModel {
            drift: herm(s, drift),
            d_re: herm(s, d_re),
            d_im: herm(s, d_im),
        }
    }
}

impl From<&JcModel> for ControlModel {
    fn from(m: &JcModel) -> Self {
        let c = m.space;
        let s: Space = c.into();
        let a = embed_ho_op(&annihilation_op(c.ho()), c).expect("same oscillator").matrix().clone();
        let sp = embed_qubit_op(&sigma_plus(), c).expect("qubit op").matrix().clone();
        let sm = sp.adjoint();
        let coupling = &sp * &a;
        let drift = (&coupling + coupling.adjoint()) * C64::new(m.g, 0.0);
        let d_re = &sp + &sm;
        let d_im = (&sp - &sm) * C64::new(0.0, 1.0);
        ControlModel {
            drift: herm(s, drift),
            d_re: herm(s, d_re),
            d_im: herm(s, d_im),
        }
    }
}

/// Physical model selector used by run configurations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Kerr(KerrModel),
    JaynesCummings(JcModel),
    /// Bare qubit with `H = Re ε · σx / 2`; a test bed for the optimizer.
    DrivenQubit,
}

impl Model {
    pub fn space(&self) -> Space {
        match self {
            Model::Kerr(m) => m.space.into(),
            Model::JaynesCummings(m) => m.space.into(),
            Model::DrivenQubit => Space::Qubit,
        }
    }

    pub fn control_model(&self) -> ControlModel {
        match self {
            Model::Kerr(m) => m.into(),
            Model::JaynesCummings(m) => m.into(),
            Model::DrivenQubit => {
                let half = C64::new(0.5, 0.0);
                ControlModel {
                    drift: herm(Space::Qubit, CMatrix::zeros(2, 2)),
                    d_re: herm(Space::Qubit, sigma_x().matrix() * half),
                    d_im: herm(Space::Qubit, CMatrix::zeros(2, 2)),
                }
            }
        }
    }

    /// Label for the time axis of exported data.
    pub fn time_unit(&self) -> &'static str {
        match self {
            Model::Kerr(_) => "1/K",
            Model::JaynesCummings(_) => "1/g",
            Model::DrivenQubit => "1",
        }
    }
}

pub fn kerr_hamiltonian(model: &KerrModel, eps: C64) -> OperatorMatrix {
    ControlModel::from(model).hamiltonian(eps)
}

pub fn jc_hamiltonian(model: &JcModel, eps: C64) -> OperatorMatrix {
    ControlModel::from(model).hamiltonian(eps)
}

/// `∂H/∂(Re ε)` or `∂H/∂(Im ε)`.
pub fn control_derivative(model: &ControlModel, q: Quadrature) -> OperatorMatrix {
    model.derivative(q).clone()
}

/// Eigenpair of the undriven Jaynes–Cummings Hamiltonian inside the
/// excitation manifold spanned by `|0,n+1⟩` and `|1,n⟩`.
#[derive(Debug, Clone)]
pub struct DressedPair {
    pub n: usize,
    pub energy_plus: f64,
    pub energy_minus: f64,
    pub plus: StateVector,
    pub minus: StateVector,
}

/// Diagonalizes the 2×2 manifold blocks `n = 0..n_max` of the drift.
pub fn jc_dressed_states(model: &JcModel, n_max: usize) -> Result<Vec<DressedPair>> {
    let c = model.space;
    let d = c.ho().dim();
    if n_max + 1 >= d {
        return Err(Error::Truncation {
            dim: d,
            tail_weight: f64::NAN,
        });
    }
    let h = ControlModel::from(model).drift.matrix().clone();
    (0..=n_max)
        .map(|n| {
            let idx = [c.index(0, n + 1), c.index(1, n)];
            let block = CMatrix::from_fn(2, 2, |i, j| h[(idx[i], idx[j])]);
            let eig = block.symmetric_eigen();
            let (lo, hi) = if eig.eigenvalues[0] <= eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
            let embed = |col: usize| {
                let mut v = CVector::zeros(c.dim());
                v[idx[0]] = eig.eigenvectors[(0, col)];
                v[idx[1]] = eig.eigenvectors[(1, col)];
                StateVector::normalized(c.into(), v)
            };
            Ok(DressedPair {
                n,
                energy_plus: eig.eigenvalues[hi],
                energy_minus: eig.eigenvalues[lo],
                plus: embed(hi)?,
                minus: embed(lo)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionKind {
    /// Ground state to the lowest doublet.
    Ground,
    /// Between manifolds `n` and `n+1` across the splitting, `∝ √(n+2) + √(n+1)`.
    Sum,
    /// Between manifolds `n` and `n+1` on the same branch, `∝ √(n+2) - √(n+1)`.
    Difference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    /// Angular frequency, in the model's frequency units.
    pub frequency: f64,
    pub kind: TransitionKind,
    /// Lower manifold index (`0` for the ground transition).
    pub n: usize,
}

/// Transition frequencies between adjacent excitation manifolds up to the
/// pair `(n_max - 1, n_max)`, sorted ascending. Energies come from
/// [`jc_dressed_states`].
pub fn jc_transition_frequencies(model: &JcModel, n_max: usize) -> Result<Vec<Transition>> {
    let pairs = jc_dressed_states(model, n_max)?;
    let mut out = vec![Transition {
        frequency: pairs[0].energy_plus,
        kind: TransitionKind::Ground,
        n: 0,
    }];
    for w in pairs.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        out.push(Transition {
            frequency: hi.energy_plus - lo.energy_minus,
            kind: TransitionKind::Sum,
            n: lo.n,
        });
        out.push(Transition {
            frequency: hi.energy_plus - lo.energy_plus,
            kind: TransitionKind::Difference,
            n: lo.n,
        });
    }
    out.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
    Ok(out)
}

/// `n̂_q + n̂_HO`, conserved by the undriven coupling.
pub fn excitation_number(space: CompositeSpace) -> OperatorMatrix {
    let n_ho = embed_ho_op(&crate::quantum::number_op(space.ho()), space).expect("same oscillator");
    let sp = sigma_plus();
    let nq = embed_qubit_op(&sp.mul(&sigma_minus()).expect("qubit"), space).expect("qubit op");
    herm(space.into(), n_ho.matrix() + nq.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{hermiticity_defect, parity_projectors};

    fn kerr(dim: usize) -> KerrModel {
        KerrModel::new(1.0, FockSpace::new(dim).unwrap()).unwrap()
    }

    fn jc(d: usize) -> JcModel {
        JcModel::new(1.0, CompositeSpace::new(d).unwrap()).unwrap()
    }

    #[test]
    fn kerr_drift_is_diagonal() {
        let m = KerrModel::new(0.7, FockSpace::new(6).unwrap()).unwrap();
        let h = kerr_hamiltonian(&m, C64::new(0.0, 0.0));
        for i in 0..6usize {
            for j in 0..6 {
                let expect = if i == j { -0.7 * (i * i.saturating_sub(1)) as f64 } else { 0.0 };
                assert!((h.matrix()[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn two_photon_selection_rule() {
        let h = kerr_hamiltonian(&kerr(6), C64::new(0.3, 0.0));
        let col0: Vec<_> = (0..6).map(|i| h.matrix()[(i, 0)]).collect();
        for (i, v) in col0.iter().enumerate() {
            let expect = if i == 2 { 0.3 * 2f64.sqrt() } else { 0.0 };
            assert!((v - C64::new(expect, 0.0)).norm() < 1e-14, "row {i}");
        }
    }

    #[test]
    fn hamiltonians_are_hermitian_and_parity_conserving() {
        let m = kerr(8);
        let h = kerr_hamiltonian(&m, C64::new(1.0, 2.0));
        assert_eq!(hermiticity_defect(h.matrix()), 0.0);
        let (pp, pm) = parity_projectors(m.space());
        let parity = pp.matrix() - pm.matrix();
        let comm = h.matrix() * &parity - &parity * h.matrix();
        assert_eq!(comm.norm(), 0.0);
        let hj = jc_hamiltonian(&jc(5), C64::new(-0.4, 1.1));
        assert_eq!(hermiticity_defect(hj.matrix()), 0.0);
    }

    #[test]
    fn jc_coupling_elements_and_conservation() {
        let m = jc(5);
        let c = m.space();
        let h = jc_hamiltonian(&m, C64::new(0.0, 0.0));
        for n in 0..4 {
            let v = h.matrix()[(c.index(1, n), c.index(0, n + 1))];
            assert!((v - C64::new(((n + 1) as f64).sqrt(), 0.0)).norm() < 1e-14);
        }
        let nx = excitation_number(c);
        let comm = h.commutator(&nx).unwrap();
        assert_eq!(comm.norm(), 0.0);
    }

    #[test]
    fn lowest_doublet_splitting_and_vectors() {
        let pairs = jc_dressed_states(&jc(6), 3).unwrap();
        let p = &pairs[0];
        assert!((p.energy_plus - p.energy_minus - 2.0).abs() < 1e-12);
        let c = CompositeSpace::new(6).unwrap();
        let s = 1.0 / 2f64.sqrt();
        for (state, sign) in [(&p.plus, 1.0), (&p.minus, -1.0)] {
            let mut v = CVector::zeros(c.dim());
            v[c.index(0, 1)] = C64::new(s, 0.0);
            v[c.index(1, 0)] = C64::new(sign * s, 0.0);
            let overlap = v.dotc(state.amplitudes()).norm();
            assert!((overlap - 1.0).abs() < 1e-10);
        }
        for p in &pairs {
            assert!((p.energy_plus - ((p.n + 1) as f64).sqrt()).abs() < 1e-12);
            assert!((p.energy_minus + ((p.n + 1) as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn transition_frequencies() {
        let t = jc_transition_frequencies(&jc(10), 5).unwrap();
        let sum0 = t.iter().find(|x| x.kind == TransitionKind::Sum && x.n == 0).unwrap();
        let diff0 = t.iter().find(|x| x.kind == TransitionKind::Difference && x.n == 0).unwrap();
        assert!((sum0.frequency - (2f64.sqrt() + 1.0)).abs() < 1e-12);
        assert!((diff0.frequency - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        let diffs: Vec<f64> = {
            let mut d: Vec<_> = t.iter().filter(|x| x.kind == TransitionKind::Difference).collect();
            d.sort_by_key(|x| x.n);
            d.iter().map(|x| x.frequency).collect()
        };
        assert!(diffs.windows(2).all(|w| w[1] < w[0]));
        assert!(t.windows(2).all(|w| w[0].frequency <= w[1].frequency));
    }

    #[test]
    fn control_derivative_matches_finite_difference() {
        let m = kerr(7);
        let cm = ControlModel::from(&m);
        let eps = C64::new(0.37, -0.81);
        let h = 1e-6;
        for (q, dir) in [(Quadrature::Re, C64::new(h, 0.0)), (Quadrature::Im, C64::new(0.0, h))] {
            let fd = (cm.hamiltonian(eps + dir).matrix() - cm.hamiltonian(eps - dir).matrix())
                / C64::new(2.0 * h, 0.0);
            let d = control_derivative(&cm, q);
            assert!(d.is_hermitian());
            assert!((fd - d.matrix()).norm() < 1e-8);
        }
    }

    #[test]
    fn model_config_json() {
        let m: Model = serde_json::from_str(r#"{"kind":"kerr","k":1.0,"dim":20}"#).unwrap();
        assert_eq!(m.space().dim(), 20);
        let j: Model = serde_json::from_str(r#"{"kind":"jaynes_cummings","g":1.0,"ho_dim":30}"#).unwrap();
        assert_eq!(j.space().dim(), 60);
        assert!(serde_json::from_str::<Model>(r#"{"kind":"kerr","k":-1.0,"dim":20}"#).is_err());
    }
}
