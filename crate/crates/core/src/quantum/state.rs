use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::space::Space;
use super::{CMatrix, CVector, C64};
use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const EIGEN_TOL: f64 = 1e-10;

/// Pure state on a truncated space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState", into = "RawState")]
pub struct StateVector {
    space: Space,
    amps: CVector,
}

#[derive(Serialize, Deserialize)]
struct RawState {
    space: Space,
    amplitudes: Vec<C64>,
}

impl TryFrom<RawState> for StateVector {
    type Error = Error;
    fn try_from(raw: RawState) -> Result<Self> {
        StateVector::new(raw.space, CVector::from_vec(raw.amplitudes))
    }
}

impl From<StateVector> for RawState {
    fn from(s: StateVector) -> Self {
        RawState {
            space: s.space,
            amplitudes: s.amps.iter().copied().collect(),
        }
    }
}

impl StateVector {
    /// Wraps normalized amplitudes; fails if the norm is off by more than 1e-10.
    pub fn new(space: Space, amps: CVector) -> Result<Self> {
        space.check_len(amps.len())?;
        let norm = amps.norm();
        if !norm.is_finite() {
            return Err(Error::NonFinite("state amplitudes"));
        }
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state norm {norm} is not 1")));
        }
        Ok(Self { space, amps })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(space: Space, amps: CVector) -> Result<Self> {
        space.check_len(amps.len())?;
        let norm = amps.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState(format!("cannot normalize vector of norm {norm}")));
        }
        Ok(Self {
            space,
            amps: amps.unscale(norm),
        })
    }

    pub(crate) fn new_unchecked(space: Space, amps: CVector) -> Self {
        debug_assert_eq!(space.dim(), amps.len());
        Self { space, amps }
    }

    /// Basis state `|index⟩` of the flat basis.
    pub fn basis(space: Space, index: usize) -> Result<Self> {
        if index >= space.dim() {
            return Err(Error::Dimension {
                expected: space.dim(),
                found: index + 1,
            });
        }
        let mut amps = CVector::zeros(space.dim());
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { space, amps })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            space: self.space,
            matrix: &self.amps * self.amps.adjoint(),
        }
    }
}

/// Mixed state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDensity", into = "RawDensity")]
pub struct DensityMatrix {
    space: Space,
    matrix: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct RawDensity {
    space: Space,
    /// Row-major.
    matrix: Vec<Vec<C64>>,
}

impl TryFrom<RawDensity> for DensityMatrix {
    type Error = Error;
    fn try_from(raw: RawDensity) -> Result<Self> {
        DensityMatrix::new(raw.space, rows_to_matrix(&raw.matrix)?)
    }
}

impl From<DensityMatrix> for RawDensity {
    fn from(d: DensityMatrix) -> Self {
        RawDensity {
            space: d.space,
            matrix: matrix_to_rows(&d.matrix),
        }
    }
}

pub(crate) fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<C64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub(crate) fn rows_to_matrix(rows: &[Vec<C64>]) -> Result<CMatrix> {
    let n = rows.len();
    for r in rows {
        if r.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: r.len(),
            });
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-12), unit trace (1e-10) and positivity (-1e-10).
    pub fn new(space: Space, matrix: CMatrix) -> Result<Self> {
        space.check_len(matrix.nrows())?;
        space.check_len(matrix.ncols())?;
        if matrix.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("density matrix"));
        }
        let herm = hermiticity_defect(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min_eig = hermitian_eigenvalues(&matrix)
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -EIGEN_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self { space, matrix })
    }

    pub(crate) fn new_unchecked(space: Space, matrix: CMatrix) -> Self {
        debug_assert_eq!(space.dim(), matrix.nrows());
        Self { space, matrix }
    }

    /// `1/d` on the whole space.
    pub fn maximally_mixed(space: Space) -> Self {
        let d = space.dim();
        Self {
            space,
            matrix: CMatrix::identity(d, d).unscale(d as f64),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }
}

/// `max |M - M†|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Borrowed view over either kind of state.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityMatrix),
}

impl StateRef<'_> {
    pub fn space(&self) -> Space {
        match self {
            StateRef::Pure(s) => s.space(),
            StateRef::Mixed(d) => d.space(),
        }
    }
}

impl<'a> From<&'a StateVector> for StateRef<'a> {
    fn from(s: &'a StateVector) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(d: &'a DensityMatrix) -> Self {
        StateRef::Mixed(d)
    }
}

/// Owned counterpart of [`StateRef`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum State {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl State {
    pub fn as_ref(&self) -> StateRef<'_> {
        match self {
            State::Pure(s) => StateRef::Pure(s),
            State::Mixed(d) => StateRef::Mixed(d),
        }
    }

    pub fn space(&self) -> Space {
        self.as_ref().space()
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            State::Pure(s) => s.to_density(),
            State::Mixed(d) => d.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::FockSpace;

    fn fock(d: usize) -> Space {
        FockSpace::new(d).unwrap().into()
    }

    #[test]
    fn rejects_unnormalized() {
        let v = CVector::from_element(3, C64::new(1.0, 0.0));
        assert!(StateVector::new(fock(3), v.clone()).is_err());
        let s = StateVector::normalized(fock(3), v).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_validation() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = C64::new(1.2, 0.0);
        m[(1, 1)] = C64::new(-0.2, 0.0);
        assert!(DensityMatrix::new(fock(2), m).is_err());
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = C64::new(0.5, 0.0);
        m[(1, 1)] = C64::new(0.5, 0.0);
        m[(0, 1)] = C64::new(0.1, 0.1);
        assert!(DensityMatrix::new(fock(2), m.clone()).is_err());
        m[(1, 0)] = C64::new(0.1, -0.1);
        assert!(DensityMatrix::new(fock(2), m).is_ok());
    }

    #[test]
    fn json_uses_re_im_pairs() {
        let s = StateVector::basis(fock(2), 1).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert!(j.contains("[[0.0,0.0],[1.0,0.0]]"), "{j}");
        let back: StateVector = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        let d = s.to_density();
        let back: DensityMatrix = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
    }
}
