use serde::{Deserialize, Serialize};

use super::space::{CompositeSpace, FockSpace, Space};
use super::state::{hermiticity_defect, matrix_to_rows, rows_to_matrix, StateRef, HERMITIAN_TOL};
use super::{CMatrix, CVector, C64};
use crate::error::{Error, Result};

/// Dense operator on a [`Space`]. `hermitian` is a promise checked at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOperator", into = "RawOperator")]
pub struct OperatorMatrix {
    space: Space,
    matrix: CMatrix,
    hermitian: bool,
}

#[derive(Serialize, Deserialize)]
struct RawOperator {
    space: Space,
    hermitian: bool,
    matrix: Vec<Vec<C64>>,
}

impl TryFrom<RawOperator> for OperatorMatrix {
    type Error = Error;
    fn try_from(raw: RawOperator) -> Result<Self> {
        let m = rows_to_matrix(&raw.matrix)?;
        if raw.hermitian {
            OperatorMatrix::hermitian(raw.space, m)
        } else {
            OperatorMatrix::new(raw.space, m)
        }
    }
}

impl From<OperatorMatrix> for RawOperator {
    fn from(op: OperatorMatrix) -> Self {
        RawOperator {
            space: op.space,
            hermitian: op.hermitian,
            matrix: matrix_to_rows(&op.matrix),
        }
    }
}

impl OperatorMatrix {
    pub fn new(space: Space, matrix: CMatrix) -> Result<Self> {
        space.check_len(matrix.nrows())?;
        space.check_len(matrix.ncols())?;
        Ok(Self {
            space,
            matrix,
            hermitian: false,
        })
    }

    /// Fails unless `matrix` is Hermitian to 1e-12.
    pub fn hermitian(space: Space, matrix: CMatrix) -> Result<Self> {
        let mut op = Self::new(space, matrix)?;
        let defect = hermiticity_defect(&op.matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "operator flagged Hermitian has defect {defect:e}"
            )));
        }
        op.hermitian = true;
        Ok(op)
    }

    pub(crate) fn from_parts(space: Space, matrix: CMatrix, hermitian: bool) -> Self {
        debug_assert_eq!(space.dim(), matrix.nrows());
        Self {
            space,
            matrix,
            hermitian,
        }
    }

    pub fn identity(space: Space) -> Self {
        let d = space.dim();
        Self::from_parts(space, CMatrix::identity(d, d), true)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.space, self.matrix.adjoint(), self.hermitian)
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.matrix * v
    }

    /// Operator product `self * rhs`.
    pub fn mul(&self, rhs: &OperatorMatrix) -> Result<Self> {
        self.same_space(rhs)?;
        Ok(Self::from_parts(self.space, &self.matrix * &rhs.matrix, false))
    }

    pub fn add(&self, rhs: &OperatorMatrix) -> Result<Self> {
        self.same_space(rhs)?;
        Ok(Self::from_parts(
            self.space,
            &self.matrix + &rhs.matrix,
            self.hermitian && rhs.hermitian,
        ))
    }

    pub fn scale(&self, c: C64) -> Self {
        let herm = self.hermitian && c.im == 0.0;
        Self::from_parts(self.space, self.matrix.map(|z| z * c), herm)
    }

    /// `[self, rhs]`.
    pub fn commutator(&self, rhs: &OperatorMatrix) -> Result<CMatrix> {
        self.same_space(rhs)?;
        Ok(&self.matrix * &rhs.matrix - &rhs.matrix * &self.matrix)
    }

    fn same_space(&self, rhs: &OperatorMatrix) -> Result<()> {
        if self.space != rhs.space {
            return Err(Error::Space(format!(
                "operator spaces differ: {:?} vs {:?}",
                self.space, rhs.space
            )));
        }
        Ok(())
    }
}

/// `â` with `⟨n-1|â|n⟩ = √n`.
pub fn annihilation_op(space: FockSpace) -> OperatorMatrix {
    let d = space.dim();
    let mut m = CMatrix::zeros(d, d);
    for n in 1..d {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    OperatorMatrix::from_parts(space.into(), m, false)
}

pub fn creation_op(space: FockSpace) -> OperatorMatrix {
    annihilation_op(space).adjoint()
}

pub fn number_op(space: FockSpace) -> OperatorMatrix {
    let d = space.dim();
    let m = CMatrix::from_diagonal(&CVector::from_fn(d, |n, _| C64::new(n as f64, 0.0)));
    OperatorMatrix::from_parts(space.into(), m, true)
}

/// `(Π₊, Π₋)`: projectors on even and odd photon number.
pub fn parity_projectors(space: FockSpace) -> (OperatorMatrix, OperatorMatrix) {
    let d = space.dim();
    let diag = |odd: usize| {
        CMatrix::from_diagonal(&CVector::from_fn(d, |n, _| {
            C64::new(if n % 2 == odd { 1.0 } else { 0.0 }, 0.0)
        }))
    };
    (
        OperatorMatrix::from_parts(space.into(), diag(0), true),
        OperatorMatrix::from_parts(space.into(), diag(1), true),
    )
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `1 ⊗ op` for an oscillator operator `op`.
pub fn embed_ho_op(op: &OperatorMatrix, space: CompositeSpace) -> Result<OperatorMatrix> {
    if op.space != Space::Fock(space.ho()) {
        return Err(Error::Space(format!(
            "expected an operator on {:?}, got {:?}",
            space.ho(),
            op.space
        )));
    }
    Ok(OperatorMatrix::from_parts(
        space.into(),
        kron(&CMatrix::identity(2, 2), &op.matrix),
        op.hermitian,
    ))
}

/// `op ⊗ 1` for a qubit operator `op`.
pub fn embed_qubit_op(op: &OperatorMatrix, space: CompositeSpace) -> Result<OperatorMatrix> {
    if op.space != Space::Qubit {
        return Err(Error::Space(format!("expected a qubit operator, got {:?}", op.space)));
    }
    let d = space.ho().dim();
    Ok(OperatorMatrix::from_parts(
        space.into(),
        kron(&op.matrix, &CMatrix::identity(d, d)),
        op.hermitian,
    ))
}

fn qubit_op(entries: [[C64; 2]; 2], hermitian: bool) -> OperatorMatrix {
    let m = CMatrix::from_fn(2, 2, |i, j| entries[i][j]);
    OperatorMatrix::from_parts(Space::Qubit, m, hermitian)
}

const O: C64 = C64::new(0.0, 0.0);
const I1: C64 = C64::new(1.0, 0.0);
const IM: C64 = C64::new(0.0, 1.0);

/// `σ₊ = |1⟩⟨0|`, raising the qubit from its ground state `|0⟩`.
pub fn sigma_plus() -> OperatorMatrix {
    qubit_op([[O, O], [I1, O]], false)
}

pub fn sigma_minus() -> OperatorMatrix {
    qubit_op([[O, I1], [O, O]], false)
}

/// `σz = |1⟩⟨1| - |0⟩⟨0|`; the ground state has `⟨σz⟩ = -1`.
pub fn sigma_z() -> OperatorMatrix {
    qubit_op([[-I1, O], [O, I1]], true)
}

pub fn sigma_x() -> OperatorMatrix {
    qubit_op([[O, I1], [I1, O]], true)
}

/// `σy = i(σ₋ - σ₊)`, so that `σx σy = i σz` with the above `σz`.
pub fn sigma_y() -> OperatorMatrix {
    qubit_op([[O, IM], [-IM, O]], true)
}

/// `⟨ψ|O|ψ⟩` or `Tr(Oρ)`.
pub fn expectation<'a>(op: &OperatorMatrix, state: impl Into<StateRef<'a>>) -> Result<C64> {
    let state = state.into();
    if state.space() != op.space {
        return Err(Error::Space(format!(
            "operator on {:?} applied to state on {:?}",
            op.space,
            state.space()
        )));
    }
    let value = match state {
        StateRef::Pure(s) => s.amplitudes().dotc(&op.apply(s.amplitudes())),
        StateRef::Mixed(d) => trace_product(&op.matrix, d.matrix()),
    };
    Ok(if op.hermitian {
        C64::new(value.re, 0.0)
    } else {
        value
    })
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Hilbert–Schmidt inner product `Tr(A† B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}
