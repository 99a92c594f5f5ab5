use crate::error::{Error, Result};
use crate::quantum::{annihilation_op, CMatrix, CVector, Space, C64};

/// Oscillator operators, embedded as `1 ⊗ ·` on composite spaces.
pub(crate) struct OscOps {
    pub a: CMatrix,
    pub ad: CMatrix,
    /// `a²`
    pub a2: CMatrix,
    /// `a†²`
    pub a2d: CMatrix,
    /// `a†² a²`
    pub n2: CMatrix,
}

impl OscOps {
    pub fn new(space: Space) -> Result<Self> {
        let a = match space {
            Space::Fock(f) => annihilation_op(f).matrix().clone(),
            Space::Composite(c) => {
                let a = annihilation_op(c.ho()).matrix().clone();
                CMatrix::identity(2, 2).kronecker(&a)
            }
            Space::Qubit => return Err(Error::Space("term needs an oscillator".into())),
        };
        let ad = a.adjoint();
        let a2 = &a * &a;
        let a2d = a2.adjoint();
        let n2 = &a2d * &a2;
        Ok(Self { a, ad, a2, a2d, n2 })
    }
}

/// `ψ† X ψ` without normalization.
pub(crate) fn quad(psi: &CVector, x: &CMatrix) -> C64 {
    psi.dotc(&(x * psi))
}

pub(crate) fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Parity projector `Π±` on the oscillator, embedded if needed.
pub(crate) fn parity(space: Space, even: bool) -> Result<CMatrix> {
    let (d, reps) = match space {
        Space::Fock(f) => (f.dim(), 1),
        Space::Composite(c) => (c.ho().dim(), 2),
        Space::Qubit => return Err(Error::Space("parity needs an oscillator".into())),
    };
    let n = d * reps;
    Ok(CMatrix::from_fn(n, n, |i, j| {
        if i == j && ((i % d) % 2 == 0) == even {
            re(1.0)
        } else {
            re(0.0)
        }
    }))
}
