use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncated oscillator space spanned by `|0⟩ … |dim-1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFock")]
pub struct FockSpace {
    dim: usize,
}

#[derive(Deserialize)]
struct RawFock {
    dim: usize,
}

impl TryFrom<RawFock> for FockSpace {
    type Error = Error;
    fn try_from(raw: RawFock) -> Result<Self> {
        FockSpace::new(raw.dim)
    }
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Space(format!("Fock dimension must be >= 2, got {dim}")));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Qubit ⊗ oscillator. The qubit is the first (slow) tensor factor, so the
/// basis state `|q⟩⊗|n⟩` sits at index `q * ho.dim() + n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompositeSpace {
    ho: FockSpace,
}

impl CompositeSpace {
    pub fn new(ho_dim: usize) -> Result<Self> {
        Ok(Self {
            ho: FockSpace::new(ho_dim)?,
        })
    }

    pub fn from_ho(ho: FockSpace) -> Self {
        Self { ho }
    }

    pub fn ho(&self) -> FockSpace {
        self.ho
    }

    pub const fn qubit_dim(&self) -> usize {
        2
    }

    pub fn dim(&self) -> usize {
        2 * self.ho.dim
    }

    /// Flat index of `|qubit⟩ ⊗ |n⟩`.
    #[inline]
    pub fn index(&self, qubit: usize, n: usize) -> usize {
        qubit * self.ho.dim + n
    }
}

/// Any Hilbert space the crate works with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Space {
    Qubit,
    Fock(FockSpace),
    Composite(CompositeSpace),
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Qubit => 2,
            Space::Fock(f) => f.dim(),
            Space::Composite(c) => c.dim(),
        }
    }

    /// The oscillator factor, if there is one.
    pub fn ho(&self) -> Option<FockSpace> {
        match self {
            Space::Qubit => None,
            Space::Fock(f) => Some(*f),
            Space::Composite(c) => Some(c.ho()),
        }
    }

    pub fn composite(&self) -> Option<CompositeSpace> {
        match self {
            Space::Composite(c) => Some(*c),
            _ => None,
        }
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: len,
            });
        }
        Ok(())
    }
}

impl From<FockSpace> for Space {
    fn from(f: FockSpace) -> Self {
        Space::Fock(f)
    }
}

impl From<CompositeSpace> for Space {
    fn from(c: CompositeSpace) -> Self {
        Space::Composite(c)
    }
}
