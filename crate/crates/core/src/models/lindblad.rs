use crate::error::{Error, Result};
use crate::quantum::{annihilation_op, embed_ho_op, CMatrix, OperatorMatrix, Space, C64};

/// Single-channel dissipator `κ (L ρ L† - ½{L†L, ρ})`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladSpec {
    kappa: f64,
    collapse: OperatorMatrix,
}

impl LindbladSpec {
    pub fn new(kappa: f64, collapse: OperatorMatrix) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::Config(format!("decay rate must be nonnegative, got {kappa}")));
        }
        Ok(Self { kappa, collapse })
    }

    /// Oscillator energy decay, `L = a` (or `1 ⊗ a` on a composite space).
    pub fn oscillator_decay(kappa: f64, space: Space) -> Result<Self> {
        let collapse = match space {
            Space::Fock(f) => annihilation_op(f),
            Space::Composite(c) => embed_ho_op(&annihilation_op(c.ho()), c)?,
            Space::Qubit => {
                return Err(Error::Space("oscillator decay needs an oscillator".into()));
            }
        };
        Self::new(kappa, collapse)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn collapse(&self) -> &OperatorMatrix {
        &self.collapse
    }

    pub fn space(&self) -> Space {
        self.collapse.space()
    }

    /// Same channel with a different rate.
    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::new(kappa, self.collapse.clone())
    }
}

fn check(h: &OperatorMatrix, diss: &LindbladSpec, m: &CMatrix) -> Result<()> {
    if h.space() != diss.space() {
        return Err(Error::Space(format!(
            "Hamiltonian on {:?}, dissipator on {:?}",
            h.space(),
            diss.space()
        )));
    }
    let d = h.space().dim();
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::Dimension {
            expected: d,
            found: m.nrows(),
        });
    }
    Ok(())
}

/// `-i[H, ρ] + κ(LρL† - ½{L†L, ρ})`.
pub fn liouvillian_apply(h: &OperatorMatrix, diss: &LindbladSpec, rho: &CMatrix) -> Result<CMatrix> {
    check(h, diss, rho)?;
    let hm = h.matrix();
    let mi = C64::new(0.0, -1.0);
    let mut out = (hm * rho - rho * hm) * mi;
    if diss.kappa > 0.0 {
        let l = diss.collapse.matrix();
        let ld = l.adjoint();
        let ldl = &ld * l;
        let k = C64::new(diss.kappa, 0.0);
        let half = C64::new(0.5 * diss.kappa, 0.0);
        out += (l * rho * &ld) * k - (&ldl * rho + rho * &ldl) * half;
    }
    Ok(out)
}

/// `+i[H, χ] + κ(L†χL - ½{L†L, χ})`, the Hilbert–Schmidt adjoint of
/// [`liouvillian_apply`].
pub fn adjoint_liouvillian_apply(
    h: &OperatorMatrix,
    diss: &LindbladSpec,
    chi: &CMatrix,
) -> Result<CMatrix> {
    check(h, diss, chi)?;
    let hm = h.matrix();
    let pi = C64::new(0.0, 1.0);
    let mut out = (hm * chi - chi * hm) * pi;
    if diss.kappa > 0.0 {
        let l = diss.collapse.matrix();
        let ld = l.adjoint();
        let ldl = &ld * l;
        let k = C64::new(diss.kappa, 0.0);
        let half = C64::new(0.5 * diss.kappa, 0.0);
        out += (&ld * chi * l) * k - (&ldl * chi + chi * &ldl) * half;
    }
    Ok(out)
}
