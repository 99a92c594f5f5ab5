//! Scalar observables along trajectories.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::functionals::{alpha_estimate, RadiusTarget};
use crate::quantum::{
    embed_qubit_op, expectation, mutual_information, number_op, partial_trace, purity, sigma_x, sigma_y,
    sigma_z, trace_out_ho, CMatrix, DensityMatrix, Keep, Space, StateRef,
};

/// `||α| - |α_tgt||` with `|α|` from the two-photon moment.
pub fn radius_error<'a>(state: impl Into<StateRef<'a>>, tgt: RadiusTarget) -> Result<f64> {
    Ok((alpha_estimate(state)? - tgt.value()).abs())
}

/// `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)` of a qubit density matrix.
pub fn bloch_coords(rho: &DensityMatrix) -> Result<[f64; 3]> {
    if rho.space() != Space::Qubit {
        return Err(Error::Space("Bloch coordinates need a qubit state".into()));
    }
    Ok([sigma_x(), sigma_y(), sigma_z()].map(|op| expectation(&op, rho).expect("qubit operator").re))
}

/// Reduced qubit state of a composite state.
pub fn qubit_state<'a>(state: impl Into<StateRef<'a>>) -> Result<DensityMatrix> {
    match state.into() {
        StateRef::Mixed(d) => partial_trace(d, Keep::Qubit),
        StateRef::Pure(s) => {
            let c = s
                .space()
                .composite()
                .ok_or_else(|| Error::Space("reduced qubit state needs a composite space".into()))?;
            let full: CMatrix = s.amplitudes() * s.amplitudes().adjoint();
            Ok(DensityMatrix::new_unchecked(Space::Qubit, trace_out_ho(&full, c.ho().dim())))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// `⟨1 ⊗ n̂⟩`.
    OscillatorExcitation,
    /// `⟨σz ⊗ 1⟩`.
    QubitExcitation,
    MutualInformation,
    Purity,
    LinearEntropy,
    /// Cat radius estimate from the two-photon moment.
    Radius,
    BlochX,
    BlochY,
    BlochZ,
}

impl Observable {
    pub fn name(&self) -> &'static str {
        match self {
            Observable::OscillatorExcitation => "n_ho",
            Observable::QubitExcitation => "sigma_z",
            Observable::MutualInformation => "mutual_info",
            Observable::Purity => "purity",
            Observable::LinearEntropy => "linear_entropy",
            Observable::Radius => "alpha",
            Observable::BlochX => "bloch_x",
            Observable::BlochY => "bloch_y",
            Observable::BlochZ => "bloch_z",
        }
    }

    fn eval(&self, state: StateRef<'_>) -> Result<f64> {
        let space = state.space();
        let composite = || space.composite().ok_or_else(|| Error::Space(format!("{} needs a composite space", self.name())));
        let dm = || match state {
            StateRef::Pure(s) => s.to_density(),
            StateRef::Mixed(d) => d.clone(),
        };
        Ok(match self {
            Observable::OscillatorExcitation => match space {
                Space::Fock(f) => expectation(&number_op(f), state)?.re,
                Space::Composite(c) => {
                    let n = crate::quantum::embed_ho_op(&number_op(c.ho()), c)?;
                    expectation(&n, state)?.re
                }
                Space::Qubit => return Err(Error::Space("no oscillator in a bare qubit".into())),
            },
            Observable::QubitExcitation => match space {
                Space::Qubit => expectation(&sigma_z(), state)?.re,
                _ => expectation(&embed_qubit_op(&sigma_z(), composite()?)?, state)?.re,
            },
            Observable::MutualInformation => {
                composite()?;
                mutual_information(&dm())?
            }
            Observable::Purity => match state {
                StateRef::Pure(_) => 1.0,
                StateRef::Mixed(d) => purity(d),
            },
            Observable::LinearEntropy => match state {
                StateRef::Pure(_) => 0.0,
                StateRef::Mixed(d) => 1.0 - purity(d),
            },
            Observable::Radius => alpha_estimate(state)?,
            Observable::BlochX | Observable::BlochY | Observable::BlochZ => {
                let q = if space == Space::Qubit { dm() } else { qubit_state(state)? };
                let r = bloch_coords(&q)?;
                r[match self {
                    Observable::BlochX => 0,
                    Observable::BlochY => 1,
                    _ => 2,
                }]
            }
        })
    }
}

/// Observable values per stored time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableTable {
    pub columns: Vec<String>,
    pub times: Vec<f64>,
    /// `rows[i][j]` is column `j` at `times[i]`.
    pub rows: Vec<Vec<f64>>,
}

impl ObservableTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// CSV with header `t,<columns>`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["t".to_string()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header)?;
        for (t, row) in self.times.iter().zip(&self.rows) {
            let mut rec = vec![t.to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

/// Evaluates `which` on every stored state of a trajectory.
pub fn observables_timeseries<S>(traj: &Trajectory<S>, which: &[Observable]) -> Result<ObservableTable>
where
    for<'a> &'a S: Into<StateRef<'a>>,
{
    let mut rows = Vec::with_capacity(traj.states().len());
    for s in traj.states() {
        let state: StateRef<'_> = s.into();
        rows.push(which.iter().map(|o| o.eval(state)).collect::<Result<Vec<f64>>>()?);
    }
    Ok(ObservableTable {
        columns: which.iter().map(|o| o.name().to_string()).collect(),
        times: traj.times().to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{CompositeSpace, StateVector, C64};

    #[test]
    fn bloch_examples() {
        let g = StateVector::basis(Space::Qubit, 0).unwrap().to_density();
        assert_eq!(bloch_coords(&g).unwrap(), [0.0, 0.0, -1.0]);
        let mixed = DensityMatrix::maximally_mixed(Space::Qubit);
        assert_eq!(bloch_coords(&mixed).unwrap(), [0.0, 0.0, 0.0]);
        let h = 0.5f64.sqrt();
        let plus = StateVector::new(Space::Qubit, crate::quantum::CVector::from_vec(vec![C64::new(h, 0.0), C64::new(h, 0.0)]))
            .unwrap();
        let r = bloch_coords(&plus.to_density()).unwrap();
        assert!((r[0] - 1.0).abs() < 1e-15 && r[1].abs() < 1e-15 && r[2].abs() < 1e-15);
    }

    #[test]
    fn radius_error_examples() {
        let space = CompositeSpace::new(6).unwrap();
        let tgt = RadiusTarget::new(2.0).unwrap();
        let vac = StateVector::basis(space.into(), 0).unwrap();
        assert!((radius_error(&vac, tgt).unwrap() - 2.0).abs() < 1e-15);
        let two = StateVector::basis(space.into(), space.index(0, 2)).unwrap();
        assert!((radius_error(&two, tgt).unwrap() - (2.0 - 2f64.powf(0.25))).abs() < 1e-12);
    }

    #[test]
    fn pure_and_mixed_evaluation_agree() {
        let space = CompositeSpace::new(5).unwrap();
        let s = StateVector::normalized(
            space.into(),
            crate::quantum::CVector::from_fn(10, |i, _| C64::new(1.0 + i as f64, 0.3 * i as f64)),
        )
        .unwrap();
        let d = s.to_density();
        for o in [
            Observable::OscillatorExcitation,
            Observable::QubitExcitation,
            Observable::MutualInformation,
            Observable::Purity,
            Observable::Radius,
            Observable::BlochX,
            Observable::BlochY,
            Observable::BlochZ,
        ] {
            let a = o.eval((&s).into()).unwrap();
            let b = o.eval((&d).into()).unwrap();
            assert!((a - b).abs() < 1e-10, "{o:?}: {a} vs {b}");
        }
    }
}
