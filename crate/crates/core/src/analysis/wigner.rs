//! Wigner distributions from the Fock-basis Laguerre expansion.
//!
//! Convention: `x = (a + a†)/√2`, `p = (a - a†)/(i√2)`, ħ = 1, so that
//! `W(x, p) = (1/π) ∫ ⟨x+y|ρ|x-y⟩ e^{-2ipy} dy`, `∬ W dx dp = 1` and
//! `π W(0, 0) = ⟨(-1)^n⟩`. A coherent state `|α⟩` is centred at
//! `(√2 Re α, √2 Im α)`.

use std::fs::File;
use std::path::Path;

use log::warn;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dynamics::TRUNCATION_WARN;
use crate::error::{Error, Result};
use crate::quantum::{trace_out_qubit, CMatrix, Space, StateRef, C64};

/// Rectangular phase-space grid with inclusive endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    pub x_range: (f64, f64),
    pub p_range: (f64, f64),
    pub n_x: usize,
    pub n_p: usize,
}

impl PhaseSpaceGrid {
    pub fn new(x_range: (f64, f64), p_range: (f64, f64), n_x: usize, n_p: usize) -> Result<Self> {
        let g = Self { x_range, p_range, n_x, n_p };
        g.validate()?;
        Ok(g)
    }

    /// Square grid `[-extent, extent]²` with `n` points per axis.
    pub fn square(extent: f64, n: usize) -> Result<Self> {
        Self::new((-extent, extent), (-extent, extent), n, n)
    }

    pub fn validate(&self) -> Result<()> {
        let ok_range = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && b > a;
        if !ok_range(self.x_range) || !ok_range(self.p_range) {
            return Err(Error::Config("phase-space ranges must be finite and increasing".into()));
        }
        if self.n_x < 16 || self.n_p < 16 {
            return Err(Error::Config("phase-space grids need at least 16 points per axis".into()));
        }
        Ok(())
    }

    fn axis((a, b): (f64, f64), n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_range, self.n_x)
    }

    pub fn ps(&self) -> Vec<f64> {
        Self::axis(self.p_range, self.n_p)
    }

    pub fn dx(&self) -> f64 {
        (self.x_range.1 - self.x_range.0) / (self.n_x - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_range.1 - self.p_range.0) / (self.n_p - 1) as f64
    }
}

/// Wigner values on a grid; `values[(i, j)]` is `W(p_i, x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerMap {
    pub grid: PhaseSpaceGrid,
    pub values: DMatrix<f64>,
}

#[derive(Serialize)]
struct WignerAxes<'a> {
    x: &'a [f64],
    p: &'a [f64],
    convention: &'static str,
}

impl WignerMap {
    /// Riemann sum of `W dx dp`.
    pub fn integral(&self) -> f64 {
        self.values.sum() * self.grid.dx() * self.grid.dp()
    }

    /// `∫ W dp` on the x axis.
    pub fn x_marginal(&self) -> Vec<f64> {
        let dp = self.grid.dp();
        (0..self.grid.n_x).map(|j| self.values.column(j).sum() * dp).collect()
    }

    /// Grid point `(x, p)` of the largest value.
    pub fn argmax(&self) -> (f64, f64) {
        let (xs, ps) = (self.grid.xs(), self.grid.ps());
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for i in 0..self.grid.n_p {
            for j in 0..self.grid.n_x {
                if self.values[(i, j)] > best.0 {
                    best = (self.values[(i, j)], xs[j], ps[i]);
                }
            }
        }
        (best.1, best.2)
    }

    /// CSV matrix (one row per `p`, one column per `x`) plus `<stem>.json` with the axes.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
        for i in 0..self.grid.n_p {
            w.write_record(self.values.row(i).iter().map(|v| format!("{v:.12e}")))?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        let axes_path = path.with_extension("json");
        let f = File::create(&axes_path).map_err(|e| Error::io(&axes_path, e))?;
        let (xs, ps) = (self.grid.xs(), self.grid.ps());
        serde_json::to_writer_pretty(
            f,
            &WignerAxes {
                x: &xs,
                p: &ps,
                convention: "x=(a+a^dag)/sqrt2, hbar=1, integral W dx dp = 1",
            },
        )?;
        Ok(())
    }
}

/// Oscillator density matrix of a single-mode or composite state.
pub fn oscillator_density(state: StateRef<'_>) -> Result<CMatrix> {
    let full = match state {
        StateRef::Pure(s) => s.amplitudes() * s.amplitudes().adjoint(),
        StateRef::Mixed(d) => d.matrix().clone(),
    };
    match state.space() {
        Space::Fock(_) => Ok(full),
        Space::Composite(c) => Ok(trace_out_qubit(&full, c.ho().dim())),
        Space::Qubit => Err(Error::Space("Wigner function of a bare qubit".into())),
    }
}

/// Generalized Laguerre polynomials `L_n^{(k)}(y)` for `n < len`.
fn laguerre(k: usize, y: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let kf = k as f64;
    let (mut prev, mut cur) = (0.0, 1.0);
    for n in 0..len {
        out.push(cur);
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 + kf - y) * cur - (nf + kf) * prev) / (nf + 1.0);
        prev = cur;
        cur = next;
    }
    out
}

/// `W(x, p)` of an oscillator density matrix.
pub fn wigner_point(rho: &CMatrix, x: f64, p: f64) -> f64 {
    let d = rho.nrows();
    let r2 = x * x + p * p;
    let y = 2.0 * r2;
    let gauss = (-r2).exp() / std::f64::consts::PI;
    // (√2 (x - ip))^k, built incrementally in k.
    let z = C64::new(x, -p) * 2f64.sqrt();
    let mut zk = C64::new(1.0, 0.0);
    let mut w = 0.0;
    for k in 0..d {
        let lag = laguerre(k, y, d - k);
        // ratio √(n!/(n+k)!), updated in n
        let mut ratio = (1..=k).map(|j| 1.0 / (j as f64).sqrt()).product::<f64>();
        for n in 0..d - k {
            let m = n + k;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let coeff = sign * ratio * lag[n];
            let term = rho[(m, n)] * zk * coeff;
            w += if k == 0 { term.re } else { 2.0 * term.re };
            ratio *= ((n + 1) as f64 / (m + 1) as f64).sqrt();
        }
        zk *= z;
    }
    gauss * w
}

/// Wigner distribution of the (reduced) oscillator state. Warns when the
/// state populates the top two Fock levels.
pub fn wigner<'a>(state: impl Into<StateRef<'a>>, grid: &PhaseSpaceGrid) -> Result<WignerMap> {
    grid.validate()?;
    let rho = oscillator_density(state.into())?;
    let d = rho.nrows();
    let top = rho[(d - 1, d - 1)].re + rho[(d - 2, d - 2)].re;
    if top > TRUNCATION_WARN {
        warn!("state populates the top Fock levels ({top:.2e}); Wigner map may be truncated");
    }
    let (xs, ps) = (grid.xs(), grid.ps());
    let values = DMatrix::from_fn(grid.n_p, grid.n_x, |i, j| wigner_point(&rho, xs[j], ps[i]));
    Ok(WignerMap { grid: *grid, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{cat_state, coherent_state, CatStateSpec, FockSpace, StateVector};
    use std::f64::consts::PI;

    fn fock(d: usize) -> FockSpace {
        FockSpace::new(d).unwrap()
    }

    #[test]
    fn vacuum_and_odd_cat_at_origin() {
        let vac = StateVector::basis(fock(10).into(), 0).unwrap();
        let rho = oscillator_density((&vac).into()).unwrap();
        assert!((wigner_point(&rho, 0.0, 0.0) - 1.0 / PI).abs() < 1e-12);
        let odd = cat_state(CatStateSpec::odd(C64::new(1.5, 0.0)), fock(25)).unwrap();
        let rho = oscillator_density((&odd).into()).unwrap();
        assert!((wigner_point(&rho, 0.0, 0.0) + 1.0 / PI).abs() < 1e-4);
    }

    #[test]
    fn fock_one_matches_closed_form() {
        // W_1(x, p) = (2r² - 1) e^{-r²} / π
        let s = StateVector::basis(fock(4).into(), 1).unwrap();
        let rho = oscillator_density((&s).into()).unwrap();
        for (x, p) in [(0.3, -0.7), (1.1, 0.2), (0.0, 2.0)] {
            let r2: f64 = x * x + p * p;
            let exact = (2.0 * r2 - 1.0) * (-r2).exp() / PI;
            assert!((wigner_point(&rho, x, p) - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn coherent_state_is_centred_at_its_displacement() {
        let alpha = C64::new(0.8, -1.1);
        let s = coherent_state(alpha, fock(30)).unwrap();
        let rho = oscillator_density((&s).into()).unwrap();
        let (x0, p0) = (2f64.sqrt() * alpha.re, 2f64.sqrt() * alpha.im);
        for (x, p) in [(x0, p0), (x0 + 0.4, p0 - 0.3), (0.0, 0.0)] {
            let exact = (-(x - x0).powi(2) - (p - p0).powi(2)).exp() / PI;
            assert!((wigner_point(&rho, x, p) - exact).abs() < 1e-9, "{x} {p}");
        }
    }

    #[test]
    fn grid_validation_and_normalization() {
        assert!(PhaseSpaceGrid::square(4.0, 8).is_err());
        let s = cat_state(CatStateSpec::even(C64::new(1.5, 0.0)), fock(25)).unwrap();
        let w = wigner(&s, &PhaseSpaceGrid::square(6.0, 121).unwrap()).unwrap();
        assert!((w.integral() - 1.0).abs() < 1e-3);
    }
}
