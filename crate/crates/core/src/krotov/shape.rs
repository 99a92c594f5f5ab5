use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{ControlPulse, TimeGrid};
use crate::quantum::C64;

/// Switch-on/off envelope with `sin²` flanks of length `flank_fraction·T`
/// and a plateau of 1 in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawShape", into = "RawShape")]
pub struct ShapeFunction {
    flank_fraction: f64,
}

#[derive(Serialize, Deserialize)]
struct RawShape {
    flank_fraction: f64,
}

impl TryFrom<RawShape> for ShapeFunction {
    type Error = Error;
    fn try_from(raw: RawShape) -> Result<Self> {
        ShapeFunction::sine_squared(raw.flank_fraction)
    }
}

impl From<ShapeFunction> for RawShape {
    fn from(s: ShapeFunction) -> Self {
        RawShape {
            flank_fraction: s.flank_fraction,
        }
    }
}

impl ShapeFunction {
    pub fn sine_squared(flank_fraction: f64) -> Result<Self> {
        if !(flank_fraction > 0.0 && flank_fraction <= 0.5) {
            return Err(Error::Config(format!(
                "flank fraction must lie in (0, 0.5], got {flank_fraction}"
            )));
        }
        Ok(Self { flank_fraction })
    }

    pub fn flank_fraction(&self) -> f64 {
        self.flank_fraction
    }

    /// `S(t)` for a pulse of duration `duration`.
    pub fn at(&self, t: f64, duration: f64) -> f64 {
        let rise = self.flank_fraction * duration;
        let edge = t.min(duration - t);
        if edge <= 0.0 {
            0.0
        } else if edge >= rise {
            1.0
        } else {
            (std::f64::consts::FRAC_PI_2 * edge / rise).sin().powi(2)
        }
    }

    /// Values at the interval midpoints, where the pulse samples live.
    pub fn at_midpoints(&self, grid: TimeGrid) -> Vec<f64> {
        grid.midpoints().into_iter().map(|t| self.at(t, grid.duration())).collect()
    }
}

/// `S(t_k)` at all grid points.
pub fn shape_eval(shape: &ShapeFunction, grid: TimeGrid) -> Vec<f64> {
    grid.points().into_iter().map(|t| shape.at(t, grid.duration())).collect()
}

/// Random phase modulation `exp(i Σ_j c_j sin(jπt/T + φ_j))` of a guess pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseModulation {
    pub harmonics: usize,
    /// Bound on `|c_j|`.
    pub depth: f64,
    pub seed: u64,
}

/// Guess pulse `A·S(t)·e^{iθ}`, optionally phase-modulated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuessPulse {
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
    pub shape: ShapeFunction,
    #[serde(default)]
    pub modulation: Option<PhaseModulation>,
}

impl GuessPulse {
    pub fn build(&self, grid: TimeGrid) -> Result<ControlPulse> {
        let terms: Vec<(f64, f64)> = match self.modulation {
            Some(m) => {
                let mut rng = ChaCha8Rng::seed_from_u64(m.seed);
                (0..m.harmonics)
                    .map(|_| {
                        let c = rng.random_range(-1.0..=1.0) * m.depth;
                        let phi = rng.random_range(0.0..std::f64::consts::TAU);
                        (c, phi)
                    })
                    .collect()
            }
            None => vec![],
        };
        let t_f = grid.duration();
        ControlPulse::from_fn(grid, |t| {
            let theta: f64 = terms
                .iter()
                .enumerate()
                .map(|(j, (c, phi))| c * ((j + 1) as f64 * std::f64::consts::PI * t / t_f + phi).sin())
                .sum();
            C64::from_polar(self.amplitude * self.shape.at(t, t_f), self.phase + theta)
        })
    }
}
