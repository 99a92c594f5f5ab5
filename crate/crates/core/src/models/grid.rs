use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::C64;

/// Uniform grid `t_k = k·T/N`, `k = 0..=N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct TimeGrid {
    duration: f64,
    n_steps: usize,
}

#[derive(Serialize, Deserialize)]
struct RawGrid {
    duration: f64,
    n_steps: usize,
}

impl TryFrom<RawGrid> for TimeGrid {
    type Error = Error;
    fn try_from(raw: RawGrid) -> Result<Self> {
        TimeGrid::new(raw.duration, raw.n_steps)
    }
}

impl From<TimeGrid> for RawGrid {
    fn from(g: TimeGrid) -> Self {
        RawGrid {
            duration: g.duration,
            n_steps: g.n_steps,
        }
    }
}

impl TimeGrid {
    pub fn new(duration: f64, n_steps: usize) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::Config(format!("pulse duration must be positive, got {duration}")));
        }
        if n_steps < 2 {
            return Err(Error::Config(format!("need at least 2 time steps, got {n_steps}")));
        }
        Ok(Self { duration, n_steps })
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        self.duration / self.n_steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt()
    }

    pub fn midpoint(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.dt()
    }

    /// All `N + 1` grid points.
    pub fn points(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|k| self.time(k)).collect()
    }

    /// All `N` interval midpoints.
    pub fn midpoints(&self) -> Vec<f64> {
        (0..self.n_steps).map(|k| self.midpoint(k)).collect()
    }
}

/// Piecewise-constant complex control; sample `k` holds on `[t_k, t_{k+1})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlPulse {
    grid: TimeGrid,
    samples: Vec<C64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PulseSidecar {
    duration: f64,
    n_steps: usize,
    time_unit: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct PulseRow {
    t: f64,
    re: f64,
    im: f64,
}

impl ControlPulse {
    pub fn new(grid: TimeGrid, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != grid.n_steps() {
            return Err(Error::Dimension {
                expected: grid.n_steps(),
                found: samples.len(),
            });
        }
        if samples.iter().any(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::NonFinite("pulse samples"));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            samples: vec![C64::new(0.0, 0.0); grid.n_steps()],
        }
    }

    /// Samples `f` at the interval midpoints.
    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> C64) -> Result<Self> {
        Self::new(grid, grid.midpoints().into_iter().map(f).collect())
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub(crate) fn samples_mut(&mut self) -> &mut [C64] {
        &mut self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `(∫|ε|² dt)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * self.grid.dt()).sqrt()
    }

    /// `(∫|ε - ε'|² dt)^{1/2}`; grids must match.
    pub fn l2_distance(&self, other: &ControlPulse) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::Config("pulses live on different time grids".into()));
        }
        let s: f64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((s * self.grid.dt()).sqrt())
    }

    pub fn max_amplitude(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    fn sidecar_path(path: &Path) -> PathBuf {
        path.with_extension("json")
    }

    /// Writes `t,re,im` rows at the midpoints plus a JSON sidecar holding the
    /// grid and the time unit.
    pub fn write_csv(&self, path: impl AsRef<Path>, time_unit: &str) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        for (k, s) in self.samples.iter().enumerate() {
            w.serialize(PulseRow {
                t: self.grid.midpoint(k),
                re: s.re,
                im: s.im,
            })?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        let side = PulseSidecar {
            duration: self.grid.duration(),
            n_steps: self.grid.n_steps(),
            time_unit: time_unit.to_string(),
        };
        let side_path = Self::sidecar_path(path);
        let f = File::create(&side_path).map_err(|e| Error::io(&side_path, e))?;
        serde_json::to_writer_pretty(f, &side)?;
        Ok(())
    }

    /// Reads a pulse written by [`ControlPulse::write_csv`]; returns it with its time unit.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<(Self, String)> {
        let path = path.as_ref();
        let side_path = Self::sidecar_path(path);
        let f = File::open(&side_path).map_err(|e| Error::io(&side_path, e))?;
        let side: PulseSidecar = serde_json::from_reader(f)?;
        let grid = TimeGrid::new(side.duration, side.n_steps)?;
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = csv::Reader::from_reader(file);
        let mut samples = Vec::with_capacity(grid.n_steps());
        for (k, row) in r.deserialize::<PulseRow>().enumerate() {
            let row = row?;
            if k < grid.n_steps() && (row.t - grid.midpoint(k)).abs() > 1e-9 * grid.duration() {
                return Err(Error::Config(format!(
                    "{}: row {k} has t = {}, expected {}",
                    path.display(),
                    row.t,
                    grid.midpoint(k)
                )));
            }
            samples.push(C64::new(row.re, row.im));
        }
        Ok((ControlPulse::new(grid, samples)?, side.time_unit))
    }
}
