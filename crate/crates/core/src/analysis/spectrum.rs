//! Pulse spectra, spectral width and Gabor (windowed Fourier) transforms.
//!
//! All transforms use the kernel `e^{-iωt}`, so a component `e^{iω₀t}` of the
//! complex pulse appears at `+ω₀`. Frequencies are angular, in the model's
//! frequency unit.

use std::path::Path;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ControlPulse;
use crate::quantum::C64;

/// Magnitude spectrum on ascending angular frequencies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<f64>,
}

impl Spectrum {
    /// Spacing of the frequency axis.
    pub fn bin_width(&self) -> f64 {
        self.frequencies[1] - self.frequencies[0]
    }

    pub fn peak_frequency(&self) -> f64 {
        let i = argmax(&self.magnitudes);
        self.frequencies[i]
    }

    /// Frequencies of local maxima whose magnitude exceeds `rel` times the global maximum.
    pub fn peaks(&self, rel: f64) -> Vec<f64> {
        let m = &self.magnitudes;
        let top = m.iter().copied().fold(0.0, f64::max);
        (0..m.len())
            .filter(|&i| {
                let left = if i == 0 { 0.0 } else { m[i - 1] };
                let right = m.get(i + 1).copied().unwrap_or(0.0);
                m[i] >= rel * top && m[i] > left && m[i] >= right
            })
            .map(|i| self.frequencies[i])
            .collect()
    }

    /// Width of the narrowest band of contiguous bins holding `fraction` of the power.
    pub fn width(&self, fraction: f64) -> f64 {
        let power: Vec<f64> = self.magnitudes.iter().map(|m| m * m).collect();
        let total: f64 = power.iter().sum();
        if total == 0.0 {
            return 0.0;
        }
        let need = fraction * total;
        let mut best = usize::MAX;
        let (mut lo, mut acc) = (0, 0.0);
        for hi in 0..power.len() {
            acc += power[hi];
            while acc - power[lo] >= need && lo < hi {
                acc -= power[lo];
                lo += 1;
            }
            if acc >= need {
                best = best.min(hi - lo + 1);
            }
        }
        best as f64 * self.bin_width()
    }

    /// CSV with header `omega,magnitude`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["omega", "magnitude"])?;
        for (f, m) in self.frequencies.iter().zip(&self.magnitudes) {
            w.write_record([f.to_string(), m.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, &x)| if x > b.1 { (i, x) } else { b })
        .0
}

/// Angular frequencies of an `n`-point FFT with sample spacing `dt`, in FFT order.
fn fft_frequencies(n: usize, dt: f64) -> Vec<f64> {
    let step = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    (0..n)
        .map(|j| {
            let j = j as i64;
            let signed = if j < (n as i64 + 1) / 2 { j } else { j - n as i64 };
            signed as f64 * step
        })
        .collect()
}

fn magnitude_spectrum(samples: &[C64], dt: f64, n: usize) -> Spectrum {
    let (frequencies, values) = transform(samples, dt, n, 0.0);
    Spectrum {
        frequencies,
        magnitudes: values.iter().map(|z| z.norm()).collect(),
    }
}

/// Discrete Fourier magnitudes of the midpoint samples, over both signs of frequency.
pub fn pulse_spectrum(pulse: &ControlPulse) -> Spectrum {
    magnitude_spectrum(pulse.samples(), pulse.grid().dt(), pulse.len())
}

/// As [`pulse_spectrum`] with zero padding to `factor` times the pulse length.
pub fn pulse_spectrum_padded(pulse: &ControlPulse, factor: usize) -> Spectrum {
    magnitude_spectrum(pulse.samples(), pulse.grid().dt(), pulse.len() * factor.max(1))
}

/// Window width and resolution of a Gabor transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaborConfig {
    /// Gaussian window width; defaults to `T/(4√(2π))`.
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default = "default_n_tau")]
    pub n_tau: usize,
    /// FFT length per window position (at least the number of samples).
    #[serde(default)]
    pub n_omega: Option<usize>,
}

fn default_n_tau() -> usize {
    64
}

impl Default for GaborConfig {
    fn default() -> Self {
        Self {
            sigma: None,
            n_tau: default_n_tau(),
            n_omega: None,
        }
    }
}

impl GaborConfig {
    pub fn default_sigma(duration: f64) -> f64 {
        duration / (4.0 * (2.0 * std::f64::consts::PI).sqrt())
    }

    pub fn sigma_for(&self, duration: f64) -> f64 {
        self.sigma.unwrap_or_else(|| Self::default_sigma(duration))
    }
}

/// `G(τ, ω)` with `values[(i, j)]` at `(taus[i], omegas[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaborMap {
    pub sigma: f64,
    pub taus: Vec<f64>,
    pub omegas: Vec<f64>,
    pub values: nalgebra::DMatrix<C64>,
}

impl GaborMap {
    /// Frequency of the largest `|G|` at each window position.
    pub fn ridge(&self) -> Vec<f64> {
        (0..self.taus.len())
            .map(|i| {
                let row: Vec<f64> = self.values.row(i).iter().map(|z| z.norm()).collect();
                self.omegas[argmax(&row)]
            })
            .collect()
    }

    /// Long-format CSV `tau,omega,abs`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["tau", "omega", "abs"])?;
        for (i, tau) in self.taus.iter().enumerate() {
            for (j, om) in self.omegas.iter().enumerate() {
                w.write_record([tau.to_string(), om.to_string(), self.values[(i, j)].norm().to_string()])?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

/// `G(τ, ω) = Σ_k w(t_k - τ) e^{-iωt_k} ε_k dt` with the unit-L2 Gaussian
/// window `w(s) = (πσ²)^{-1/4} e^{-s²/2σ²}`, for `n_tau` positions spanning `[0, T]`.
pub fn gabor(pulse: &ControlPulse, config: &GaborConfig) -> Result<GaborMap> {
    let grid = pulse.grid();
    let sigma = config.sigma_for(grid.duration());
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::Config(format!("Gabor window width must be positive, got {sigma}")));
    }
    if config.n_tau < 2 {
        return Err(Error::Config("Gabor transform needs at least two window positions".into()));
    }
    let n = config.n_omega.unwrap_or(pulse.len()).max(pulse.len());
    let dt = grid.dt();
    let norm = (std::f64::consts::PI * sigma * sigma).powf(-0.25);
    let t: Vec<f64> = grid.midpoints();
    let taus: Vec<f64> = (0..config.n_tau)
        .map(|i| grid.duration() * i as f64 / (config.n_tau - 1) as f64)
        .collect();
    let mut values = nalgebra::DMatrix::zeros(config.n_tau, n);
    let mut omegas = vec![];
    for (i, &tau) in taus.iter().enumerate() {
        let windowed: Vec<C64> = pulse
            .samples()
            .iter()
            .zip(&t)
            .map(|(e, &tk)| e * (norm * (-(tk - tau).powi(2) / (2.0 * sigma * sigma)).exp()))
            .collect();
        let (om, g) = transform(&windowed, dt, n, t[0]);
        for (j, z) in g.iter().enumerate() {
            values[(i, j)] = *z;
        }
        omegas = om;
    }
    Ok(GaborMap { sigma, taus, omegas, values })
}

/// `Σ_k x_k e^{-iω(t0 + k dt)} dt` on the FFT frequencies of length `n`
/// (zero padded), in ascending-frequency order.
fn transform(samples: &[C64], dt: f64, n: usize, t0: f64) -> (Vec<f64>, Vec<C64>) {
    let mut buf = vec![C64::new(0.0, 0.0); n];
    buf[..samples.len()].copy_from_slice(samples);
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let freqs = fft_frequencies(n, dt);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| freqs[a].total_cmp(&freqs[b]));
    let om: Vec<f64> = idx.iter().map(|&i| freqs[i]).collect();
    let vals = idx
        .iter()
        .map(|&i| buf[i] * C64::from_polar(dt, -freqs[i] * t0))
        .collect();
    (om, vals)
}
