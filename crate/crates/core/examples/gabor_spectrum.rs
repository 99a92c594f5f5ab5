//! Spectrum and Gabor transform of a linear chirp.

use catoptron::analysis::{gabor, pulse_spectrum, GaborConfig};
use catoptron::models::{ControlPulse, TimeGrid};
use catoptron::quantum::C64;

fn main() -> catoptron::Result<()> {
    let t = 40.0;
    // instantaneous frequency rising from 1 to 5
    let chirp = ControlPulse::from_fn(TimeGrid::new(t, 2000)?, |s| C64::from_polar(1.0, s + 0.05 * s * s))?;
    let spec = pulse_spectrum(&chirp);
    println!("bin width {:.4}, 99% power width {:.3}", spec.bin_width(), spec.width(0.99));

    let g = gabor(&chirp, &GaborConfig { n_tau: 9, n_omega: Some(8192), ..Default::default() })?;
    println!("window width sigma = {:.3}", g.sigma);
    for (tau, w) in g.taus.iter().zip(g.ridge()) {
        println!("tau = {tau:5.1}  ridge omega = {w:.3}  (expected {:.3})", 1.0 + 0.1 * tau);
    }
    Ok(())
}
