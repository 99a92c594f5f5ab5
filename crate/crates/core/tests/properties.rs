mod common;

use std::f64::consts::PI;

use catoptron::analysis::{
    cat_infidelity_entangled, cat_infidelity_pure, gabor, pulse_spectrum, pulse_spectrum_padded, pure_target_fidelity,
    wigner, GaborConfig, PhaseSpaceGrid,
};
use catoptron::functionals::{CompositeFunctional, FunctionalTerm};
use catoptron::models::{ControlPulse, TimeGrid};
use catoptron::quantum::{
    cat_state, coherent_amplitudes, entangled_cat_state, parity_projectors, partial_trace, purity, CMatrix,
    CatStateSpec, CompositeSpace, CVector, FockSpace, Keep, QubitBasis, Space, StateVector, C64,
};
use common::*;
use nalgebra::SymmetricEigen;
use proptest::prelude::*;

fn two_branch(alpha: C64, c1: C64, c2: C64, d: usize) -> StateVector {
    let amps = coherent_amplitudes(alpha, d) * c1 + coherent_amplitudes(-alpha, d) * c2;
    StateVector::normalized(Space::Fock(FockSpace::new(d).unwrap()), amps).unwrap()
}

fn cat_phase_value(psi: &StateVector) -> f64 {
    CompositeFunctional::of([FunctionalTerm::CatPhase]).unwrap().value(psi).unwrap()
}

fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let e = SymmetricEigen::new(m.clone());
    let s = CVector::from_iterator(e.eigenvalues.len(), e.eigenvalues.iter().map(|l| C64::new(l.max(0.0).sqrt(), 0.0)));
    &e.eigenvectors * CMatrix::from_diagonal(&s) * e.eigenvectors.adjoint()
}

/// `Tr √(√ρ σ √ρ)` evaluated literally.
fn uhlmann(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let r = psd_sqrt(rho);
    let inner = &r * sigma * &r;
    let e = SymmetricEigen::new((&inner + inner.adjoint()) * C64::new(0.5, 0.0));
    let top = e.eigenvalues.iter().copied().fold(0.0, f64::max);
    // round-off eigenvalues would contribute their square roots
    e.eigenvalues.iter().filter(|&&l| l > 1e-13 * top).map(|l| l.sqrt()).sum()
}

/// `|⟨x|n⟩|²` for the first `d` Hermite functions.
fn position_density(rho: &CMatrix, x: f64) -> f64 {
    let d = rho.nrows();
    let mut h = vec![PI.powf(-0.25) * (-x * x / 2.0).exp()];
    if d > 1 {
        h.push(2f64.sqrt() * x * h[0]);
    }
    for n in 2..d {
        let v = ((2.0 / n as f64).sqrt() * x * h[n - 1]) - (((n - 1) as f64 / n as f64).sqrt() * h[n - 2]);
        h.push(v);
    }
    let hv = CVector::from_iterator(d, h.iter().map(|&v| C64::new(v, 0.0)));
    hv.dotc(&(rho * &hv)).re
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn cat_phase_vanishes_on_balanced_superpositions(r in 1.0f64..2.5, theta in 0.0..2.0 * PI, phi in 0.0..2.0 * PI) {
        let psi = two_branch(C64::from_polar(r, theta), C64::new(1.0, 0.0), C64::from_polar(1.0, phi), 40);
        prop_assert!(cat_phase_value(&psi) < 1e-10);
    }

    #[test]
    fn cat_phase_of_unbalanced_superpositions(r in 1.0f64..2.5, theta in 0.0..2.0 * PI, w in 0.2f64..0.6, phi in 0.0..2.0 * PI) {
        let alpha = C64::from_polar(r, theta);
        let c2 = C64::from_polar(w, phi);
        let psi = two_branch(alpha, C64::new(1.0, 0.0), c2, 40);
        let overlap = (-2.0 * r * r).exp();
        let norm = 1.0 + w * w + 2.0 * c2.re * overlap;
        let exact = 4.0 * ((1.0 - w * w) / norm).powi(2);
        let v = cat_phase_value(&psi);
        prop_assert!(v > 0.01);
        prop_assert!((v - exact).abs() < 1e-8, "{} vs {}", v, exact);
    }

    #[test]
    fn cat_states_are_recognized(r in 0.5f64..2.5, theta in 0.0..2.0 * PI, phase in 0.0..2.0 * PI) {
        let spec = CatStateSpec::new(C64::from_polar(r, theta), phase);
        let psi = cat_state(spec, FockSpace::new(40).unwrap()).unwrap();
        let fit = cat_infidelity_pure(&psi).unwrap();
        prop_assert!(fit.infidelity < 1e-8, "infidelity {}", fit.infidelity);
        prop_assert!((fit.spec.alpha.norm() - r).abs() < 1e-3);
        let rotated = StateVector::new(psi.space(), psi.amplitudes() * C64::from_polar(1.0, phase + theta)).unwrap();
        prop_assert!((cat_infidelity_pure(&rotated).unwrap().infidelity - fit.infidelity).abs() < 1e-9);
    }

    #[test]
    fn functionals_ignore_the_global_phase(seed in 0u64..1000, theta in 0.0..2.0 * PI) {
        let mut r = rng(seed);
        for (term, space) in pure_terms(&mut r) {
            let f = CompositeFunctional::of([term]).unwrap();
            let psi = random_state(&mut r, space);
            let rotated = StateVector::new(space, psi.amplitudes() * C64::from_polar(1.0, theta)).unwrap();
            let (a, b) = (f.value(&psi).unwrap(), f.value(&rotated).unwrap());
            prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()), "{:?}: {} vs {}", f.term_names(), a, b);
        }
    }

    #[test]
    fn pure_target_fidelity_matches_the_general_formula(seed in 0u64..1000) {
        let mut r = rng(seed);
        let space = fock(6);
        let rho = random_density(&mut r, space, 6);
        let psi = random_state(&mut r, space);
        let sigma = psi.amplitudes() * psi.amplitudes().adjoint();
        let a = pure_target_fidelity(rho.matrix(), psi.amplitudes());
        let b = uhlmann(rho.matrix(), &sigma);
        prop_assert!((a - b).abs() < 1e-10, "{} vs {}", a, b);
    }

    #[test]
    fn wigner_marginal_and_origin(seed in 0u64..1000) {
        let mut r = rng(seed);
        let rho = random_density(&mut r, fock(6), 2);
        let grid = PhaseSpaceGrid::square(7.0, 141).unwrap();
        let w = wigner(&rho, &grid).unwrap();
        prop_assert!((w.integral() - 1.0).abs() < 1e-6);
        for (x, m) in grid.xs().iter().zip(w.x_marginal()) {
            prop_assert!((m - position_density(rho.matrix(), *x)).abs() < 1e-6, "x = {}", x);
        }
        let (even, odd) = parity_projectors(FockSpace::new(6).unwrap());
        let parity = (rho.matrix() * (even.matrix() - odd.matrix())).trace().re;
        let origin = w.values[(70, 70)];
        prop_assert!((PI * origin - parity).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn entangled_cats_are_recognized(r in 0.8f64..2.2, arg in 0.0..2.0 * PI, t in 0.0..PI, p in 0.0..2.0 * PI, chi in 0.0..2.0 * PI) {
        let c = CompositeSpace::new(30).unwrap();
        let psi = entangled_cat_state(C64::from_polar(r, arg), &QubitBasis::from_angles(t, p, chi), c).unwrap();
        let fit = cat_infidelity_entangled(&psi).unwrap();
        prop_assert!(fit.infidelity < 1e-4, "infidelity {}", fit.infidelity);
        let q = partial_trace(&psi.to_density(), Keep::Qubit).unwrap();
        prop_assert!((purity(&q) - 0.5).abs() < 1e-8);
    }
}

#[test]
fn gabor_ridge_follows_a_chirp() {
    let (t_total, n) = (40.0, 2000);
    let (w0, beta) = (1.0, 0.1);
    let grid = TimeGrid::new(t_total, n).unwrap();
    let pulse = ControlPulse::from_fn(grid, |t| C64::from_polar(1.0, w0 * t + beta * t * t / 2.0)).unwrap();
    let map = gabor(&pulse, &GaborConfig { sigma: Some(3.0), n_tau: 41, n_omega: Some(8192) }).unwrap();
    let bin = map.omegas[1] - map.omegas[0];
    for (tau, om) in map.taus.iter().zip(map.ridge()) {
        if *tau > 8.0 && *tau < t_total - 8.0 {
            assert!((om - (w0 + beta * tau)).abs() < 2.0 * bin + 0.02, "τ = {tau}: {om}");
        }
    }
    let ridge = gabor(&pulse, &GaborConfig::default()).unwrap().ridge();
    assert!(ridge.windows(2).all(|w| w[1] >= w[0]), "{ridge:?}");
}

#[test]
fn gabor_with_a_wide_window_is_the_spectrum() {
    let grid = TimeGrid::new(10.0, 256).unwrap();
    let pulse = ControlPulse::from_fn(grid, |t| C64::new((0.7 * t).sin(), 0.3 * (2.1 * t).cos()) * (t / 10.0)).unwrap();
    let sigma = 1e6;
    let map = gabor(&pulse, &GaborConfig { sigma: Some(sigma), n_tau: 3, n_omega: None }).unwrap();
    let spec = pulse_spectrum(&pulse);
    let scale = (PI * sigma * sigma).powf(0.25);
    let top = spec.magnitudes.iter().copied().fold(0.0, f64::max);
    for (j, m) in spec.magnitudes.iter().enumerate() {
        assert!((map.omegas[j] - spec.frequencies[j]).abs() < 1e-12);
        assert!((map.values[(1, j)].norm() * scale - m).abs() < 1e-9 * top);
    }
}

#[test]
fn gaussian_pulse_spectral_width() {
    let (t_total, s) = (60.0, 2.0);
    let grid = TimeGrid::new(t_total, 1200).unwrap();
    let pulse = ControlPulse::from_fn(grid, |t| C64::new((-(t - t_total / 2.0).powi(2) / (2.0 * s * s)).exp(), 0.0)).unwrap();
    let spec = pulse_spectrum_padded(&pulse, 16);
    // |ε̃|² ∝ exp(-ω² s²): a normal law with standard deviation 1/(√2 s)
    let z99 = 2.575829303548901;
    let exact = 2.0 * z99 / (2f64.sqrt() * s);
    let width = spec.width(0.99);
    assert!((width - exact).abs() < 2.0 * spec.bin_width(), "{width} vs {exact}");
    assert!(spec.peak_frequency().abs() < spec.bin_width());
}
