mod common;

use catoptron::dynamics::{propagate_codm_backward, propagate_costate_backward, propagate_density, propagate_state};
use catoptron::models::{ControlModel, ControlPulse, JcModel, KerrModel, LindbladSpec, Model, TimeGrid};
use catoptron::quantum::{hs_inner, number_op, trace_product, CMatrix, CompositeSpace, FockSpace, StateVector, C64};
use common::*;
use rand::Rng;

fn kerr(d: usize) -> ControlModel {
    Model::Kerr(KerrModel::new(1.0, FockSpace::new(d).unwrap()).unwrap()).control_model()
}

fn jc(d: usize) -> (ControlModel, CompositeSpace) {
    let c = CompositeSpace::new(d).unwrap();
    (Model::JaynesCummings(JcModel::new(1.0, c).unwrap()).control_model(), c)
}

fn random_pulse(seed: u64, grid: TimeGrid, amp: f64) -> ControlPulse {
    let mut r = rng(seed);
    let samples = (0..grid.n_steps())
        .map(|_| C64::new(r.random_range(-amp..amp), r.random_range(-amp..amp)))
        .collect();
    ControlPulse::new(grid, samples).unwrap()
}

#[test]
fn coherent_norm_is_conserved() {
    let (m, c) = jc(12);
    let pulse = random_pulse(1, TimeGrid::new(6.0, 300).unwrap(), 1.0);
    let psi0 = random_state(&mut rng(2), c.into());
    let traj = propagate_state(&m, &pulse, &psi0, true).unwrap();
    let drift = traj.states().iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-10, "norm drift {drift:e}");
}

#[test]
fn lindblad_trace_is_conserved() {
    let (m, c) = jc(8);
    let diss = LindbladSpec::oscillator_decay(0.3, c.into()).unwrap();
    let pulse = random_pulse(3, TimeGrid::new(5.0, 250).unwrap(), 1.0);
    let rho0 = random_density(&mut rng(4), c.into(), 4);
    let traj = propagate_density(&m, &diss, &pulse, &rho0, true).unwrap();
    let drift = traj.states().iter().map(|r| (r.trace() - 1.0).norm()).fold(0.0, f64::max);
    assert!(drift < 1e-9, "trace drift {drift:e}");
}

#[test]
fn vacuum_rabi_transfer_at_a_quarter_period() {
    let g = 0.8;
    let c = CompositeSpace::new(6).unwrap();
    let m = Model::JaynesCummings(JcModel::new(g, c).unwrap()).control_model();
    let excited = StateVector::basis(c.into(), c.index(1, 0)).unwrap();
    let pulse = ControlPulse::zeros(TimeGrid::new(std::f64::consts::PI / (2.0 * g), 50).unwrap());
    let fin = propagate_state(&m, &pulse, &excited, false).unwrap().into_final_state();
    let p = fin.amplitudes()[c.index(0, 1)].norm_sqr();
    assert!((p - 1.0).abs() < 1e-8, "transfer {p}");
}

#[test]
fn free_decay_of_the_photon_number() {
    let f = FockSpace::new(10).unwrap();
    let m = kerr(10);
    let kappa = 0.37;
    let diss = LindbladSpec::oscillator_decay(kappa, f.into()).unwrap();
    let mut r = rng(5);
    let rho0 = random_density(&mut r, f.into(), 3);
    let n = number_op(f);
    let n0 = trace_product(n.matrix(), rho0.matrix()).re;
    let traj = propagate_density(&m, &diss, &ControlPulse::zeros(TimeGrid::new(4.0, 80).unwrap()), &rho0, true).unwrap();
    for (t, rho) in traj.times().iter().zip(traj.states()) {
        let nt = trace_product(n.matrix(), rho.matrix()).re;
        let exact = n0 * (-kappa * t).exp();
        assert!(((nt - exact) / exact).abs() < 1e-8, "t = {t}: {nt} vs {exact}");
    }
}

#[test]
fn forward_and_backward_maps_are_adjoint() {
    let (m, c) = jc(7);
    let pulse = random_pulse(6, TimeGrid::new(3.0, 120).unwrap(), 1.5);
    let mut r = rng(7);
    let psi0 = random_state(&mut r, c.into());
    let chi_t = random_amplitudes(&mut r, c.dim());
    let fin = propagate_state(&m, &pulse, &psi0, false).unwrap().into_final_state();
    let chi0 = propagate_costate_backward(&m, &pulse, &chi_t).unwrap();
    let lhs = chi_t.dotc(fin.amplitudes());
    let rhs = chi0.at(0).dotc(psi0.amplitudes());
    assert!((lhs - rhs).norm() < 1e-10, "{lhs} vs {rhs}");

    let diss = LindbladSpec::oscillator_decay(0.4, c.into()).unwrap();
    let rho0 = random_density(&mut r, c.into(), 3);
    let x = CMatrix::from_fn(c.dim(), c.dim(), |_, _| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
    let rho_t = propagate_density(&m, &diss, &pulse, &rho0, false).unwrap().into_final_state();
    let x0 = propagate_codm_backward(&m, &diss, &pulse, &x).unwrap();
    let lhs = hs_inner(&x, rho_t.matrix());
    let rhs = hs_inner(x0.at(0), rho0.matrix());
    assert!((lhs - rhs).norm() < 1e-10, "{lhs} vs {rhs}");
}

#[test]
fn kerr_phases_of_fock_states() {
    let m = kerr(8);
    let f = FockSpace::new(8).unwrap();
    let t = 0.9;
    let pulse = ControlPulse::zeros(TimeGrid::new(t, 30).unwrap());
    for n in 0..8 {
        let psi = StateVector::basis(f.into(), n).unwrap();
        let fin = propagate_state(&m, &pulse, &psi, false).unwrap().into_final_state();
        // drift eigenvalue on |n⟩ is -K n(n-1)
        let phase = (n * n.saturating_sub(1)) as f64 * t;
        assert!((fin.amplitudes()[n] - C64::from_polar(1.0, phase)).norm() < 1e-12, "n = {n}");
    }
}

#[test]
fn coherence_of_a_decaying_coherent_state() {
    use catoptron::models::Quadrature;
    use catoptron::quantum::{coherent_state, OperatorMatrix};
    let f = FockSpace::new(25).unwrap();
    let k = kerr(25);
    let zero = OperatorMatrix::hermitian(f.into(), CMatrix::zeros(25, 25)).unwrap();
    let free = ControlModel::new(zero, k.derivative(Quadrature::Re).clone(), k.derivative(Quadrature::Im).clone()).unwrap();
    let kappa = 0.5;
    let diss = LindbladSpec::oscillator_decay(kappa, f.into()).unwrap();
    let rho0 = coherent_state(C64::new(1.1, 0.6), f).unwrap().to_density();
    let traj = propagate_density(&free, &diss, &ControlPulse::zeros(TimeGrid::new(3.0, 60).unwrap()), &rho0, true).unwrap();
    for (t, rho) in traj.times().iter().zip(traj.states()) {
        // |α⟩ → |α e^{-κt/2}⟩, so ⟨0|ρ|1⟩ = e^{-|α(t)|²} α(t)*
        let a = C64::new(1.1, 0.6) * (-kappa * t / 2.0).exp();
        let exact = (-a.norm_sqr()).exp() * a.conj();
        assert!((rho.matrix()[(0, 1)] - exact).norm() < 1e-9, "t = {t}");
    }
}
