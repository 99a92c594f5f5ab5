mod common;

use catoptron::quantum::{CMatrix, C64};
use common::*;

const H: f64 = 1e-5;

#[test]
fn pure_costates_match_finite_differences() {
    let mut r = rng(2024);
    for (term, space) in pure_terms(&mut r) {
        let func = single(term.clone());
        for _ in 0..20 {
            let psi = random_state(&mut r, space).into_amplitudes();
            let value = |x: &catoptron::quantum::CVector| func.evaluate_pure(x, space).unwrap().total;
            let fd = fd_pure_gradient(&value, &psi, H);
            let chi = func.evaluate_pure(&psi, space).unwrap().costate;
            let err = relative_error(&(-chi), &fd);
            assert!(err < 1e-6, "{}: relative error {err:e}", term.name());
        }
    }
}

#[test]
fn density_costates_match_finite_differences() {
    let mut r = rng(77);
    for (term, space) in dm_terms(&mut r) {
        let func = single(term.clone());
        let basis = hermitian_basis(space.dim());
        for i in 0..20 {
            let rho = random_density(&mut r, space, 1 + i % space.dim()).into_matrix();
            let chi = func.evaluate_dm(&rho, space).unwrap().costate;
            let f = |m: &CMatrix| func.evaluate_dm(m, space).unwrap().total;
            let (mut num, mut den) = (0.0f64, 0.0f64);
            for e in &basis {
                let fd = (f(&(&rho + e * C64::new(H, 0.0))) - f(&(&rho - e * C64::new(H, 0.0)))) / (2.0 * H);
                let an = -2.0 * catoptron::quantum::trace_product(&chi, e).re;
                num += (fd - an).powi(2);
                den += fd.powi(2);
            }
            let err = (num / den).sqrt();
            assert!(err < 1e-6, "{}: relative error {err:e}", term.name());
        }
    }
}

#[test]
fn purity_costate_closed_form() {
    use catoptron::functionals::FunctionalTerm;
    use catoptron::quantum::{partial_trace, Keep};
    let mut r = rng(9);
    let space = composite(6);
    let d = 6;
    let func = single(FunctionalTerm::CatPurity);
    for _ in 0..10 {
        let psi = random_state(&mut r, space);
        let rho_ho = partial_trace(&psi.to_density(), Keep::Oscillator).unwrap();
        let lifted = CMatrix::from_fn(2 * d, 2 * d, |i, j| {
            if i / d == j / d {
                rho_ho.matrix()[(i % d, j % d)]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let expected = (lifted * psi.amplitudes()) * C64::new(-4.0, 0.0);
        let chi = func.evaluate_pure(psi.amplitudes(), space).unwrap().costate;
        assert!((chi - expected).norm() < 1e-12);
    }
}
