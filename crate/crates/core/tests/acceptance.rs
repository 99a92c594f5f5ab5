//! One PASS/FAIL line per acceptance criterion. Criteria 5 to 8 run the
//! command presets and take several minutes in an optimized build.

mod common;

use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use catoptron::analysis::cat_infidelity_entangled;
use catoptron::dynamics::{propagate_codm_backward, propagate_costate_backward, propagate_density, propagate_state};
use catoptron::experiments::{
    cmd_dissipative_reoptimize, cmd_jc_optimize, cmd_kerr_compare, cmd_qsl_scan, Command, ExperimentConfig, Overrides,
};
use catoptron::functionals::{
    j_alpha, j_cat_mutualinfo_dm, j_cat_parity, j_cat_phase, j_cat_purity, j_cs_dm, j_cs_normalized, j_cs_variance,
    CompositeFunctional, FunctionalTerm, ParitySign, RadiusTarget,
};
use catoptron::krotov::IterationRecord;
use catoptron::models::{ControlModel, ControlPulse, JcModel, LindbladSpec, Model, TimeGrid};
use catoptron::quantum::{
    cat_state, coherent_state, entangled_cat_state, hs_inner, number_op, partial_trace, purity, trace_product,
    CMatrix, CVector, CatStateSpec, CompositeSpace, DensityMatrix, FockSpace, Keep, QubitBasis, Space, StateVector,
    C64,
};
use common::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

type Outcome = std::result::Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fock_state(d: usize, amps: &[(usize, f64)]) -> StateVector {
    let mut v = CVector::zeros(d);
    for &(n, a) in amps {
        v[n] = C64::new(a, 0.0);
    }
    StateVector::normalized(Space::Fock(FockSpace::new(d).unwrap()), v).unwrap()
}

fn product(basis: [C64; 2], ho: &StateVector, c: CompositeSpace) -> StateVector {
    let d = c.ho().dim();
    let v = CVector::from_fn(2 * d, |i, _| basis[i / d] * ho.amplitudes()[i % d]);
    StateVector::normalized(c.into(), v).unwrap()
}

fn functional_values() -> Outcome {
    let f = FockSpace::new(30).unwrap();
    let c = CompositeSpace::new(30).unwrap();
    let two = fock_state(30, &[(2, 1.0)]);
    let mix02 = fock_state(30, &[(0, 1.0), (2, 1.0)]);
    let mix01 = fock_state(30, &[(0, 1.0), (1, 1.0)]);
    let basis = QubitBasis::from_angles(0.7, 1.1, 0.3);
    let ecat = entangled_cat_state(C64::new(1.5, 0.4), &basis, c).unwrap();
    let plus_cat = product(basis.plus(), &cat_state(CatStateSpec::even(C64::new(1.5, 0.4)), f).unwrap(), c);
    let minus_cat = product(basis.minus(), &cat_state(CatStateSpec::odd(C64::new(1.5, 0.4)), f).unwrap(), c);
    let classical = DensityMatrix::new(
        c.into(),
        (plus_cat.to_density().into_matrix() + minus_cat.to_density().into_matrix()) * C64::new(0.5, 0.0),
    )
    .unwrap();
    let mut cases: Vec<(&str, f64, f64)> = vec![];
    for phi in [0.0, PI / 3.0, PI] {
        let cat = cat_state(CatStateSpec::new(C64::new(1.5, 0.0), phi), f).unwrap();
        cases.push(("cat j_cs", j_cs_variance(&cat).unwrap(), 0.0));
        cases.push(("cat j_cs normalized", j_cs_normalized(&cat).unwrap(), 0.0));
        cases.push(("cat j_cat_phase", j_cat_phase(&cat).unwrap(), 0.0));
    }
    let coh = coherent_state(C64::new(1.2, -0.5), f).unwrap();
    cases.extend([
        ("coherent j_cs", j_cs_variance(&coh).unwrap(), 0.0),
        ("coherent j_cat_phase", j_cat_phase(&coh).unwrap(), 4.0),
        ("|2⟩ j_cs", j_cs_variance(&two).unwrap(), 2.0),
        ("|2⟩ j_cs normalized", j_cs_normalized(&two).unwrap(), 1.0),
        ("(|0⟩+|2⟩)/√2 j_cs normalized", j_cs_normalized(&mix02).unwrap(), 0.5),
        ("(|0⟩+|1⟩)/√2 even parity", j_cat_parity(&mix01, ParitySign::Even).unwrap(), 0.75),
        ("j_alpha(1, 2)", j_alpha(&mix02, RadiusTarget::new(2.0).unwrap()).unwrap(), 225.0 / 256.0 + 0.25),
        ("j_alpha(α, α)", j_alpha(&mix02, RadiusTarget::new(1.0).unwrap()).unwrap(), 0.0),
        ("product purity term", j_cat_purity(&product(basis.plus(), &coh, c)).unwrap(), 1.0),
        ("entangled cat purity term", j_cat_purity(&ecat).unwrap(), 0.0),
        ("entangled cat j_cs_dm", j_cs_dm(&ecat.to_density()).unwrap(), 0.0),
        ("classical mixture j_cs_dm", j_cs_dm(&classical).unwrap(), 0.0),
        ("classical mixture mutual-information term", j_cat_mutualinfo_dm(&classical).unwrap(), 0.5),
    ]);
    let worst = cases.iter().map(|(n, v, e)| ((v - e).abs(), *n)).fold((0.0, ""), |a, b| if b.0 > a.0 { b } else { a });
    check(worst.0 < 1e-8, format!("{} values, largest deviation {:.1e} ({})", cases.len(), worst.0, worst.1))
}

fn gradients() -> Outcome {
    const H: f64 = 1e-5;
    let mut r = rng(2024);
    let mut worst = (0.0f64, String::new());
    let mut note = |err: f64, name: &str| {
        if err > worst.0 {
            worst = (err, name.to_string());
        }
    };
    for (term, space) in pure_terms(&mut r) {
        let func = single(term.clone());
        for _ in 0..20 {
            let psi = random_state(&mut r, space).into_amplitudes();
            let fd = fd_pure_gradient(&|x: &CVector| func.evaluate_pure(x, space).unwrap().total, &psi, H);
            let chi = func.evaluate_pure(&psi, space).unwrap().costate;
            note(relative_error(&(-chi), &fd), term.name());
        }
    }
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
                let an = -2.0 * trace_product(&chi, e).re;
                num += (fd - an).powi(2);
                den += fd.powi(2);
            }
            note((num / den).sqrt(), term.name());
        }
    }
    let d = 6;
    let space = composite(d);
    let func = single(FunctionalTerm::CatPurity);
    for _ in 0..20 {
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
        note(relative_error(&chi, &expected), "purity closed form");
    }
    check(worst.0 < 1e-6, format!("largest relative error {:.1e} ({})", worst.0, worst.1))
}

fn random_pulse(r: &mut ChaCha8Rng, grid: TimeGrid, amp: f64) -> ControlPulse {
    let samples = (0..grid.n_steps()).map(|_| C64::new(r.random_range(-amp..amp), r.random_range(-amp..amp))).collect();
    ControlPulse::new(grid, samples).unwrap()
}

fn jc(g: f64, d: usize) -> (ControlModel, CompositeSpace) {
    let c = CompositeSpace::new(d).unwrap();
    (Model::JaynesCummings(JcModel::new(g, c).unwrap()).control_model(), c)
}

fn propagators() -> Outcome {
    let mut r = rng(3);
    let (m, c) = jc(1.0, 12);
    let pulse = random_pulse(&mut r, TimeGrid::new(6.0, 300).unwrap(), 1.0);
    let psi0 = random_state(&mut r, c.into());
    let traj = propagate_state(&m, &pulse, &psi0, true).unwrap();
    let norm = traj.states().iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max);

    let (m8, c8) = jc(1.0, 8);
    let diss = LindbladSpec::oscillator_decay(0.3, c8.into()).unwrap();
    let pulse8 = random_pulse(&mut r, TimeGrid::new(5.0, 250).unwrap(), 1.0);
    let rho0 = random_density(&mut r, c8.into(), 4);
    let dtraj = propagate_density(&m8, &diss, &pulse8, &rho0, true).unwrap();
    let trace = dtraj.states().iter().map(|s| (s.trace() - 1.0).norm()).fold(0.0, f64::max);

    let g = 0.8;
    let (mg, cg) = jc(g, 6);
    let excited = StateVector::basis(cg.into(), cg.index(1, 0)).unwrap();
    let quarter = ControlPulse::zeros(TimeGrid::new(PI / (2.0 * g), 50).unwrap());
    let fin = propagate_state(&mg, &quarter, &excited, false).unwrap().into_final_state();
    let rabi = (fin.amplitudes()[cg.index(0, 1)].norm_sqr() - 1.0).abs();

    let f = FockSpace::new(10).unwrap();
    let kerr = Model::Kerr(catoptron::models::KerrModel::new(1.0, f).unwrap()).control_model();
    let kappa = 0.37;
    let fdiss = LindbladSpec::oscillator_decay(kappa, f.into()).unwrap();
    let frho = random_density(&mut r, f.into(), 3);
    let n = number_op(f);
    let n0 = trace_product(n.matrix(), frho.matrix()).re;
    let ftraj = propagate_density(&kerr, &fdiss, &ControlPulse::zeros(TimeGrid::new(4.0, 80).unwrap()), &frho, true).unwrap();
    let decay = ftraj
        .times()
        .iter()
        .zip(ftraj.states())
        .map(|(t, s)| {
            let exact = n0 * (-kappa * t).exp();
            ((trace_product(n.matrix(), s.matrix()).re - exact) / exact).abs()
        })
        .fold(0.0, f64::max);

    let (ma, ca) = jc(1.0, 7);
    let apulse = random_pulse(&mut r, TimeGrid::new(3.0, 120).unwrap(), 1.5);
    let apsi = random_state(&mut r, ca.into());
    let chi_t = random_amplitudes(&mut r, ca.dim());
    let afin = propagate_state(&ma, &apulse, &apsi, false).unwrap().into_final_state();
    let chi0 = propagate_costate_backward(&ma, &apulse, &chi_t).unwrap();
    let mut adjoint = (chi_t.dotc(afin.amplitudes()) - chi0.at(0).dotc(apsi.amplitudes())).norm();
    let adiss = LindbladSpec::oscillator_decay(0.4, ca.into()).unwrap();
    let arho = random_density(&mut r, ca.into(), 3);
    let x = CMatrix::from_fn(ca.dim(), ca.dim(), |_, _| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
    let arho_t = propagate_density(&ma, &adiss, &apulse, &arho, false).unwrap().into_final_state();
    let x0 = propagate_codm_backward(&ma, &adiss, &apulse, &x).unwrap();
    adjoint = adjoint.max((hs_inner(&x, arho_t.matrix()) - hs_inner(x0.at(0), arho.matrix())).norm());

    check(
        norm < 1e-10 && trace < 1e-9 && rabi < 1e-8 && decay < 1e-8 && adjoint < 1e-10,
        format!(
            "norm drift {norm:.1e}, trace drift {trace:.1e}, Rabi transfer error {rabi:.1e}, decay-law error {decay:.1e}, adjoint defect {adjoint:.1e}"
        ),
    )
}

fn properties() -> Outcome {
    let mut r = rng(4);
    let f = FockSpace::new(40).unwrap();
    let two_branch = |alpha: C64, c2: C64| {
        let amps = coherent_state(alpha, f).unwrap().into_amplitudes() + coherent_state(-alpha, f).unwrap().into_amplitudes() * c2;
        StateVector::normalized(f.into(), amps).unwrap()
    };
    let (mut balanced, mut unbalanced) = (0.0f64, f64::INFINITY);
    for _ in 0..50 {
        let alpha = C64::from_polar(r.random_range(1.0..2.5), r.random_range(0.0..2.0 * PI));
        balanced = balanced.max(j_cat_phase(&two_branch(alpha, C64::from_polar(1.0, r.random_range(0.0..2.0 * PI)))).unwrap());
        let c2 = C64::from_polar(r.random_range(0.2..0.6), r.random_range(0.0..2.0 * PI));
        unbalanced = unbalanced.min(j_cat_phase(&two_branch(alpha, c2)).unwrap());
    }
    let c = CompositeSpace::new(30).unwrap();
    let (mut infid, mut pur) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let alpha = C64::from_polar(r.random_range(0.8..2.2), r.random_range(0.0..2.0 * PI));
        let basis = QubitBasis::from_angles(r.random_range(0.0..PI), r.random_range(0.0..2.0 * PI), r.random_range(0.0..2.0 * PI));
        let psi = entangled_cat_state(alpha, &basis, c).unwrap();
        infid = infid.max(cat_infidelity_entangled(&psi).unwrap().infidelity);
        pur = pur.max((purity(&partial_trace(&psi.to_density(), Keep::Qubit).unwrap()) - 0.5).abs());
    }
    check(
        balanced < 1e-9 && unbalanced > 0.01 && infid < 1e-4 && pur < 1e-8,
        format!(
            "balanced phase term max {balanced:.1e}, unbalanced min {unbalanced:.3}, entangled-cat infidelity max {infid:.1e}, purity deviation max {pur:.1e}"
        ),
    )
}

fn preset_config(cmd: Command, out: &Path) -> ExperimentConfig {
    let o = Overrides { output_dir: Some(out.to_path_buf()), ..Overrides::default() };
    ExperimentConfig::from_value(cmd, json!({}), &o).expect("preset resolves")
}

fn kerr(out: &Path) -> Outcome {
    let r = cmd_kerr_compare(&preset_config(Command::KerrCompare, out)).map_err(|e| e.to_string())?;
    check(
        r.cat_fit.infidelity < 0.02 && r.spectral_width_cat < 400.0 && r.state_to_state_fit.infidelity > 0.1,
        format!(
            "cat infidelity {:.2e}, width {:.1} K, state-to-state cat infidelity {:.3}",
            r.cat_fit.infidelity, r.spectral_width_cat, r.state_to_state_fit.infidelity
        ),
    )
}

fn jc_optimize(out: &Path) -> Outcome {
    let r = cmd_jc_optimize(&preset_config(Command::JcOptimize, out)).map_err(|e| e.to_string())?;
    let worst = r.spectrum.peaks.iter().map(|p| p.distance).fold(0.0, f64::max);
    check(
        r.entangled_fit.infidelity < 5e-3 && r.spectrum.all_peaks_aligned && !r.spectrum.peaks.is_empty(),
        format!(
            "entangled-cat infidelity {:.2e}, {} peaks, largest distance {:.3} (bin {:.3})",
            r.entangled_fit.infidelity,
            r.spectrum.peaks.len(),
            worst,
            r.spectrum.bin_width
        ),
    )
}

fn qsl(out: &Path) -> Outcome {
    let r = cmd_qsl_scan(&preset_config(Command::QslScan, out)).map_err(|e| e.to_string())?;
    let t = |a: f64| r.curves.iter().find(|c| c.alpha_tgt == a).and_then(|c| c.t_qsl);
    let trends = r.curves.iter().all(|c| c.nondecreasing && c.t_qsl.is_some());
    let ordered = matches!((t(1.0), t(1.5)), (Some(a), Some(b)) if b > a);
    check(
        trends && ordered,
        format!(
            "T_QSL(1.0) = {:?}, T_QSL(1.5) = {:?}, nondecreasing {:?}",
            t(1.0),
            t(1.5),
            r.curves.iter().map(|c| c.nondecreasing).collect::<Vec<_>>()
        ),
    )
}

fn dissipative(out: &Path) -> Outcome {
    let r = cmd_dissipative_reoptimize(&preset_config(Command::DissipativeReoptimize, out)).map_err(|e| e.to_string())?;
    let dominated = r.points.iter().all(|p| p.reoptimized.j_total <= p.coherent.j_total);
    let last = r.points.last().ok_or("no sweep points")?;
    let improved = last.reoptimized.purity_error < last.coherent.purity_error;
    let js: Vec<String> =
        r.points.iter().map(|p| format!("{:.3}->{:.3}", p.coherent.j_total, p.reoptimized.j_total)).collect();
    check(
        r.points.len() == 4 && dominated && improved,
        format!(
            "J coherent->reoptimized [{}], purity error at largest κ {:.3} -> {:.3}",
            js.join(", "),
            last.coherent.purity_error,
            last.reoptimized.purity_error
        ),
    )
}

fn same_bits(a: &[IterationRecord], b: &[IterationRecord]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.iter == y.iter
                && x.j_total.to_bits() == y.j_total.to_bits()
                && x.lambda_used.to_bits() == y.lambda_used.to_bits()
                && x.pulse_change_norm.to_bits() == y.pulse_change_norm.to_bits()
                && x.monotonic == y.monotonic
                && x.j_terms.len() == y.j_terms.len()
                && x.j_terms.iter().zip(&y.j_terms).all(|(s, t)| s.0 == t.0 && s.1.to_bits() == t.1.to_bits())
        })
}

fn determinism(out: &Path) -> Outcome {
    let patch = json!({
        "model": {"kind": "jaynes_cummings", "g": 1.0, "ho_dim": 14},
        "grid": {"duration": 7.5, "n_steps": 240},
        "krotov": {"max_iters": 8},
        "seed": 23
    });
    let run = |sub: &str| {
        let o = Overrides { output_dir: Some(out.join(sub)), ..Overrides::default() };
        let cfg = ExperimentConfig::from_value(Command::JcOptimize, patch.clone(), &o).map_err(|e| e.to_string())?;
        cmd_jc_optimize(&cfg).map(|r| r.run).map_err(|e| e.to_string())
    };
    let (a, b) = (run("a")?, run("b")?);
    let pure = same_bits(&a.records, &b.records) && a.records.len() == 8;

    let (m, c) = jc(1.0, 6);
    let diss = LindbladSpec::oscillator_decay(0.05, c.into()).unwrap();
    let rho0 = StateVector::basis(c.into(), 0).unwrap().to_density();
    let guess = random_pulse(&mut rng(23), TimeGrid::new(4.0, 120).unwrap(), 0.3);
    let func = CompositeFunctional::of([FunctionalTerm::CsDm, FunctionalTerm::CatMutualInfoDm]).unwrap();
    let mut krotov = a.krotov;
    krotov.max_iters = 4;
    let dm_run = || {
        catoptron::krotov::run_optimization(&m, &guess, &func, catoptron::krotov::Initial::Density(&rho0, &diss), &krotov)
            .map_err(|e| e.to_string())
    };
    let (x, y) = (dm_run()?, dm_run()?);
    let mixed = same_bits(&x.records, &y.records) && x.records.len() == 4;
    check(pure && mixed, format!("pure records identical: {pure}, density-matrix records identical: {mixed}"))
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temporary directory");
    let root = dir.path();
    let criteria: Vec<Criterion> = vec![
        ("functional values", Box::new(functional_values)),
        ("costate gradients", Box::new(gradients)),
        ("propagators", Box::new(propagators)),
        ("phase-term and entangled-cat properties", Box::new(properties)),
        ("Kerr cat versus state-to-state", Box::new(|| kerr(&root.join("kerr")))),
        ("JC entangled cat and spectral peaks", Box::new(|| jc_optimize(&root.join("jc")))),
        ("speed-limit trend", Box::new(|| qsl(&root.join("qsl")))),
        ("dissipative reoptimization", Box::new(|| dissipative(&root.join("diss")))),
        ("determinism", Box::new(|| determinism(&root.join("det")))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail} [{secs:.1} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail} [{secs:.1} s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
