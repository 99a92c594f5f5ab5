//! Evaluates the cat-set cost terms on a few reference states.

use catoptron::functionals::{j_cat_parity, j_cat_phase, j_cat_purity, j_cs_normalized, j_cs_variance, ParitySign};
use catoptron::quantum::{cat_state, coherent_state, entangled_cat_state, CatStateSpec, CompositeSpace, FockSpace, QubitBasis, StateVector, C64};

fn main() -> catoptron::Result<()> {
    let fock = FockSpace::new(30)?;
    let alpha = C64::new(1.5, 0.5);
    let states = [
        ("even cat", cat_state(CatStateSpec::even(alpha), fock)?),
        ("odd cat", cat_state(CatStateSpec::odd(alpha), fock)?),
        ("coherent", coherent_state(alpha, fock)?),
        ("Fock |2>", StateVector::basis(fock.into(), 2)?),
    ];
    println!("{:<10} {:>10} {:>10} {:>10} {:>10}", "state", "j_cs", "j_cs_norm", "j_even", "j_phase");
    for (name, s) in &states {
        let phase = j_cat_phase(s).map_or("inactive".to_string(), |v| format!("{v:.3e}"));
        println!(
            "{name:<10} {:>10.3e} {:>10.3e} {:>10.3e} {phase:>10}",
            j_cs_variance(s)?,
            j_cs_normalized(s)?,
            j_cat_parity(s, ParitySign::Even)?
        );
    }

    let space = CompositeSpace::new(30)?;
    let ent = entangled_cat_state(alpha, &QubitBasis::computational(), space)?;
    let product = StateVector::basis(space.into(), 0)?;
    println!("purity term: entangled cat {:.3e}, product state {:.3e}", j_cat_purity(&ent)?, j_cat_purity(&product)?);
    Ok(())
}
