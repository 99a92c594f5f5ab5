//! Distance to the nearest cat and entangled cat state.

use catoptron::analysis::{cat_infidelity_entangled, cat_infidelity_pure};
use catoptron::quantum::{
    cat_state, coherent_state, entangled_cat_state, CatStateSpec, CompositeSpace, DensityMatrix, FockSpace, QubitBasis, C64,
};

fn main() -> catoptron::Result<()> {
    let fock = FockSpace::new(30)?;
    let cat = cat_state(CatStateSpec::new(C64::new(1.2, -0.7), 0.4), fock)?;
    let fit = cat_infidelity_pure(&cat)?;
    println!("cat: infidelity {:.2e}, alpha {:.4}, phase {:.4}", fit.infidelity, fit.spec.alpha, fit.spec.phase);
    let coh = cat_infidelity_pure(&coherent_state(C64::new(2.0, 0.0), fock)?)?;
    println!("coherent |2>: infidelity {:.4}", coh.infidelity);

    let space = CompositeSpace::new(20)?;
    let basis = QubitBasis::from_angles(0.7, 0.3, -0.2);
    let ent = entangled_cat_state(C64::new(1.0, 0.5), &basis, space)?;
    println!("entangled cat: infidelity {:.2e}", cat_infidelity_entangled(&ent)?.infidelity);
    let mixed = DensityMatrix::maximally_mixed(space.into());
    println!("maximally mixed: infidelity {:.4}", cat_infidelity_entangled(&mixed)?.infidelity);
    Ok(())
}
