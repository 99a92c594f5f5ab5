//! Wigner maps of even and odd cats, with their parities at the origin.

use catoptron::analysis::{wigner, PhaseSpaceGrid};
use catoptron::quantum::{cat_state, CatStateSpec, FockSpace, C64};

fn main() -> catoptron::Result<()> {
    let fock = FockSpace::new(30)?;
    let grid = PhaseSpaceGrid::square(5.0, 101)?;
    for (name, spec) in [("even", CatStateSpec::even(C64::new(2.0, 0.0))), ("odd", CatStateSpec::odd(C64::new(2.0, 0.0)))] {
        let w = wigner(&cat_state(spec, fock)?, &grid)?;
        let centre = w.values[(50, 50)] * std::f64::consts::PI;
        println!("{name} cat: integral {:.6}, pi W(0,0) = {centre:+.6}", w.integral());
        let out = std::env::temp_dir().join(format!("wigner_{name}_cat.csv"));
        w.write(&out)?;
        println!("  written to {}", out.display());
    }
    Ok(())
}
