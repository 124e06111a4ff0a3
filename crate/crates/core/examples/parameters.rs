//! Solve the molecular parameters for both link spins and print lab units.

use dipolar_qlm::params::{assign_energies, solve_s1_angle, ChainGeometry, EnergyLadder};
use dipolar_qlm::qlm::LinkSpin;
use dipolar_qlm::units::{MIN_SPACING_UM, NARB_DIPOLE_DEBYE};

fn main() -> dipolar_qlm::Result<()> {
    let roots = solve_s1_angle();
    println!("cos²θ roots: {:.7} {:.6}", roots[0], roots[1]);
    for (spin, gamma) in [(LinkSpin::Half, 1.0), (LinkSpin::One, 1.5)] {
        let ladder = EnergyLadder::default_for(spin);
        let geometry = ChainGeometry::default_for(spin, &ladder, gamma);
        let p = assign_energies(spin, 3, 0.1, 1.0, ladder, geometry)?;
        let lab = p.physical_scale(NARB_DIPOLE_DEBYE, MIN_SPACING_UM);
        println!(
            "S = {}: β = {:.4}, unit = {:.6} V0, V0 = {:.1} Hz, unit = {:.2} Hz, r = {:.3} μm",
            spin.value(),
            geometry.beta,
            p.unit_v0,
            lab.v0_hz,
            lab.unit_hz,
            lab.base_spacing_um
        );
    }
    Ok(())
}
