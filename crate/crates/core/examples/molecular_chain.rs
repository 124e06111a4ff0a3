//! Build the molecular Hamiltonian for two unit cells and embed the string.

use dipolar_qlm::dmh::{build_dmh_hamiltonian, dmh_basis_for, leading_diag, neighbourhood, DmhOptions, Embedding};
use dipolar_qlm::params::{assign_energies, ChainGeometry, EnergyLadder};
use dipolar_qlm::qlm::{string_preset, LinkSpin, QlmBasis, StringDirection};

fn main() -> dipolar_qlm::Result<()> {
    for spin in [LinkSpin::Half, LinkSpin::One] {
        let string = string_preset(spin, 2, StringDirection::Right)?;
        let qlm = QlmBasis::enumerate(spin, 2, Some(*string.flux2.last().unwrap()), Some(2))?;
        let dmh = dmh_basis_for(&qlm)?;
        let emb = Embedding::new(&qlm, &dmh)?;
        let ladder = EnergyLadder::default_for(spin);
        let gamma = if spin == LinkSpin::One { 1.5 } else { 1.0 };
        let p = assign_energies(spin, 2, 0.25, 1.0, ladder, ChainGeometry::default_for(spin, &ladder, gamma))?;
        let h = build_dmh_hamiltonian(&p, &dmh, DmhOptions::default())?;
        let near = build_dmh_hamiltonian(&p, &dmh, DmhOptions { max_range: Some(1.01) })?;
        let start = emb.targets[qlm.index_of(&string).unwrap()];
        let kept = neighbourhood(&h, &leading_diag(&p, &dmh)?, start, &emb.targets, 2, None);
        println!(
            "S = {}: QLM {} states -> molecules {} states, {} couplings ({} nearest-neighbour), string = {}, second-order neighbourhood {}",
            spin.value(),
            qlm.dim(),
            dmh.dim(),
            h.nnz(),
            near.nnz(),
            dmh.label(start),
            kept.len()
        );
    }
    Ok(())
}
