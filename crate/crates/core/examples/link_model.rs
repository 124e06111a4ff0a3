//! Exact evolution of the spin-1/2 link model from the string state.

use dipolar_qlm::evolve::{time_evolve, time_grid, EvolutionRecord, EvolveOptions};
use dipolar_qlm::qlm::{build_hamiltonian, string_preset, LinkSpin, QlmBasis, QlmParams, StringDirection};
use num_complex::Complex64;

fn main() -> dipolar_qlm::Result<()> {
    let (spin, n) = (LinkSpin::Half, 3);
    let string = string_preset(spin, n, StringDirection::Right)?;
    let basis = QlmBasis::enumerate(spin, n, Some(*string.flux2.last().unwrap()), Some(string.fermion_number()))?;
    println!("string {}: {} states, {} Gauss-physical", string.label(), basis.dim(), basis.physical_indices().len());

    let times = time_grid(20.0, 11)?;
    for m in [0.1, 2.0] {
        let h = build_hamiltonian(&QlmParams { spin, n_cells: n, w: 1.0, m, g2: 0.0 }, &basis)?;
        let mut psi = vec![Complex64::new(0.0, 0.0); basis.dim()];
        psi[basis.index_of(&string).unwrap()] = Complex64::new(1.0, 0.0);
        let states = time_evolve(&h, &psi, &times, EvolveOptions::default())?;
        let rec = EvolutionRecord::from_amplitudes("qlm", &basis, &times, &states, None)?;
        println!("m = {m}");
        for (t, f) in rec.times.iter().zip(&rec.flux_sum) {
            println!("  t = {t:5.1}  flux sum = {f:+.4}");
        }
    }
    Ok(())
}
