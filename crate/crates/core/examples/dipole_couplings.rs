//! Wigner 3-j symbols and pair couplings between rotational levels.

use dipolar_qlm::dipole::{catalog_coefficient, dipole_matrix_element, pair_coefficient, wigner_3j, PairGeometry, RotLevel};
use std::f64::consts::FRAC_PI_2;

fn main() -> dipolar_qlm::Result<()> {
    println!("(1 1 0; 1 -1 0) = {:.6}", wigner_3j([1.0, 1.0, 0.0], [1.0, -1.0, 0.0])?);
    for (lv, q) in [(RotLevel::B, -1), (RotLevel::C, 0), (RotLevel::D, 1)] {
        println!("<{lv}|d_{q}|a> = {:.6}", dipole_matrix_element(lv, q, RotLevel::A));
    }

    let side = PairGeometry::new(1.0, FRAC_PI_2, 0.0)?;
    let tilted = PairGeometry::new(1.0, 0.4, 0.0)?;
    for (label, (al, be, ga, et)) in [
        ("ab -> ba", (RotLevel::A, RotLevel::B, RotLevel::B, RotLevel::A)),
        ("ac -> ca", (RotLevel::A, RotLevel::C, RotLevel::C, RotLevel::A)),
        ("aa -> bd", (RotLevel::A, RotLevel::A, RotLevel::B, RotLevel::D)),
    ] {
        let exact = pair_coefficient(&side, al, be, ga, et);
        let listed = catalog_coefficient(&tilted, al, be, ga, et).unwrap_or_default();
        println!("{label}: side by side {:+.6}, tilted by 0.4 rad {:+.6}{:+.6}i", exact.re, listed.re, listed.im);
    }
    Ok(())
}
