//! Physical constants and conversions between model units and lab units.
//!
//! Inside the library every molecular energy is measured in units of
//! `V0 = d² / (4π ε0 r³)` at the base spacing `r = r_{S1,L1}`.

use std::f64::consts::PI;

pub const PLANCK_H: f64 = 6.626_070_15e-34;
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
pub const DEBYE: f64 = 3.335_640_952e-30;

/// Dipole moment of ground-state NaRb, in debye.
pub const NARB_DIPOLE_DEBYE: f64 = 3.3;
/// Smallest spacing assumed reachable in a tweezer or lattice array, in μm.
pub const MIN_SPACING_UM: f64 = 0.5;

/// `V0/h` in Hz for dipole moment `d_debye` at distance `r_um`.
pub fn v0_hz(d_debye: f64, r_um: f64) -> f64 {
    let d = d_debye * DEBYE;
    let r = r_um * 1e-6;
    d * d / (4.0 * PI * EPSILON_0 * r.powi(3)) / PLANCK_H
}

/// Base spacing `r_{S1,L1}` that puts the shortest pair, `shortest_ratio`
/// times the base spacing, at `min_um`.
pub fn base_spacing_um(shortest_ratio: f64, min_um: f64) -> f64 {
    min_um / shortest_ratio
}
