//! Quantum link models emulated by chains of polar molecules.
//!
//! The crate builds the U(1) link-model Hamiltonian, the dipolar-molecule
//! Hamiltonian engineered to reproduce it at second order, evolves both in
//! real time and measures how well the molecules follow the gauge theory.

pub mod dipole;
pub mod dmh;
pub mod effective;
pub mod error;
pub mod evolve;
pub mod linalg;
pub mod params;
pub mod qlm;
pub mod scenario;
pub mod sparse;
pub mod units;

pub use error::{Error, Result};
