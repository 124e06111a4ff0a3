//! Rotational-level algebra for polar molecules restricted to `N ∈ {0, 1}`.
//!
//! Energies are in units of `d²/(4π ε0 r0³)` where `r0` is the reference
//! spacing, so a pair at distance `r` (in units of `r0`) picks up `1/r³`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// One of the four lowest rotational kets `|N, m_N⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RotLevel {
    /// |0, 0⟩
    A,
    /// |1, −1⟩
    B,
    /// |1, 0⟩
    C,
    /// |1, +1⟩
    D,
}

impl RotLevel {
    pub const ALL: [RotLevel; 4] = [RotLevel::A, RotLevel::B, RotLevel::C, RotLevel::D];

    pub fn n(self) -> i32 {
        match self {
            RotLevel::A => 0,
            _ => 1,
        }
    }

    pub fn m(self) -> i32 {
        match self {
            RotLevel::A | RotLevel::C => 0,
            RotLevel::B => -1,
            RotLevel::D => 1,
        }
    }

    pub fn label(self) -> char {
        match self {
            RotLevel::A => 'a',
            RotLevel::B => 'b',
            RotLevel::C => 'c',
            RotLevel::D => 'd',
        }
    }

    pub fn from_label(c: char) -> Option<RotLevel> {
        match c {
            'a' => Some(RotLevel::A),
            'b' => Some(RotLevel::B),
            'c' => Some(RotLevel::C),
            'd' => Some(RotLevel::D),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RotLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

fn factorial(n: i32) -> f64 {
    debug_assert!(n >= 0);
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Wigner 3-j symbol with every argument given as twice its value, so
/// half-integers are representable. Racah's single-sum formula.
pub fn wigner_3j_doubled(tj1: i32, tj2: i32, tj3: i32, tm1: i32, tm2: i32, tm3: i32) -> f64 {
    if tm1 + tm2 + tm3 != 0 {
        return 0.0;
    }
    if tj1 < 0 || tj2 < 0 || tj3 < 0 {
        return 0.0;
    }
    if tm1.abs() > tj1 || tm2.abs() > tj2 || tm3.abs() > tj3 {
        return 0.0;
    }
    if (tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tj3 + tm3) % 2 != 0 {
        return 0.0;
    }
    if tj3 > tj1 + tj2 || tj3 < (tj1 - tj2).abs() || (tj1 + tj2 + tj3) % 2 != 0 {
        return 0.0;
    }
    // Work with plain integers from here on.
    let (a, b, c) = ((tj1 + tj2 - tj3) / 2, (tj1 - tj2 + tj3) / 2, (-tj1 + tj2 + tj3) / 2);
    let big = (tj1 + tj2 + tj3) / 2 + 1;
    let triangle = factorial(a) * factorial(b) * factorial(c) / factorial(big);
    let root = factorial((tj1 + tm1) / 2)
        * factorial((tj1 - tm1) / 2)
        * factorial((tj2 + tm2) / 2)
        * factorial((tj2 - tm2) / 2)
        * factorial((tj3 + tm3) / 2)
        * factorial((tj3 - tm3) / 2);

    let t1 = (tj3 - tj2 + tm1) / 2;
    let t2 = (tj3 - tj1 - tm2) / 2;
    let t3 = (tj1 + tj2 - tj3) / 2;
    let t4 = (tj1 - tm1) / 2;
    let t5 = (tj2 + tm2) / 2;
    let kmin = 0.max(-t1).max(-t2);
    let kmax = t3.min(t4).min(t5);
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let denom = factorial(k)
            * factorial(t1 + k)
            * factorial(t2 + k)
            * factorial(t3 - k)
            * factorial(t4 - k)
            * factorial(t5 - k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / denom;
    }
    let phase_exp = (tj1 - tj2 - tm3) / 2;
    let phase = if phase_exp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase * (triangle * root).sqrt() * sum
}

fn doubled(x: f64) -> Result<i32> {
    let t = 2.0 * x;
    if (t - t.round()).abs() > 1e-12 {
        return Err(invalid(format!("{x} is not an integer or half-integer")));
    }
    Ok(t.round() as i32)
}

/// Wigner 3-j symbol `(j1 j2 j3; m1 m2 m3)` for integer or half-integer arguments.
pub fn wigner_3j(j: [f64; 3], m: [f64; 3]) -> Result<f64> {
    for &x in &j {
        if x < 0.0 {
            return Err(invalid(format!("negative angular momentum {x}")));
        }
    }
    Ok(wigner_3j_doubled(
        doubled(j[0])?,
        doubled(j[1])?,
        doubled(j[2])?,
        doubled(m[0])?,
        doubled(m[1])?,
        doubled(m[2])?,
    ))
}

/// `⟨bra| d̂_q |ket⟩` in units of the body-frame dipole moment.
pub fn dipole_matrix_element(bra: RotLevel, q: i32, ket: RotLevel) -> f64 {
    if !(-1..=1).contains(&q) {
        return 0.0;
    }
    let (n1, m1) = (bra.n(), bra.m());
    let (n2, m2) = (ket.n(), ket.m());
    let phase = if m1.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let norm = (((2 * n1 + 1) * (2 * n2 + 1)) as f64).sqrt();
    phase
        * norm
        * wigner_3j_doubled(2 * n1, 2, 2 * n2, -2 * m1, 2 * q, 2 * m2)
        * wigner_3j_doubled(2 * n1, 2, 2 * n2, 0, 0, 0)
}

/// Relative position of molecule `j` seen from molecule `i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairGeometry {
    /// Distance in units of the reference spacing.
    pub r: f64,
    /// Polar angle of the separation vector relative to the quantization axis.
    pub theta: f64,
    /// Azimuthal angle of the separation vector.
    pub phi: f64,
}

impl PairGeometry {
    pub fn new(r: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(invalid(format!("pair distance must be positive, got {r}")));
        }
        Ok(Self { r, theta, phi })
    }

    /// The same pair seen from molecule `j`.
    pub fn reversed(self) -> Self {
        Self { r: self.r, theta: std::f64::consts::PI - self.theta, phi: self.phi + std::f64::consts::PI }
    }
}

/// Rank-2 spherical components `C²_p(θ, φ)`, index `p + 2`.
fn c2(theta: f64, phi: f64) -> [Complex64; 5] {
    let (s, c) = theta.sin_cos();
    let e1 = Complex64::from_polar(1.0, phi);
    let e2 = Complex64::from_polar(1.0, 2.0 * phi);
    let k1 = (1.5f64).sqrt() * s * c;
    let k2 = (3.0f64 / 8.0).sqrt() * s * s;
    [
        e2.conj() * k2,
        e1.conj() * k1,
        Complex64::new((3.0 * c * c - 1.0) / 2.0, 0.0),
        -e1 * k1,
        e2 * k2,
    ]
}

/// `⟨γ η| [d_i ⊗ d_j]²_p |α β⟩`.
fn t2_element(p: i32, alpha: RotLevel, beta: RotLevel, gamma: RotLevel, eta: RotLevel) -> f64 {
    let d = |q1: i32, q2: i32| dipole_matrix_element(gamma, q1, alpha) * dipole_matrix_element(eta, q2, beta);
    match p {
        0 => (2.0 * d(0, 0) + d(1, -1) + d(-1, 1)) / 6f64.sqrt(),
        1 => (d(0, 1) + d(1, 0)) / 2f64.sqrt(),
        -1 => (d(0, -1) + d(-1, 0)) / 2f64.sqrt(),
        2 => d(1, 1),
        -2 => d(-1, -1),
        _ => 0.0,
    }
}

/// Dipole-dipole coefficient `V^{α,β;γ,η} = ⟨γ_i η_j| V_dd |α_i β_j⟩` from the
/// rank-2 tensor expansion `V = −√6 Σ_p (−1)^p C²_{−p}(r̂) [d_i ⊗ d_j]²_p / r³`.
pub fn pair_coefficient(geom: &PairGeometry, alpha: RotLevel, beta: RotLevel, gamma: RotLevel, eta: RotLevel) -> Complex64 {
    let c = c2(geom.theta, geom.phi);
    let mut v = Complex64::new(0.0, 0.0);
    for p in -2..=2 {
        let t = t2_element(p, alpha, beta, gamma, eta);
        if t == 0.0 {
            continue;
        }
        let sign = if p.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        v += c[(2 - p) as usize] * (sign * t);
    }
    v * (-(6f64.sqrt()) / geom.r.powi(3))
}

/// Closed-form catalog of every nonvanishing coefficient within `{a,b,c,d}`.
/// Returns `None` for combinations that vanish by the selection rules.
pub fn catalog_coefficient(geom: &PairGeometry, alpha: RotLevel, beta: RotLevel, gamma: RotLevel, eta: RotLevel) -> Option<Complex64> {
    use RotLevel::*;
    let (s, c) = geom.theta.sin_cos();
    let e = |k: f64| Complex64::from_polar(1.0, k * geom.phi);
    let inv_r3 = 1.0 / geom.r.powi(3);
    let p2 = (3.0 * c * c - 1.0) / 2.0;
    let sc = s * c / 2f64.sqrt();
    let ss = s * s / 2.0;

    // Pair creation out of |a a⟩; the reverse processes are complex conjugates.
    let creation = |x: RotLevel, y: RotLevel| -> Option<Complex64> {
        let v = match (x, y) {
            (B, B) => -e(2.0) * ss,
            (C, C) => -e(0.0) * (2.0 * p2 / 3.0),
            (D, D) => -e(-2.0) * ss,
            (B, C) | (C, B) => -e(1.0) * sc,
            (B, D) | (D, B) => -e(0.0) * (p2 / 3.0),
            (C, D) | (D, C) => e(-1.0) * sc,
            _ => return None,
        };
        Some(v)
    };
    // Exchange `|a x⟩ → |y a⟩`.
    let exchange = |x: RotLevel, y: RotLevel| -> Option<Complex64> {
        let v = match (x, y) {
            (B, B) | (D, D) => e(0.0) * (p2 / 3.0),
            (C, C) => -e(0.0) * (2.0 * p2 / 3.0),
            (B, C) => -e(-1.0) * sc,
            (C, B) => (-e(-1.0) * sc).conj(),
            (B, D) => e(-2.0) * ss,
            (D, B) => (e(-2.0) * ss).conj(),
            (C, D) => e(-1.0) * sc,
            (D, C) => (e(-1.0) * sc).conj(),
            _ => return None,
        };
        Some(v)
    };

    let v = match (alpha, beta, gamma, eta) {
        (A, A, x, y) if x != A && y != A => creation(x, y)?,
        (x, y, A, A) if x != A && y != A => creation(x, y)?.conj(),
        (A, x, y, A) if x != A && y != A => exchange(x, y)?,
        (x, A, A, y) if x != A && y != A => exchange(x, y)?,
        _ => return None,
    };
    Some(v * inv_r3)
}
