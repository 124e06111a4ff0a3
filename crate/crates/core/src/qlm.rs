//! U(1) quantum link model on an open chain of `2N` staggered sites.
//!
//! Site `x` (1-based) carries a hard-core fermion; link `L_x` sits between
//! sites `x` and `x + 1` and carries a spin-`S` electric flux `E = S³`.
//! `L_{2N}` dangles off the right edge and is frozen. With nearest-neighbour
//! hopping on an open chain the Jordan-Wigner strings cancel, so the
//! fermions are represented as hard-core bosons with no extra signs.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sparse::SparseOperator;

/// Link spin representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkSpin {
    #[serde(rename = "1/2")]
    Half,
    #[serde(rename = "1")]
    One,
}

impl LinkSpin {
    /// `2S`.
    pub fn two_s(self) -> i32 {
        match self {
            LinkSpin::Half => 1,
            LinkSpin::One => 2,
        }
    }

    pub fn value(self) -> f64 {
        self.two_s() as f64 / 2.0
    }

    /// Allowed doubled projections `2m` in ascending order.
    pub fn projections(self) -> Vec<i32> {
        let ts = self.two_s();
        (0..=ts).map(|k| 2 * k - ts).collect()
    }

    pub fn dim(self) -> usize {
        self.two_s() as usize + 1
    }

    pub fn from_f64(s: f64) -> Result<Self> {
        if (s - 0.5).abs() < 1e-12 {
            Ok(LinkSpin::Half)
        } else if (s - 1.0).abs() < 1e-12 {
            Ok(LinkSpin::One)
        } else {
            Err(invalid(format!("link spin must be 1/2 or 1, got {s}")))
        }
    }

    /// `⟨m+1| S⁺ |m⟩` for doubled projection `tm`.
    pub fn raising_element(self, tm: i32) -> f64 {
        let s = self.value();
        let m = tm as f64 / 2.0;
        (s * (s + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
    }
}

/// One basis configuration: occupations of the `2N` sites and doubled link
/// projections of the `2N` links (the last one frozen).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QlmState {
    pub occupation: Vec<u8>,
    /// `2·E` for each link `L_1 … L_{2N}`.
    pub flux2: Vec<i32>,
}

impl QlmState {
    pub fn n_sites(&self) -> usize {
        self.occupation.len()
    }

    pub fn fermion_number(&self) -> usize {
        self.occupation.iter().map(|&f| f as usize).sum()
    }

    /// Electric flux on link `L_x` (1-based).
    pub fn flux(&self, x: usize) -> f64 {
        self.flux2[x - 1] as f64 / 2.0
    }

    /// `G̃_x` for a site with both neighbouring links (`2 ≤ x ≤ 2N`).
    pub fn gauss(&self, x: usize) -> Result<f64> {
        let n = self.n_sites();
        if x < 2 || x > n {
            return Err(invalid(format!("site {x} lacks a link on both sides")));
        }
        let stagger = if x % 2 == 0 { 0.0 } else { -1.0 };
        Ok(self.occupation[x - 1] as f64 - self.flux(x) + self.flux(x - 1) + stagger)
    }

    pub fn is_physical(&self) -> bool {
        (2..=self.n_sites()).all(|x| self.gauss(x).map(|g| g == 0.0).unwrap_or(false))
    }

    /// Compact label such as `1010|+++-`.
    pub fn label(&self) -> String {
        let occ: String = self.occupation.iter().map(|&f| if f == 1 { '1' } else { '0' }).collect();
        let links: String = self
            .flux2
            .iter()
            .map(|&t| match t {
                t if t > 0 => '+',
                0 => '0',
                _ => '-',
            })
            .collect();
        format!("{occ}|{links}")
    }
}

/// Enumerated QLM basis in canonical order (sites then links, left to right,
/// each lexicographically ascending).
#[derive(Debug, Clone)]
pub struct QlmBasis {
    pub spin: LinkSpin,
    pub n_cells: usize,
    pub frozen_flux2: Option<i32>,
    pub fermion_number: Option<usize>,
    states: Vec<QlmState>,
    index: HashMap<QlmState, usize>,
}

impl QlmBasis {
    /// Every configuration of `N` unit cells with the given conserved fermion
    /// number and frozen last link. `None` disables the respective filter.
    pub fn enumerate(spin: LinkSpin, n_cells: usize, frozen_flux2: Option<i32>, fermion_number: Option<usize>) -> Result<Self> {
        if n_cells == 0 {
            return Err(invalid("need at least one unit cell"));
        }
        let n_sites = 2 * n_cells;
        if let Some(nf) = fermion_number {
            if nf > n_sites {
                return Err(invalid(format!("fermion number {nf} exceeds the {n_sites} sites")));
            }
        }
        let proj = spin.projections();
        if let Some(f) = frozen_flux2 {
            if !proj.contains(&f) {
                return Err(invalid(format!("frozen projection {} not allowed for S = {}", f as f64 / 2.0, spin.value())));
            }
        }
        let n_free_links = if frozen_flux2.is_some() { n_sites - 1 } else { n_sites };

        let mut states = Vec::new();
        for occ_bits in 0..(1usize << n_sites) {
            // Most significant bit is site 1 so the order is lexicographic.
            let occupation: Vec<u8> = (0..n_sites).map(|x| ((occ_bits >> (n_sites - 1 - x)) & 1) as u8).collect();
            if let Some(nf) = fermion_number {
                if occupation.iter().map(|&f| f as usize).sum::<usize>() != nf {
                    continue;
                }
            }
            let n_link_cfg = proj.len().pow(n_free_links as u32);
            for code in 0..n_link_cfg {
                let mut flux2 = Vec::with_capacity(n_sites);
                let mut rem = code;
                let mut digits = vec![0usize; n_free_links];
                for k in (0..n_free_links).rev() {
                    digits[k] = rem % proj.len();
                    rem /= proj.len();
                }
                for d in digits {
                    flux2.push(proj[d]);
                }
                if let Some(f) = frozen_flux2 {
                    flux2.push(f);
                }
                states.push(QlmState { occupation: occupation.clone(), flux2 });
            }
        }
        let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(Self { spin, n_cells, frozen_flux2, fermion_number, states, index })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn n_sites(&self) -> usize {
        2 * self.n_cells
    }

    pub fn states(&self) -> &[QlmState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &QlmState {
        &self.states[i]
    }

    pub fn index_of(&self, s: &QlmState) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Links whose flux can change: all of them unless the last one is frozen.
    pub fn dynamical_links(&self) -> std::ops::RangeInclusive<usize> {
        let n = self.n_sites();
        if self.frozen_flux2.is_some() {
            1..=n - 1
        } else {
            1..=n
        }
    }

    /// Sites on which `G̃_x` is defined.
    pub fn gauss_sites(&self) -> std::ops::RangeInclusive<usize> {
        2..=self.n_sites()
    }

    /// Indices of basis states that satisfy Gauss's law at every `x ≥ 2`.
    pub fn physical_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.states[i].is_physical()).collect()
    }

    /// Diagonal of `ψ†_x ψ_x`.
    pub fn occupation_diag(&self, x: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.occupation[x - 1] as f64).collect()
    }

    /// Diagonal of `E_{x,x+1}`.
    pub fn flux_diag(&self, x: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.flux(x)).collect()
    }

    /// Diagonal of the flux summed over dynamical links.
    pub fn flux_sum_diag(&self) -> Vec<f64> {
        let links = self.dynamical_links();
        self.states.iter().map(|s| links.clone().map(|x| s.flux(x)).sum()).collect()
    }
}

/// Couplings of the QLM Hamiltonian, in any consistent energy unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QlmParams {
    pub spin: LinkSpin,
    pub n_cells: usize,
    pub w: f64,
    pub m: f64,
    pub g2: f64,
}

impl QlmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.w > 0.0) {
            return Err(invalid(format!("hopping w must be positive, got {}", self.w)));
        }
        if self.n_cells == 0 {
            return Err(invalid("need at least one unit cell"));
        }
        Ok(())
    }
}

/// `H = −w Σ_x (ψ†_x U_{x,x+1} ψ_{x+1} + h.c.) + m Σ_x (−1)^x ψ†_x ψ_x + (g²/2) Σ E²`.
/// For `S = 1/2` the electric term is a constant and is omitted.
pub fn build_hamiltonian(params: &QlmParams, basis: &QlmBasis) -> Result<SparseOperator> {
    params.validate()?;
    if params.spin != basis.spin || params.n_cells != basis.n_cells {
        return Err(Error::BasisMismatch("QLM parameters and basis describe different chains".into()));
    }
    let n = basis.n_sites();
    let mut triplets = Vec::new();
    for (i, s) in basis.states().iter().enumerate() {
        let mut diag = 0.0;
        for x in 1..=n {
            let sign = if x % 2 == 0 { 1.0 } else { -1.0 };
            diag += params.m * sign * s.occupation[x - 1] as f64;
        }
        if basis.spin == LinkSpin::One {
            diag += 0.5 * params.g2 * s.flux2.iter().map(|&t| (t as f64 / 2.0).powi(2)).sum::<f64>();
        }
        triplets.push((i, i, diag));

        // ψ†_x U ψ_{x+1}: fermion hops left, link flux rises by one.
        for x in 1..n {
            if s.occupation[x - 1] == 0 && s.occupation[x] == 1 && s.flux2[x - 1] < basis.spin.two_s() {
                let mut t = s.clone();
                t.occupation[x - 1] = 1;
                t.occupation[x] = 0;
                t.flux2[x - 1] += 2;
                if let Some(j) = basis.index_of(&t) {
                    let amp = -params.w * basis.spin.raising_element(s.flux2[x - 1]);
                    triplets.push((j, i, amp));
                    triplets.push((i, j, amp));
                }
            }
        }
    }
    Ok(SparseOperator::from_triplets(basis.dim(), triplets))
}

/// Diagonal operator `G̃_x` on the basis.
pub fn gauss_operator(x: usize, basis: &QlmBasis) -> Result<SparseOperator> {
    let diag: Result<Vec<f64>> = basis.states().iter().map(|s| s.gauss(x)).collect();
    Ok(SparseOperator::diagonal_from(&diag?))
}

/// Orientation of the initial electric string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StringDirection {
    Right,
    Left,
}

/// Uniform string with every link at `±S`, occupations fixed by `G̃_x = 0`.
pub fn string_preset(spin: LinkSpin, n_cells: usize, direction: StringDirection) -> Result<QlmState> {
    if n_cells == 0 {
        return Err(invalid("need at least one unit cell"));
    }
    let n = 2 * n_cells;
    let t = match direction {
        StringDirection::Right => spin.two_s(),
        StringDirection::Left => -spin.two_s(),
    };
    let flux2 = vec![t; n];
    // G̃_x = n_x − E_x + E_{x−1} + ((−1)^x − 1)/2 with uniform flux fixes n_x.
    // Site 1 has no left link; its occupation follows the same stagger so the
    // pattern continues a uniform string entering from the left.
    let occupation = (1..=n).map(|x| if x % 2 == 1 { 1 } else { 0 }).collect();
    let state = QlmState { occupation, flux2 };
    debug_assert!(state.is_physical());
    Ok(state)
}

/// Diagonal `U = (−1)^{Σ_{x odd} f_x}` that flips the sign of the hopping and
/// leaves the mass term alone. Only meaningful for `S = 1/2`.
pub fn mass_sign_flip(basis: &QlmBasis) -> Result<Vec<f64>> {
    if basis.spin != LinkSpin::Half {
        return Err(invalid("the m → −m symmetry exists only for S = 1/2"));
    }
    Ok(basis
        .states()
        .iter()
        .map(|s| {
            let odd: usize = s.occupation.iter().step_by(2).map(|&f| f as usize).sum();
            if odd % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect())
}

/// Charge conjugation composed with the reflection about the chain centre.
/// With sites relabelled `−N+1 … N`, site `y` goes to `−y+1` with particles
/// and holes swapped, and link `(y, y+1)` goes to `(−y, −y+1)`. The frozen
/// dangling link is left untouched. Returns the permutation of basis indices
/// and the accompanying signs.
pub fn cp_transform(basis: &QlmBasis) -> Result<(Vec<usize>, Vec<f64>)> {
    let n = basis.n_sites();
    let mut perm = Vec::with_capacity(basis.dim());
    for s in basis.states() {
        let mut occupation = vec![0u8; n];
        for x in 1..=n {
            occupation[n - x] = 1 - s.occupation[x - 1];
        }
        let mut flux2 = s.flux2.clone();
        for x in 1..n {
            flux2[n - x - 1] = s.flux2[x - 1];
        }
        let image = QlmState { occupation, flux2 };
        let j = basis
            .index_of(&image)
            .ok_or_else(|| Error::BasisMismatch(format!("CP image of {} is outside the basis", s.label())))?;
        perm.push(j);
    }
    Ok((perm, vec![1.0; basis.dim()]))
}

/// CP-odd observables: `n_x + n_{2N+1−x} − 1` for sites `x ≤ N`, then
/// `E_x − E_{2N−x}` for links `x < N`.
pub fn cp_odd_observables(basis: &QlmBasis) -> Vec<(String, Vec<f64>)> {
    let n = basis.n_sites();
    let half = basis.n_cells;
    let mut out = Vec::new();
    for x in 1..=half {
        let mirror = n + 1 - x;
        let diag = basis.states().iter().map(|s| s.occupation[x - 1] as f64 + s.occupation[mirror - 1] as f64 - 1.0).collect();
        out.push((format!("n{x}+n{mirror}-1"), diag));
    }
    for x in 1..half {
        let mirror = n - x;
        let diag = basis.states().iter().map(|s| s.flux(x) - s.flux(mirror)).collect();
        out.push((format!("E{x}-E{mirror}"), diag));
    }
    out
}
