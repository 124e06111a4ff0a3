//! Second-order quasidegenerate effective Hamiltonian and its comparison
//! with the target link model.

use serde::{Deserialize, Serialize};

use crate::dmh::{DmhBasis, Embedding};
use crate::error::{invalid, Error, Result};
use crate::linalg::DenseMatrix;
use crate::sparse::SparseOperator;

/// Split of a basis into a quasidegenerate block and its complement.
#[derive(Debug, Clone)]
pub struct SubspacePartition {
    pub alpha: Vec<usize>,
    pub complement: Vec<usize>,
    /// Unperturbed energy of every basis state.
    pub energies: Vec<f64>,
}

impl SubspacePartition {
    /// States whose unperturbed energy lies within `threshold` of the mean
    /// energy of `reference` form the block.
    pub fn by_energy(energies: Vec<f64>, reference: &[usize], threshold: f64) -> Result<Self> {
        if reference.is_empty() {
            return Err(invalid("the reference manifold is empty"));
        }
        let centre = reference.iter().map(|&k| energies[k]).sum::<f64>() / reference.len() as f64;
        let (alpha, complement) = (0..energies.len()).partition(|&k| (energies[k] - centre).abs() < threshold);
        Ok(Self { alpha, complement, energies })
    }

    pub fn explicit(energies: Vec<f64>, alpha: Vec<usize>) -> Self {
        let mut inside = vec![false; energies.len()];
        for &k in &alpha {
            inside[k] = true;
        }
        let complement = (0..energies.len()).filter(|&k| !inside[k]).collect();
        Self { alpha, complement, energies }
    }
}

/// Effective Hamiltonian on the block `alpha` (same order as the partition).
#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    pub alpha: Vec<usize>,
    pub matrix: DenseMatrix,
    /// Largest direct coupling inside the block.
    pub first_order_max: f64,
}

/// `⟨m|H_eff|n⟩ = H_mn + ½ Σ_l H_ml H_ln [1/(E_m − E_l) + 1/(E_n − E_l)]` for
/// `m, n` in the block and `l` outside it, with `E` the partition energies.
/// Small diagonal detunings inside the block then count as first-order
/// perturbations rather than shifting the denominators.
pub fn second_order_effective(h: &SparseOperator, partition: &SubspacePartition) -> Result<EffectiveHamiltonian> {
    let dim = h.dim();
    if partition.energies.len() != dim {
        return Err(Error::BasisMismatch("partition and Hamiltonian differ in dimension".into()));
    }
    let e = &partition.energies;
    let mut pos = vec![usize::MAX; dim];
    for (p, &k) in partition.alpha.iter().enumerate() {
        pos[k] = p;
    }
    let na = partition.alpha.len();
    let mut m = DenseMatrix::zeros(na, na);
    let mut first_order_max: f64 = 0.0;
    for (p, &k) in partition.alpha.iter().enumerate() {
        for (l, v) in h.row(k) {
            if l == k {
                m.add(p, p, v);
                continue;
            }
            if pos[l] != usize::MAX {
                m.add(p, pos[l], v);
                first_order_max = first_order_max.max(v.abs());
                continue;
            }
            let dk = e[k] - e[l];
            for (n, w) in h.row(l) {
                if n == l || pos[n] == usize::MAX {
                    continue;
                }
                let dn = e[n] - e[l];
                if dk.abs() < 1e-12 || dn.abs() < 1e-12 {
                    return Err(Error::Perturbative(format!("state {l} outside the block is degenerate with it")));
                }
                m.add(p, pos[n], 0.5 * v * w * (1.0 / dk + 1.0 / dn));
            }
        }
    }
    Ok(EffectiveHamiltonian { alpha: partition.alpha.clone(), matrix: m, first_order_max })
}

/// One entry of `H_eff − H_target` in model units.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub row: String,
    pub col: String,
    pub value: f64,
    pub diagonal: bool,
}

/// Element-wise comparison of the effective Hamiltonian with the embedded
/// target on the Gauss-physical image.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Constant removed from the diagonal before comparing.
    pub shift: f64,
    /// Entries sorted by decreasing magnitude.
    pub entries: Vec<ResidualEntry>,
    pub max_residual: f64,
    pub max_diagonal: f64,
    pub max_offdiagonal: f64,
    /// Largest coupling from the physical image to any other block state;
    /// nonzero values break Gauss's law at this order.
    pub max_gauss_breaking: f64,
    pub first_order_max: f64,
}

impl ResidualReport {
    /// True when every residual above `tol` is diagonal and nothing couples
    /// the physical image to the rest of the block above `tol`.
    pub fn only_diagonal_above(&self, tol: f64) -> bool {
        self.max_offdiagonal <= tol && self.max_gauss_breaking <= tol
    }
}

/// Compares `heff` (energies in `V0`) with `target` (model units) on the QLM
/// basis states listed in `physical`. `unit` converts model units to `V0`.
pub fn residual_terms(
    heff: &EffectiveHamiltonian,
    target: &SparseOperator,
    embedding: &Embedding,
    physical: &[usize],
    unit: f64,
    dmh: &DmhBasis,
) -> Result<ResidualReport> {
    let na = heff.alpha.len();
    let mut pos = vec![usize::MAX; embedding.dmh_dim];
    for (p, &k) in heff.alpha.iter().enumerate() {
        pos[k] = p;
    }
    let mut rows = Vec::with_capacity(physical.len());
    for &q in physical {
        let p = pos[embedding.targets[q]];
        if p == usize::MAX {
            return Err(Error::Perturbative(format!("physical state {q} lies outside the quasidegenerate block")));
        }
        rows.push(p);
    }
    let np = physical.len();
    let diff = |a: usize, b: usize| heff.matrix.get(rows[a], rows[b]) / unit - target.get(physical[a], physical[b]);
    let shift = (0..np).map(|a| diff(a, a)).sum::<f64>() / np as f64;
    let mut entries = Vec::new();
    for a in 0..np {
        for b in a..np {
            let value = diff(a, b) - if a == b { shift } else { 0.0 };
            entries.push(ResidualEntry {
                row: dmh.label(embedding.targets[physical[a]]),
                col: dmh.label(embedding.targets[physical[b]]),
                value,
                diagonal: a == b,
            });
        }
    }
    entries.sort_by(|x, y| y.value.abs().total_cmp(&x.value.abs()));
    let max_of = |diag: bool| entries.iter().filter(|e| e.diagonal == diag).map(|e| e.value.abs()).fold(0.0, f64::max);
    let mut in_image = vec![false; na];
    for &r in &rows {
        in_image[r] = true;
    }
    let mut max_gauss_breaking: f64 = 0.0;
    for &r in &rows {
        for c in 0..na {
            if !in_image[c] {
                max_gauss_breaking = max_gauss_breaking.max(heff.matrix.get(r, c).abs() / unit);
            }
        }
    }
    Ok(ResidualReport {
        shift,
        max_residual: entries.first().map_or(0.0, |e| e.value.abs()),
        max_diagonal: max_of(true),
        max_offdiagonal: max_of(false),
        max_gauss_breaking,
        first_order_max: heff.first_order_max / unit,
        entries,
    })
}
