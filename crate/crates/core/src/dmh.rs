//! Restricted molecular Hilbert space, the dipolar-molecule Hamiltonian on
//! it, and the maps to and from the quantum link model basis.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::dipole::RotLevel;
use crate::error::{invalid, Error, Result};
use crate::params::{allowed_levels, empty_site_level, flux_level, level_flux, molecule_role, ParameterSet, Role};
use crate::qlm::{LinkSpin, QlmBasis, QlmState};
use crate::sparse::SparseOperator;

/// Molecular configurations in lexicographic order (molecule 0 slowest,
/// levels `a < b < c < d`), optionally with a fixed number of `a` molecules
/// and the last link molecule frozen.
#[derive(Debug, Clone)]
pub struct DmhBasis {
    pub spin: LinkSpin,
    pub n_cells: usize,
    pub n_a: Option<usize>,
    pub frozen: Option<RotLevel>,
    states: Vec<u64>,
    index: HashMap<u64, usize>,
}

fn level_at(code: u64, i: usize) -> RotLevel {
    RotLevel::ALL[((code >> (2 * i)) & 3) as usize]
}

fn with_level(code: u64, i: usize, lv: RotLevel) -> u64 {
    (code & !(3u64 << (2 * i))) | ((lv.index() as u64) << (2 * i))
}

impl DmhBasis {
    pub fn enumerate(spin: LinkSpin, n_cells: usize, n_a: Option<usize>, frozen: Option<RotLevel>) -> Result<Self> {
        if n_cells == 0 {
            return Err(invalid("need at least one unit cell"));
        }
        if 4 * n_cells > 32 {
            return Err(invalid("at most 8 unit cells fit the packed molecular basis"));
        }
        let n_mol = 4 * n_cells;
        if let Some(f) = frozen {
            if !allowed_levels(spin, Role::Link).contains(&f) {
                return Err(invalid(format!("frozen level {f} is not kept on links for S = {}", spin.value())));
            }
        }
        let levels: Vec<Vec<RotLevel>> = (0..n_mol)
            .map(|i| match frozen {
                Some(f) if i == n_mol - 1 => vec![f],
                _ => allowed_levels(spin, molecule_role(i).0).to_vec(),
            })
            .collect();
        let mut states = Vec::new();
        let mut cfg = vec![RotLevel::A; n_mol];
        // `a_left = None` places no constraint on the a-count.
        fn recurse(i: usize, a_left: Option<usize>, levels: &[Vec<RotLevel>], cfg: &mut Vec<RotLevel>, out: &mut Vec<u64>) {
            if i == levels.len() {
                if a_left.unwrap_or(0) == 0 {
                    out.push(cfg.iter().enumerate().fold(0u64, |c, (k, lv)| with_level(c, k, *lv)));
                }
                return;
            }
            if let Some(left) = a_left {
                let remaining_a_slots = levels[i..].iter().filter(|l| l.contains(&RotLevel::A)).count();
                if left > remaining_a_slots {
                    return;
                }
            }
            for &lv in &levels[i] {
                let is_a = (lv == RotLevel::A) as usize;
                let next = match a_left {
                    Some(left) if is_a > left => continue,
                    Some(left) => Some(left - is_a),
                    None => None,
                };
                cfg[i] = lv;
                recurse(i + 1, next, levels, cfg, out);
            }
        }
        recurse(0, n_a, &levels, &mut cfg, &mut states);
        let index = states.iter().enumerate().map(|(k, &s)| (s, k)).collect();
        Ok(Self { spin, n_cells, n_a, frozen, states, index })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn n_molecules(&self) -> usize {
        4 * self.n_cells
    }

    pub fn level(&self, k: usize, i: usize) -> RotLevel {
        level_at(self.states[k], i)
    }

    pub fn levels(&self, k: usize) -> Vec<RotLevel> {
        (0..self.n_molecules()).map(|i| self.level(k, i)).collect()
    }

    pub fn index_of(&self, levels: &[RotLevel]) -> Option<usize> {
        if levels.len() != self.n_molecules() {
            return None;
        }
        let code = levels.iter().enumerate().fold(0u64, |c, (k, lv)| with_level(c, k, *lv));
        self.index.get(&code).copied()
    }

    /// Basis made of the listed states, in the given order.
    pub fn subset(&self, keep: &[usize]) -> Self {
        let states: Vec<u64> = keep.iter().map(|&k| self.states[k]).collect();
        let index = states.iter().enumerate().map(|(k, &s)| (s, k)).collect();
        Self { spin: self.spin, n_cells: self.n_cells, n_a: self.n_a, frozen: self.frozen, states, index }
    }

    /// Label such as `a d b b …`, written without separators.
    pub fn label(&self, k: usize) -> String {
        self.levels(k).iter().map(|l| l.label()).collect()
    }
}

/// Molecular levels representing a QLM configuration.
pub fn qlm_to_levels(spin: LinkSpin, state: &QlmState) -> Result<Vec<RotLevel>> {
    let n = state.n_sites();
    let mut out = Vec::with_capacity(2 * n);
    for x in 0..n {
        out.push(if state.occupation[x] == 1 { RotLevel::A } else { empty_site_level(spin) });
        let t = state.flux2[x];
        out.push(flux_level(spin, t).ok_or_else(|| invalid(format!("flux {} has no molecular level", t as f64 / 2.0)))?);
    }
    Ok(out)
}

/// QLM configuration represented by molecular levels, if any.
pub fn levels_to_qlm(spin: LinkSpin, levels: &[RotLevel]) -> Option<QlmState> {
    let mut occupation = Vec::with_capacity(levels.len() / 2);
    let mut flux2 = Vec::with_capacity(levels.len() / 2);
    for pair in levels.chunks(2) {
        occupation.push(match pair[0] {
            RotLevel::A => 1,
            l if l == empty_site_level(spin) => 0,
            _ => return None,
        });
        flux2.push(level_flux(spin, *pair.get(1)?)?);
    }
    Some(QlmState { occupation, flux2 })
}

/// Matching molecular basis for a QLM basis with fixed fermion number and
/// frozen last link.
pub fn dmh_basis_for(qlm: &QlmBasis) -> Result<DmhBasis> {
    let nf = qlm.fermion_number.ok_or_else(|| invalid("the QLM basis must fix the fermion number"))?;
    let frozen = qlm.frozen_flux2.ok_or_else(|| invalid("the QLM basis must freeze the last link"))?;
    let level = flux_level(qlm.spin, frozen).ok_or_else(|| invalid("frozen flux has no molecular level"))?;
    DmhBasis::enumerate(qlm.spin, qlm.n_cells, Some(nf), Some(level))
}

/// Index map from the QLM basis into the molecular basis.
#[derive(Debug, Clone)]
pub struct Embedding {
    /// `targets[k]` is the molecular index of QLM basis state `k`.
    pub targets: Vec<usize>,
    pub dmh_dim: usize,
}

impl Embedding {
    pub fn new(qlm: &QlmBasis, dmh: &DmhBasis) -> Result<Self> {
        if qlm.spin != dmh.spin || qlm.n_cells != dmh.n_cells {
            return Err(Error::BasisMismatch("QLM and molecular bases describe different chains".into()));
        }
        let mut targets = Vec::with_capacity(qlm.dim());
        for s in qlm.states() {
            let levels = qlm_to_levels(qlm.spin, s)?;
            let k = dmh
                .index_of(&levels)
                .ok_or_else(|| Error::BasisMismatch(format!("QLM state {} has no molecular counterpart", s.label())))?;
            targets.push(k);
        }
        Ok(Self { targets, dmh_dim: dmh.dim() })
    }

    pub fn qlm_dim(&self) -> usize {
        self.targets.len()
    }

    pub fn embed(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        if psi.len() != self.targets.len() {
            return Err(Error::BasisMismatch("vector length differs from the QLM basis".into()));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.dmh_dim];
        for (k, &t) in self.targets.iter().enumerate() {
            out[t] = psi[k];
        }
        Ok(out)
    }

    /// Amplitudes on the image of the embedding, without renormalization.
    pub fn project(&self, phi: &[Complex64]) -> Result<Vec<Complex64>> {
        if phi.len() != self.dmh_dim {
            return Err(Error::BasisMismatch("vector length differs from the molecular basis".into()));
        }
        Ok(self.targets.iter().map(|&t| phi[t]).collect())
    }
}

/// Options for assembling the molecular Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DmhOptions {
    /// Drop pair couplings beyond this distance (units of `r_{S1,L1}`).
    pub max_range: Option<f64>,
}

/// `Σ (2hB N(N+1) + ε) n + ½ Σ V` on the restricted basis, in units of `V0`.
pub fn build_dmh_hamiltonian(params: &ParameterSet, basis: &DmhBasis, options: DmhOptions) -> Result<SparseOperator> {
    if params.spin != basis.spin || params.n_cells != basis.n_cells {
        return Err(Error::BasisMismatch("parameter set and molecular basis describe different chains".into()));
    }
    let n_mol = basis.n_molecules();
    let mut pairs = Vec::new();
    for i in 0..n_mol {
        for j in i + 1..n_mol {
            if options.max_range.map_or(true, |r| params.chain.distance(i, j) <= r) {
                pairs.push((i, j));
            }
        }
    }
    let mut triplets = Vec::new();
    for k in 0..basis.dim() {
        let code = basis.states[k];
        let mut diag = 0.0;
        for i in 0..n_mol {
            let lv = level_at(code, i);
            diag += params
                .one_body(i, lv)
                .ok_or_else(|| Error::BasisMismatch(format!("level {lv} has no energy on molecule {i}")))?;
        }
        triplets.push((k, k, diag));
        for &(i, j) in &pairs {
            let (al, be) = (level_at(code, i), level_at(code, j));
            for &ga in params.allowed(i) {
                for &et in params.allowed(j) {
                    if ga == al && et == be {
                        continue;
                    }
                    let v = params.chain.coupling(i, j, al, be, ga, et);
                    if v == 0.0 {
                        continue;
                    }
                    let target = with_level(with_level(code, i, ga), j, et);
                    if let Some(&t) = basis.index.get(&target) {
                        triplets.push((t, k, v));
                    }
                }
            }
        }
    }
    Ok(SparseOperator::from_triplets(basis.dim(), triplets))
}

/// Diagonal of the number of molecules in level `a`.
pub fn a_count_diag(basis: &DmhBasis) -> Vec<f64> {
    (0..basis.dim())
        .map(|k| (0..basis.n_molecules()).filter(|&i| basis.level(k, i) == RotLevel::A).count() as f64)
        .collect()
}

/// Per-state energy on the resonant ladder alone; the unperturbed spectrum of
/// the perturbative expansion.
pub fn leading_diag(params: &ParameterSet, basis: &DmhBasis) -> Result<Vec<f64>> {
    (0..basis.dim())
        .map(|k| {
            (0..basis.n_molecules())
                .map(|i| {
                    let lv = basis.level(k, i);
                    params
                        .leading_one_body(i, lv)
                        .ok_or_else(|| Error::BasisMismatch(format!("level {lv} has no energy on molecule {i}")))
                })
                .sum()
        })
        .collect()
}

/// States kept by a coupling-neighbourhood truncation: the `seeds`, every
/// state degenerate with `reference` on the resonant ladder, and everything
/// reachable from those resonant states through `order` couplings of `h`.
/// With `order = 1` every virtual state of the second- and third-order
/// processes inside the resonant manifold survives. States detuned by more
/// than `max_detuning` on the ladder are not expanded. Returned sorted.
pub fn neighbourhood(
    h: &SparseOperator,
    leading: &[f64],
    reference: usize,
    seeds: &[usize],
    order: usize,
    max_detuning: Option<f64>,
) -> Vec<usize> {
    let e0 = leading[reference];
    let tol = 1e-9 * e0.abs().max(1.0);
    let mut keep: Vec<bool> = leading.iter().map(|e| (e - e0).abs() < tol).collect();
    let mut frontier: Vec<usize> = (0..keep.len()).filter(|&k| keep[k]).collect();
    for _ in 0..order {
        let mut next = Vec::new();
        for &k in &frontier {
            for (l, v) in h.row(k) {
                if v != 0.0 && !keep[l] && max_detuning.map_or(true, |d| (leading[l] - e0).abs() <= d) {
                    keep[l] = true;
                    next.push(l);
                }
            }
        }
        frontier = next;
    }
    for &k in seeds {
        keep[k] = true;
    }
    (0..keep.len()).filter(|&k| keep[k]).collect()
}
