//! Energy ladders, chain geometry, second-order self-interactions and the
//! resulting level energies `ε_{i,α}` that turn the molecular chain into a
//! quantum link model.
//!
//! Molecules are indexed `0 … 4N−1` in the order `S_1, L_1, S_2, L_2, …`.
//! All energies are in units of `V0`, the dipolar energy at the `S_1–L_1`
//! spacing.

use serde::{Deserialize, Serialize};

use crate::dipole::{pair_coefficient, PairGeometry, RotLevel};
use crate::error::{invalid, Error, Result};
use crate::qlm::LinkSpin;
use crate::units;

/// Role of a molecule in the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Site,
    Link,
}

/// Site or link number `x` (1-based) and role of molecule `i`.
pub fn molecule_role(i: usize) -> (Role, usize) {
    let x = i / 2 + 1;
    if i % 2 == 0 {
        (Role::Site, x)
    } else {
        (Role::Link, x)
    }
}

/// Index of the molecule realizing site `x`.
pub fn site_molecule(x: usize) -> usize {
    2 * (x - 1)
}

/// Index of the molecule realizing link `L_x`.
pub fn link_molecule(x: usize) -> usize {
    2 * x - 1
}

/// Rotational levels kept in the restricted Hilbert space.
pub fn allowed_levels(spin: LinkSpin, role: Role) -> &'static [RotLevel] {
    use RotLevel::*;
    match (spin, role) {
        (LinkSpin::Half, Role::Site) => &[A, B],
        (LinkSpin::Half, Role::Link) => &[A, B, D],
        (LinkSpin::One, Role::Site) => &[A, C],
        (LinkSpin::One, Role::Link) => &[A, B, C, D],
    }
}

/// Level of an empty site.
pub fn empty_site_level(spin: LinkSpin) -> RotLevel {
    match spin {
        LinkSpin::Half => RotLevel::B,
        LinkSpin::One => RotLevel::C,
    }
}

/// Level encoding the doubled flux `2E` on a link.
pub fn flux_level(spin: LinkSpin, flux2: i32) -> Option<RotLevel> {
    match (spin, flux2) {
        (LinkSpin::Half, -1) => Some(RotLevel::B),
        (LinkSpin::Half, 1) => Some(RotLevel::D),
        (LinkSpin::One, -2) => Some(RotLevel::D),
        (LinkSpin::One, 0) => Some(RotLevel::B),
        (LinkSpin::One, 2) => Some(RotLevel::C),
        _ => None,
    }
}

/// Inverse of [`flux_level`].
pub fn level_flux(spin: LinkSpin, level: RotLevel) -> Option<i32> {
    spin.projections().into_iter().find(|&t| flux_level(spin, t) == Some(level))
}

/// Detunings `δ_{1,n}`, `δ_{2,n}` decreasing along the chain and the link
/// offsets `Δ_{1,n}`, `Δ_{2,n}` derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLadder {
    pub delta1_0: f64,
    pub d1: f64,
    pub d2: f64,
    /// Rotational constant `hB`.
    pub b_rot: f64,
    /// Extra offset added to every `Δ`. Zero reproduces the closed forms;
    /// anything else breaks the `S = 1` self-interaction cancellation.
    #[serde(default)]
    pub big_delta_shift: f64,
}

impl EnergyLadder {
    pub fn default_for(spin: LinkSpin) -> Self {
        match spin {
            LinkSpin::Half => Self { delta1_0: 25.0, d1: 20.0, d2: 140.0, b_rot: 1000.0, big_delta_shift: 0.0 },
            LinkSpin::One => Self { delta1_0: 12.5, d1: 10.0, d2: 70.0, b_rot: 1000.0, big_delta_shift: 0.0 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d1 > 0.0 && self.d2 > 0.0) {
            return Err(invalid("ladder decrements D1 and D2 must be positive"));
        }
        if !(self.b_rot > 0.0) {
            return Err(invalid("rotational constant must be positive"));
        }
        Ok(())
    }

    pub fn delta1(&self, n: usize) -> f64 {
        self.delta1_0 - n as f64 * (self.d1 + self.d2)
    }

    pub fn delta2(&self, n: usize) -> f64 {
        self.delta1(n) - self.d1
    }

    pub fn big_delta1(&self, n: usize) -> f64 {
        0.5 * (3.0 * self.delta1(n) - self.delta2(n)) + self.big_delta_shift
    }

    pub fn big_delta2(&self, n: usize) -> f64 {
        0.5 * (3.0 * self.delta2(n) - self.delta1(n + 1)) + self.big_delta_shift
    }

    /// `β = (D1/D2)^{1/6}`, the spacing ratio that equalizes the hopping of
    /// odd and even links.
    pub fn beta(&self) -> f64 {
        (self.d1 / self.d2).powf(1.0 / 6.0)
    }
}

/// Both solutions `cos²θ` of `|sinθ cosθ|/√2 = |3cos²θ − 1|/9`, ascending.
pub fn solve_s1_angle() -> [f64; 2] {
    // With z = cos²θ the condition squares to 99z² − 93z + 2 = 0.
    let (a, b, c) = (99.0f64, -93.0f64, 2.0f64);
    let disc = (b * b - 4.0 * a * c).sqrt();
    let hi = (-b + disc) / (2.0 * a);
    [c / (a * hi), hi]
}

/// Residual of the angle condition at `cos²θ = z`.
pub fn s1_angle_residual(z: f64) -> f64 {
    let sc = (z * (1.0 - z)).sqrt();
    sc / 2f64.sqrt() - (3.0 * z - 1.0).abs() / 9.0
}

/// Spacing pattern along the chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainGeometry {
    /// Long-short distance ratio `γ ≥ 1`.
    pub gamma: f64,
    pub beta: f64,
    /// `cosθ` between the chain axis and the quantization axis.
    pub cos_theta: f64,
}

impl ChainGeometry {
    pub fn default_for(spin: LinkSpin, ladder: &EnergyLadder, gamma: f64) -> Self {
        let cos_theta = match spin {
            LinkSpin::Half => 0.0,
            LinkSpin::One => solve_s1_angle()[0].sqrt(),
        };
        Self { gamma, beta: ladder.beta(), cos_theta }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 1.0) || !self.gamma.is_finite() {
            return Err(invalid(format!("long-short ratio must be at least 1, got {}", self.gamma)));
        }
        if !(self.beta > 0.0) {
            return Err(invalid("beta must be positive"));
        }
        if !(-1.0..=1.0).contains(&self.cos_theta) {
            return Err(invalid(format!("cos(theta) = {} is out of range", self.cos_theta)));
        }
        Ok(())
    }

    pub fn theta(&self) -> f64 {
        self.cos_theta.acos()
    }

    /// Positions of the `4N` molecules in units of `r_{S1,L1}`.
    pub fn positions(&self, n_cells: usize) -> Vec<f64> {
        let pattern = [1.0, self.gamma, self.beta, self.beta * self.gamma];
        let mut pos = Vec::with_capacity(4 * n_cells);
        let mut r = 0.0;
        for i in 0..4 * n_cells {
            pos.push(r);
            r += pattern[i % 4];
        }
        pos
    }

    /// Shortest spacing along the chain in units of `r_{S1,L1}`.
    pub fn min_ratio(&self) -> f64 {
        [1.0, self.gamma, self.beta, self.beta * self.gamma].into_iter().fold(f64::INFINITY, f64::min)
    }
}

/// Dipolar couplings between every pair of molecules in the chain.
#[derive(Debug, Clone)]
pub struct MoleculeChain {
    pub n_cells: usize,
    pub positions: Vec<f64>,
    pub theta: f64,
    /// `coeff[i][j][α][β][γ][η]` flattened; only `i < j` is filled.
    table: Vec<[f64; 256]>,
}

impl MoleculeChain {
    pub fn new(geometry: &ChainGeometry, n_cells: usize) -> Result<Self> {
        geometry.validate()?;
        let positions = geometry.positions(n_cells);
        let n = positions.len();
        let theta = geometry.theta();
        let mut table = vec![[0.0; 256]; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let geom = PairGeometry::new(positions[j] - positions[i], theta, 0.0)?;
                let t = &mut table[i * n + j];
                for al in RotLevel::ALL {
                    for be in RotLevel::ALL {
                        for ga in RotLevel::ALL {
                            for et in RotLevel::ALL {
                                // φ = 0 keeps every coefficient real.
                                t[Self::slot(al, be, ga, et)] = pair_coefficient(&geom, al, be, ga, et).re;
                            }
                        }
                    }
                }
            }
        }
        Ok(Self { n_cells, positions, theta, table })
    }

    fn slot(al: RotLevel, be: RotLevel, ga: RotLevel, et: RotLevel) -> usize {
        ((al.index() * 4 + be.index()) * 4 + ga.index()) * 4 + et.index()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        (self.positions[j] - self.positions[i]).abs()
    }

    /// `⟨γ_i η_j| V |α_i β_j⟩` in units of `V0`.
    pub fn coupling(&self, i: usize, j: usize, al: RotLevel, be: RotLevel, ga: RotLevel, et: RotLevel) -> f64 {
        let n = self.len();
        if i < j {
            self.table[i * n + j][Self::slot(al, be, ga, et)]
        } else {
            self.table[j * n + i][Self::slot(be, al, et, ga)]
        }
    }
}

/// One self-interaction coefficient `Σ_{i,α;j,β}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SigmaEntry {
    pub i: usize,
    pub alpha: RotLevel,
    pub j: usize,
    pub beta: RotLevel,
    pub value: f64,
}

/// Complete parameter set for one chain.
#[derive(Debug, Clone)]
pub struct ParameterSet {
    pub spin: LinkSpin,
    pub n_cells: usize,
    /// Staggered mass in model units (`w` or `√2 w`).
    pub m: f64,
    /// Gauge coupling `g²` in model units.
    pub g2: f64,
    pub ladder: EnergyLadder,
    pub geometry: ChainGeometry,
    pub chain: MoleculeChain,
    /// Unperturbed ladder energies per molecule and level (`None` = excluded).
    pub leading: Vec<[Option<f64>; 4]>,
    /// Final `ε_{i,α}` after mass, electric and compensation terms.
    pub energies: Vec<[Option<f64>; 4]>,
    /// Model energy unit in `V0`: `w` for `S = 1/2`, `√2 w` for `S = 1`.
    pub unit_v0: f64,
    /// Hopping unit extracted independently on every dynamical link.
    pub link_units: Vec<f64>,
    pub sigmas: Vec<SigmaEntry>,
}

impl ParameterSet {
    pub fn n_molecules(&self) -> usize {
        4 * self.n_cells
    }

    pub fn allowed(&self, i: usize) -> &'static [RotLevel] {
        allowed_levels(self.spin, molecule_role(i).0)
    }

    pub fn energy(&self, i: usize, level: RotLevel) -> Option<f64> {
        self.energies[i][level.index()]
    }

    /// Full one-body energy including the rotational term `2hB N(N+1)`.
    pub fn one_body(&self, i: usize, level: RotLevel) -> Option<f64> {
        let n = level.n() as f64;
        self.energy(i, level).map(|e| e + 2.0 * self.ladder.b_rot * n * (n + 1.0))
    }

    /// Resonant ladder energy with the rotational term, before mass, electric
    /// and compensation terms are added.
    pub fn leading_one_body(&self, i: usize, level: RotLevel) -> Option<f64> {
        let n = level.n() as f64;
        self.leading[i][level.index()].map(|e| e + 2.0 * self.ladder.b_rot * n * (n + 1.0))
    }

    /// `√2 w` or `w` converted to a hopping `w` in `V0`.
    pub fn w_v0(&self) -> f64 {
        match self.spin {
            LinkSpin::Half => self.unit_v0,
            LinkSpin::One => self.unit_v0 / 2f64.sqrt(),
        }
    }
}

/// Leading-order ladder energies (no mass, no `g²`, no compensation).
pub fn leading_energies(spin: LinkSpin, n_cells: usize, ladder: &EnergyLadder) -> Vec<[Option<f64>; 4]> {
    let b2 = 2.0 * ladder.b_rot;
    let mut out = vec![[None; 4]; 4 * n_cells];
    let set = |e: &mut [Option<f64>; 4], lv: RotLevel, v: f64| e[lv.index()] = Some(v);
    for n in 0..n_cells {
        let (d1, d2, d1n) = (ladder.delta1(n), ladder.delta2(n), ladder.delta1(n + 1));
        let (big1, big2) = (ladder.big_delta1(n), ladder.big_delta2(n));
        let i = 4 * n;
        for k in 0..4 {
            set(&mut out[i + k], RotLevel::A, 0.0);
        }
        match spin {
            LinkSpin::Half => {
                set(&mut out[i], RotLevel::B, b2 + d1);
                set(&mut out[i + 1], RotLevel::D, b2 + big1);
                set(&mut out[i + 1], RotLevel::B, b2 + big1 + (d2 - d1));
                set(&mut out[i + 2], RotLevel::B, b2 + d2);
                set(&mut out[i + 3], RotLevel::D, b2 + big2);
                set(&mut out[i + 3], RotLevel::B, b2 + big2 + (d1n - d2));
            }
            LinkSpin::One => {
                set(&mut out[i], RotLevel::C, b2 + d1);
                set(&mut out[i + 1], RotLevel::C, b2 + big1 - (d2 - d1));
                set(&mut out[i + 1], RotLevel::B, b2 + big1);
                set(&mut out[i + 1], RotLevel::D, b2 + big1 + (d2 - d1));
                set(&mut out[i + 2], RotLevel::C, b2 + d2);
                set(&mut out[i + 3], RotLevel::C, b2 + big2 - (d1n - d2));
                set(&mut out[i + 3], RotLevel::B, b2 + big2);
                set(&mut out[i + 3], RotLevel::D, b2 + big2 + (d1n - d2));
            }
        }
    }
    out
}

/// `Σ_{i,α;j,β} = Σ_{γ,η} |V^{αβ;γη}_{ij}|² / (ε_{i,α} + ε_{j,β} − ε_{i,γ} − ε_{j,η})`
/// over virtual states where both molecules change level and the number of
/// `a` molecules is unchanged. The frozen last link has no virtual partners.
pub fn sigma(
    chain: &MoleculeChain,
    leading: &[[Option<f64>; 4]],
    spin: LinkSpin,
    i: usize,
    alpha: RotLevel,
    j: usize,
    beta: RotLevel,
) -> Result<f64> {
    let frozen = leading.len() - 1;
    if i == j {
        return Err(invalid("self-interaction needs two distinct molecules"));
    }
    if i == frozen || j == frozen {
        return Ok(0.0);
    }
    let e = |k: usize, lv: RotLevel| {
        leading[k][lv.index()].ok_or_else(|| invalid(format!("level {lv} is not kept on molecule {k}")))
    };
    let (ea, eb) = (e(i, alpha)?, e(j, beta)?);
    let n_a = (alpha == RotLevel::A) as u8 + (beta == RotLevel::A) as u8;
    let mut total = 0.0;
    for &ga in allowed_levels(spin, molecule_role(i).0) {
        for &et in allowed_levels(spin, molecule_role(j).0) {
            if ga == alpha || et == beta {
                continue;
            }
            if (ga == RotLevel::A) as u8 + (et == RotLevel::A) as u8 != n_a {
                continue;
            }
            let v = chain.coupling(i, j, alpha, beta, ga, et);
            if v.abs() < 1e-15 {
                continue;
            }
            let denom = ea + eb - e(i, ga)? - e(j, et)?;
            if denom.abs() < 1e-9 {
                return Err(Error::Infeasible(format!(
                    "virtual state ({ga},{et}) of molecules {i},{j} is degenerate with ({alpha},{beta})"
                )));
            }
            total += v * v / denom;
        }
    }
    Ok(total)
}

/// Second-order amplitude for the hop across link `L_x` from `initial` to
/// `target` (levels of `S_x, L_x, S_{x+1}`), through the two nearest pairs.
fn hop_amplitude(
    chain: &MoleculeChain,
    leading: &[[Option<f64>; 4]],
    spin: LinkSpin,
    x: usize,
    initial: [RotLevel; 3],
    target: [RotLevel; 3],
) -> Result<f64> {
    let mols = [site_molecule(x), link_molecule(x), site_molecule(x + 1)];
    let energy = |cfg: &[RotLevel; 3]| -> Result<f64> {
        let mut e = 0.0;
        for (k, &lv) in cfg.iter().enumerate() {
            e += leading[mols[k]][lv.index()].ok_or_else(|| invalid(format!("level {lv} is not kept on molecule {}", mols[k])))?;
        }
        Ok(e)
    };
    // Matrix element of the two nearest pairs between configurations.
    let element = |from: &[RotLevel; 3], to: &[RotLevel; 3]| -> f64 {
        let mut v = 0.0;
        for (p, q, spectator) in [(0usize, 1usize, 2usize), (1, 2, 0)] {
            if from[spectator] == to[spectator] {
                v += chain.coupling(mols[p], mols[q], from[p], from[q], to[p], to[q]);
            }
        }
        v
    };
    let count_a = |c: &[RotLevel; 3]| c.iter().filter(|&&l| l == RotLevel::A).count();
    let (ei, ef) = (energy(&initial)?, energy(&target)?);
    let site = allowed_levels(spin, Role::Site);
    let link = allowed_levels(spin, Role::Link);
    let mut amp = 0.0;
    for &l0 in site {
        for &l1 in link {
            for &l2 in site {
                let mid = [l0, l1, l2];
                if mid == initial || mid == target || count_a(&mid) != count_a(&initial) {
                    continue;
                }
                let (v1, v2) = (element(&initial, &mid), element(&mid, &target));
                if v1 == 0.0 || v2 == 0.0 {
                    continue;
                }
                let em = energy(&mid)?;
                if (ei - em).abs() < 1e-9 || (ef - em).abs() < 1e-9 {
                    return Err(Error::Infeasible(format!("hopping intermediate on link {x} is degenerate")));
                }
                amp += 0.5 * v1 * v2 * (1.0 / (ei - em) + 1.0 / (ef - em));
            }
        }
    }
    Ok(amp)
}

/// Effective hopping unit (`w` or `√2 w`, in `V0`) on every dynamical link
/// and for every allowed flux transition. All values must agree.
pub fn compute_hopping(spin: LinkSpin, n_cells: usize, chain: &MoleculeChain, leading: &[[Option<f64>; 4]]) -> Result<Vec<f64>> {
    let occ = RotLevel::A;
    let empty = empty_site_level(spin);
    let mut units_per_link = Vec::new();
    for x in 1..2 * n_cells {
        let mut values = Vec::new();
        for t in spin.projections() {
            if t == spin.two_s() {
                continue;
            }
            // Fermion moves from x+1 to x while the flux rises from t to t+2.
            let from = [empty, flux_level(spin, t).unwrap(), occ];
            let to = [occ, flux_level(spin, t + 2).unwrap(), empty];
            let amp = hop_amplitude(chain, leading, spin, x, from, to)?;
            // QLM element is −w·⟨t+1|S⁺|t⟩; the unit absorbs √2 for S = 1.
            let scale = spin.raising_element(t) / spin.raising_element(-spin.two_s());
            values.push(-amp / scale);
        }
        let first = values[0];
        if values.iter().any(|v| (v - first).abs() > 1e-10 * first.abs()) {
            return Err(Error::Infeasible(format!("hopping on link {x} depends on the flux: {values:?}")));
        }
        units_per_link.push(first);
    }
    let u = units_per_link[0];
    if !(u > 0.0) {
        return Err(Error::Infeasible(format!("effective hopping has the wrong sign ({u:e} V0)")));
    }
    if let Some((x, v)) = units_per_link.iter().enumerate().find(|(_, v)| ((*v - u) / u).abs() > 1e-10) {
        return Err(Error::Infeasible(format!("hopping on link {} is {v:e} V0 but {u:e} V0 on link 1", x + 1)));
    }
    Ok(units_per_link)
}

/// Builds every `ε_{i,α}`: ladder energies, staggered mass on occupied
/// sites, electric energy on links, and the nearest-neighbour `Σ`
/// compensation that makes the second-order diagonal constant on the
/// physical subspace. `m` and `g2` are in model units.
pub fn assign_energies(spin: LinkSpin, n_cells: usize, m: f64, g2: f64, ladder: EnergyLadder, geometry: ChainGeometry) -> Result<ParameterSet> {
    if n_cells == 0 {
        return Err(invalid("need at least one unit cell"));
    }
    if !m.is_finite() || !g2.is_finite() {
        return Err(invalid("mass and coupling must be finite"));
    }
    ladder.validate()?;
    let chain = MoleculeChain::new(&geometry, n_cells)?;
    let leading = leading_energies(spin, n_cells, &ladder);
    let link_units = compute_hopping(spin, n_cells, &chain, &leading)?;
    let u = link_units[0];

    let mut eps = leading.clone();
    let mut sigmas = Vec::new();
    let mut sig = |i: usize, al: RotLevel, j: usize, be: RotLevel| -> Result<f64> {
        let value = sigma(&chain, &leading, spin, i, al, j, be)?;
        sigmas.push(SigmaEntry { i, alpha: al, j, beta: be, value });
        Ok(value)
    };
    let add = |eps: &mut Vec<[Option<f64>; 4]>, i: usize, lv: RotLevel, v: f64| {
        if let Some(e) = eps[i][lv.index()].as_mut() {
            *e += v;
        }
    };
    use RotLevel::*;

    for x in 1..=2 * n_cells {
        let s = site_molecule(x);
        let stagger = if x % 2 == 0 { 1.0 } else { -1.0 };
        add(&mut eps, s, A, m * u * stagger);
        // The S = 1/2 electric energy is a constant and is dropped, as in the QLM.
        if spin == LinkSpin::One {
            let l = link_molecule(x);
            for &lv in allowed_levels(spin, Role::Link) {
                if let Some(t) = level_flux(spin, lv) {
                    let e = t as f64 / 2.0;
                    add(&mut eps, l, lv, 0.5 * g2 * u * e * e);
                }
            }
        }
    }

    for x in 1..=2 * n_cells {
        let s = site_molecule(x);
        let right = link_molecule(x);
        let left = if x > 1 { Some(link_molecule(x - 1)) } else { None };
        let odd = x % 2 == 1;
        match spin {
            LinkSpin::Half => {
                if odd {
                    let (sb, sd) = (sig(s, A, right, B)?, sig(s, A, right, D)?);
                    add(&mut eps, s, A, -sb);
                    add(&mut eps, right, D, sb - sd);
                    if let Some(l) = left {
                        let (lb, ld) = (sig(s, A, l, B)?, sig(s, A, l, D)?);
                        add(&mut eps, s, A, -ld);
                        add(&mut eps, l, D, lb - ld);
                    }
                } else {
                    let rd = sig(s, A, right, D)?;
                    let lb = match left {
                        Some(l) => sig(s, A, l, B)?,
                        None => 0.0,
                    };
                    add(&mut eps, s, A, -rd - lb);
                }
            }
            LinkSpin::One => {
                let (sb, sd) = (sig(s, A, right, B)?, sig(s, A, right, D)?);
                add(&mut eps, s, A, -sb);
                add(&mut eps, right, C, sd - sb);
                if let Some(l) = left {
                    let lv = if odd { D } else { C };
                    add(&mut eps, l, lv, -(sd - sb));
                }
            }
        }
    }

    Ok(ParameterSet { spin, n_cells, m, g2, ladder, geometry, chain, leading, energies: eps, unit_v0: u, link_units, sigmas })
}

/// `Σ_c − 2Σ_b + Σ_d` for one site–link pair (`S = 1`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CancellationTerm {
    pub site: usize,
    pub link: usize,
    pub value: f64,
}

/// Diagnostic for the `S = 1` two-number terms left after compensation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CancellationReport {
    /// Pairs `S_x, L_x`, which must cancel exactly.
    pub short: Vec<CancellationTerm>,
    /// Pairs `L_x, S_{x+1}`, left uncompensated.
    pub long: Vec<CancellationTerm>,
    pub max_short: f64,
    pub max_long: f64,
    /// `max_long` in units of `√2 w`.
    pub max_long_over_unit: f64,
}

impl CancellationReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_short <= tol
    }
}

pub fn check_s1_cancellation(params: &ParameterSet) -> Result<CancellationReport> {
    if params.spin != LinkSpin::One {
        return Err(invalid("the two-number cancellation applies to S = 1 only"));
    }
    use RotLevel::*;
    let combo = |s: usize, l: usize| -> Result<f64> {
        let sg = |lv| sigma(&params.chain, &params.leading, params.spin, s, A, l, lv);
        Ok(sg(C)? - 2.0 * sg(B)? + sg(D)?)
    };
    let mut short = Vec::new();
    let mut long = Vec::new();
    for x in 1..2 * params.n_cells {
        short.push(CancellationTerm { site: x, link: x, value: combo(site_molecule(x), link_molecule(x))? });
        long.push(CancellationTerm { site: x + 1, link: x, value: combo(site_molecule(x + 1), link_molecule(x))? });
    }
    let max = |v: &[CancellationTerm]| v.iter().map(|t| t.value.abs()).fold(0.0, f64::max);
    let (max_short, max_long) = (max(&short), max(&long));
    Ok(CancellationReport { short, long, max_short, max_long, max_long_over_unit: max_long / params.unit_v0 })
}

/// Physical-unit view of a parameter set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhysicalScale {
    pub dipole_debye: f64,
    pub min_spacing_um: f64,
    /// `r_{S1,L1}`.
    pub base_spacing_um: f64,
    pub v0_hz: f64,
    pub w_hz: f64,
    /// `w` or `√2 w` in Hz.
    pub unit_hz: f64,
}

impl ParameterSet {
    pub fn physical_scale(&self, dipole_debye: f64, min_spacing_um: f64) -> PhysicalScale {
        let base = units::base_spacing_um(self.geometry.min_ratio(), min_spacing_um);
        let v0 = units::v0_hz(dipole_debye, base);
        PhysicalScale {
            dipole_debye,
            min_spacing_um,
            base_spacing_um: base,
            v0_hz: v0,
            w_hz: self.w_v0() * v0,
            unit_hz: self.unit_v0 * v0,
        }
    }
}
