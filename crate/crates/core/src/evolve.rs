//! Real-time evolution and the observables recorded along it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{sym_eigen, tridiagonal_eigen, DenseMatrix, Spectrum, SymEigen};
use crate::qlm::{LinkSpin, QlmBasis};
use crate::sparse::SparseOperator;

/// Version of the CSV/JSON layout written by [`EvolutionRecord`].
pub const SCHEMA_VERSION: u32 = 1;

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// `points` equally spaced times covering `[0, t_end]`.
pub fn time_grid(t_end: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(t_end > 0.0) {
        return Err(invalid("a time grid needs at least two points and a positive end time"));
    }
    Ok((0..points).map(|k| t_end * k as f64 / (points - 1) as f64).collect())
}

pub fn norm_sqr(psi: &[Complex64]) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum()
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn check_inputs(h: &SparseOperator, psi0: &[Complex64]) -> Result<()> {
    if psi0.len() != h.dim() {
        return Err(Error::BasisMismatch("initial state and Hamiltonian differ in dimension".into()));
    }
    let norm = norm_sqr(psi0);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(invalid(format!("initial state has norm² {norm}, expected 1")));
    }
    let asym = h.asymmetry();
    if asym > 1e-12 * h.max_abs().max(1.0) {
        return Err(invalid(format!("Hamiltonian is not Hermitian (max asymmetry {asym:e})")));
    }
    Ok(())
}

/// Eigendecomposition of a real symmetric Hamiltonian together with the
/// expansion coefficients of one initial state.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    pub eigen: SymEigen,
    pub coefficients: Vec<Complex64>,
    /// Subtracted from every eigenvalue before forming phases; only changes
    /// a global phase but keeps the phase arithmetic well conditioned.
    pub reference_energy: f64,
    /// Multiplies `E·t`, converting the time unit to the inverse energy unit.
    pub time_scale: f64,
}

impl SpectralPropagator {
    pub fn new(h: &SparseOperator, psi0: &[Complex64], time_scale: f64) -> Result<Self> {
        check_inputs(h, psi0)?;
        Self::from_dense(h.to_dense(), psi0, time_scale, Spectrum::All)
    }

    /// Decomposes `h` (consumed) restricted to `spectrum`. With a window the
    /// evolution is exact on the captured subspace; see [`Self::captured_weight`].
    pub fn from_dense(h: DenseMatrix, psi0: &[Complex64], time_scale: f64, spectrum: Spectrum) -> Result<Self> {
        if psi0.len() != h.rows {
            return Err(Error::BasisMismatch("initial state and Hamiltonian differ in dimension".into()));
        }
        let eigen = sym_eigen(h, spectrum)?;
        let coefficients: Vec<Complex64> = (0..eigen.values.len())
            .map(|k| eigen.vectors.column(k).iter().zip(psi0).map(|(v, p)| p * v).sum())
            .collect();
        let reference_energy = coefficients.iter().zip(&eigen.values).map(|(c, e)| c.norm_sqr() * e).sum::<f64>()
            / coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>().max(f64::MIN_POSITIVE);
        Ok(Self { eigen, coefficients, reference_energy, time_scale })
    }

    /// Weight of the initial state inside the resolved part of the spectrum.
    pub fn captured_weight(&self) -> f64 {
        norm_sqr(&self.coefficients)
    }

    pub fn energy(&self) -> f64 {
        self.coefficients.iter().zip(&self.eigen.values).map(|(c, e)| c.norm_sqr() * e).sum()
    }

    /// Amplitudes of `ψ(t)` on the basis states listed in `rows`, for every
    /// time. Uses one matrix product instead of forming full states.
    pub fn amplitudes(&self, rows: &[usize], times: &[f64]) -> Vec<Vec<Complex64>> {
        let n_eig = self.coefficients.len();
        let nt = times.len();
        let mut phases = DenseMatrix::zeros(n_eig, 2 * nt);
        for (ti, &t) in times.iter().enumerate() {
            for k in 0..n_eig {
                let angle = -(self.eigen.values[k] - self.reference_energy) * t * self.time_scale;
                let z = self.coefficients[k] * Complex64::from_polar(1.0, angle);
                phases.set(k, 2 * ti, z.re);
                phases.set(k, 2 * ti + 1, z.im);
            }
        }
        let zr = self.eigen.vectors.select_rows(rows);
        let prod = zr.matmul(&phases);
        (0..nt)
            .map(|ti| (0..rows.len()).map(|r| Complex64::new(prod.get(r, 2 * ti), prod.get(r, 2 * ti + 1))).collect())
            .collect()
    }

    pub fn states(&self, times: &[f64]) -> Vec<Vec<Complex64>> {
        let rows: Vec<usize> = (0..self.eigen.vectors.rows).collect();
        self.amplitudes(&rows, times)
    }
}

/// Settings for [`time_evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Largest dimension handled by full diagonalization.
    pub dense_cap: usize,
    pub krylov_dim: usize,
    /// Target error per grid interval of the Krylov propagator.
    pub krylov_tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { dense_cap: 20000, krylov_dim: 30, krylov_tol: 1e-12 }
    }
}

/// `ψ(t) = exp(−iHt) ψ(0)` on `times`; dense below `dense_cap`, Krylov above.
pub fn time_evolve(h: &SparseOperator, psi0: &[Complex64], times: &[f64], options: EvolveOptions) -> Result<Vec<Vec<Complex64>>> {
    check_inputs(h, psi0)?;
    if h.dim() <= options.dense_cap {
        Ok(SpectralPropagator::from_dense(h.to_dense(), psi0, 1.0, Spectrum::All)?.states(times))
    } else {
        evolve_krylov(h, psi0, times, options)
    }
}

/// One Lanczos step of `exp(−iHτ) v`; returns the result and an error estimate.
fn krylov_step(h: &SparseOperator, v: &[Complex64], tau: f64, max_dim: usize) -> Result<(Vec<Complex64>, f64)> {
    let n = h.dim();
    let norm = norm_sqr(v).sqrt();
    if norm == 0.0 {
        return Ok((v.to_vec(), 0.0));
    }
    let mut basis: Vec<Vec<Complex64>> = vec![v.iter().map(|z| z / norm).collect()];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![C0; n];
    let mut residual = 0.0;
    for j in 0..max_dim.min(n) {
        h.matvec_complex_into(&basis[j], &mut w);
        let a = inner(&basis[j], &w).re;
        alpha.push(a);
        // Full reorthogonalization, twice, keeps the basis orthonormal.
        for _ in 0..2 {
            for q in &basis {
                let c = inner(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let b = norm_sqr(&w).sqrt();
        if j + 1 == max_dim.min(n) || b < 1e-14 * (a.abs() + 1.0) {
            residual = if j + 1 == n { 0.0 } else { b };
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|z| z / b).collect());
    }
    let m = alpha.len();
    let tri = tridiagonal_eigen(&alpha, &beta[..m - 1])?;
    // exp(−iTτ) e₁ in the Lanczos basis.
    let mut y = vec![C0; m];
    for k in 0..m {
        let phase = Complex64::from_polar(1.0, -tri.values[k] * tau) * tri.vectors.get(0, k);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += phase * tri.vectors.get(i, k);
        }
    }
    let err = residual * y[m - 1].norm() * norm;
    let mut out = vec![C0; n];
    for (q, yi) in basis.iter().zip(&y) {
        for (o, qi) in out.iter_mut().zip(q) {
            *o += qi * yi * norm;
        }
    }
    Ok((out, err))
}

/// Krylov propagation with step halving until the per-step error estimate
/// falls below the tolerance.
pub fn evolve_krylov(h: &SparseOperator, psi0: &[Complex64], times: &[f64], options: EvolveOptions) -> Result<Vec<Vec<Complex64>>> {
    check_inputs(h, psi0)?;
    let mut out = Vec::with_capacity(times.len());
    let mut psi = psi0.to_vec();
    let mut t_now = 0.0;
    for &t in times {
        if t < t_now {
            return Err(invalid("times must be non-decreasing and start at or after zero"));
        }
        let mut remaining = t - t_now;
        let mut step = remaining;
        while remaining > 0.0 {
            step = step.min(remaining);
            let (next, err) = krylov_step(h, &psi, step, options.krylov_dim)?;
            if err > options.krylov_tol && step > 1e-12 * (t.abs() + 1.0) {
                step *= 0.5;
                continue;
            }
            psi = next;
            remaining -= step;
        }
        t_now = t;
        out.push(psi.clone());
    }
    Ok(out)
}

/// Time series of every plotted observable for one model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolutionRecord {
    pub schema_version: u32,
    /// `"qlm"` or `"dmh"`.
    pub model: String,
    pub spin: LinkSpin,
    pub n_cells: usize,
    pub times: Vec<f64>,
    /// `site_densities[t][x − 1] = ⟨ψ†_x ψ_x⟩`.
    pub site_densities: Vec<Vec<f64>>,
    /// `link_flux[t][x − 1] = ⟨E_{x,x+1}⟩` for all links including the frozen one.
    pub link_flux: Vec<Vec<f64>>,
    /// Flux summed over dynamical links.
    pub flux_sum: Vec<f64>,
    /// `Σ_x |⟨G̃_x⟩| / L` over the `L = 2N − 1` sites with two links.
    pub gauss_g: Vec<f64>,
    /// Squared norm of the state inside the QLM image.
    pub norm: Vec<f64>,
    /// `|⟨ψ_QLM|ψ_DMH⟩|²`, only for molecular runs.
    pub fidelity: Option<Vec<f64>>,
}

impl EvolutionRecord {
    /// Builds the record from amplitudes on the QLM basis (projected, not
    /// renormalized, for molecular runs).
    pub fn from_amplitudes(model: &str, basis: &QlmBasis, times: &[f64], amplitudes: &[Vec<Complex64>], reference: Option<&[Vec<Complex64>]>) -> Result<Self> {
        if amplitudes.len() != times.len() {
            return Err(invalid("one state per time is required"));
        }
        if let Some(r) = reference {
            if r.len() != times.len() {
                return Err(invalid("reference and evolved series use different time grids"));
            }
        }
        let n = basis.n_sites();
        let occ: Vec<Vec<f64>> = (1..=n).map(|x| basis.occupation_diag(x)).collect();
        let flux: Vec<Vec<f64>> = (1..=n).map(|x| basis.flux_diag(x)).collect();
        let gauss: Vec<Vec<f64>> = basis
            .gauss_sites()
            .map(|x| basis.states().iter().map(|s| s.gauss(x)).collect::<Result<Vec<f64>>>())
            .collect::<Result<_>>()?;
        let dynamical: Vec<usize> = basis.dynamical_links().collect();
        let expect = |p: &[f64], d: &[f64]| -> f64 { p.iter().zip(d).map(|(a, b)| a * b).sum() };

        let mut rec = Self {
            schema_version: SCHEMA_VERSION,
            model: model.to_string(),
            spin: basis.spin,
            n_cells: basis.n_cells,
            times: times.to_vec(),
            site_densities: Vec::new(),
            link_flux: Vec::new(),
            flux_sum: Vec::new(),
            gauss_g: Vec::new(),
            norm: Vec::new(),
            fidelity: reference.map(|_| Vec::new()),
        };
        for (ti, psi) in amplitudes.iter().enumerate() {
            if psi.len() != basis.dim() {
                return Err(Error::BasisMismatch("amplitudes do not match the QLM basis".into()));
            }
            let p: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
            rec.site_densities.push(occ.iter().map(|d| expect(&p, d)).collect());
            let lf: Vec<f64> = flux.iter().map(|d| expect(&p, d)).collect();
            rec.flux_sum.push(dynamical.iter().map(|&x| lf[x - 1]).sum());
            rec.link_flux.push(lf);
            rec.gauss_g.push(gauss.iter().map(|d| expect(&p, d).abs()).sum::<f64>() / gauss.len() as f64);
            rec.norm.push(p.iter().sum());
            if let (Some(r), Some(f)) = (reference, rec.fidelity.as_mut()) {
                f.push(inner(&r[ti], psi).norm_sqr());
            }
        }
        Ok(rec)
    }

    pub fn csv_header(&self, physical: bool) -> Vec<String> {
        let n = 2 * self.n_cells;
        let mut h = vec!["t".to_string()];
        if physical {
            h.push("t_seconds".into());
        }
        h.extend((1..=n).map(|x| format!("n{x}")));
        h.extend((1..=n).map(|x| format!("E{x}")));
        h.extend(["flux_sum", "gauss_g", "norm"].map(String::from));
        if self.fidelity.is_some() {
            h.push("fidelity".into());
        }
        h
    }

    /// One row per time. `seconds_per_unit` adds a lab-time column.
    pub fn write_csv<W: std::io::Write>(&self, writer: W, seconds_per_unit: Option<f64>) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.csv_header(seconds_per_unit.is_some()))?;
        for ti in 0..self.times.len() {
            let mut row = vec![self.times[ti]];
            if let Some(s) = seconds_per_unit {
                row.push(self.times[ti] * s);
            }
            row.extend(&self.site_densities[ti]);
            row.extend(&self.link_flux[ti]);
            row.extend([self.flux_sum[ti], self.gauss_g[ti], self.norm[ti]]);
            if let Some(f) = &self.fidelity {
                row.push(f[ti]);
            }
            w.write_record(row.iter().map(|v| format!("{v:.12e}")))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn mean_fidelity(&self) -> Option<f64> {
        self.fidelity.as_ref().map(|f| f.iter().sum::<f64>() / f.len() as f64)
    }

    pub fn min_fidelity(&self) -> Option<f64> {
        self.fidelity.as_ref().map(|f| f.iter().copied().fold(f64::INFINITY, f64::min))
    }

    pub fn max_gauss(&self) -> f64 {
        self.gauss_g.iter().copied().fold(0.0, f64::max)
    }
}
