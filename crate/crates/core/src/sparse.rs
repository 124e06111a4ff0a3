//! Real sparse operators over an enumerated basis.
//!
//! Every Hamiltonian and observable in this crate is real in the chosen
//! bases (collinear chain, `φ = 0`), so entries are stored as `f64`.

use num_complex::Complex64;

use crate::linalg::DenseMatrix;

/// Compressed-sparse-row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseOperator {
    /// Builds from `(row, col, value)` triplets, summing duplicates and
    /// dropping exact zeros.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) outside dimension {dim}");
            if let (Some(&lr), Some(&lc)) = (rows.last(), cols.last()) {
                if lr == r && lc == c {
                    *vals.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            cols.push(c);
            vals.push(v);
        }
        let mut keep_cols = Vec::with_capacity(cols.len());
        let mut keep_vals = Vec::with_capacity(vals.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v == 0.0 {
                continue;
            }
            row_ptr[r + 1] += 1;
            keep_cols.push(c);
            keep_vals.push(v);
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { dim, row_ptr, cols: keep_cols, vals: keep_vals }
    }

    pub fn diagonal_from(values: &[f64]) -> Self {
        let triplets = values.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(values.len(), triplets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Nonzero entries of row `i` as `(column, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[range.clone()].binary_search(&j) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn matvec_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        self.matvec_complex_into(x, &mut y);
        y
    }

    pub fn matvec_complex_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in self.row(i) {
                acc += x[j] * v;
            }
            *yi = acc;
        }
    }

    /// `⟨x| A |x⟩` for a complex vector.
    pub fn expectation(&self, x: &[Complex64]) -> f64 {
        let ax = self.matvec_complex(x);
        x.iter().zip(&ax).map(|(a, b)| (a.conj() * b).re).sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(i, j, v)| (j, i, v)).collect())
    }

    /// Largest `|A_ij − A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        self.triplets().map(|(i, j, v)| (v - self.get(j, i)).abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim).map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { dim: self.dim, row_ptr: self.row_ptr.clone(), cols: self.cols.clone(), vals: self.vals.iter().map(|v| v * s).collect() }
    }

    pub fn add(&self, other: &SparseOperator) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_triplets(self.dim, self.triplets().chain(other.triplets()).collect())
    }

    pub fn matmul(&self, other: &SparseOperator) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut triplets = Vec::new();
        for i in 0..self.dim {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    triplets.push((i, j, a * b));
                }
            }
        }
        Self::from_triplets(self.dim, triplets)
    }

    /// Largest entry of `[A, B]` in absolute value.
    pub fn commutator_norm(&self, other: &SparseOperator) -> f64 {
        self.matmul(other).add(&other.matmul(self).scaled(-1.0)).max_abs()
    }

    /// Conjugation `P A Pᵀ` by the signed permutation `|k⟩ → sign[k] |perm[k]⟩`.
    pub fn permuted(&self, perm: &[usize], sign: &[f64]) -> Self {
        assert_eq!(perm.len(), self.dim);
        Self::from_triplets(self.dim, self.triplets().map(|(i, j, v)| (perm[i], perm[j], v * sign[i] * sign[j])).collect())
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.triplets() {
            m.add(i, j, v);
        }
        m
    }

    /// Dense copy with `shift` subtracted from the diagonal.
    pub fn to_dense_shifted(&self, shift: f64) -> DenseMatrix {
        let mut m = self.to_dense();
        for i in 0..self.dim {
            m.add(i, i, -shift);
        }
        m
    }

    /// Principal submatrix on `indices` (in that order).
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.dim];
        for (k, &i) in indices.iter().enumerate() {
            pos[i] = k;
        }
        let mut triplets = Vec::new();
        for (k, &i) in indices.iter().enumerate() {
            for (j, v) in self.row(i) {
                if pos[j] != usize::MAX {
                    triplets.push((k, pos[j], v));
                }
            }
        }
        Self::from_triplets(indices.len(), triplets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let a = SparseOperator::from_triplets(2, vec![(0, 1, 1.0), (0, 1, 2.0), (1, 0, 3.0), (1, 1, 0.0)]);
        assert_eq!(a.get(0, 1), 3.0);
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.asymmetry(), 0.0);
    }

    #[test]
    fn commutator_of_diagonals_vanishes() {
        let a = SparseOperator::diagonal_from(&[1.0, 2.0, 3.0]);
        let b = SparseOperator::diagonal_from(&[0.5, -1.0, 4.0]);
        assert_eq!(a.commutator_norm(&b), 0.0);
    }

    #[test]
    fn restrict_keeps_order() {
        let a = SparseOperator::from_triplets(3, vec![(0, 2, 1.0), (2, 0, 1.0), (1, 1, 5.0)]);
        let r = a.restrict(&[2, 0]);
        assert_eq!(r.get(0, 1), 1.0);
        assert_eq!(r.get(1, 0), 1.0);
    }
}
