//! Thin safe wrappers over the handful of LAPACK/BLAS routines the engine needs.

use std::os::raw::{c_char, c_int};

use crate::error::{Error, Result};

/// Column-major dense real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] += v;
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Copy of the rows listed in `rows`, in that order.
    pub fn select_rows(&self, rows: &[usize]) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(rows.len(), self.cols);
        for j in 0..self.cols {
            let col = self.column(j);
            for (k, &r) in rows.iter().enumerate() {
                out.data[j * rows.len() + k] = col[r];
            }
        }
        out
    }

    /// `self · other` through BLAS.
    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        if self.rows == 0 || other.cols == 0 || self.cols == 0 {
            return out;
        }
        unsafe {
            cblas_sys::cblas_dgemm(
                cblas_sys::CBLAS_LAYOUT::CblasColMajor,
                cblas_sys::CBLAS_TRANSPOSE::CblasNoTrans,
                cblas_sys::CBLAS_TRANSPOSE::CblasNoTrans,
                self.rows as c_int,
                other.cols as c_int,
                self.cols as c_int,
                1.0,
                self.data.as_ptr(),
                self.rows as c_int,
                other.data.as_ptr(),
                other.rows as c_int,
                0.0,
                out.data.as_mut_ptr(),
                out.rows as c_int,
            );
        }
        out
    }

    /// `selfᵀ · v` for a real vector.
    pub fn transpose_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, v.len());
        (0..self.cols).map(|j| self.column(j).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }
}

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: DenseMatrix,
}

/// Which part of the spectrum to resolve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spectrum {
    All,
    /// Eigenvalues inside the half-open window `(lo, hi]`.
    Window { lo: f64, hi: f64 },
}

/// Symmetric eigendecomposition via LAPACK `dsyevr`. Consumes the matrix
/// (only its lower triangle is read) to keep peak memory at two `n × n` buffers.
pub fn sym_eigen(mut a: DenseMatrix, spectrum: Spectrum) -> Result<SymEigen> {
    if a.rows != a.cols {
        return Err(Error::Linalg(format!("matrix is {}x{}, not square", a.rows, a.cols)));
    }
    let n = a.rows;
    if n == 0 {
        return Ok(SymEigen { values: vec![], vectors: DenseMatrix::zeros(0, 0) });
    }
    let ni = n as c_int;
    let jobz = b'V' as c_char;
    let (range, vl, vu) = match spectrum {
        Spectrum::All => (b'A' as c_char, 0.0, 0.0),
        Spectrum::Window { lo, hi } => (b'V' as c_char, lo, hi),
    };
    let uplo = b'L' as c_char;
    let (il, iu) = (0 as c_int, 0 as c_int);
    let abstol = 0.0f64;
    let mut m: c_int = 0;
    let mut w = vec![0.0f64; n];
    let mut z = vec![0.0f64; n * n];
    let mut isuppz = vec![0 as c_int; 2 * n];
    let mut info: c_int = 0;

    let mut work_query = [0.0f64];
    let mut iwork_query = [0 as c_int];
    let query: c_int = -1;
    unsafe {
        lapack_sys::dsyevr_(
            &jobz, &range, &uplo, &ni, a.data.as_mut_ptr(), &ni, &vl, &vu, &il, &iu, &abstol, &mut m,
            w.as_mut_ptr(), z.as_mut_ptr(), &ni, isuppz.as_mut_ptr(), work_query.as_mut_ptr(), &query,
            iwork_query.as_mut_ptr(), &query, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Linalg(format!("dsyevr workspace query failed (info = {info})")));
    }
    let lwork = work_query[0] as c_int;
    let liwork = iwork_query[0];
    let mut work = vec![0.0f64; lwork.max(1) as usize];
    let mut iwork = vec![0 as c_int; liwork.max(1) as usize];
    unsafe {
        lapack_sys::dsyevr_(
            &jobz, &range, &uplo, &ni, a.data.as_mut_ptr(), &ni, &vl, &vu, &il, &iu, &abstol, &mut m,
            w.as_mut_ptr(), z.as_mut_ptr(), &ni, isuppz.as_mut_ptr(), work.as_mut_ptr(), &lwork,
            iwork.as_mut_ptr(), &liwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Linalg(format!("dsyevr failed (info = {info})")));
    }
    drop(a);
    let m = m as usize;
    w.truncate(m);
    z.truncate(n * m);
    z.shrink_to_fit();
    Ok(SymEigen { values: w, vectors: DenseMatrix { rows: n, cols: m, data: z } })
}

/// Eigenpairs of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (LAPACK `dstev`).
pub fn tridiagonal_eigen(d: &[f64], e: &[f64]) -> Result<SymEigen> {
    let n = d.len();
    if n == 0 {
        return Ok(SymEigen { values: vec![], vectors: DenseMatrix::zeros(0, 0) });
    }
    if e.len() + 1 != n {
        return Err(Error::Linalg("off-diagonal length must be n - 1".into()));
    }
    let mut dd = d.to_vec();
    let mut ee = e.to_vec();
    ee.push(0.0);
    let mut z = vec![0.0f64; n * n];
    let mut work = vec![0.0f64; (2 * n).saturating_sub(2).max(1)];
    let ni = n as c_int;
    let jobz = b'V' as c_char;
    let mut info: c_int = 0;
    unsafe {
        lapack_sys::dstev_(&jobz, &ni, dd.as_mut_ptr(), ee.as_mut_ptr(), z.as_mut_ptr(), &ni, work.as_mut_ptr(), &mut info);
    }
    if info != 0 {
        return Err(Error::Linalg(format!("dstev failed (info = {info})")));
    }
    Ok(SymEigen { values: dd, vectors: DenseMatrix { rows: n, cols: n, data: z } })
}
