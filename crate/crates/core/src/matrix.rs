//! Dense matrix storage and the exact numerical kernels the rest of the
//! crate builds on.
//!
//! Matrices are stored row-major (`data[i * cols + j]` holds entry `(i, j)`)
//! with 64-bit floating point entries. Values are immutable after
//! construction; every operation returns a new matrix, so all of them are
//! safe to call concurrently on shared inputs.

use crate::error::{Error, Result};

/// A dense real matrix in row-major order.
///
/// Constructors reject empty shapes and non-finite entries.
///
/// ```
/// use psvd::Matrix;
/// let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
/// assert_eq!(a.get(1, 0), 3.0);
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Creates a matrix from raw row-major data.
    ///
    /// Fails if the shape is empty, the data length does not equal
    /// `rows * cols`, or any entry is NaN/infinite.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if data.len() != rows * cols {
            return Err(Error::Shape {
                context: format!(
                    "expected {} entries for a {}x{} matrix, got {}",
                    rows * cols,
                    rows,
                    cols,
                    data.len()
                ),
            });
        }
        for (k, v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: k / cols, col: k % cols });
            }
        }
        Ok(Self { rows, cols, data })
    }

    /// Creates a matrix from row slices; rows must all have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::Empty);
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Shape {
                    context: format!("row {} has {} entries, expected {}", i, row.len(), cols),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    /// Internal constructor for results of arithmetic; skips entry checks.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert!(rows >= 1 && cols >= 1 && data.len() == rows * cols);
        Self { rows, cols, data }
    }

    /// A matrix of zeros.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "empty shape");
        Self::from_raw(rows, cols, vec![0.0; rows * cols])
    }

    /// The n-order identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// A square diagonal matrix with the given entries.
    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in entries.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    /// Raw row-major data.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Row `i` as a slice.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Column `j` copied into a vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Diagonal entries, up to `min(rows, cols)`.
    pub fn diag(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    /// Sum of the diagonal entries.
    pub fn trace(&self) -> f64 {
        self.diag().iter().sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Returns the transpose.
    pub fn transpose(&self) -> Matrix {
        let mut out = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        Matrix::from_raw(self.cols, self.rows, out)
    }

    /// Entry-wise scaling by `s`.
    pub fn scale(&self, s: f64) -> Matrix {
        Matrix::from_raw(self.rows, self.cols, self.data.iter().map(|v| v * s).collect())
    }

    /// Entry-wise difference `self - other`.
    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape {
                context: format!(
                    "cannot subtract {}x{} from {}x{}",
                    other.rows, other.cols, self.rows, self.cols
                ),
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Matrix::from_raw(self.rows, self.cols, data))
    }

    /// Entry-wise sum `self + other`.
    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape {
                context: format!(
                    "cannot add {}x{} to {}x{}",
                    other.rows, other.cols, self.rows, self.cols
                ),
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Matrix::from_raw(self.rows, self.cols, data))
    }

    /// Standard matrix product `self * rhs`.
    ///
    /// ```
    /// use psvd::Matrix;
    /// let a = Matrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
    /// let b = Matrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
    /// let c = a.matmul(&b).unwrap();
    /// assert_eq!(c.data(), &[2.0, 1.0]);
    /// ```
    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::Shape {
                context: format!(
                    "cannot multiply {}x{} by {}x{}",
                    self.rows, self.cols, rhs.rows, rhs.cols
                ),
            });
        }
        let (m, k, n) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![0.0; m * n];
        // i-k-j order keeps both operands streaming row-wise.
        for i in 0..m {
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == 0.0 {
                    continue;
                }
                let rrow = &rhs.data[p * n..(p + 1) * n];
                let orow = &mut out[i * n..(i + 1) * n];
                for j in 0..n {
                    orow[j] += a * rrow[j];
                }
            }
        }
        Ok(Matrix::from_raw(m, n, out))
    }

    /// Matrix-vector product `self * v`.
    pub fn matvec(&self, v: &Vector) -> Result<Vector> {
        if self.cols != v.len() {
            return Err(Error::Shape {
                context: format!("cannot apply {}x{} to a vector of length {}", self.rows, self.cols, v.len()),
            });
        }
        let out = (0..self.rows)
            .map(|i| self.row(i).iter().zip(v.as_slice()).map(|(a, b)| a * b).sum())
            .collect();
        Ok(Vector::from_raw(out))
    }

    /// The Gram matrix `S = XᵀX`.
    ///
    /// Only the upper triangle is computed; the lower triangle is mirrored,
    /// so the result is exactly symmetric.
    pub fn gram_matrix(&self) -> Matrix {
        let n = self.cols;
        let mut s = vec![0.0; n * n];
        for j in 0..n {
            for k in j..n {
                let mut acc = 0.0;
                for i in 0..self.rows {
                    acc += self.data[i * n + j] * self.data[i * n + k];
                }
                s[j * n + k] = acc;
                s[k * n + j] = acc;
            }
        }
        Matrix::from_raw(n, n, s)
    }

    /// `S^q` for a square symmetric `S` by repeated multiplication.
    ///
    /// Each product is re-symmetrized as `(M + Mᵀ)/2` to suppress the
    /// asymmetry drift of accumulated rounding.
    pub fn sym_matrix_power(&self, q: usize) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::Shape {
                context: format!("matrix power needs a square input, got {}x{}", self.rows, self.cols),
            });
        }
        if q == 0 {
            return Err(Error::Config { message: "matrix power requires q >= 1".into() });
        }
        let mut p = self.clone();
        for _ in 1..q {
            p = p.matmul(self)?.symmetrized();
        }
        Ok(p)
    }

    /// `(M + Mᵀ)/2`.
    pub(crate) fn symmetrized(&self) -> Matrix {
        debug_assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
            }
        }
        Matrix::from_raw(n, n, out)
    }

    /// Squared Frobenius norm, the sum of all squared entries.
    ///
    /// Equals `trace(XᵀX)` and the sum of the squared singular values.
    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Keeps the first `r` columns.
    pub fn take_columns(&self, r: usize) -> Result<Matrix> {
        if r == 0 || r > self.cols {
            return Err(Error::Config {
                message: format!("cannot take {} columns from a {}x{} matrix", r, self.rows, self.cols),
            });
        }
        let mut data = Vec::with_capacity(self.rows * r);
        for i in 0..self.rows {
            data.extend_from_slice(&self.data[i * self.cols..i * self.cols + r]);
        }
        Ok(Matrix::from_raw(self.rows, r, data))
    }

    /// Reorders columns so that output column `k` is input column `perm[k]`.
    pub(crate) fn permute_columns(&self, perm: &[usize]) -> Matrix {
        debug_assert_eq!(perm.len(), self.cols);
        let mut out = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            for (k, &src) in perm.iter().enumerate() {
                out[i * self.cols + k] = self.data[i * self.cols + src];
            }
        }
        Matrix::from_raw(self.rows, self.cols, out)
    }

    /// Flips each column's sign so its largest-magnitude entry is positive,
    /// ties broken by the lowest row index. Fixes the sign ambiguity of
    /// singular/eigen vector pairs so outputs are comparable across runs.
    pub(crate) fn normalize_column_signs(&mut self) {
        for j in 0..self.cols {
            let mut best = 0usize;
            let mut best_abs = -1.0;
            for i in 0..self.rows {
                let a = self.get(i, j).abs();
                if a > best_abs {
                    best_abs = a;
                    best = i;
                }
            }
            if self.get(best, j) < 0.0 {
                for i in 0..self.rows {
                    let v = self.get(i, j);
                    self.set(i, j, -v);
                }
            }
        }
    }
}

/// A real vector with at least one finite entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    data: Vec<f64>,
}

impl Vector {
    /// Creates a vector, rejecting empty or non-finite input.
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Empty);
        }
        for (k, v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: k, col: 0 });
            }
        }
        Ok(Self { data })
    }

    pub(crate) fn from_raw(data: Vec<f64>) -> Self {
        debug_assert!(!data.is_empty());
        Self { data }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.data[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.data.iter()
    }

    /// Inner product with another vector of the same length.
    pub fn dot(&self, other: &Vector) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::Shape {
                context: format!("dot product of lengths {} and {}", self.len(), other.len()),
            });
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector::from_raw(self.data.iter().map(|v| v * s).collect())
    }
}

/// Modified Gram-Schmidt orthogonalization.
///
/// Returns `V` with orthonormal columns spanning the columns of `w`; for
/// every `j` the first `j` columns of `V` span the first `j` columns of `w`.
/// Column `i` is declared numerically dependent when its residual norm
/// falls below `1e-12` times the largest column norm of the input (the
/// normalization divides by that residual norm, so it must stay away
/// from zero).
pub fn modified_gram_schmidt(w: &Matrix) -> Result<Matrix> {
    let mut max_col_norm = 0.0f64;
    for j in 0..w.cols() {
        let norm_sq: f64 = (0..w.rows()).map(|i| w.get(i, j) * w.get(i, j)).sum();
        max_col_norm = max_col_norm.max(norm_sq.sqrt());
    }
    orthogonalize_with_drop_tol(w, 1e-12 * max_col_norm)
}

/// Gram-Schmidt with an explicit residual-norm cutoff.
///
/// The subspace iteration passes an effectively-zero cutoff: its input
/// columns carry norm spreads as wide as the gain-matrix spectrum, so a
/// cutoff relative to the largest column would reject columns the
/// iteration can still use.
pub(crate) fn orthogonalize_with_drop_tol(w: &Matrix, drop_tol: f64) -> Result<Matrix> {
    if w.rows() < w.cols() {
        return Err(Error::Shape {
            context: format!("Gram-Schmidt needs rows >= cols, got {}x{}", w.rows(), w.cols()),
        });
    }
    let (m, n) = (w.rows(), w.cols());
    let mut v = w.clone();

    for i in 0..n {
        let r: f64 = (0..m).map(|k| v.get(k, i) * v.get(k, i)).sum::<f64>().sqrt();
        if r <= drop_tol {
            return Err(Error::RankDeficient { column: i });
        }
        for k in 0..m {
            let val = v.get(k, i) / r;
            v.set(k, i, val);
        }
        for j in (i + 1)..n {
            let proj: f64 = (0..m).map(|k| v.get(k, i) * v.get(k, j)).sum();
            for k in 0..m {
                let val = v.get(k, j) - proj * v.get(k, i);
                v.set(k, j, val);
            }
        }
    }
    Ok(v)
}
