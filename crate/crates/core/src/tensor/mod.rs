//! Dense complex matrices and the handful of tensor operations built on them.
//!
//! Everything here works on small row-major matrices (at most a few hundred
//! rows). Tensor-product structure is carried separately by [`FactorShape`];
//! throughout the crate the left operand of a Kronecker product is the
//! slowest-varying (high-order) index.

mod eigh;
mod svd;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eigh::{eigh, expm_hermitian, Eigh};
pub use svd::{svd, Svd};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimension(format!(
                "matrix shape {rows}×{cols} has an empty side"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}×{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Builds a matrix from separate real and imaginary parts (row-major).
    pub fn from_parts(rows: usize, cols: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} real parts but {} imaginary parts",
                re.len(),
                im.len()
            )));
        }
        Self::from_vec(
            rows,
            cols,
            re.iter().zip(im).map(|(&r, &i)| C64::new(r, i)).collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    /// Outer product |a⟩⟨b|.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Matrix product; panics on inner-dimension mismatch.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul of {}×{} by {}×{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn try_matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}×{} by {}×{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(self.matmul(rhs))
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// ‖U†U − I‖_F, or `None` for non-square input.
    pub fn unitarity_deviation(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let g = self.adjoint().matmul(self);
        Some((&g - &Self::identity(self.rows)).frobenius_norm())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation().is_some_and(|d| d <= tol)
    }

    /// ‖H − H†‖_F, or `None` for non-square input.
    pub fn hermiticity_deviation(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        Some((self - &self.adjoint()).frobenius_norm())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation().is_some_and(|d| d <= tol)
    }

    pub(crate) fn ensure_unitary(&self, tol: f64) -> Result<()> {
        match self.unitarity_deviation() {
            None => Err(Error::DimensionMismatch(format!(
                "expected a square matrix, got {}×{}",
                self.rows, self.cols
            ))),
            Some(d) if d > tol => Err(Error::NotUnitary { deviation: d }),
            Some(_) => Ok(()),
        }
    }

    pub(crate) fn ensure_square(&self, n: usize, what: &str) -> Result<()> {
        if self.rows != n || self.cols != n {
            return Err(Error::DimensionMismatch(format!(
                "{what} must be {n}×{n}, got {}×{}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "adding matrices of different shape");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "subtracting matrices of different shape");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}×{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>9.5}{:+.5}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Local Hilbert-space dimensions of a tensor-product space, slowest index first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorShape {
    dims: Vec<usize>,
}

impl FactorShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidDimension(format!(
                "factor dimensions must be positive, got {dims:?}"
            )));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub(crate) fn check_square(&self, m: &ComplexMatrix) -> Result<()> {
        let n = self.total();
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "shape {:?} describes a {n}-dimensional space but the matrix is {}×{}",
                self.dims,
                m.rows(),
                m.cols()
            )));
        }
        Ok(())
    }

    /// Mixed-radix digits of a flat index.
    pub(crate) fn digits(&self, mut index: usize, out: &mut [usize]) {
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
    }
}

/// Kronecker product with `a` on the high-order index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = b.shape();
    let mut out = ComplexMatrix::zeros(a.rows() * p, a.cols() * q);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..p {
                for l in 0..q {
                    out[(i * p + k, j * q + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence, leftmost factor slowest.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, m| kron(&acc, m))
}

/// Realignment of a bipartite operator on `dim_a ⊗ dim_b`:
/// `M[(i,i'),(j,j')] = u[(i,j),(i',j')]`.
///
/// A product operator `A ⊗ B` maps to the rank-one matrix `vec(A)·vec(B)ᵀ`.
pub fn reshuffle(u: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    let n = dim_a * dim_b;
    if dim_a == 0 || dim_b == 0 || u.rows() != n || u.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "reshuffle over {dim_a}⊗{dim_b} needs a {n}×{n} matrix, got {}×{}",
            u.rows(),
            u.cols()
        )));
    }
    let mut m = ComplexMatrix::zeros(dim_a * dim_a, dim_b * dim_b);
    for i in 0..dim_a {
        for j in 0..dim_b {
            for ip in 0..dim_a {
                for jp in 0..dim_b {
                    m[(i * dim_a + ip, j * dim_b + jp)] = u[(i * dim_b + j, ip * dim_b + jp)];
                }
            }
        }
    }
    Ok(m)
}

/// Inverse of [`reshuffle`].
pub fn unreshuffle(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    if dim_a == 0 || dim_b == 0 || m.rows() != dim_a * dim_a || m.cols() != dim_b * dim_b {
        return Err(Error::DimensionMismatch(format!(
            "unreshuffle over {dim_a}⊗{dim_b} needs a {}×{} matrix, got {}×{}",
            dim_a * dim_a,
            dim_b * dim_b,
            m.rows(),
            m.cols()
        )));
    }
    let n = dim_a * dim_b;
    let mut u = ComplexMatrix::zeros(n, n);
    for i in 0..dim_a {
        for j in 0..dim_b {
            for ip in 0..dim_a {
                for jp in 0..dim_b {
                    u[(i * dim_b + j, ip * dim_b + jp)] = m[(i * dim_a + ip, j * dim_b + jp)];
                }
            }
        }
    }
    Ok(u)
}

/// Hilbert-Schmidt inner product Tr[a†b].
pub fn hs_overlap(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!(
            "Hilbert-Schmidt overlap of {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Traces out every factor not listed in `keep`. Kept factors stay in their
/// original relative order.
pub fn partial_trace(m: &ComplexMatrix, shape: &FactorShape, keep: &[usize]) -> Result<ComplexMatrix> {
    shape.check_square(m)?;
    let factors = shape.len();
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if let Some(&bad) = keep_sorted.iter().find(|&&k| k >= factors) {
        return Err(Error::InvalidFactor {
            index: bad,
            factors,
        });
    }
    let dims = shape.dims();
    let kept_dims: Vec<usize> = keep_sorted.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);

    let mut row_digits = vec![0; factors];
    let mut col_digits = vec![0; factors];
    let n = shape.total();
    for r in 0..n {
        shape.digits(r, &mut row_digits);
        for c in 0..n {
            shape.digits(c, &mut col_digits);
            let traced_match = (0..factors)
                .filter(|f| keep_sorted.binary_search(f).is_err())
                .all(|f| row_digits[f] == col_digits[f]);
            if !traced_match {
                continue;
            }
            let (mut ro, mut co) = (0, 0);
            for (&k, &d) in keep_sorted.iter().zip(&kept_dims) {
                ro = ro * d + row_digits[k];
                co = co * d + col_digits[k];
            }
            out[(ro, co)] += m[(r, c)];
        }
    }
    Ok(out)
}
