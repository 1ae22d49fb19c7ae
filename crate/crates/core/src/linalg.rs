//! Dense linear algebra kernels.
//!
//! Everything here is deliberately small: the algorithms only need
//! matrix-vector products in both orientations, column access, a few norms,
//! and one least-squares solve on desk-scale problems.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty("matrix"));
        }
        if data.len() != rows * cols {
            return Err(Error::BadShape {
                rows,
                cols,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Error::DimensionMismatch {
                    expected: n_cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(n_rows, n_cols, data)
    }

    /// Builds a matrix from its columns.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let n_cols = columns.len();
        let n_rows = columns.first().map(|c| c.as_ref().len()).unwrap_or(0);
        let mut data = vec![0.0; n_rows * n_cols];
        for (j, col) in columns.iter().enumerate() {
            let col = col.as_ref();
            if col.len() != n_rows {
                return Err(Error::DimensionMismatch {
                    expected: n_rows,
                    found: col.len(),
                });
            }
            for (i, &v) in col.iter().enumerate() {
                data[i * n_cols + j] = v;
            }
        }
        Self::new(n_rows, n_cols, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
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
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols, x.len())?;
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// `Aᵀ w`, accumulated row by row in a fixed order.
    pub fn tr_mul_vec(&self, w: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows, w.len())?;
        let mut out = vec![0.0; self.cols];
        for (i, &wi) in w.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += wi * a;
            }
        }
        Ok(out)
    }

    /// `max_ij |A_ij|`, which is the operator norm from ℓ1 to ℓ∞.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(math::abs(*v)))
    }

    pub fn column_norms(&self) -> Vec<f64> {
        let mut sq = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (s, &a) in sq.iter_mut().zip(self.row(i)) {
                *s += a * a;
            }
        }
        sq.into_iter().map(libm::sqrt).collect()
    }

    /// Appends columns on the right.
    pub fn with_columns<C: AsRef<[f64]>>(&self, extra: &[C]) -> Result<Self> {
        let cols = self.cols + extra.len();
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            for c in extra {
                let c = c.as_ref();
                check_len(self.rows, c.len())?;
                data.push(c[i]);
            }
        }
        Self::new(self.rows, cols, data)
    }
}

#[inline]
pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| math::abs(*x)).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    math::sqrt(v.iter().map(|x| x * x).sum())
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(math::abs(*x)))
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(v: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, &x) in v.iter().enumerate() {
        match best {
            Some((_, b)) if x <= b => {}
            _ => best = Some((j, x)),
        }
    }
    best.map(|(j, _)| j)
}

/// Index of the entry with largest magnitude; ties go to the lowest index.
pub fn argmax_abs(v: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, &x) in v.iter().enumerate() {
        let a = math::abs(x);
        match best {
            Some((_, b)) if a <= b => {}
            _ => best = Some((j, a)),
        }
    }
    best.map(|(j, _)| j)
}

/// Sign with `sgn(0) = 0`.
#[inline]
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Result of a least-squares solve `min_β ‖y − Xβ‖₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeastSquaresFit {
    /// `‖Xβ_LS‖₂`, the length of the projection of `y` onto range(X).
    pub fitted_norm: f64,
    /// `‖y − Xβ_LS‖₂`.
    pub residual_norm: f64,
    /// Numerical rank detected by the pivoted factorization.
    pub rank: usize,
}

/// Householder QR with column pivoting applied to `[X | y]`.
///
/// The projection norm is read off the first `rank` entries of `Qᵀy`, so
/// rank-deficient designs are handled without forming β explicitly (the
/// projection is unique even when β_LS is not).
pub fn least_squares(x: &Matrix, y: &[f64]) -> Result<LeastSquaresFit> {
    let n = x.rows();
    let p = x.cols();
    check_len(n, y.len())?;

    // Column-major working copy.
    let mut cols: Vec<Vec<f64>> = (0..p).map(|j| x.column(j)).collect();
    let mut rhs = y.to_vec();
    let max_norm = cols.iter().map(|c| norm2(c)).fold(0.0, f64::max);
    let tol = (n.max(p) as f64) * f64::EPSILON * max_norm;

    let mut rank = 0;
    for k in 0..n.min(p) {
        // Pivot: remaining column with the largest trailing norm.
        let mut piv = k;
        let mut piv_norm = -1.0;
        for (j, c) in cols.iter().enumerate().skip(k) {
            let s = norm2(&c[k..]);
            if s > piv_norm {
                piv = j;
                piv_norm = s;
            }
        }
        if piv_norm <= tol {
            break;
        }
        cols.swap(k, piv);

        let alpha = if cols[k][k] > 0.0 {
            -piv_norm
        } else {
            piv_norm
        };
        let mut v: Vec<f64> = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm_sq: f64 = v.iter().map(|t| t * t).sum();
        if vnorm_sq > 0.0 {
            let reflect = |target: &mut [f64]| {
                let s = 2.0 * dot(&v, target) / vnorm_sq;
                for (t, vi) in target.iter_mut().zip(&v) {
                    *t -= s * vi;
                }
            };
            for c in cols.iter_mut().skip(k) {
                reflect(&mut c[k..]);
            }
            reflect(&mut rhs[k..]);
        }
        rank = k + 1;
    }

    Ok(LeastSquaresFit {
        fitted_norm: norm2(&rhs[..rank]),
        residual_norm: norm2(&rhs[rank..]),
        rank,
    })
}
