//! Small dense linear algebra: symmetric eigensolver and a rank-revealing least-squares QR.

use std::ops::{Index, IndexMut};

use rayon::prelude::*;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::scalar::Real;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| crate::scalar::dot(self.row(i), v))
            .collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.as_f64()).collect())
            .collect()
    }
}

/// Serialized as a list of rows.
impl<T: Real + Serialize> Serialize for Mat<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            seq.serialize_element(self.row(i))?;
        }
        seq.end()
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen<T> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Column `j` is the unit eigenvector for `values[j]`.
    pub vectors: Mat<T>,
}

/// Cyclic Jacobi rotations; intended for the small (a few dozen rows) matrices used here.
pub fn sym_eigen<T: Real>(a: &Mat<T>) -> SymEigen<T> {
    assert_eq!(a.rows, a.cols, "square matrix required");
    let n = a.rows;
    let mut m = a.clone();
    // symmetrize against round-off in callers that assemble both triangles
    for i in 0..n {
        for j in 0..i {
            let s = (m[(i, j)] + m[(j, i)]) * T::lit(0.5);
            m[(i, j)] = s;
            m[(j, i)] = s;
        }
    }
    let mut v = Mat::identity(n);
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let mut off = T::zero();
        let mut diag = T::zero();
        for i in 0..n {
            diag = diag + m[(i, i)] * m[(i, i)];
            for j in 0..i {
                off = off + m[(i, j)] * m[(i, j)];
            }
        }
        if off <= eps * eps * diag || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
    SymEigen {
        values: order.iter().map(|&i| m[(i, i)]).collect(),
        vectors: Mat::from_fn(n, n, |r, c| v[(r, order[c])]),
    }
}

/// Householder QR with column pivoting of an `m x n` matrix (`m >= n`), truncated at the
/// numerical rank. Used to solve overdetermined least-squares problems with many right-hand sides.
#[derive(Debug, Clone)]
pub struct PivotedQr<T> {
    m: usize,
    n: usize,
    rank: usize,
    /// Householder vectors, `reflectors[k]` acts on rows `k..m`.
    reflectors: Vec<Vec<T>>,
    betas: Vec<T>,
    /// Upper-triangular factor, column-major, `rank` rows kept per column.
    r: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Real> PivotedQr<T> {
    /// Factorizes the column-major matrix `cols` (length `m * n`). Pivots whose magnitude falls
    /// below `rel_tol` times the leading pivot end the factorization.
    pub fn new(mut cols: Vec<T>, m: usize, n: usize, rel_tol: T) -> Self {
        assert_eq!(cols.len(), m * n);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors = Vec::new();
        let mut betas = Vec::new();
        let kmax = m.min(n);
        let mut lead = T::zero();
        let mut rank = 0;
        for k in 0..kmax {
            // pivot on the largest remaining column norm
            let (best, best_norm) = (k..n)
                .map(|j| {
                    let c = &cols[j * m + k..(j + 1) * m];
                    (j, crate::scalar::dot(c, c))
                })
                .fold((k, -T::one()), |acc, x| if x.1 > acc.1 { x } else { acc });
            let best_norm = best_norm.sqrt();
            if k == 0 {
                lead = best_norm;
            }
            if best_norm <= rel_tol * lead || best_norm == T::zero() {
                break;
            }
            if best != k {
                for i in 0..m {
                    cols.swap(k * m + i, best * m + i);
                }
                perm.swap(k, best);
            }
            let x = &cols[k * m + k..(k + 1) * m];
            let alpha = if x[0] >= T::zero() { -best_norm } else { best_norm };
            let mut v = x.to_vec();
            v[0] = v[0] - alpha;
            let vtv = crate::scalar::dot(&v, &v);
            let beta = if vtv == T::zero() { T::zero() } else { T::lit(2.0) / vtv };
            cols[k * m + k] = alpha;
            for i in (k + 1)..m {
                cols[k * m + i] = T::zero();
            }
            let apply = |col: &mut [T]| {
                let tail = &mut col[k..];
                let s = beta * crate::scalar::dot(&v, tail);
                for (t, &vi) in tail.iter_mut().zip(&v) {
                    *t = *t - s * vi;
                }
            };
            let rest = &mut cols[(k + 1) * m..];
            if rest.len() > 1 << 16 {
                rest.par_chunks_mut(m).for_each(apply);
            } else {
                rest.chunks_mut(m).for_each(apply);
            }
            reflectors.push(v);
            betas.push(beta);
            rank = k + 1;
        }
        let mut r = vec![T::zero(); rank * n];
        for j in 0..n {
            for i in 0..rank.min(j + 1) {
                r[j * rank + i] = cols[j * m + i];
            }
        }
        PivotedQr {
            m,
            n,
            rank,
            reflectors,
            betas,
            r,
            perm,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    /// Column permutation: column `k` of the factorization is original column `perm()[k]`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Entry `(i, k)` of the leading `rank x rank` triangle of `R`, in pivoted column order.
    pub fn r_entry(&self, i: usize, k: usize) -> T {
        self.r[k * self.rank + i]
    }

    /// Overwrites `b` (length `m`) with `Q^T b`.
    pub fn apply_qt(&self, b: &mut [T]) {
        assert_eq!(b.len(), self.m);
        for (k, (v, &beta)) in self.reflectors.iter().zip(&self.betas).enumerate() {
            let tail = &mut b[k..];
            let s = beta * crate::scalar::dot(v, tail);
            for (t, &vi) in tail.iter_mut().zip(v) {
                *t = *t - s * vi;
            }
        }
    }

    /// Back-substitutes the leading `rank` entries of `Q^T b`; returns coefficients in the
    /// original column order with rank-deficient directions set to zero.
    pub fn solve_transformed(&self, qtb: &[T]) -> Vec<T> {
        let r = self.rank;
        let mut z = vec![T::zero(); r];
        for i in (0..r).rev() {
            let mut s = qtb[i];
            for j in (i + 1)..r {
                s = s - self.r[j * r + i] * z[j];
            }
            z[i] = s / self.r[i * r + i];
        }
        let mut x = vec![T::zero(); self.n];
        for (k, &zk) in z.iter().enumerate() {
            x[self.perm[k]] = zk;
        }
        x
    }

    /// Minimum-residual solution of `A x ~ b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut qtb = b.to_vec();
        self.apply_qt(&mut qtb);
        self.solve_transformed(&qtb)
    }

    /// Product of the leading `rank x rank` block of `R` with the pivoted coefficients, i.e.
    /// `R[..rank, ..] * x` for `x` in original column order.
    pub fn r_times(&self, x: &[T]) -> Vec<T> {
        let r = self.rank;
        let mut out = vec![T::zero(); r];
        for (k, &p) in self.perm.iter().enumerate() {
            let xk = x[p];
            if xk == T::zero() {
                continue;
            }
            for i in 0..r.min(k + 1) {
                out[i] = out[i] + self.r[k * r + i] * xk;
            }
        }
        out
    }
}
