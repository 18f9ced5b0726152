//! Small dense linear algebra: complex matrices, Jacobi eigensolvers and a
//! one-sided Jacobi SVD.
//!
//! Everything here is sized for oracle work (at most a few thousand rows) and
//! favours accuracy over speed.

use std::ops::{Index, IndexMut};

use crate::scalar::{c, cis, cone, czero, Real, C};

/// Dense complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![czero(); rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = cone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for col in 0..cols {
                data.push(f(r, col));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<C<T>>]) -> Self {
        Self::from_fn(rows, columns.len(), |r, col| columns[col][r])
    }

    pub fn diagonal(values: &[C<T>]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, col: usize) -> Vec<C<T>> {
        (0..self.rows).map(|r| self[(r, col)]).collect()
    }

    pub fn row(&self, r: usize) -> &[C<T>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, col| self[(col, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, col| self[(col, r)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).fold(czero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// Keeps the listed rows and columns (in the given order).
    pub fn restrict(&self, indices: &[usize]) -> Self {
        Self::from_fn(indices.len(), indices.len(), |r, col| self[(indices[r], indices[col])])
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).fold(czero(), |acc, i| acc + self[(i, i)])
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).fold(T::zero(), |m, (a, b)| m.max((a - b).norm()))
    }

    /// `max |M - M†|`.
    pub fn hermiticity_defect(&self) -> T {
        self.max_abs_diff(&self.adjoint())
    }

    /// `max |U†U - I|`.
    pub fn unitarity_defect(&self) -> T {
        self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.cols))
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (r, col): (usize, usize)) -> &C<T> {
        &self.data[r * self.cols + col]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, col): (usize, usize)) -> &mut C<T> {
        &mut self.data[r * self.cols + col]
    }
}

const MAX_SWEEPS: usize = 100;

/// Jacobi rotation parameters `(t, c, s)` annihilating the off-diagonal entry
/// of the real symmetric 2×2 block `[[app, apq], [apq, aqq]]`.
#[inline]
fn jacobi_rotation<T: Real>(app: T, aqq: T, apq: T) -> (T, T, T) {
    let two = T::lit(2.0);
    let theta = (aqq - app) / (two * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
    let cos = T::one() / (t * t + T::one()).sqrt();
    (t, cos, t * cos)
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
///
/// Returns eigenvalues in ascending order and the matching unit eigenvectors
/// as the columns of the second matrix.
pub fn hermitian_eigen<T: Real>(m: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    assert!(m.is_square(), "hermitian_eigen needs a square matrix");
    let n = m.rows;
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);
    let eps = T::epsilon();
    let scale = a.data.iter().fold(T::zero(), |s, x| s + x.norm_sqr()).sqrt();
    if scale == T::zero() {
        return (vec![T::zero(); n], v);
    }

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= eps * eps * scale || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= eps * eps * scale {
                    continue;
                }
                let phase = cis(-apq.arg());
                let (_, cs, sn) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, mag);
                // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
                let g_pp = c(cs, T::zero());
                let g_pq = c(sn, T::zero());
                let g_qp = phase * (-sn);
                let g_qq = phase * cs;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = czero();
                a[(q, p)] = czero();
                a[(p, p)].im = T::zero();
                a[(q, q)].im = T::zero();
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| v[(r, order[col])]);
    (values, vectors)
}

/// Applies a real function to the spectrum of a Hermitian matrix with a
/// complex-valued result: `V f(Λ) V†`.
pub fn hermitian_function<T: Real>(m: &CMatrix<T>, f: impl Fn(T) -> C<T>) -> CMatrix<T> {
    let (values, vectors) = hermitian_eigen(m);
    let n = m.rows;
    let fv: Vec<C<T>> = values.iter().map(|&x| f(x)).collect();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = czero();
            for k in 0..n {
                acc += vectors[(i, k)] * fv[k] * vectors[(j, k)].conj();
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Singular values (descending) by one-sided Hestenes–Jacobi orthogonalisation.
pub fn singular_values<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    // Orthogonalise the shorter side.
    let work = if m.cols > m.rows { m.adjoint() } else { m.clone() };
    let rows = work.rows;
    let ncols = work.cols;
    let mut cols: Vec<Vec<C<T>>> = (0..ncols).map(|j| work.column(j)).collect();
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..ncols {
            for j in (i + 1)..ncols {
                let (alpha, beta, gamma) = {
                    let (ci, cj) = (&cols[i], &cols[j]);
                    let mut alpha = T::zero();
                    let mut beta = T::zero();
                    let mut gamma: C<T> = czero();
                    for r in 0..rows {
                        alpha += ci[r].norm_sqr();
                        beta += cj[r].norm_sqr();
                        gamma += ci[r].conj() * cj[r];
                    }
                    (alpha, beta, gamma)
                };
                let mag = gamma.norm();
                if mag == T::zero() || mag <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = cis(-gamma.arg());
                let (_, cs, sn) = jacobi_rotation(alpha, beta, mag);
                let (left, right) = cols.split_at_mut(j);
                let (ci, cj) = (&mut left[i], &mut right[0]);
                for r in 0..rows {
                    let x = ci[r];
                    let y = cj[r] * phase;
                    ci[r] = x * cs - y * sn;
                    cj[r] = x * sn + y * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<T> = cols
        .iter()
        .map(|col| col.iter().fold(T::zero(), |s, x| s + x.norm_sqr()).sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Operator norm (largest singular value).
pub fn spectral_norm<T: Real>(m: &CMatrix<T>) -> T {
    singular_values(m).first().copied().unwrap_or_else(T::zero)
}

/// Dense real square matrix, row-major. Used for parameter-space metrics.
#[derive(Clone, Debug, PartialEq)]
pub struct RMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> RMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![T::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for col in 0..dim {
                data.push(f(r, col));
            }
        }
        Self { dim, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.dim)
            .map(|r| self.data[r * self.dim..(r + 1) * self.dim].iter().zip(v).map(|(a, b)| *a * *b).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data.iter().zip(&other.data).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    pub fn shifted(&self, shift: T) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out[(i, i)] += shift;
        }
        out
    }
}

impl<T> Index<(usize, usize)> for RMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (r, col): (usize, usize)) -> &T {
        &self.data[r * self.dim + col]
    }
}

impl<T> IndexMut<(usize, usize)> for RMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, col): (usize, usize)) -> &mut T {
        &mut self.data[r * self.dim + col]
    }
}

/// Eigendecomposition of a real symmetric matrix by cyclic Jacobi sweeps.
/// Eigenvalues ascending; eigenvectors are the columns of the returned matrix.
pub fn symmetric_eigen<T: Real>(m: &RMatrix<T>) -> (Vec<T>, RMatrix<T>) {
    let n = m.dim;
    let mut a = m.clone();
    let mut v = RMatrix::identity(n);
    let eps = T::epsilon();
    let scale = a.data.iter().fold(T::zero(), |s, x| s + *x * *x).sqrt();
    if scale == T::zero() {
        return (vec![T::zero(); n], v);
    }
    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= eps * eps * scale || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= eps * eps * scale {
                    continue;
                }
                let (_, cs, sn) = jacobi_rotation(a[(p, p)], a[(q, q)], apq);
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = cs * akp - sn * akq;
                    a[(k, q)] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = cs * apk - sn * aqk;
                    a[(q, k)] = sn * apk + cs * aqk;
                }
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = cs * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + cs * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = RMatrix::from_fn(n, |r, col| v[(r, order[col])]);
    (values, vectors)
}

/// Solves `A x = b` for symmetric `A` through its eigendecomposition.
///
/// Works for indefinite matrices; returns `None` when `A` is numerically
/// singular (smallest |eigenvalue| below `rcond · max |eigenvalue|`).
pub fn solve_symmetric<T: Real>(a: &RMatrix<T>, b: &[T], rcond: T) -> Option<Vec<T>> {
    let n = a.dim;
    if n == 0 {
        return Some(Vec::new());
    }
    if a.data.iter().any(|x| !x.is_finite()) || b.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let (values, vectors) = symmetric_eigen(a);
    let largest = values.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    if largest == T::zero() || values.iter().any(|x| x.abs() <= rcond * largest) {
        return None;
    }
    let mut x = vec![T::zero(); n];
    for k in 0..n {
        let proj: T = (0..n).map(|i| vectors[(i, k)] * b[i]).sum();
        let w = proj / values[k];
        for i in 0..n {
            x[i] += w * vectors[(i, k)];
        }
    }
    Some(x)
}
