//! Small dense linear algebra over [`Real`].
//!
//! Just enough for the estimators and generators: LU with partial pivoting,
//! Householder QR for least squares, one-sided Jacobi SVD for conditioning
//! diagnostics, and Hessenberg reduction for repeated determinant evaluation.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension { expected: rows * cols, got: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    /// Build from a column list; every column must have the same length.
    pub fn from_columns(columns: &[Vec<T>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::Dimension { expected: rows, got: c.len() });
            }
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `Xᵀ diag(w) X`.
    pub fn weighted_gram(&self, w: &[T]) -> Self {
        let p = self.cols;
        let mut g = Self::zeros(p, p);
        for i in 0..self.rows {
            let r = self.row(i);
            for a in 0..p {
                let ra = r[a] * w[i];
                for b in a..p {
                    g[(a, b)] += ra * r[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                g[(a, b)] = g[(b, a)];
            }
        }
        g
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn max_abs_diff<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs()))
}

/// LU factorization with partial pivoting, `PA = LU`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    swaps: usize,
}

impl<T: Real> Lu<T> {
    pub fn factor(mut a: Matrix<T>) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::Dimension { expected: a.rows, got: a.cols });
        }
        let n = a.rows;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (piv, pmax) = (k..n)
                .map(|i| (i, a[(i, k)].abs()))
                .fold((k, T::zero()), |best, c| if c.1 > best.1 { c } else { best });
            if pmax == T::zero() || !pmax.is_finite() {
                return Err(Error::Numerical(format!("singular matrix at pivot {k}")));
            }
            if piv != k {
                for j in 0..n {
                    a.data.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
                swaps += 1;
            }
            let d = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / d;
                if f == T::zero() {
                    continue;
                }
                a[(i, k)] = f;
                for j in k + 1..n {
                    let u = a[(k, j)];
                    a[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu: a, perm, swaps })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.rows;
        assert_eq!(b.len(), n, "rhs dimension mismatch");
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: T = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: T = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        x
    }

    /// `(sign, log|det|)`.
    pub fn log_det(&self) -> (T, T) {
        let mut sign = if self.swaps % 2 == 0 { T::one() } else { -T::one() };
        let mut acc = T::zero();
        for i in 0..self.lu.rows {
            let d = self.lu[(i, i)];
            if d < T::zero() {
                sign = -sign;
            }
            acc += d.abs().ln();
        }
        (sign, acc)
    }

    pub fn inverse(&self) -> Matrix<T> {
        let n = self.lu.rows;
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            for (i, v) in self.solve(&e).into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        inv
    }
}

/// Householder QR of a tall matrix, reflectors kept in compact form.
#[derive(Debug, Clone)]
pub struct Qr<T> {
    qr: Matrix<T>,
    tau: Vec<T>,
    diag: Vec<T>,
}

impl<T: Real> Qr<T> {
    pub fn factor(mut a: Matrix<T>) -> Result<Self> {
        let (m, n) = (a.rows, a.cols);
        if m < n {
            return Err(Error::Dimension { expected: n, got: m });
        }
        let mut tau = vec![T::zero(); n];
        let mut diag = vec![T::zero(); n];
        for k in 0..n {
            let norm = (k..m).map(|i| a[(i, k)] * a[(i, k)]).sum::<T>().sqrt();
            if norm == T::zero() {
                diag[k] = T::zero();
                continue;
            }
            let alpha = if a[(k, k)] > T::zero() { -norm } else { norm };
            // v = x - alpha e1, stored in column k below the diagonal
            a[(k, k)] -= alpha;
            let vnorm2: T = (k..m).map(|i| a[(i, k)] * a[(i, k)]).sum();
            tau[k] = if vnorm2 > T::zero() { T::lit(2.0) / vnorm2 } else { T::zero() };
            for j in k + 1..n {
                let s: T = (k..m).map(|i| a[(i, k)] * a[(i, j)]).sum();
                let f = s * tau[k];
                for i in k..m {
                    let v = a[(i, k)];
                    a[(i, j)] -= f * v;
                }
            }
            diag[k] = alpha;
        }
        Ok(Self { qr: a, tau, diag })
    }

    /// Apply `Qᵀ` to a vector of length `m`.
    pub fn qt_mul(&self, b: &[T]) -> Vec<T> {
        let (m, n) = (self.qr.rows, self.qr.cols);
        let mut y = b.to_vec();
        for k in 0..n {
            if self.tau[k] == T::zero() {
                continue;
            }
            let s: T = (k..m).map(|i| self.qr[(i, k)] * y[i]).sum();
            let f = s * self.tau[k];
            for i in k..m {
                y[i] -= f * self.qr[(i, k)];
            }
        }
        y
    }

    /// Upper-triangular factor `R` (n × n).
    pub fn r(&self) -> Matrix<T> {
        let n = self.qr.cols;
        let mut r = Matrix::zeros(n, n);
        for i in 0..n {
            r[(i, i)] = self.diag[i];
            for j in i + 1..n {
                r[(i, j)] = self.qr[(i, j)];
            }
        }
        r
    }

    /// Least-squares solution of `A x ≈ b`.
    pub fn solve_least_squares(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.qr.cols;
        let y = self.qt_mul(b);
        let r = self.r();
        solve_upper(&r, &y[..n])
    }
}

pub fn solve_upper<T: Real>(r: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = r.cols();
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let d = r[(i, i)];
        if d == T::zero() {
            return Err(Error::Numerical(format!("zero diagonal in triangular solve at {i}")));
        }
        let s: T = (i + 1..n).map(|j| r[(i, j)] * x[j]).sum();
        x[i] = (b[i] - s) / d;
    }
    Ok(x)
}

/// `(RᵀR)⁻¹ = R⁻¹R⁻ᵀ` for an upper-triangular `R`.
pub fn inverse_gram_from_r<T: Real>(r: &Matrix<T>) -> Result<Matrix<T>> {
    let n = r.cols();
    let mut rinv = Matrix::zeros(n, n);
    let mut e = vec![T::zero(); n];
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = T::zero());
        e[j] = T::one();
        for (i, v) in solve_upper(r, &e)?.into_iter().enumerate() {
            rinv[(i, j)] = v;
        }
    }
    Ok(rinv.matmul(&rinv.transpose()))
}

/// Singular values (descending) and right singular vectors (as columns of
/// `V`) of a small matrix, by one-sided Jacobi rotations.
pub fn jacobi_svd<T: Real>(a: &Matrix<T>) -> (Vec<T>, Matrix<T>) {
    let n = a.cols();
    let mut u = a.clone();
    let mut v = Matrix::identity(n);
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..u.rows() {
                    alpha += u[(i, p)] * u[(i, p)];
                    beta += u[(i, q)] * u[(i, q)];
                    gamma += u[(i, p)] * u[(i, q)];
                }
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == T::zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..u.rows() {
                    let (x, y) = (u[(i, p)], u[(i, q)]);
                    u[(i, p)] = c * x - s * y;
                    u[(i, q)] = s * x + c * y;
                }
                for i in 0..n {
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * x - s * y;
                    v[(i, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<(T, usize)> = (0..n).map(|j| (norm2(&u.column(j)), j)).collect();
    sv.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut vs = Matrix::zeros(n, n);
    for (k, &(_, j)) in sv.iter().enumerate() {
        for i in 0..n {
            vs[(i, k)] = v[(i, j)];
        }
    }
    (sv.into_iter().map(|(s, _)| s).collect(), vs)
}

/// Upper Hessenberg matrix similar to a square input.
///
/// `det(I − ρA) = det(I − ρH)` for every ρ, and the latter costs O(n²).
#[derive(Debug, Clone)]
pub struct Hessenberg<T> {
    h: Matrix<T>,
}

impl<T: Real> Hessenberg<T> {
    pub fn reduce(mut a: Matrix<T>) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::Dimension { expected: a.rows, got: a.cols });
        }
        let n = a.rows;
        let mut v = vec![T::zero(); n];
        for k in 0..n.saturating_sub(2) {
            let norm = (k + 1..n).map(|i| a[(i, k)] * a[(i, k)]).sum::<T>().sqrt();
            if norm == T::zero() {
                continue;
            }
            let alpha = if a[(k + 1, k)] > T::zero() { -norm } else { norm };
            for i in 0..n {
                v[i] = if i > k { a[(i, k)] } else { T::zero() };
            }
            v[k + 1] -= alpha;
            let vn2: T = v[k + 1..].iter().map(|&x| x * x).sum();
            if vn2 == T::zero() {
                continue;
            }
            let tau = T::lit(2.0) / vn2;
            // A ← (I − τvvᵀ) A
            for j in 0..n {
                let s: T = (k + 1..n).map(|i| v[i] * a[(i, j)]).sum();
                if s == T::zero() {
                    continue;
                }
                let f = s * tau;
                for i in k + 1..n {
                    a[(i, j)] -= f * v[i];
                }
            }
            // A ← A (I − τvvᵀ)
            for i in 0..n {
                let s: T = (k + 1..n).map(|j| a[(i, j)] * v[j]).sum();
                if s == T::zero() {
                    continue;
                }
                let f = s * tau;
                for j in k + 1..n {
                    a[(i, j)] -= f * v[j];
                }
            }
            for i in k + 2..n {
                a[(i, k)] = T::zero();
            }
        }
        Ok(Self { h: a })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.h
    }

    /// `(sign, log|det(I − ρH)|)` by Gaussian elimination with adjacent-row
    /// pivoting, which preserves the Hessenberg structure.
    pub fn log_det_shifted(&self, rho: T) -> (T, T) {
        let n = self.h.rows;
        // working copy of I − ρH, only the band that elimination touches
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i.saturating_sub(1)..n {
                let id = if i == j { T::one() } else { T::zero() };
                m[(i, j)] = id - rho * self.h[(i, j)];
            }
        }
        let mut sign = T::one();
        let mut acc = T::zero();
        for k in 0..n {
            if k + 1 < n && m[(k + 1, k)].abs() > m[(k, k)].abs() {
                for j in k..n {
                    let t = m[(k, j)];
                    m[(k, j)] = m[(k + 1, j)];
                    m[(k + 1, j)] = t;
                }
                sign = -sign;
            }
            let d = m[(k, k)];
            if d == T::zero() {
                return (T::zero(), T::neg_infinity());
            }
            if d < T::zero() {
                sign = -sign;
            }
            acc += d.abs().ln();
            if k + 1 < n {
                let f = m[(k + 1, k)] / d;
                if f != T::zero() {
                    for j in k + 1..n {
                        let u = m[(k, j)];
                        m[(k + 1, j)] -= f * u;
                    }
                }
            }
        }
        (sign, acc)
    }
}
