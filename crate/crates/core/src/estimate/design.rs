//! Design matrices with named columns and a collinearity gate.

use crate::error::{Error, Result};
use crate::linalg::{jacobi_svd, norm2, Matrix, Qr};
use crate::scalar::Real;

/// Condition-number cutoff above which a design is declared collinear.
pub const CONDITION_LIMIT: f64 = 1e10;

#[derive(Debug, Clone, PartialEq)]
pub struct Design<T> {
    pub names: Vec<String>,
    pub x: Matrix<T>,
}

impl<T: Real> Design<T> {
    pub fn new(names: Vec<String>, x: Matrix<T>) -> Result<Self> {
        if names.len() != x.cols() {
            return Err(Error::Dimension { expected: x.cols(), got: names.len() });
        }
        Ok(Self { names, x })
    }

    /// Build from `(name, column)` pairs.
    pub fn from_columns<S: Into<String>>(columns: Vec<(S, Vec<T>)>) -> Result<Self> {
        let (names, cols): (Vec<String>, Vec<Vec<T>>) =
            columns.into_iter().map(|(n, c)| (n.into(), c)).unzip();
        Self::new(names, Matrix::from_columns(&cols)?)
    }

    /// Prepend a column of ones named `intercept`.
    pub fn with_intercept<S: Into<String>>(columns: Vec<(S, Vec<T>)>) -> Result<Self> {
        let n = columns.first().map_or(0, |c| c.1.len());
        let mut all: Vec<(String, Vec<T>)> = vec![("intercept".into(), vec![T::one(); n])];
        all.extend(columns.into_iter().map(|(s, c)| (s.into(), c)));
        Self::from_columns(all)
    }

    pub fn rows(&self) -> usize {
        self.x.rows()
    }

    pub fn cols(&self) -> usize {
        self.x.cols()
    }

    /// Linear predictor `Xb`.
    pub fn predict(&self, coef: &[T]) -> Vec<T> {
        self.x.mul_vec(coef)
    }
}

/// Effective cutoff for the scalar type: `1e10`, or less when the type
/// cannot resolve that much.
pub fn condition_limit<T: Real>() -> f64 {
    CONDITION_LIMIT.min(0.01 / T::epsilon().as_f64())
}

/// 2-norm condition number of the column-equilibrated design together with
/// the columns that load on its smallest singular direction.
pub fn condition<T: Real>(design: &Design<T>) -> Result<(f64, Vec<String>)> {
    let (n, p) = (design.rows(), design.cols());
    if n < p {
        return Err(Error::InvalidParameter(format!("{n} rows cannot identify {p} coefficients")));
    }
    let mut scaled = design.x.clone();
    for j in 0..p {
        let c = norm2(&design.x.column(j));
        if c == T::zero() {
            return Ok((f64::INFINITY, vec![design.names[j].clone()]));
        }
        for i in 0..n {
            scaled[(i, j)] /= c;
        }
    }
    let r = Qr::factor(scaled)?.r();
    let (sv, v) = jacobi_svd(&r);
    let (smax, smin) = (sv[0].as_f64(), sv[p - 1].as_f64());
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let null: Vec<f64> = (0..p).map(|j| v[(j, p - 1)].as_f64()).collect();
    let top = null.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let offending = (0..p)
        .filter(|&j| null[j].abs() >= 0.1 * top)
        .map(|j| design.names[j].clone())
        .collect();
    Ok((cond, offending))
}

pub fn check_collinearity<T: Real>(design: &Design<T>) -> Result<()> {
    let (cond, columns) = condition(design)?;
    if !(cond <= condition_limit::<T>()) {
        return Err(Error::Collinear { condition: cond, columns });
    }
    Ok(())
}
