use crate::error::{Error, Result};
use crate::estimate::design::{check_collinearity, Design};
use crate::estimate::fit::{FitResult, Term};
use crate::linalg::{inverse_gram_from_r, Qr};
use crate::scalar::Real;

/// Ordinary least squares with classical standard errors.
pub fn fit_ols<T: Real>(design: &Design<T>, y: &[T]) -> Result<FitResult<T>> {
    let (n, p) = (design.rows(), design.cols());
    if y.len() != n {
        return Err(Error::Dimension { expected: n, got: y.len() });
    }
    if n <= p {
        return Err(Error::InvalidParameter(format!(
            "{n} observations leave no residual degrees of freedom for {p} coefficients"
        )));
    }
    check_collinearity(design)?;
    let qr = Qr::factor(design.x.clone())?;
    let coef = qr.solve_least_squares(y)?;
    let fitted = design.predict(&coef);
    let rss: T = y.iter().zip(&fitted).map(|(&a, &b)| (a - b) * (a - b)).sum();
    let sigma2 = rss / T::from_count(n - p);
    let cov = inverse_gram_from_r(&qr.r())?;
    let nn = T::from_count(n);
    let two_pi = T::lit(2.0 * std::f64::consts::PI);
    let log_likelihood = -nn / T::lit(2.0) * ((two_pi * rss / nn).ln() + T::one());
    let terms = design
        .names
        .iter()
        .zip(&coef)
        .enumerate()
        .map(|(j, (name, &estimate))| Term {
            name: name.clone(),
            estimate,
            std_error: (sigma2 * cov[(j, j)]).max(T::zero()).sqrt(),
        })
        .collect();
    Ok(FitResult {
        terms,
        converged: true,
        iterations: 1,
        log_likelihood: Some(log_likelihood),
        ridge_penalty: None,
        warnings: vec![],
    })
}
