//! Logistic regression by iteratively reweighted least squares.

use crate::error::{Error, Result};
use crate::estimate::design::{check_collinearity, Design};
use crate::estimate::fit::{FitResult, Term};
use crate::linalg::{inverse_gram_from_r, norm2, Matrix, Qr};
use crate::scalar::{logistic, softplus, Real};

/// Linear predictor magnitude treated as a fitted probability of exactly 0
/// or 1; reaching it signals separation.
const SEPARATION_ETA: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticOptions<T> {
    /// Stop when `‖Xᵀ(y − p)‖₂` falls below this.
    pub score_tolerance: T,
    pub max_iterations: usize,
    /// Opt-in ridge penalty used only if the unpenalized fit separates. The
    /// intercept (a column named `intercept`) is not penalized.
    pub ridge_fallback: Option<T>,
}

impl<T: Real> Default for LogisticOptions<T> {
    fn default() -> Self {
        Self { score_tolerance: T::lit(1e-8), max_iterations: 100, ridge_fallback: None }
    }
}

pub fn fit_logistic<T: Real>(design: &Design<T>, y: &[u8]) -> Result<FitResult<T>> {
    fit_logistic_with(design, y, &LogisticOptions::default())
}

pub fn fit_logistic_with<T: Real>(
    design: &Design<T>,
    y: &[u8],
    options: &LogisticOptions<T>,
) -> Result<FitResult<T>> {
    let n = design.rows();
    if y.len() != n {
        return Err(Error::Dimension { expected: n, got: y.len() });
    }
    if y.iter().any(|&v| v > 1) {
        return Err(Error::InvalidParameter("logistic outcome must be 0/1".into()));
    }
    let ones = y.iter().filter(|&&v| v == 1).count();
    if ones == 0 || ones == n {
        return Err(Error::Degenerate(format!(
            "all {n} outcomes equal {}; the likelihood has no maximum",
            u8::from(ones == n)
        )));
    }
    check_collinearity(design)?;
    match irls(design, y, options, T::zero()) {
        Err(Error::Separation(msg)) => match options.ridge_fallback {
            Some(lambda) if lambda > T::zero() => {
                let mut fit = irls(design, y, options, lambda)?;
                fit.warnings.push(format!("separation ({msg}); ridge penalty {lambda} applied"));
                fit.ridge_penalty = Some(lambda);
                Ok(fit)
            }
            _ => Err(Error::Separation(msg)),
        },
        other => other,
    }
}

fn log_likelihood<T: Real>(eta: &[T], y: &[u8], penalty: T) -> T {
    eta.iter()
        .zip(y)
        .map(|(&e, &v)| if v == 1 { -softplus(-e) } else { -softplus(e) })
        .sum::<T>()
        - penalty
}

fn irls<T: Real>(
    design: &Design<T>,
    y: &[u8],
    options: &LogisticOptions<T>,
    lambda: T,
) -> Result<FitResult<T>> {
    let (n, p) = (design.rows(), design.cols());
    let x = &design.x;
    let penalized: Vec<T> = design
        .names
        .iter()
        .map(|nm| if nm == "intercept" { T::zero() } else { lambda })
        .collect();
    let penalty = |b: &[T]| -> T {
        b.iter().zip(&penalized).map(|(&v, &l)| l * v * v).sum::<T>() / T::lit(2.0)
    };
    let tol = options
        .score_tolerance
        .max(T::lit(100.0) * T::epsilon() * T::from_count(n));
    let yr: Vec<T> = y.iter().map(|&v| T::from_count(v as usize)).collect();

    let mut beta = vec![T::zero(); p];
    let mut eta = vec![T::zero(); n];
    let mut ll = log_likelihood(&eta, y, T::zero());
    let mut converged = false;
    let mut iterations = 0;
    let mut score_norm = T::infinity();
    let floor = T::epsilon() * T::epsilon();

    for iter in 0..=options.max_iterations {
        let prob: Vec<T> = eta.iter().map(|&e| logistic(e)).collect();
        let resid: Vec<T> = yr.iter().zip(&prob).map(|(&a, &b)| a - b).collect();
        let mut score = x.transpose().mul_vec(&resid);
        for j in 0..p {
            score[j] -= penalized[j] * beta[j];
        }
        score_norm = norm2(&score);
        iterations = iter;
        if score_norm < tol {
            converged = true;
            break;
        }
        if iter == options.max_iterations {
            break;
        }
        // Newton step (XᵀWX + Λ)δ = score via QR of the stacked system
        // [√W X; √Λ] δ ≈ [(y − p)/√W; −√Λ β].
        let w: Vec<T> = prob.iter().map(|&q| (q * (T::one() - q)).max(floor)).collect();
        let extra: Vec<usize> = (0..p).filter(|&j| penalized[j] > T::zero()).collect();
        let mut a = Matrix::zeros(n + extra.len(), p);
        let mut rhs = vec![T::zero(); n + extra.len()];
        for i in 0..n {
            let sw = w[i].sqrt();
            for j in 0..p {
                a[(i, j)] = sw * x[(i, j)];
            }
            rhs[i] = resid[i] / sw;
        }
        for (k, &j) in extra.iter().enumerate() {
            let sl = penalized[j].sqrt();
            a[(n + k, j)] = sl;
            rhs[n + k] = -sl * beta[j];
        }
        let step = Qr::factor(a)?.solve_least_squares(&rhs)?;
        let mut scale = T::one();
        let mut accepted = false;
        for _ in 0..40 {
            let cand: Vec<T> = beta.iter().zip(&step).map(|(&b, &s)| b + scale * s).collect();
            let cand_eta = design.predict(&cand);
            let cand_ll = log_likelihood(&cand_eta, y, penalty(&cand));
            // near the optimum the likelihood is flat below rounding noise;
            // a step that shrinks the score is then still progress
            let improves = cand_ll.is_finite()
                && (cand_ll >= ll - T::epsilon() * ll.abs() * T::lit(10.0)
                    || score_norm_at(x, &yr, &cand_eta, &cand, &penalized) < score_norm);
            if improves {
                beta = cand;
                eta = cand_eta;
                ll = cand_ll;
                accepted = true;
                break;
            }
            scale /= T::lit(2.0);
        }
        if !accepted {
            break;
        }
        if lambda == T::zero() && eta.iter().any(|e| e.abs() > T::lit(SEPARATION_ETA)) {
            return Err(Error::Separation(format!(
                "linear predictor exceeded ±{SEPARATION_ETA} after {} iterations",
                iter + 1
            )));
        }
    }

    let prob: Vec<T> = eta.iter().map(|&e| logistic(e)).collect();
    let w: Vec<T> = prob.iter().map(|&q| (q * (T::one() - q)).max(floor)).collect();
    let mut info = x.weighted_gram(&w);
    for j in 0..p {
        info[(j, j)] += penalized[j];
    }
    let cov = match crate::linalg::Lu::factor(info.clone()) {
        Ok(lu) => lu.inverse(),
        Err(_) => inverse_gram_from_r(&Qr::factor(info)?.r())?,
    };
    let terms = design
        .names
        .iter()
        .zip(&beta)
        .enumerate()
        .map(|(j, (name, &estimate))| Term {
            name: name.clone(),
            estimate,
            std_error: cov[(j, j)].max(T::zero()).sqrt(),
        })
        .collect();
    let mut warnings = Vec::new();
    if !converged {
        warnings.push(format!(
            "IRLS stopped after {iterations} iterations with score norm {score_norm}"
        ));
    }
    Ok(FitResult {
        terms,
        converged,
        iterations,
        log_likelihood: Some(log_likelihood(&eta, y, T::zero())),
        ridge_penalty: None,
        warnings,
    })
}

fn score_norm_at<T: Real>(x: &Matrix<T>, yr: &[T], eta: &[T], beta: &[T], penalized: &[T]) -> T {
    let resid: Vec<T> = yr.iter().zip(eta).map(|(&a, &e)| a - logistic(e)).collect();
    let mut score = x.transpose().mul_vec(&resid);
    for j in 0..beta.len() {
        score[j] -= penalized[j] * beta[j];
    }
    norm2(&score)
}

/// Fitted probabilities of a logistic fit on a design.
pub fn fitted_probabilities<T: Real>(design: &Design<T>, fit: &FitResult<T>) -> Vec<T> {
    design.predict(&fit.estimates()).into_iter().map(logistic).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    fn tiny() -> (Design<f64>, Vec<u8>) {
        let x = vec![-1.5, -0.7, -0.2, 0.1, 0.4, 0.9, 1.3, 2.0];
        let y = vec![0, 0, 1, 0, 1, 0, 1, 1];
        (Design::with_intercept(vec![("x", x)]).unwrap(), y)
    }

    #[test]
    fn all_equal_outcomes_are_degenerate() {
        let (d, _) = tiny();
        assert!(matches!(fit_logistic(&d, &[1; 8]), Err(Error::Degenerate(_))));
        assert!(matches!(fit_logistic(&d, &[0; 8]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn separated_data_is_reported() {
        let (d, _) = tiny();
        let y = vec![0, 0, 0, 0, 1, 1, 1, 1];
        assert!(matches!(fit_logistic(&d, &y), Err(Error::Separation(_))));
        let opts = LogisticOptions { ridge_fallback: Some(0.5), ..Default::default() };
        let f = fit_logistic_with(&d, &y, &opts).unwrap();
        assert_eq!(f.ridge_penalty, Some(0.5));
        assert!(f.converged);
        assert!(f.estimate("x").unwrap() > 0.0);
    }

    #[test]
    fn score_vanishes_at_convergence() {
        let (d, y) = tiny();
        let f = fit_logistic(&d, &y).unwrap();
        assert!(f.converged);
        let p = fitted_probabilities(&d, &f);
        let r: Vec<f64> = y.iter().zip(&p).map(|(&a, &b)| a as f64 - b).collect();
        assert!(norm2(&d.x.transpose().mul_vec(&r)) < 1e-8);
    }

    #[test]
    fn coin_flips_give_null_slopes() {
        let mut rng = seeded(31);
        let n = 5000;
        let x1: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
        let x2: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let y: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<bool>())).collect();
        let d = Design::with_intercept(vec![("x1", x1), ("x2", x2)]).unwrap();
        let f = fit_logistic(&d, &y).unwrap();
        for t in &f.terms[1..] {
            assert!(t.estimate.abs() < 3.0 * t.std_error, "{t:?}");
        }
    }

    #[test]
    fn single_precision_fit_converges() {
        let x: Vec<f32> = vec![-1.5, -0.7, -0.2, 0.1, 0.4, 0.9, 1.3, 2.0];
        let d = Design::with_intercept(vec![("x", x)]).unwrap();
        let f = fit_logistic(&d, &[0, 0, 1, 0, 1, 0, 1, 1]).unwrap();
        assert!(f.converged);
    }
}
