use std::io::Write;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Term<T> {
    pub name: String,
    pub estimate: T,
    pub std_error: T,
}

/// Named coefficients of a fitted model.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult<T> {
    pub terms: Vec<Term<T>>,
    pub converged: bool,
    pub iterations: usize,
    /// Maximized log-likelihood, where the model defines one.
    pub log_likelihood: Option<T>,
    /// Ridge penalty applied by a separation fallback, if any.
    pub ridge_penalty: Option<T>,
    /// Non-fatal diagnostics, e.g. an estimate on the edge of its domain.
    pub warnings: Vec<String>,
}

impl<T: Real> FitResult<T> {
    pub fn term(&self, name: &str) -> Result<&Term<T>> {
        self.terms
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| Error::UnknownTerm(name.to_string()))
    }

    pub fn estimate(&self, name: &str) -> Result<T> {
        Ok(self.term(name)?.estimate)
    }

    pub fn estimates(&self) -> Vec<T> {
        self.terms.iter().map(|t| t.estimate).collect()
    }

    pub fn names(&self) -> Vec<&str> {
        self.terms.iter().map(|t| t.name.as_str()).collect()
    }

    /// `term,estimate,std_error` rows.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["term", "estimate", "std_error"])?;
        for t in &self.terms {
            wtr.write_record([t.name.clone(), t.estimate.to_string(), t.std_error.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Total peer effect: the sum of the named coefficients, e.g. the
/// contemporaneous and lagged alter terms of a transition model.
pub fn sum_peer_effects<T: Real, S: AsRef<str>>(fit: &FitResult<T>, terms: &[S]) -> Result<T> {
    terms
        .iter()
        .map(|name| fit.estimate(name.as_ref()))
        .try_fold(T::zero(), |acc, v| Ok(acc + v?))
}
