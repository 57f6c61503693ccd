//! Pooled transition logit for panel data:
//!
//! `logit P(Y_{i,t+1}=1) = μ + α Y_{i,t} + Σ_k θ_k A_k(i, t) + δ·X_{i,t+1}`
//!
//! where the alter terms `A_k` are ego-level exposure sums over named
//! alters: contemporaneous `Σ_j W_{ij,t+1} Y_{j,t+1}`, lag 1
//! `Σ_j W_{ij,t} Y_{j,t}`, lag 2 `Σ_j W_{ij,t−1} Y_{j,t−1}`, or the sum and
//! difference of the contemporaneous and lag-1 sums. One row per
//! `(ego, transition)`.

use crate::error::{Error, Result};
use crate::estimate::design::Design;
use crate::estimate::fit::FitResult;
use crate::estimate::logistic::fit_logistic;
use crate::net::Direction;
use crate::outcome::binary_to_real;
use crate::outcome::panel::PanelDataset;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlterTerm {
    Contemporaneous,
    Lag1,
    Lag2,
    Sum,
    Difference,
}

impl AlterTerm {
    pub fn name(self) -> &'static str {
        match self {
            AlterTerm::Contemporaneous => "alter_contemporaneous",
            AlterTerm::Lag1 => "alter_lag1",
            AlterTerm::Lag2 => "alter_lag2",
            AlterTerm::Sum => "alter_sum",
            AlterTerm::Difference => "alter_difference",
        }
    }
}

impl std::str::FromStr for AlterTerm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "contemporaneous" | "contemp" => Ok(AlterTerm::Contemporaneous),
            "lag1" => Ok(AlterTerm::Lag1),
            "lag2" => Ok(AlterTerm::Lag2),
            "sum" => Ok(AlterTerm::Sum),
            "difference" | "diff" => Ok(AlterTerm::Difference),
            other => Err(Error::Parse(format!("unknown alter term `{other}`"))),
        }
    }
}

/// Which prior ego state to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stratum {
    #[default]
    All,
    /// Egos without the trait at `t` (gaining it is adoption).
    Adoption,
    /// Egos with the trait at `t` (losing it is rejection).
    Rejection,
}

impl std::str::FromStr for Stratum {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" | "all" => Ok(Stratum::All),
            "adoption" | "adopters" => Ok(Stratum::Adoption),
            "rejection" | "non-adopters" => Ok(Stratum::Rejection),
            other => Err(Error::Parse(format!("unknown stratum `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CfModelSpec {
    pub alter_terms: Vec<AlterTerm>,
    /// Include `Y_{i,t}`. Ignored under stratification, where it is constant.
    pub ego_lag: bool,
    /// Zero-based covariate columns to include.
    pub covariates: Vec<usize>,
    pub stratum: Stratum,
}

impl CfModelSpec {
    pub fn new(alter_terms: &[AlterTerm]) -> Self {
        Self { alter_terms: alter_terms.to_vec(), ego_lag: true, covariates: vec![], stratum: Stratum::All }
    }

    /// Ego lag, contemporaneous alter, lag-1 alter.
    pub fn standard() -> Self {
        Self::new(&[AlterTerm::Contemporaneous, AlterTerm::Lag1])
    }

    /// Ego lag, lag-1 alter, lag-2 alter.
    pub fn two_lags() -> Self {
        Self::new(&[AlterTerm::Lag1, AlterTerm::Lag2])
    }

    /// Ego lag, alter sum and alter difference.
    pub fn sum_difference() -> Self {
        Self::new(&[AlterTerm::Sum, AlterTerm::Difference])
    }

    pub fn validate(&self) -> Result<()> {
        if self.alter_terms.is_empty() {
            return Err(Error::InvalidParameter("at least one alter term is required".into()));
        }
        let has = |t| self.alter_terms.contains(&t);
        let reparam = has(AlterTerm::Sum) || has(AlterTerm::Difference);
        if reparam && (has(AlterTerm::Contemporaneous) || has(AlterTerm::Lag1)) {
            return Err(Error::InvalidParameter(
                "sum/difference terms cannot be combined with raw contemporaneous or lag-1 terms".into(),
            ));
        }
        let mut sorted = self.alter_terms.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.alter_terms.len() {
            return Err(Error::InvalidParameter("alter terms repeat".into()));
        }
        Ok(())
    }

    fn needs_lag2(&self) -> bool {
        self.alter_terms.contains(&AlterTerm::Lag2)
    }
}

/// Pooled design and response for a transition model.
pub fn cf_design<T: Real>(panel: &PanelDataset<T>, spec: &CfModelSpec) -> Result<(Design<T>, Vec<u8>)> {
    spec.validate()?;
    let waves = panel.waves();
    let first_t = if spec.needs_lag2() { 1 } else { 0 };
    if waves.len() < first_t + 2 {
        return Err(Error::InvalidParameter(format!(
            "{} waves are too few: the model needs at least {}",
            waves.len(),
            first_t + 2
        )));
    }
    if let Some(&c) = spec.covariates.iter().find(|&&c| c >= panel.covariate_count()) {
        return Err(Error::InvalidParameter(format!(
            "covariate x{} requested but the panel has {}",
            c + 1,
            panel.covariate_count()
        )));
    }

    let exposures: Vec<Vec<T>> = waves
        .iter()
        .map(|w| w.network.exposure(&binary_to_real(&w.outcomes), Direction::Forward))
        .collect::<Result<_>>()?;

    let ego_lag = spec.ego_lag && spec.stratum == Stratum::All;
    let mut names = vec!["intercept".to_string()];
    if ego_lag {
        names.push("ego_lag".into());
    }
    names.extend(spec.alter_terms.iter().map(|t| t.name().to_string()));
    names.extend(spec.covariates.iter().map(|c| format!("x{}", c + 1)));

    let mut cols: Vec<Vec<T>> = vec![Vec::new(); names.len()];
    let mut y = Vec::new();
    for t in first_t..waves.len() - 1 {
        let (prev, next) = (&waves[t], &waves[t + 1]);
        for i in 0..panel.node_count() {
            let prior = prev.outcomes[i];
            let keep = match spec.stratum {
                Stratum::All => true,
                Stratum::Adoption => prior == 0,
                Stratum::Rejection => prior == 1,
            };
            if !keep {
                continue;
            }
            let contemp = exposures[t + 1][i];
            let lag1 = exposures[t][i];
            let mut k = 0;
            let mut push = |v: T| {
                cols[k].push(v);
                k += 1;
            };
            push(T::one());
            if ego_lag {
                push(T::from_count(prior as usize));
            }
            for term in &spec.alter_terms {
                push(match term {
                    AlterTerm::Contemporaneous => contemp,
                    AlterTerm::Lag1 => lag1,
                    AlterTerm::Lag2 => exposures[t - 1][i],
                    AlterTerm::Sum => contemp + lag1,
                    AlterTerm::Difference => contemp - lag1,
                });
            }
            for &c in &spec.covariates {
                push(next.covariates[(i, c)]);
            }
            y.push(next.outcomes[i]);
        }
    }
    if y.is_empty() {
        return Err(Error::Stratum(format!("{:?} stratum is empty", spec.stratum)));
    }
    let ones = y.iter().filter(|&&v| v == 1).count();
    if ones == 0 || ones == y.len() {
        return Err(Error::Stratum(format!(
            "{:?} stratum has {} rows that all share outcome {}",
            spec.stratum,
            y.len(),
            u8::from(ones > 0)
        )));
    }
    let design = Design::from_columns(names.into_iter().zip(cols).collect())?;
    Ok((design, y))
}

pub fn fit_cf_model<T: Real>(panel: &PanelDataset<T>, spec: &CfModelSpec) -> Result<FitResult<T>> {
    let (design, y) = cf_design(panel, spec)?;
    fit_logistic(&design, &y)
}
