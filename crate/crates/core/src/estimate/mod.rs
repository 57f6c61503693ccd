//! Regression and likelihood estimators.

pub mod cf;
pub mod design;
pub mod fit;
pub mod logistic;
pub mod ols;
pub mod qad;
pub mod sar_mle;

pub use design::Design;
pub use fit::{sum_peer_effects, FitResult, Term};
pub use logistic::{fit_logistic, fit_logistic_with, LogisticOptions};
pub use ols::fit_ols;
