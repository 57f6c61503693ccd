//! Quick-and-dirty (QAD) directional regression: regress node outcomes on
//! their forward and reverse network exposures and compare the two slopes.

use crate::error::{Error, Result};
use crate::estimate::design::Design;
use crate::estimate::fit::FitResult;
use crate::estimate::{fit_logistic, fit_ols};
use crate::net::{DirectedNetwork, Direction};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Linear,
    Logistic,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::Logistic => "logistic",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Family::Linear),
            "logistic" => Ok(Family::Logistic),
            other => Err(Error::Parse(format!("unknown family `{other}` (linear|logistic)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QadResult<T> {
    /// Coefficient on `Σ_j W_ij y_j`.
    pub forward: T,
    /// Coefficient on `Σ_j W_ji y_j`.
    pub reverse: T,
    /// `forward − reverse`.
    pub difference: T,
    pub family: Family,
    pub fit: FitResult<T>,
}

pub fn qad_design<T: Real>(net: &DirectedNetwork<T>, y: &[T]) -> Result<Design<T>> {
    let fwd = net.exposure(y, Direction::Forward)?;
    let rev = net.exposure(y, Direction::Reverse)?;
    Design::with_intercept(vec![("forward", fwd), ("reverse", rev)])
}

/// Fit `y ~ 1 + forward + reverse`. For the logistic family `y` must hold
/// only 0 and 1. An exactly symmetric network makes the two exposure
/// columns identical and yields a collinearity error.
pub fn qad_fit<T: Real>(net: &DirectedNetwork<T>, y: &[T], family: Family) -> Result<QadResult<T>> {
    let design = qad_design(net, y)?;
    let fit = match family {
        Family::Linear => fit_ols(&design, y)?,
        Family::Logistic => {
            let yb = y
                .iter()
                .map(|&v| {
                    if v == T::zero() {
                        Ok(0u8)
                    } else if v == T::one() {
                        Ok(1u8)
                    } else {
                        Err(Error::InvalidParameter(format!("logistic QAD outcome {v} is not 0/1")))
                    }
                })
                .collect::<Result<Vec<u8>>>()?;
            fit_logistic(&design, &yb)?
        }
    };
    let forward = fit.estimate("forward")?;
    let reverse = fit.estimate("reverse")?;
    Ok(QadResult { forward, reverse, difference: forward - reverse, family, fit })
}
