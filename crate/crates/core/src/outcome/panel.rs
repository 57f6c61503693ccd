//! Multi-wave panels for transition-logit models.
//!
//! The binary generator forward-simulates the logistic transition
//! `logit P(Y_{i,t+1}=1) = μ + α Y_{i,t} + β Σ_j W_ij Y_{j,t} + γ Σ_j W_ij Y_{j,t+1} + δ·X_{i,t+1}`.
//! The contemporaneous term has no direct generative reading, so each new
//! wave is produced in two stages: a synchronous provisional draw from the
//! lagged terms only, then `sweeps` sequential single-site passes in node
//! order that redraw each `Y_{i,t+1}` from the full conditional including
//! the current contemporaneous exposure. On a symmetric network this is a
//! Gibbs sampler for an auto-logistic wave whose full conditionals are
//! exactly the transition logit.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::net::{DirectedNetwork, Direction};
use crate::outcome::sar::{SarParams, SarSystem};
use crate::outcome::{binary_to_real, dichotomize};
use crate::scalar::{logistic, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct Wave<T> {
    pub network: DirectedNetwork<T>,
    pub outcomes: Vec<u8>,
    /// `n × p` exogenous covariates observed at this wave.
    pub covariates: Matrix<T>,
}

/// Waves in time order, all on the same node set.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelDataset<T> {
    waves: Vec<Wave<T>>,
}

impl<T: Real> PanelDataset<T> {
    pub fn new(waves: Vec<Wave<T>>) -> Result<Self> {
        let first = waves
            .first()
            .ok_or_else(|| Error::InvalidParameter("panel needs at least one wave".into()))?;
        let (n, p) = (first.network.node_count(), first.covariates.cols());
        for (t, w) in waves.iter().enumerate() {
            if w.network.node_count() != n || w.outcomes.len() != n || w.covariates.rows() != n {
                return Err(Error::InvalidParameter(format!(
                    "wave {} does not have {n} nodes",
                    t + 1
                )));
            }
            if w.covariates.cols() != p {
                return Err(Error::Dimension { expected: p, got: w.covariates.cols() });
            }
            if w.outcomes.iter().any(|&v| v > 1) {
                return Err(Error::InvalidParameter(format!("wave {} has non-binary outcomes", t + 1)));
            }
        }
        Ok(Self { waves })
    }

    pub fn waves(&self) -> &[Wave<T>] {
        &self.waves
    }

    pub fn wave_count(&self) -> usize {
        self.waves.len()
    }

    pub fn node_count(&self) -> usize {
        self.waves[0].network.node_count()
    }

    pub fn covariate_count(&self) -> usize {
        self.waves[0].covariates.cols()
    }
}

/// True coefficients and settings for [`generate_panel`].
#[derive(Debug, Clone, PartialEq)]
pub struct PanelGenSpec<T> {
    pub mu: T,
    pub alpha_ego: T,
    pub beta_lag: T,
    pub gamma_contemp: T,
    /// One coefficient per covariate; covariates are drawn iid N(0, 1).
    pub delta: Vec<T>,
    pub initial_prevalence: f64,
    pub waves: usize,
    /// Sequential refresh passes per wave for the contemporaneous term.
    pub sweeps: usize,
}

impl<T: Real> PanelGenSpec<T> {
    pub fn new(mu: T, alpha_ego: T, beta_lag: T, gamma_contemp: T, waves: usize) -> Self {
        Self {
            mu,
            alpha_ego,
            beta_lag,
            gamma_contemp,
            delta: Vec::new(),
            initial_prevalence: 0.5,
            waves,
            sweeps: 50,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.waves < 2 {
            return Err(Error::InvalidParameter("a panel needs at least two waves".into()));
        }
        if !(0.0..=1.0).contains(&self.initial_prevalence) {
            return Err(Error::InvalidParameter(format!(
                "initial prevalence {} outside [0, 1]",
                self.initial_prevalence
            )));
        }
        if self.sweeps == 0 && self.gamma_contemp != T::zero() {
            return Err(Error::InvalidParameter(
                "a contemporaneous effect needs at least one refresh sweep".into(),
            ));
        }
        Ok(())
    }
}

fn gaussian_matrix<T: Real, R: Rng + ?Sized>(n: usize, p: usize, rng: &mut R) -> Matrix<T> {
    let data = crate::outcome::sar::gaussian_vector(n * p, T::one(), rng);
    Matrix::from_row_major(n, p, data).expect("shape matches data length")
}

fn bernoulli<T: Real, R: Rng + ?Sized>(eta: T, rng: &mut R) -> u8 {
    u8::from(rng.random::<f64>() < logistic(eta).as_f64())
}

pub fn generate_panel<T: Real, R: Rng + ?Sized>(
    net: &DirectedNetwork<T>,
    spec: &PanelGenSpec<T>,
    rng: &mut R,
) -> Result<PanelDataset<T>> {
    spec.validate()?;
    let n = net.node_count();
    let p = spec.delta.len();
    let y0: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<f64>() < spec.initial_prevalence)).collect();
    let mut waves = vec![Wave { network: net.clone(), outcomes: y0, covariates: gaussian_matrix(n, p, rng) }];
    for _t in 1..spec.waves {
        let prev = &waves.last().expect("nonempty").outcomes;
        let lag_exposure = net.exposure(&binary_to_real(prev), Direction::Forward)?;
        let x: Matrix<T> = gaussian_matrix(n, p, rng);
        let base: Vec<T> = (0..n)
            .map(|i| {
                let cov: T = x.row(i).iter().zip(&spec.delta).map(|(&a, &b)| a * b).sum();
                spec.mu
                    + spec.alpha_ego * T::from_count(prev[i] as usize)
                    + spec.beta_lag * lag_exposure[i]
                    + cov
            })
            .collect();
        let mut y: Vec<u8> = base.iter().map(|&eta| bernoulli(eta, rng)).collect();
        if spec.gamma_contemp != T::zero() {
            for _ in 0..spec.sweeps {
                for i in 0..n {
                    let contemp: T = net
                        .out_edges(i)
                        .iter()
                        .map(|e| e.weight * T::from_count(y[e.dst] as usize))
                        .sum();
                    y[i] = bernoulli(base[i] + spec.gamma_contemp * contemp, rng);
                }
            }
        }
        waves.push(Wave { network: net.clone(), outcomes: y, covariates: x });
    }
    PanelDataset::new(waves)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousWave<T> {
    pub network: DirectedNetwork<T>,
    pub values: Vec<T>,
    pub covariates: Matrix<T>,
}

/// Continuous panel (a BMI-like trait) that can be cut at any threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousPanel<T> {
    pub waves: Vec<ContinuousWave<T>>,
}

impl<T: Real> ContinuousPanel<T> {
    pub fn dichotomize(&self, threshold: T) -> Result<PanelDataset<T>> {
        PanelDataset::new(
            self.waves
                .iter()
                .map(|w| Wave {
                    network: w.network.clone(),
                    outcomes: dichotomize(&w.values, threshold),
                    covariates: w.covariates.clone(),
                })
                .collect(),
        )
    }

    pub fn all_values(&self) -> Vec<T> {
        self.waves.iter().flat_map(|w| w.values.iter().copied()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousPanelSpec<T> {
    /// Per-wave SAR innovation.
    pub sar: SarParams<T>,
    /// Ego persistence `φ` in `Z_{t+1} − m = φ (Z_t − m) + √(1−φ²) S_{t+1}`.
    pub persistence: T,
    pub mean: T,
    pub waves: usize,
}

/// Continuous analogue of a repeated health measurement: each wave adds a
/// fresh SAR draw to a persistent ego component.
pub fn generate_continuous_panel<T: Real, R: Rng + ?Sized>(
    net: &DirectedNetwork<T>,
    spec: &ContinuousPanelSpec<T>,
    rng: &mut R,
) -> Result<ContinuousPanel<T>> {
    if spec.waves < 1 {
        return Err(Error::InvalidParameter("at least one wave is required".into()));
    }
    if !(spec.persistence.abs() < T::one()) {
        return Err(Error::InvalidParameter(format!(
            "persistence must lie in (-1, 1), got {}",
            spec.persistence
        )));
    }
    let sys = SarSystem::new(net, spec.sar)?;
    let n = net.node_count();
    let innov = (T::one() - spec.persistence * spec.persistence).sqrt();
    let mut waves: Vec<ContinuousWave<T>> = Vec::with_capacity(spec.waves);
    for _ in 0..spec.waves {
        let s = sys.draw(rng)?.z;
        let values = match waves.last() {
            None => s.iter().map(|&v| spec.mean + v).collect(),
            Some(prev) => prev
                .values
                .iter()
                .zip(&s)
                .map(|(&z, &v)| spec.mean + spec.persistence * (z - spec.mean) + innov * v)
                .collect(),
        };
        waves.push(ContinuousWave { network: net.clone(), values, covariates: Matrix::zeros(n, 0) });
    }
    Ok(ContinuousPanel { waves })
}
