//! Monte-Carlo studies of the directional asymmetry test.
//!
//! Every work item draws from its own substream keyed by
//! `(seed, study, cell, network, process, replicate)`, so results are
//! bit-identical for a given seed regardless of how many worker threads run
//! the items or in which order they finish.

pub mod grid;
pub mod sweep;
pub mod waves;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::estimate::qad::{qad_fit, Family};
use crate::net::DirectedNetwork;
use crate::outcome::sar::{SarParams, SarSystem};
use crate::outcome::{binary_to_real, dichotomize};
use crate::rng::StreamRng;
use crate::scalar::Real;

pub use grid::{run_asymmetry_grid, AsymmetryGridConfig, AsymmetryGridResult, GridRow};
pub use sweep::{run_threshold_sweep, SweepModel, SweepRow, ThresholdSweepConfig, ThresholdSweepResult};
pub use waves::{pseudo_wave_networks, run_wave_asymmetry, PseudoWaveSpec, WaveAsymmetryConfig, WaveRow};

/// Which SAR parameter pair generated the outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Process {
    Asymmetric,
    Symmetric,
}

impl Process {
    pub const ALL: [Process; 2] = [Process::Asymmetric, Process::Symmetric];

    pub fn as_str(self) -> &'static str {
        match self {
            Process::Asymmetric => "asymmetric",
            Process::Symmetric => "symmetric",
        }
    }

    fn key(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Process {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asymmetric" => Ok(Process::Asymmetric),
            "symmetric" => Ok(Process::Symmetric),
            other => Err(Error::Parse(format!("unknown process `{other}`"))),
        }
    }
}

pub(crate) const FAMILIES: [Family; 2] = [Family::Linear, Family::Logistic];

/// Errors that mark a single replicate as failed rather than aborting the
/// study.
pub fn is_fit_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::Collinear { .. } | Error::Separation(_) | Error::Degenerate(_) | Error::Unstable { .. }
    )
}

/// Running summary of asymmetry differences for one (family, process).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tally {
    pub sum: f64,
    pub sum_sq: f64,
    pub positive: usize,
    pub replicates: usize,
    pub failures: usize,
}

impl Tally {
    pub fn push<T: Real>(&mut self, outcome: Result<T>) -> Result<()> {
        match outcome {
            Ok(d) => {
                let d = d.as_f64();
                self.sum += d;
                self.sum_sq += d * d;
                self.replicates += 1;
                if d > 0.0 {
                    self.positive += 1;
                }
                Ok(())
            }
            Err(e) if is_fit_failure(&e) => {
                self.failures += 1;
                Ok(())
            }
            Err(e) => Err(e),
        }
    }

    pub fn merge(&mut self, other: &Tally) {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.positive += other.positive;
        self.replicates += other.replicates;
        self.failures += other.failures;
    }

    /// NaN when every replicate failed.
    pub fn mean_difference(&self) -> f64 {
        if self.replicates == 0 {
            f64::NAN
        } else {
            self.sum / self.replicates as f64
        }
    }

    /// Sample standard deviation of the differences; NaN below two
    /// replicates.
    pub fn sd_difference(&self) -> f64 {
        if self.replicates < 2 {
            return f64::NAN;
        }
        let n = self.replicates as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0).sqrt()
    }

    /// NaN when every replicate failed.
    pub fn frac_positive(&self) -> f64 {
        if self.replicates == 0 {
            f64::NAN
        } else {
            self.positive as f64 / self.replicates as f64
        }
    }
}

/// Tallies for both families under one process.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FamilyTallies {
    pub linear: Tally,
    pub logistic: Tally,
}

impl FamilyTallies {
    pub fn get(&self, family: Family) -> &Tally {
        match family {
            Family::Linear => &self.linear,
            Family::Logistic => &self.logistic,
        }
    }

    pub fn merge(&mut self, other: &FamilyTallies) {
        self.linear.merge(&other.linear);
        self.logistic.merge(&other.logistic);
    }
}

/// Draws `count` outcomes from one SAR process on `net` and runs linear QAD
/// on each continuous draw and logistic QAD on its dichotomized copy.
/// `rng_for(r)` supplies the substream of replicate `r`.
pub fn simulate_qad<T: Real, F: Fn(usize) -> StreamRng>(
    net: &DirectedNetwork<T>,
    params: SarParams<T>,
    threshold: T,
    count: usize,
    rng_for: F,
) -> Result<FamilyTallies> {
    let mut out = FamilyTallies::default();
    let sys = match SarSystem::new(net, params) {
        Ok(s) => s,
        Err(e) if is_fit_failure(&e) => {
            out.linear.failures = count;
            out.logistic.failures = count;
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    for r in 0..count {
        let z = sys.draw(&mut rng_for(r))?.z;
        out.linear.push(qad_fit(net, &z, Family::Linear).map(|q| q.difference))?;
        let y = binary_to_real::<T>(&dichotomize(&z, threshold));
        out.logistic.push(qad_fit(net, &y, Family::Logistic).map(|q| q.difference))?;
    }
    Ok(out)
}

/// Number of worker threads used for independent work items.
pub fn worker_count() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Order-preserving parallel map over independent items.
pub(crate) fn par_map<I: Sync, O: Send, F: Fn(&I) -> O + Sync>(items: &[I], f: F) -> Vec<O> {
    let workers = worker_count().min(items.len()).max(1);
    if workers == 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<O>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let v = f(&items[i]);
                slots.lock().expect("result slots poisoned")[i] = Some(v);
            });
        }
    });
    slots.into_inner().expect("result slots poisoned").into_iter().map(|v| v.expect("item computed")).collect()
}

pub(crate) fn check_params<T: Real>(p: &SarParams<T>, what: &str) -> Result<()> {
    if !(p.rho1.is_finite() && p.rho2.is_finite() && p.noise_sd > T::zero()) {
        return Err(Error::InvalidParameter(format!("{what} SAR parameters are invalid: {p:?}")));
    }
    Ok(())
}
