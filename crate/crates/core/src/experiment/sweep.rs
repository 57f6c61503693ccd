//! Dichotomization sweep: refit three transition models while the cut
//! point that turns a continuous trait into a binary one moves across the
//! centre of its distribution.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimate::cf::{fit_cf_model, AlterTerm, CfModelSpec};
use crate::estimate::fit::FitResult;
use crate::experiment::is_fit_failure;
use crate::io::Metadata;
use crate::net::make_regular_network;
use crate::outcome::panel::{generate_continuous_panel, ContinuousPanel, ContinuousPanelSpec};
use crate::outcome::sar::SarParams;
use crate::rng::{label, substream};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SweepModel {
    /// Ego lag, alter contemporaneous, alter lag 1.
    M1,
    /// Ego lag, alter lag 1, alter lag 2.
    M2,
    /// Ego lag, alter sum, alter difference.
    M3,
}

impl SweepModel {
    pub const ALL: [SweepModel; 3] = [SweepModel::M1, SweepModel::M2, SweepModel::M3];

    pub fn spec(self) -> CfModelSpec {
        match self {
            SweepModel::M1 => CfModelSpec::new(&[AlterTerm::Contemporaneous, AlterTerm::Lag1]),
            SweepModel::M2 => CfModelSpec::new(&[AlterTerm::Lag1, AlterTerm::Lag2]),
            SweepModel::M3 => CfModelSpec::new(&[AlterTerm::Sum, AlterTerm::Difference]),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SweepModel::M1 => "M1",
            SweepModel::M2 => "M2",
            SweepModel::M3 => "M3",
        }
    }
}

impl fmt::Display for SweepModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "M1" | "m1" => Ok(SweepModel::M1),
            "M2" | "m2" => Ok(SweepModel::M2),
            "M3" | "m3" => Ok(SweepModel::M3),
            other => Err(Error::Parse(format!("unknown model `{other}` (M1|M2|M3)"))),
        }
    }
}

/// The term name used for a threshold at which a model could not be fit.
pub const FAILED_TERM: &str = "FAILED";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub threshold: f64,
    pub model: SweepModel,
    pub term: String,
    pub estimate: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ThresholdSweepResult {
    pub rows: Vec<SweepRow>,
}

impl ThresholdSweepResult {
    pub const HEADER: [&'static str; 5] = ["threshold", "model", "term", "estimate", "std_error"];

    /// `(threshold, estimate)` for one model term, skipping failed fits.
    pub fn series(&self, model: SweepModel, term: &str) -> Vec<(f64, f64)> {
        self.rows.iter().filter(|r| r.model == model && r.term == term).map(|r| (r.threshold, r.estimate)).collect()
    }

    pub fn failures(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.term == FAILED_TERM)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(Self::HEADER)?;
        for r in &self.rows {
            out.write_record([
                r.threshold.to_string(),
                r.model.as_str().to_string(),
                r.term.clone(),
                r.estimate.to_string(),
                r.std_error.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Fits `models` to the panel dichotomized at each threshold. Thresholds
/// must increase strictly and lie inside the observed value range. A fit
/// that fails for lack of variation, separation or collinearity becomes a
/// single `FAILED` row with NaN values.
pub fn run_threshold_sweep<T: Real>(
    panel: &ContinuousPanel<T>,
    thresholds: &[T],
    models: &[SweepModel],
) -> Result<ThresholdSweepResult> {
    if thresholds.is_empty() || models.is_empty() {
        return Err(Error::InvalidParameter("thresholds and models must be nonempty".into()));
    }
    if thresholds.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("thresholds must increase strictly".into()));
    }
    let values = panel.all_values();
    let lo = values.iter().copied().fold(T::infinity(), T::min);
    let hi = values.iter().copied().fold(T::neg_infinity(), T::max);
    if let Some(t) = thresholds.iter().find(|&&t| t < lo || t > hi) {
        return Err(Error::InvalidParameter(format!("threshold {t} is outside the observed range [{lo}, {hi}]")));
    }
    let mut rows = Vec::new();
    for &c in thresholds {
        let binary = panel.dichotomize(c)?;
        for &model in models {
            match fit_cf_model(&binary, &model.spec()) {
                Ok(fit) => rows.extend(fit_rows(c.as_f64(), model, &fit)),
                Err(e) if is_fit_failure(&e) || matches!(e, Error::Stratum(_)) => rows.push(SweepRow {
                    threshold: c.as_f64(),
                    model,
                    term: FAILED_TERM.into(),
                    estimate: f64::NAN,
                    std_error: f64::NAN,
                }),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(ThresholdSweepResult { rows })
}

fn fit_rows<T: Real>(threshold: f64, model: SweepModel, fit: &FitResult<T>) -> impl Iterator<Item = SweepRow> + '_ {
    fit.terms.iter().map(move |t| SweepRow {
        threshold,
        model,
        term: t.name.clone(),
        estimate: t.estimate.as_f64(),
        std_error: t.std_error.as_f64(),
    })
}

/// Synthetic continuous panel plus the threshold grid to sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSweepConfig<T> {
    pub n: usize,
    pub outdegree: usize,
    pub receiver_rewires: usize,
    pub sender_rewires: usize,
    pub waves: usize,
    pub sar: SarParams<T>,
    pub persistence: T,
    pub mean: T,
    pub thresholds: Vec<T>,
    pub seed: u64,
}

impl<T: Real> Default for ThresholdSweepConfig<T> {
    /// A BMI-like trait centred on 30 with a cut grid from 28 to 32 in
    /// steps of 0.5.
    fn default() -> Self {
        Self {
            n: 1000,
            outdegree: 1,
            receiver_rewires: 500,
            sender_rewires: 100,
            waves: 5,
            sar: SarParams::new(T::lit(0.4), T::zero(), T::lit(4.0)),
            persistence: T::lit(0.8),
            mean: T::lit(30.0),
            thresholds: (0..9).map(|k| T::lit(28.0 + 0.5 * k as f64)).collect(),
            seed: 1,
        }
    }
}

impl<T: Real> ThresholdSweepConfig<T> {
    pub fn generate(&self) -> Result<ContinuousPanel<T>> {
        let stream = |name: &str| substream(self.seed, &[label("threshold-sweep"), label(name)]);
        let base = make_regular_network(self.n, self.outdegree, &mut stream("regular"))?;
        let net = base
            .rewire_receivers(self.receiver_rewires, &mut stream("receivers"))?
            .network
            .rewire_senders(self.sender_rewires, &mut stream("senders"))?
            .network;
        let spec = ContinuousPanelSpec { sar: self.sar, persistence: self.persistence, mean: self.mean, waves: self.waves };
        generate_continuous_panel(&net, &spec, &mut stream("outcomes"))
    }

    pub fn run(&self) -> Result<ThresholdSweepResult> {
        run_threshold_sweep(&self.generate()?, &self.thresholds, &SweepModel::ALL)
    }

    pub fn metadata(&self) -> Metadata {
        let mut m = Metadata::new();
        m.set("experiment", "threshold-sweep")
            .set("seed", self.seed)
            .set("n", self.n)
            .set("outdegree", self.outdegree)
            .set("receiver_rewires", self.receiver_rewires)
            .set("sender_rewires", self.sender_rewires)
            .set("waves", self.waves)
            .set("rho1", self.sar.rho1)
            .set("rho2", self.sar.rho2)
            .set("noise_sd", self.sar.noise_sd)
            .set("persistence", self.persistence)
            .set("mean", self.mean)
            .set("thresholds", self.thresholds.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","));
        m
    }
}
