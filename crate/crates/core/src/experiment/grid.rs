//! Rewiring grid: how the forward−reverse QAD difference responds to
//! indegree and outdegree heterogeneity under asymmetric and symmetric SAR
//! processes.

use std::io::Write;

use crate::error::{Error, Result};
use crate::estimate::qad::Family;
use crate::experiment::{check_params, par_map, simulate_qad, FamilyTallies, Process, FAMILIES};
use crate::io::Metadata;
use crate::net::{make_regular_network, DirectedNetwork};
use crate::outcome::sar::SarParams;
use crate::rng::{label, substream};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetryGridConfig<T> {
    pub n: usize,
    pub outdegree: usize,
    pub sender_rewires: Vec<usize>,
    pub receiver_rewires: Vec<usize>,
    pub networks_per_cell: usize,
    pub outcomes_per_network: usize,
    pub sar_asymmetric: SarParams<T>,
    pub sar_symmetric: SarParams<T>,
    pub threshold: T,
    pub seed: u64,
}

impl<T: Real> Default for AsymmetryGridConfig<T> {
    fn default() -> Self {
        let axis = vec![0, 40, 80, 120, 160, 200];
        Self {
            n: 200,
            outdegree: 1,
            sender_rewires: axis.clone(),
            receiver_rewires: axis,
            networks_per_cell: 10,
            outcomes_per_network: 100,
            sar_asymmetric: SarParams::new(T::lit(0.4), T::zero(), T::one()),
            sar_symmetric: SarParams::new(T::lit(0.2), T::lit(0.2), T::one()),
            threshold: T::zero(),
            seed: 1,
        }
    }
}

impl<T: Real> AsymmetryGridConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.outdegree < 1 || self.outdegree >= self.n {
            return Err(Error::InvalidParameter(format!(
                "need 1 ≤ outdegree < n, got n = {}, outdegree = {}",
                self.n, self.outdegree
            )));
        }
        if self.sender_rewires.is_empty() || self.receiver_rewires.is_empty() {
            return Err(Error::InvalidParameter("rewiring grids must be nonempty".into()));
        }
        let edges = self.n * self.outdegree;
        if let Some(k) = self.sender_rewires.iter().chain(&self.receiver_rewires).find(|&&k| k > edges) {
            return Err(Error::InvalidParameter(format!("{k} rewires exceed the {edges} edges")));
        }
        if self.networks_per_cell < 1 || self.outcomes_per_network < 1 {
            return Err(Error::InvalidParameter("networks_per_cell and outcomes_per_network must be ≥ 1".into()));
        }
        check_params(&self.sar_asymmetric, "asymmetric")?;
        check_params(&self.sar_symmetric, "symmetric")?;
        if !self.threshold.is_finite() {
            return Err(Error::InvalidParameter("threshold must be finite".into()));
        }
        Ok(())
    }

    pub fn params(&self, process: Process) -> SarParams<T> {
        match process {
            Process::Asymmetric => self.sar_asymmetric,
            Process::Symmetric => self.sar_symmetric,
        }
    }

    /// The `networks_per_cell` networks of one grid cell: a fresh regular
    /// network, receiver rewiring, then sender rewiring.
    pub fn cell_networks(&self, sender: usize, receiver: usize) -> Result<Vec<DirectedNetwork<T>>> {
        let cell = [label("grid"), sender as u64, receiver as u64];
        (0..self.networks_per_cell as u64)
            .map(|k| {
                let path = |name: &str| [cell[0], cell[1], cell[2], k, label(name)];
                let base = make_regular_network(self.n, self.outdegree, &mut substream(self.seed, &path("regular")))?;
                let recv = base.rewire_receivers(receiver, &mut substream(self.seed, &path("receivers")))?;
                Ok(recv.network.rewire_senders(sender, &mut substream(self.seed, &path("senders")))?.network)
            })
            .collect()
    }

    pub fn metadata(&self) -> Metadata {
        let list = |v: &[usize]| v.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",");
        let mut m = Metadata::new();
        m.set("experiment", "asymmetry-grid")
            .set("seed", self.seed)
            .set("n", self.n)
            .set("outdegree", self.outdegree)
            .set("sender_rewires", list(&self.sender_rewires))
            .set("receiver_rewires", list(&self.receiver_rewires))
            .set("networks_per_cell", self.networks_per_cell)
            .set("outcomes_per_network", self.outcomes_per_network)
            .set("asym_rho1", self.sar_asymmetric.rho1)
            .set("asym_rho2", self.sar_asymmetric.rho2)
            .set("sym_rho1", self.sar_symmetric.rho1)
            .set("sym_rho2", self.sar_symmetric.rho2)
            .set("noise_sd", self.sar_asymmetric.noise_sd)
            .set("threshold", self.threshold);
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub sender_rewires: usize,
    pub receiver_rewires: usize,
    pub family: Family,
    pub process: Process,
    pub mean_difference: f64,
    pub frac_positive: f64,
    pub replicates: usize,
    pub failures: usize,
    /// Replicate standard deviation of the difference. Not written to CSV.
    pub sd_difference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetryGridResult {
    pub sender_rewires: Vec<usize>,
    pub receiver_rewires: Vec<usize>,
    pub rows: Vec<GridRow>,
}

impl AsymmetryGridResult {
    pub const HEADER: [&'static str; 8] = [
        "sender_rewires",
        "receiver_rewires",
        "family",
        "process",
        "mean_difference",
        "frac_positive",
        "replicates",
        "failures",
    ];

    /// Mean differences of one (family, process) in row-major
    /// (sender, receiver) order.
    pub fn surface(&self, family: Family, process: Process) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.family == family && r.process == process)
            .map(|r| r.mean_difference)
            .collect()
    }

    pub fn rows_for(&self, family: Family, process: Process) -> impl Iterator<Item = &GridRow> {
        self.rows.iter().filter(move |r| r.family == family && r.process == process)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(Self::HEADER)?;
        for r in &self.rows {
            out.write_record([
                r.sender_rewires.to_string(),
                r.receiver_rewires.to_string(),
                r.family.as_str().to_string(),
                r.process.as_str().to_string(),
                r.mean_difference.to_string(),
                r.frac_positive.to_string(),
                r.replicates.to_string(),
                r.failures.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Runs every (sender, receiver) cell. Rows are ordered by sender rewires,
/// receiver rewires, family, process. A cell in which every fit failed is
/// kept with NaN summaries and `replicates = 0`.
pub fn run_asymmetry_grid<T: Real>(config: &AsymmetryGridConfig<T>) -> Result<AsymmetryGridResult> {
    config.validate()?;
    let cells: Vec<(usize, usize)> = config
        .sender_rewires
        .iter()
        .flat_map(|&s| config.receiver_rewires.iter().map(move |&r| (s, r)))
        .collect();
    let tallies = par_map(&cells, |&(s, r)| -> Result<[FamilyTallies; 2]> {
        let mut acc = [FamilyTallies::default(); 2];
        for (k, net) in config.cell_networks(s, r)?.iter().enumerate() {
            for (slot, process) in acc.iter_mut().zip(Process::ALL) {
                let base = [label("grid"), s as u64, r as u64, k as u64, process.key()];
                let t = simulate_qad(net, config.params(process), config.threshold, config.outcomes_per_network, |i| {
                    let mut path = base.to_vec();
                    path.push(i as u64);
                    substream(config.seed, &path)
                })?;
                slot.merge(&t);
            }
        }
        Ok(acc)
    });
    let mut rows = Vec::with_capacity(cells.len() * 4);
    for (&(s, r), t) in cells.iter().zip(tallies) {
        let t = t?;
        for family in FAMILIES {
            for (pi, process) in Process::ALL.into_iter().enumerate() {
                let tally = t[pi].get(family);
                rows.push(GridRow {
                    sender_rewires: s,
                    receiver_rewires: r,
                    family,
                    process,
                    mean_difference: tally.mean_difference(),
                    frac_positive: tally.frac_positive(),
                    replicates: tally.replicates,
                    failures: tally.failures,
                    sd_difference: tally.sd_difference(),
                });
            }
        }
    }
    Ok(AsymmetryGridResult {
        sender_rewires: config.sender_rewires.clone(),
        receiver_rewires: config.receiver_rewires.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> AsymmetryGridConfig<f64> {
        AsymmetryGridConfig {
            n: 60,
            sender_rewires: vec![0, 30],
            receiver_rewires: vec![0, 30],
            networks_per_cell: 2,
            outcomes_per_network: 5,
            ..Default::default()
        }
    }

    #[test]
    fn rows_cover_every_cell_and_combination() {
        let res = run_asymmetry_grid(&small()).unwrap();
        assert_eq!(res.rows.len(), 2 * 2 * 4);
        for r in &res.rows {
            assert_eq!(r.replicates + r.failures, 10);
            assert!(r.frac_positive.is_nan() || (0.0..=1.0).contains(&r.frac_positive));
        }
        assert_eq!(res.surface(Family::Linear, Process::Symmetric).len(), 4);
    }

    #[test]
    fn deterministic_csv() {
        let a = run_asymmetry_grid(&small()).unwrap();
        let b = run_asymmetry_grid(&small()).unwrap();
        let (mut ca, mut cb) = (Vec::new(), Vec::new());
        a.write_csv(&mut ca).unwrap();
        b.write_csv(&mut cb).unwrap();
        assert_eq!(ca, cb);
        assert!(String::from_utf8(ca).unwrap().starts_with(&AsymmetryGridResult::HEADER.join(",")));
    }

    #[test]
    fn validation() {
        let mut c = small();
        c.receiver_rewires = vec![];
        assert!(run_asymmetry_grid(&c).is_err());
        let mut c = small();
        c.sender_rewires = vec![61];
        assert!(c.validate().is_err());
        let mut c = small();
        c.outcomes_per_network = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn cell_networks_have_expected_degrees() {
        let c = small();
        for net in c.cell_networks(0, 30).unwrap() {
            assert!(net.outdegrees().iter().all(|&d| d == 1));
            assert_eq!(net.edge_count(), 60);
        }
        for net in c.cell_networks(30, 0).unwrap() {
            assert!(net.indegrees().iter().all(|&d| d == 1));
        }
    }
}
