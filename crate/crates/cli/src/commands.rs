use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use contagion::estimate::cf::{fit_cf_model, AlterTerm, CfModelSpec, Stratum};
use contagion::estimate::qad::{qad_fit, Family};
use contagion::estimate::sar_mle::{sar_mle, SarMode};
use contagion::estimate::{fit_logistic, fit_ols, Design};
use contagion::experiment::waves::write_wave_csv;
use contagion::experiment::{
    pseudo_wave_networks, run_asymmetry_grid, run_wave_asymmetry, AsymmetryGridConfig, PseudoWaveSpec,
    ThresholdSweepConfig, WaveAsymmetryConfig,
};
use contagion::io::{self as cio, Metadata};
use contagion::outcome::dichotomize;
use contagion::outcome::ising::{gibbs_sample, IsingParams};
use contagion::outcome::panel::{generate_panel, PanelGenSpec};
use contagion::outcome::sar::{sar_residual, SarParams, SarSystem};
use contagion::rng::{label, substream};
use contagion::{make_regular_network, Network};

use crate::output::OutDir;
use crate::settings::{List, Settings};
use crate::{Cli, Command, Experiment, Fit, NetInput, ProcessArgs, Simulate};

/// Residual above which a simulated SAR outcome is rejected.
const RESIDUAL_LIMIT: f64 = 1e-10;

pub fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let mut s = Settings::load(cli.config.as_deref())?;
    let seed = s.get("seed", cli.seed, 1u64)?;
    let out = OutDir::new(&cli.out_dir);
    match cli.command {
        Command::GenNet(a) => gen_net(s, seed, &out, a),
        Command::Simulate(Simulate::Sar(a)) => simulate_sar(s, seed, &out, a),
        Command::Simulate(Simulate::Ising(a)) => simulate_ising(s, seed, &out, a),
        Command::Simulate(Simulate::Panel(a)) => simulate_panel(s, seed, &out, a),
        Command::Fit(Fit::Ols(a)) => fit_design(s, &out, a, false),
        Command::Fit(Fit::Logistic(a)) => fit_design(s, &out, a, true),
        Command::Fit(Fit::Qad(a)) => fit_qad(s, &out, a),
        Command::Fit(Fit::SarMle(a)) => fit_sar_mle(s, &out, a),
        Command::Fit(Fit::Cf(a)) => fit_cf(s, &out, a),
        Command::Experiment(Experiment::AsymmetryGrid(a)) => asymmetry_grid(s, seed, &out, a),
        Command::Experiment(Experiment::WaveAsymmetry(a)) => wave_asymmetry(s, seed, &out, a),
        Command::Experiment(Experiment::ThresholdSweep(a)) => threshold_sweep(s, seed, &out, a),
    }
}

fn read_network(path: &Path, nodes: Option<usize>) -> Result<Network> {
    let f = File::open(path).with_context(|| format!("opening network {}", path.display()))?;
    Network::read_csv(BufReader::new(f), nodes).with_context(|| format!("reading network {}", path.display()))
}

fn load_network(s: &mut Settings, input: NetInput) -> Result<Network> {
    let path: String = s.require("net", input.net.map(|p| p.display().to_string()))?;
    let nodes = s.get_opt("nodes", input.nodes)?;
    read_network(Path::new(&path), nodes)
}

fn read_outcome_file(path: &Path) -> Result<Vec<f64>> {
    let f = File::open(path).with_context(|| format!("opening outcomes {}", path.display()))?;
    cio::read_outcomes(BufReader::new(f)).with_context(|| format!("reading outcomes {}", path.display()))
}

fn gen_net(mut s: Settings, seed: u64, out: &OutDir, a: crate::GenNetArgs) -> Result<Vec<PathBuf>> {
    let n = s.get("n", a.n, 200usize)?;
    let d = s.get("outdegree", a.outdegree, 1usize)?;
    let kr = s.get("receiver_rewires", a.receiver_rewires, 0usize)?;
    let ks = s.get("sender_rewires", a.sender_rewires, 0usize)?;
    let name = s.get("out", a.out, "network.csv".to_string())?;
    let stream = |k: &str| substream(seed, &[label("gen-net"), label(k)]);
    let base: Network = make_regular_network(n, d, &mut stream("regular"))?;
    let recv = base.rewire_receivers(kr, &mut stream("receivers"))?;
    let send = recv.network.rewire_senders(ks, &mut stream("senders"))?;
    s.note("receiver_rewire_failures", recv.failed);
    s.note("sender_rewire_failures", send.failed);
    s.note("edges", send.network.edge_count());
    let meta = s.finish()?;
    Ok(vec![out.write(&name, &meta, |w| send.network.write_csv(w))?])
}

fn simulate_sar(mut s: Settings, seed: u64, out: &OutDir, a: crate::SarArgs) -> Result<Vec<PathBuf>> {
    let net = load_network(&mut s, a.input)?;
    let rho1 = s.get("rho1", a.rho1, 0.4)?;
    let rho2 = s.get("rho2", a.rho2, 0.0)?;
    let sd = s.get("noise_sd", a.noise_sd, 1.0)?;
    let threshold = s.get_opt("threshold", a.threshold)?;
    let name = s.get("out", a.out, "sar.csv".to_string())?;
    let sys = SarSystem::new(&net, SarParams::new(rho1, rho2, sd))?;
    let draw = sys.draw(&mut substream(seed, &[label("simulate-sar")]))?;
    let residual = sar_residual(&net, rho1, rho2, &draw.z, &draw.noise)?;
    ensure!(residual < RESIDUAL_LIMIT, "SAR solve residual {residual:e} exceeds {RESIDUAL_LIMIT:e}");
    s.note("residual", residual);
    let meta = s.finish()?;
    let mut paths = vec![out.write(&name, &meta, |w| cio::write_continuous(w, &draw.z))?];
    if let Some(c) = threshold {
        let y = dichotomize(&draw.z, c);
        let stem = name.strip_suffix(".csv").unwrap_or(&name);
        paths.push(out.write(&format!("{stem}_binary.csv"), &meta, |w| cio::write_binary(w, &y))?);
    }
    Ok(paths)
}

fn simulate_ising(mut s: Settings, seed: u64, out: &OutDir, a: crate::IsingArgs) -> Result<Vec<PathBuf>> {
    let net = load_network(&mut s, a.input)?;
    let alpha = s.get("alpha", a.alpha, 0.0)?;
    let beta = s.get("beta", a.beta, 0.0)?;
    let gamma = s.get("gamma", a.gamma, 0.0)?;
    let sweeps = s.get("sweeps", a.sweeps, 1000usize)?;
    let name = s.get("out", a.out, "ising.csv".to_string())?;
    let params = IsingParams::new(alpha, beta, gamma)?;
    let y = gibbs_sample(&net, params, sweeps, &mut substream(seed, &[label("simulate-ising")]))?;
    let meta = s.finish()?;
    Ok(vec![out.write(&name, &meta, |w| cio::write_binary(w, &y))?])
}

fn simulate_panel(mut s: Settings, seed: u64, out: &OutDir, a: crate::PanelArgs) -> Result<Vec<PathBuf>> {
    let net = load_network(&mut s, a.input)?;
    let mut spec = PanelGenSpec::new(
        s.get("mu", a.mu, -1.0)?,
        s.get("alpha_ego", a.alpha_ego, 2.0)?,
        s.get("beta_lag", a.beta_lag, 0.5)?,
        s.get("gamma_contemp", a.gamma_contemp, 0.5)?,
        s.get("waves", a.waves, 5usize)?,
    );
    spec.delta = s.get("delta", a.delta, List(vec![]))?.0;
    spec.initial_prevalence = s.get("prevalence", a.prevalence, spec.initial_prevalence)?;
    spec.sweeps = s.get("sweeps", a.sweeps, spec.sweeps)?;
    let name = s.get("out", a.out, "panel.csv".to_string())?;
    let panel = generate_panel(&net, &spec, &mut substream(seed, &[label("simulate-panel")]))?;
    let meta = s.finish()?;
    Ok(vec![out.write(&name, &meta, |w| cio::write_panel(w, &panel))?])
}

/// Design CSV: header row, numeric columns, one of them the response.
fn read_design(path: &Path, response: &str, intercept: bool) -> Result<(Design<f64>, Vec<f64>)> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let yi = headers
        .iter()
        .position(|h| h == response)
        .with_context(|| format!("response column `{response}` not in {}", headers.join(",")))?;
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for (k, field) in rec.iter().enumerate() {
            let v: f64 = field
                .trim()
                .parse()
                .with_context(|| format!("row {}: column {} value `{field}` is not numeric", line + 2, headers[k]))?;
            cols[k].push(v);
        }
    }
    let y = cols[yi].clone();
    let predictors: Vec<(String, Vec<f64>)> =
        headers.into_iter().zip(cols).enumerate().filter(|(k, _)| *k != yi).map(|(_, c)| c).collect();
    let design = if intercept { Design::with_intercept(predictors)? } else { Design::from_columns(predictors)? };
    Ok((design, y))
}

fn fit_design(mut s: Settings, out: &OutDir, a: crate::DesignArgs, logistic: bool) -> Result<Vec<PathBuf>> {
    let data: String = s.require("data", a.data.map(|p| p.display().to_string()))?;
    let response = s.get("response", a.response, "y".to_string())?;
    let no_intercept = s.get("no_intercept", a.no_intercept.then_some(true), false)?;
    let name = s.get("out", a.out, "fit.csv".to_string())?;
    let (design, y) = read_design(Path::new(&data), &response, !no_intercept)?;
    let fit = if logistic { fit_logistic(&design, &cio::as_binary(&y)?)? } else { fit_ols(&design, &y)? };
    s.note("converged", fit.converged);
    s.note("iterations", fit.iterations);
    if let Some(ll) = fit.log_likelihood {
        s.note("log_likelihood", ll);
    }
    let meta = s.finish()?;
    Ok(vec![out.write(&name, &meta, |w| fit.write_csv(w))?])
}

fn fit_qad(mut s: Settings, out: &OutDir, a: crate::QadArgs) -> Result<Vec<PathBuf>> {
    let net = load_network(&mut s, a.input)?;
    let ypath: String = s.require("y", a.y.map(|p| p.display().to_string()))?;
    let family: Family = s.get("family", a.family, "linear".to_string())?.parse()?;
    let name = s.get("out", a.out, "qad.csv".to_string())?;
    let y = read_outcome_file(Path::new(&ypath))?;
    let q = qad_fit(&net, &y, family)?;
    let meta = s.finish()?;
    let stem = name.strip_suffix(".csv").unwrap_or(&name).to_string();
    let summary = out.write(&name, &meta, |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["family", "forward", "reverse", "difference"])?;
        c.write_record([family.as_str().to_string(), q.forward.to_string(), q.reverse.to_string(), q.difference.to_string()])?;
        c.flush()?;
        Ok(())
    })?;
    let terms = out.write(&format!("{stem}_terms.csv"), &meta, |w| q.fit.write_csv(w))?;
    Ok(vec![summary, terms])
}

fn fit_sar_mle(mut s: Settings, out: &OutDir, a: crate::SarMleArgs) -> Result<Vec<PathBuf>> {
    let net = load_network(&mut s, a.input)?;
    let zpath: String = s.require("z", a.z.map(|p| p.display().to_string()))?;
    let mode: SarMode = s.get("mode", a.mode, "one-rho".to_string())?.parse()?;
    let name = s.get("out", a.out, "sar_mle.csv".to_string())?;
    let z = read_outcome_file(Path::new(&zpath))?;
    let fit = sar_mle(&net, &z, mode)?;
    for w in &fit.warnings {
        eprintln!("warning: {w}");
    }
    s.note("log_likelihood", fit.log_likelihood.unwrap_or(f64::NAN));
    s.note("warnings", fit.warnings.join("; "));
    let meta = s.finish()?;
    Ok(vec![out.write(&name, &meta, |w| fit.write_csv(w))?])
}

fn fit_cf(mut s: Settings, out: &OutDir, a: crate::CfArgs) -> Result<Vec<PathBuf>> {
    let panel_path: String = s.require("panel", a.panel.map(|p| p.display().to_string()))?;
    let nets: List<String> = s.require("nets", a.nets)?;
    let nodes = s.get_opt("nodes", a.nodes)?;
    let terms = s.get("terms", a.terms, List(vec!["contemporaneous".to_string(), "lag1".to_string()]))?;
    let no_ego_lag = s.get("no_ego_lag", a.no_ego_lag.then_some(true), false)?;
    let covariates = s.get("covariates", a.covariates, List(vec![]))?;
    let stratum: Stratum = s.get("stratum", a.stratum, "all".to_string())?.parse()?;
    let name = s.get("out", a.out, "cf.csv".to_string())?;
    let networks = nets.0.iter().map(|p| read_network(Path::new(p), nodes)).collect::<Result<Vec<_>>>()?;
    ensure!(!networks.is_empty(), "at least one network is required");
    let f = File::open(&panel_path).with_context(|| format!("opening panel {panel_path}"))?;
    let panel = cio::read_panel(BufReader::new(f), &networks)?;
    if covariates.0.contains(&0) {
        bail!("covariate columns are numbered from 1");
    }
    let spec = CfModelSpec {
        alter_terms: terms.0.iter().map(|t| t.parse::<AlterTerm>()).collect::<contagion::Result<_>>()?,
        ego_lag: !no_ego_lag,
        covariates: covariates.0.iter().map(|c| c - 1).collect(),
        stratum,
    };
    let fit = fit_cf_model(&panel, &spec)?;
    s.note("converged", fit.converged);
    s.note("iterations", fit.iterations);
    let meta = s.finish()?;
    Ok(vec![out.write(&name, &meta, |w| fit.write_csv(w))?])
}

fn processes(s: &mut Settings, p: ProcessArgs) -> Result<(SarParams<f64>, SarParams<f64>, f64)> {
    let sd = s.get("noise_sd", p.noise_sd, 1.0)?;
    let asym = SarParams::new(s.get("asym_rho1", p.asym_rho1, 0.4)?, s.get("asym_rho2", p.asym_rho2, 0.0)?, sd);
    let sym = SarParams::new(s.get("sym_rho1", p.sym_rho1, 0.2)?, s.get("sym_rho2", p.sym_rho2, 0.2)?, sd);
    Ok((asym, sym, s.get("threshold", p.threshold, 0.0)?))
}

fn asymmetry_grid(mut s: Settings, seed: u64, out: &OutDir, a: crate::GridArgs) -> Result<Vec<PathBuf>> {
    let d = AsymmetryGridConfig::<f64>::default();
    let n = s.get("n", a.n, d.n)?;
    let outdegree = s.get("outdegree", a.outdegree, d.outdegree)?;
    let sender_rewires = s.get("sender_rewires", a.sender_rewires, List(d.sender_rewires))?.0;
    let receiver_rewires = s.get("receiver_rewires", a.receiver_rewires, List(d.receiver_rewires))?.0;
    let networks_per_cell = s.get("networks_per_cell", a.networks_per_cell, d.networks_per_cell)?;
    let outcomes_per_network = s.get("outcomes_per_network", a.outcomes_per_network, d.outcomes_per_network)?;
    let (sar_asymmetric, sar_symmetric, threshold) = processes(&mut s, a.process)?;
    let name = s.get("out", a.out, "asymmetry_grid.csv".to_string())?;
    let meta = s.finish()?;
    let config = AsymmetryGridConfig {
        n,
        outdegree,
        sender_rewires,
        receiver_rewires,
        networks_per_cell,
        outcomes_per_network,
        sar_asymmetric,
        sar_symmetric,
        threshold,
        seed,
    };
    let result = run_asymmetry_grid(&config)?;
    Ok(vec![out.write(&name, &merge(config.metadata(), &meta), |w| result.write_csv(w))?])
}

fn wave_asymmetry(mut s: Settings, seed: u64, out: &OutDir, a: crate::WaveArgs) -> Result<Vec<PathBuf>> {
    let files = s.get_opt("networks", a.networks)?;
    let nodes = s.get_opt("nodes", a.nodes)?;
    let outcomes_per_network = s.get("outcomes_per_network", a.outcomes_per_network, 1000usize)?;
    let (sar_asymmetric, sar_symmetric, threshold) = processes(&mut s, a.process)?;
    let pd = PseudoWaveSpec::default();
    let networks = match files {
        Some(List(paths)) => {
            for key in ["n", "outdegree", "receiver_rewires", "sender_rewires", "waves"] {
                s.get_opt::<usize>(key, None)?;
            }
            ensure!(
                a.n.is_none() && a.outdegree.is_none() && a.receiver_rewires.is_none() && a.sender_rewires.is_none() && a.waves.is_none(),
                "stand-in network options cannot be combined with --networks"
            );
            paths.iter().map(|p| read_network(Path::new(p), nodes)).collect::<Result<Vec<_>>>()?
        }
        None => {
            let spec = PseudoWaveSpec {
                n: s.get("n", a.n, pd.n)?,
                outdegree: s.get("outdegree", a.outdegree, pd.outdegree)?,
                receiver_rewires: s.get("receiver_rewires", a.receiver_rewires, pd.receiver_rewires)?,
                sender_rewires: s.get("sender_rewires", a.sender_rewires, pd.sender_rewires)?,
                waves: s.get("waves", a.waves, pd.waves)?,
            };
            pseudo_wave_networks(&spec, seed)?
        }
    };
    let name = s.get("out", a.out, "wave_asymmetry.csv".to_string())?;
    let meta = s.finish()?;
    let config = WaveAsymmetryConfig { outcomes_per_network, sar_asymmetric, sar_symmetric, threshold, seed };
    let rows = run_wave_asymmetry(&networks, &config)?;
    Ok(vec![out.write(&name, &merge(config.metadata(), &meta), |w| write_wave_csv(w, &rows))?])
}

fn threshold_sweep(mut s: Settings, seed: u64, out: &OutDir, a: crate::SweepArgs) -> Result<Vec<PathBuf>> {
    let d = ThresholdSweepConfig::<f64>::default();
    let config = ThresholdSweepConfig {
        n: s.get("n", a.n, d.n)?,
        outdegree: s.get("outdegree", a.outdegree, d.outdegree)?,
        receiver_rewires: s.get("receiver_rewires", a.receiver_rewires, d.receiver_rewires)?,
        sender_rewires: s.get("sender_rewires", a.sender_rewires, d.sender_rewires)?,
        waves: s.get("waves", a.waves, d.waves)?,
        sar: SarParams::new(
            s.get("rho1", a.rho1, d.sar.rho1)?,
            s.get("rho2", a.rho2, d.sar.rho2)?,
            s.get("noise_sd", a.noise_sd, d.sar.noise_sd)?,
        ),
        persistence: s.get("persistence", a.persistence, d.persistence)?,
        mean: s.get("mean", a.mean, d.mean)?,
        thresholds: s.get("thresholds", a.thresholds, List(d.thresholds))?.0,
        seed,
    };
    let name = s.get("out", a.out, "threshold_sweep.csv".to_string())?;
    let meta = s.finish()?;
    let result = config.run()?;
    Ok(vec![out.write(&name, &merge(config.metadata(), &meta), |w| result.write_csv(w))?])
}

/// Study metadata followed by the resolved command-line settings.
fn merge(mut base: Metadata, extra: &Metadata) -> Metadata {
    for (k, v) in extra.entries() {
        base.set(k, v);
    }
    base
}
