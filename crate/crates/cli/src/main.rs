//! `contagion`: seeded, config-driven front end for the network generators,
//! outcome models, estimators and Monte-Carlo studies.

mod commands;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use settings::List;

#[derive(Parser, Debug)]
#[command(name = "contagion", version, about = "Directional peer-effect simulation and inference")]
pub struct Cli {
    /// Root seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for result files and their `.meta` sidecars.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// `key=value` parameter file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Regular directed network with optional receiver and sender rewiring.
    GenNet(GenNetArgs),
    /// Draw outcomes from a generative model.
    #[command(subcommand)]
    Simulate(Simulate),
    /// Fit an estimator and write its coefficient table.
    #[command(subcommand)]
    Fit(Fit),
    /// Run a Monte-Carlo study.
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Args, Debug)]
pub struct NetInput {
    /// Edge-list CSV (`src,dst,weight`).
    #[arg(long)]
    pub net: Option<PathBuf>,
    /// Node count; inferred from the largest index when omitted.
    #[arg(long)]
    pub nodes: Option<usize>,
}

#[derive(Args, Debug)]
pub struct GenNetArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub outdegree: Option<usize>,
    #[arg(long)]
    pub receiver_rewires: Option<usize>,
    #[arg(long)]
    pub sender_rewires: Option<usize>,
    /// Output file name inside `--out-dir`.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Simulate {
    /// Continuous SAR outcome, optionally also dichotomized.
    Sar(SarArgs),
    /// Binary outcome from the network Ising model by Gibbs sampling.
    Ising(IsingArgs),
    /// Binary panel from the logistic transition generator.
    Panel(PanelArgs),
}

#[derive(Args, Debug)]
pub struct SarArgs {
    #[command(flatten)]
    pub input: NetInput,
    #[arg(long, allow_negative_numbers = true)]
    pub rho1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho2: Option<f64>,
    #[arg(long)]
    pub noise_sd: Option<f64>,
    /// Also write `y = 1[z > threshold]`.
    #[arg(long, allow_negative_numbers = true)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct IsingArgs {
    #[command(flatten)]
    pub input: NetInput,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub sweeps: Option<usize>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct PanelArgs {
    #[command(flatten)]
    pub input: NetInput,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_ego: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_lag: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma_contemp: Option<f64>,
    /// Covariate coefficients; covariates are drawn iid standard normal.
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<List<f64>>,
    #[arg(long)]
    pub prevalence: Option<f64>,
    #[arg(long)]
    pub waves: Option<usize>,
    #[arg(long)]
    pub sweeps: Option<usize>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Fit {
    /// Least squares on a design CSV.
    Ols(DesignArgs),
    /// Logistic regression on a design CSV with a 0/1 response.
    Logistic(DesignArgs),
    /// Forward/reverse exposure regression.
    Qad(QadArgs),
    /// SAR maximum likelihood.
    SarMle(SarMleArgs),
    /// Pooled transition logit on a panel.
    Cf(CfArgs),
}

#[derive(Args, Debug)]
pub struct DesignArgs {
    /// CSV with a header row; every non-response column is a predictor.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Response column name.
    #[arg(long)]
    pub response: Option<String>,
    /// Omit the intercept column.
    #[arg(long)]
    pub no_intercept: bool,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct QadArgs {
    #[command(flatten)]
    pub input: NetInput,
    /// Outcome CSV (`node,value` or `node,y`).
    #[arg(long)]
    pub y: Option<PathBuf>,
    /// linear | logistic
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct SarMleArgs {
    #[command(flatten)]
    pub input: NetInput,
    /// Outcome CSV (`node,value`).
    #[arg(long)]
    pub z: Option<PathBuf>,
    /// one-rho | two-rho
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct CfArgs {
    /// Panel CSV (`wave,node,y,x1..xp`).
    #[arg(long)]
    pub panel: Option<PathBuf>,
    /// One edge list shared by all waves, or one per wave.
    #[arg(long)]
    pub nets: Option<List<String>>,
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Alter terms from contemporaneous, lag1, lag2, sum, difference.
    #[arg(long)]
    pub terms: Option<List<String>>,
    /// Drop the ego's own lagged outcome.
    #[arg(long)]
    pub no_ego_lag: bool,
    /// 1-based covariate columns to include.
    #[arg(long)]
    pub covariates: Option<List<usize>>,
    /// all | adoption | rejection
    #[arg(long)]
    pub stratum: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Experiment {
    /// Mean forward−reverse difference over a rewiring grid.
    AsymmetryGrid(GridArgs),
    /// Fraction of positive differences per network.
    WaveAsymmetry(WaveArgs),
    /// Transition-model coefficients across dichotomization thresholds.
    ThresholdSweep(SweepArgs),
}

#[derive(Args, Debug)]
pub struct ProcessArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub asym_rho1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub asym_rho2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sym_rho1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sym_rho2: Option<f64>,
    #[arg(long)]
    pub noise_sd: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub threshold: Option<f64>,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub outdegree: Option<usize>,
    #[arg(long)]
    pub sender_rewires: Option<List<usize>>,
    #[arg(long)]
    pub receiver_rewires: Option<List<usize>>,
    #[arg(long)]
    pub networks_per_cell: Option<usize>,
    #[arg(long)]
    pub outcomes_per_network: Option<usize>,
    #[command(flatten)]
    pub process: ProcessArgs,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct WaveArgs {
    /// Edge lists, one per wave. Without it, rewired regular networks are
    /// generated as stand-ins.
    #[arg(long)]
    pub networks: Option<List<String>>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub outcomes_per_network: Option<usize>,
    #[command(flatten)]
    pub process: ProcessArgs,
    /// Stand-in networks: node count.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub outdegree: Option<usize>,
    #[arg(long)]
    pub receiver_rewires: Option<usize>,
    #[arg(long)]
    pub sender_rewires: Option<usize>,
    #[arg(long)]
    pub waves: Option<usize>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub outdegree: Option<usize>,
    #[arg(long)]
    pub receiver_rewires: Option<usize>,
    #[arg(long)]
    pub sender_rewires: Option<usize>,
    #[arg(long)]
    pub waves: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho2: Option<f64>,
    #[arg(long)]
    pub noise_sd: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub persistence: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mean: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub thresholds: Option<List<f64>>,
    #[arg(long)]
    pub out: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
