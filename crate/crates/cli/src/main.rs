use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

mod commands;
mod output;

#[derive(Debug, Parser)]
#[command(name = "jumpspec", version, about = "Spectral diagnostics for the Laplacian with a nonlocal jump condition")]
struct Cli {
    /// Output directory; created if missing.
    #[arg(long, global = true, default_value = "jumpspec-out")]
    out: PathBuf,
    /// Worker thread cap; falls back to JUMPSPEC_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate eigenvalues and tabulate the three families.
    Spectrum(SpectrumArgs),
    /// Run a named contract suite.
    Verify(VerifyArgs),
    /// Apply the resolvent to a test function.
    Resolvent(ResolventArgs),
    /// Quasi-self-adjointness residual and positivity of the metric.
    MetricCheck(MetricArgs),
    /// Projection norms, blow-up along convergents, rational bounds.
    Basis(BasisArgs),
    /// Monte Carlo run of the restarted Brownian motion.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Parameter expression, e.g. 1/3 or "sqrt(2)-1".
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, default_value_t = 100.0)]
    pub lambda_max: f64,
    /// Also write curves.csv over --a-grid.
    #[arg(long)]
    pub curves: bool,
    /// lo:hi:step
    #[arg(long, allow_hyphen_values = true, default_value = "-0.95:0.95:0.01")]
    pub a_grid: String,
    #[arg(long, default_value_t = 4)]
    pub m_max: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    /// spectrum, gram, resolvent, metric, projections, basis, sim or all.
    #[arg(long, default_value = "all")]
    pub suite: jumpspec::verify::Suite,
}

#[derive(Debug, Args)]
pub struct ResolventArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    /// Spectral parameter as "re,im".
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: String,
    /// const, sin:K, cos:K, bump:X0,W or random.
    #[arg(long, default_value = "const")]
    pub f: String,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Also write singular values of an n-point discretisation.
    #[arg(long)]
    pub svd: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    /// eig:N for the N-th eigenfunction, random for a seeded D(H) element.
    #[arg(long, default_value = "eig:1")]
    pub psi: String,
    /// Random functions in the positivity scan.
    #[arg(long, default_value_t = 100)]
    pub probes: usize,
    /// Convergents in the Rayleigh sequence (irrational a only).
    #[arg(long, default_value_t = 8)]
    pub convergents: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, default_value_t = 400.0)]
    pub lambda_max: f64,
    /// Class-0 norms along convergent denominators (irrational a).
    #[arg(long)]
    pub blowup: bool,
    #[arg(long, default_value_t = 10)]
    pub convergents: usize,
    /// Index range for the rational bound check.
    #[arg(long, default_value_t = 1000)]
    pub m_max: u64,
    /// Truncated expansions of random probes in the first N pairs.
    #[arg(long)]
    pub completeness: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    /// Time units per path after burn-in.
    #[arg(long, default_value_t = 100.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 8)]
    pub paths: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 32)]
    pub bins: usize,
    #[arg(long)]
    pub burn_in: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<f64>,
    /// Plain threshold crossing instead of the bridge correction.
    #[arg(long)]
    pub no_bridge: bool,
    /// Also estimate the spectral gap from relaxation of the lambda = 4 mode.
    #[arg(long)]
    pub gap: bool,
    /// Paths in the relaxation ensemble.
    #[arg(long, default_value_t = 20_000)]
    pub gap_paths: usize,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] jumpspec::Error),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    ContractFailed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use jumpspec::{Error as E, ResolventError as R, SimError, SpectrumError as S};
        // rejected inputs count as usage errors
        match self {
            CliError::Usage(_)
            | CliError::Lib(E::Param(_))
            | CliError::Lib(E::Sim(SimError::InvalidConfig(_)))
            | CliError::Lib(E::Spectrum(S::BadGrid(_) | S::GridOutOfRange(_) | S::InvalidLambdaMax(_)))
            | CliError::Lib(E::Resolvent(R::PoleAtEigenvalue(_) | R::PoleAtDirichletEigenvalue(_) | R::DenominatorVanishes(_))) => 2,
            _ => 1,
        }
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    if let Some(n) = flag {
        return Ok(Some(n));
    }
    match std::env::var("JUMPSPEC_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("JUMPSPEC_THREADS must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = thread_count(cli.threads)? {
        if n == 0 {
            return Err(CliError::Usage("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let out = output::OutDir::create(&cli.out)?;
    match cli.command {
        Command::Spectrum(a) => commands::spectrum(a, out),
        Command::Verify(a) => commands::verify(a, out),
        Command::Resolvent(a) => commands::resolvent(a, out),
        Command::MetricCheck(a) => commands::metric_check(a, out),
        Command::Basis(a) => commands::basis(a, out),
        Command::Simulate(a) => commands::simulate(a, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jumpspec: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
