use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use surf_core::interp::MassRule;
use surf_core::merge::{SurfConfig, THEORY_ALPHA};

/// Piecewise polynomial density estimation.
#[derive(Debug, Parser)]
#[command(name = "surf", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a density to a sample file and write the estimate as JSON.
    Fit(FitArgs),
    /// Draw samples from a builtin or JSON mixture.
    Synth(SynthArgs),
    /// Mean and spread of the ℓ1 error over repeated sample-fit-score trials.
    Bench(BenchArgs),
    /// Recompute the node constants and compare with the published table.
    VerifyNodes(VerifyArgs),
    /// Evaluate an estimate on a grid, optionally next to a true density.
    Eval(EvalArgs),
}

/// Estimator knobs shared by `fit` and `bench`.
#[derive(Debug, Clone, Default, Args)]
pub struct Tuning {
    /// JSON config file; flags given on the command line override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Penalty multiplier [default: 0.25].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Use alpha = 4.5, the value the error guarantee needs.
    #[arg(long, conflicts_with = "alpha")]
    pub theory_alpha: bool,
    /// Failure probability in the default epsilon [default: 0.1].
    #[arg(long)]
    pub delta: Option<f64>,
    /// Override epsilon = sqrt(5 ln(n / delta) / n).
    #[arg(long)]
    pub eps: Option<f64>,
    /// Fit with masses n_J / n instead of (n_J + 1) / n.
    #[arg(long)]
    pub raw_mass: bool,
    /// Stop merging once t cells remain (power of two).
    #[arg(long, value_name = "T")]
    pub halt_t: Option<usize>,
    /// Seed for subsampling and synthetic draws [default: 0].
    #[arg(long, env = "SURF_SEED")]
    pub seed: Option<u64>,
    /// Worker threads; 1 runs sequentially. Defaults to all cores.
    #[arg(long, short = 'j')]
    pub jobs: Option<usize>,
}

impl Tuning {
    /// The config file (or defaults) with flag overrides applied.
    pub fn resolve(&self, degree: Option<usize>) -> Result<SurfConfig> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = crate::output::read_to_string(p)?;
                serde_json::from_str::<SurfConfig>(&text)
                    .with_context(|| format!("parsing config {}", p.display()))?
            }
            None => SurfConfig::default(),
        };
        if let Some(d) = degree {
            cfg.degree = d;
        }
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if self.theory_alpha {
            cfg.alpha = THEORY_ALPHA;
        }
        if let Some(d) = self.delta {
            cfg.delta = d;
        }
        if self.eps.is_some() {
            cfg.epsilon = self.eps;
        }
        if self.raw_mass {
            cfg.mass_rule = MassRule::Raw;
        }
        if self.halt_t.is_some() {
            cfg.halt_t = self.halt_t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        match self.jobs {
            Some(0) => anyhow::bail!("--jobs must be at least 1"),
            Some(1) => cfg.parallel = false,
            Some(_) => cfg.parallel = true,
            None => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// One number per line, or raw little-endian f64 for .f64/.bin files.
    pub samples: PathBuf,
    /// Polynomial degree, at most 8 [default: 1].
    #[arg(long, short)]
    pub degree: Option<usize>,
    #[command(flatten)]
    pub tuning: Tuning,
    /// Estimate JSON path; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Builtin name or JSON component list.
    pub spec: String,
    /// Number of samples.
    #[arg(long, short = 'n')]
    pub count: usize,
    #[arg(long, env = "SURF_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output file, binary for .f64/.bin; stdout text when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Builtin names or JSON files, comma-separated or repeated.
    #[arg(long, required = true, value_delimiter = ',')]
    pub spec: Vec<String>,
    /// Degrees to fit.
    #[arg(long, short, value_delimiter = ',', default_value = "1")]
    pub degree: Vec<usize>,
    /// Sample budgets (powers of two); each trial draws n - 1 samples.
    #[arg(long, short = 'n', required = true, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[command(flatten)]
    pub tuning: Tuning,
    /// Write 0 in the wall-time column so output is reproducible byte for byte.
    #[arg(long)]
    pub no_timing: bool,
    /// CSV path; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub min_degree: usize,
    #[arg(long, default_value_t = 8)]
    pub max_degree: usize,
    /// Also search for optimal nodes.
    #[arg(long)]
    pub optimize: bool,
    /// Scan points for the node search.
    #[arg(long, default_value_t = 2001)]
    pub grid: usize,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Estimate JSON written by `fit`.
    pub estimate: PathBuf,
    /// True density to print alongside and score against.
    #[arg(long)]
    pub spec: Option<String>,
    /// Grid points across the hull.
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}
