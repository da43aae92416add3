//! Monte Carlo benchmark: sample, fit, score against the true density.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use surf_core::distributions::{builtin, builtin_names, l1_error, MixtureSpec};
use surf_core::merge::{surf, SurfConfig};
use surf_core::samples::sort_samples;

/// Column order is the CSV header: `spec,degree,n,trials,mean_l1,std_l1,wall_time_s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub spec: String,
    pub degree: usize,
    pub n: usize,
    pub trials: usize,
    pub mean_l1: f64,
    pub std_l1: f64,
    pub wall_time_s: f64,
}

pub const HEADER: &str = "spec,degree,n,trials,mean_l1,std_l1,wall_time_s";

/// A builtin name, or a path to a JSON component list named by its stem.
pub fn resolve_spec(arg: &str) -> Result<(String, MixtureSpec)> {
    if builtin_names().contains(&arg) {
        return Ok((arg.to_string(), builtin(arg)?));
    }
    let path = Path::new(arg);
    if !path.exists() {
        bail!(
            "unknown spec {arg:?}: not a builtin ({}) and no such file",
            builtin_names().join(", ")
        );
    }
    let text = crate::output::read_to_string(path)?;
    let spec = MixtureSpec::from_json(&text).with_context(|| format!("parsing {arg}"))?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(arg)
        .to_string();
    Ok((name, spec))
}

#[derive(Debug, Clone)]
pub struct BenchPlan {
    pub specs: Vec<(String, MixtureSpec)>,
    pub degrees: Vec<usize>,
    pub ns: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Degree is taken from `degrees`; the rest applies to every fit.
    pub config: SurfConfig,
    pub jobs: usize,
    /// Zero the wall-time column so repeated runs are byte-identical.
    pub timing: bool,
}

impl BenchPlan {
    pub fn new(specs: Vec<(String, MixtureSpec)>, degrees: Vec<usize>, ns: Vec<usize>) -> Self {
        Self {
            specs,
            degrees,
            ns,
            trials: 10,
            seed: 0,
            config: SurfConfig::default(),
            jobs: 1,
            timing: true,
        }
    }
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one trial. It ignores the degree, so every degree is scored on
/// the same draws.
pub fn trial_seed(seed: u64, spec: &str, n: usize, trial: usize) -> u64 {
    let mut h = mix(seed);
    for b in spec.bytes() {
        h = mix(h ^ b as u64);
    }
    h = mix(h ^ n as u64);
    mix(h ^ trial as u64)
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, var.sqrt())
}

pub fn run_trial(
    spec: &MixtureSpec,
    name: &str,
    n: usize,
    trial: usize,
    seed: u64,
    cfg: &SurfConfig,
) -> Result<f64> {
    let raw = spec.sample(n - 1, trial_seed(seed, name, n, trial))?;
    let s = sort_samples(&raw, n)?;
    let est = surf(&s, cfg)?;
    Ok(l1_error(&est, spec)?)
}

/// One row per `(spec, degree, n)`, sorted in that order.
pub fn run_bench(plan: &BenchPlan) -> Result<Vec<BenchRow>> {
    if plan.trials == 0 {
        bail!("trials must be at least 1");
    }
    if plan.specs.is_empty() || plan.degrees.is_empty() || plan.ns.is_empty() {
        bail!("bench needs at least one spec, degree and n");
    }
    for &n in &plan.ns {
        if n < 2 || !n.is_power_of_two() {
            bail!("n = {n} is not a power of two (n >= 2 required)");
        }
    }
    let mut specs = plan.specs.clone();
    specs.sort_by(|a, b| a.0.cmp(&b.0));
    let mut degrees = plan.degrees.clone();
    degrees.sort_unstable();
    degrees.dedup();
    let mut ns = plan.ns.clone();
    ns.sort_unstable();
    ns.dedup();

    let jobs = plan.jobs.max(1);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let mut rows = Vec::new();
    for (name, spec) in &specs {
        for &d in &degrees {
            let cfg = SurfConfig {
                degree: d,
                parallel: jobs > 1,
                ..plan.config.clone()
            };
            cfg.validate()?;
            for &n in &ns {
                let start = Instant::now();
                let errs = pool.install(|| {
                    (0..plan.trials)
                        .into_par_iter()
                        .map(|t| run_trial(spec, name, n, t, plan.seed, &cfg))
                        .collect::<Result<Vec<f64>>>()
                })?;
                let wall = start.elapsed().as_secs_f64();
                let (mean_l1, std_l1) = mean_std(&errs);
                rows.push(BenchRow {
                    spec: name.clone(),
                    degree: d,
                    n,
                    trials: plan.trials,
                    mean_l1,
                    std_l1,
                    wall_time_s: if plan.timing { wall } else { 0.0 },
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_csv(w: &mut dyn Write, rows: &[BenchRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    if rows.is_empty() {
        out.write_record(HEADER.split(','))?;
    }
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
