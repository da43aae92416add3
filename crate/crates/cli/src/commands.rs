use anyhow::{bail, Context, Result};
use surf_core::distributions::l1_error;
use surf_core::merge::{surf, SurfConfig};
use surf_core::polynomial::PiecewiseEstimate;
use surf_core::sample_file::{is_binary, read_samples, write_samples};
use surf_core::samples::subsample;

use crate::args::{BenchArgs, EvalArgs, FitArgs, SynthArgs, VerifyArgs};
use crate::bench::{self, resolve_spec, BenchPlan};
use crate::nodes;
use crate::output::{read_to_string, write_out};

/// `fit` refuses fewer samples than this.
pub const MIN_FIT_SAMPLES: usize = 7;

/// Runs `f` on a pool of `jobs` threads, or the global pool.
fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        Some(k) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()?
            .install(f)),
        None => Ok(f()),
    }
}

pub fn fit(args: &FitArgs) -> Result<()> {
    let cfg = args.tuning.resolve(args.degree)?;
    let raw = read_samples(&args.samples)
        .with_context(|| format!("reading {}", args.samples.display()))?;
    if raw.len() < MIN_FIT_SAMPLES {
        bail!("need at least {MIN_FIT_SAMPLES} samples, got {}", raw.len());
    }
    let s = subsample(&raw, cfg.seed)?;
    let est = with_jobs(args.tuning.jobs, || surf(&s, &cfg))??;
    let json = est.to_json()?;
    write_out(args.out.as_deref(), |w| Ok(writeln!(w, "{json}")?))?;

    let (lo, hi) = est.hull();
    let summary = format!(
        "{} pieces on [{lo}, {hi}], n = {} ({} of {} samples used), gamma = {}\nconfig: {}",
        est.pieces().len(),
        s.n(),
        s.n() - 1,
        raw.len(),
        cfg.gamma_for(s.n())?,
        serde_json::to_string(&cfg)?,
    );
    // keep stdout clean when it carries the estimate
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    let (_, spec) = resolve_spec(&args.spec)?;
    let values = spec.sample(args.count, args.seed)?;
    let binary = args.out.as_deref().is_some_and(is_binary);
    write_out(args.out.as_deref(), |w| {
        Ok(write_samples(w, &values, binary)?)
    })
}

pub fn bench(args: &BenchArgs) -> Result<()> {
    let cfg: SurfConfig = args.tuning.resolve(None)?;
    let specs = args
        .spec
        .iter()
        .map(|s| resolve_spec(s))
        .collect::<Result<Vec<_>>>()?;
    let mut plan = BenchPlan::new(specs, args.degree.clone(), args.n.clone());
    plan.trials = args.trials;
    plan.seed = cfg.seed;
    plan.jobs = args
        .tuning
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |k| k.get()));
    plan.timing = !args.no_timing;
    plan.config = cfg;
    let rows = bench::run_bench(&plan)?;
    write_out(args.out.as_deref(), |w| bench::write_csv(w, &rows))
}

pub fn verify_nodes(args: &VerifyArgs) -> Result<()> {
    if args.min_degree > args.max_degree {
        bail!(
            "empty degree range {}..={}",
            args.min_degree,
            args.max_degree
        );
    }
    let grid = args.optimize.then_some(args.grid);
    let rows = nodes::verify_nodes(args.min_degree..=args.max_degree, grid)?;
    write_out(args.out.as_deref(), |w| nodes::write_csv(w, &rows))
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    if args.points < 2 {
        bail!("--points must be at least 2");
    }
    let est = PiecewiseEstimate::from_json(&read_to_string(&args.estimate)?)
        .with_context(|| format!("parsing {}", args.estimate.display()))?;
    let spec = args.spec.as_deref().map(resolve_spec).transpose()?;
    let (lo, hi) = est.hull();
    let last = (args.points - 1) as f64;
    write_out(args.out.as_deref(), |w| {
        let mut out = csv::Writer::from_writer(w);
        match &spec {
            Some(_) => out.write_record(["x", "estimate", "true_pdf"])?,
            None => out.write_record(["x", "estimate"])?,
        }
        for i in 0..args.points {
            let x = if i + 1 == args.points {
                hi
            } else {
                lo + (hi - lo) * i as f64 / last
            };
            let mut rec = vec![x.to_string(), est.eval(x).to_string()];
            if let Some((_, s)) = &spec {
                rec.push(s.pdf(x).to_string());
            }
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    })?;
    if let Some((name, s)) = &spec {
        eprintln!("l1 error against {name}: {}", l1_error(&est, s)?);
    }
    Ok(())
}
