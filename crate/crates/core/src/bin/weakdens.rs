//! Command-line harness: simulate processes, evaluate density estimates,
//! print rate tables, verify the moment inequality, and run full slope
//! experiments.

// `!(x > 0.0)` rejects NaN where `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use weakdens::dependence::verify_moment_inequality_with_slack;
use weakdens::dependence::DependenceBound;
use weakdens::estimators::estimate_grid;
use weakdens::harness::config::{
    coefficient_from_str, decay_from_str, estimator_from_str, grid_from_str, theorem_from_str,
};
use weakdens::harness::csvio::{write_density_csv, write_path_csv};
use weakdens::harness::{process_preset, read_config, run_experiment, write_csv, ExperimentConfig};
use weakdens::processes::{ProcessKind, ProcessSpec};
use weakdens::rates::{check_admissibility, optimal_bandwidth, rate_exponent, RateParams};
use weakdens::{Error, Result};

#[derive(Parser)]
#[command(
    name = "weakdens",
    version,
    about = "Simulate weakly dependent series, estimate their density, and check convergence rates"
)]
struct Cli {
    /// Root RNG seed; overrides the config-file seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (0 = all cores); overrides the config-file value.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path and export it as `index,value` CSV.
    Simulate {
        /// Config file providing the [process] section.
        #[arg(long, conflicts_with = "process")]
        config: Option<PathBuf>,
        /// Stock process name (doubling, linear-gaussian, iid-uniform,
        /// iid-gaussian, iid-cosine, bilinear-arch).
        #[arg(long)]
        process: Option<String>,
        /// Path length.
        #[arg(short, long, default_value_t = 1024)]
        n: usize,
    },

    /// Estimate the marginal density on a grid and export `x,density` CSV.
    Estimate {
        #[arg(long, conflicts_with = "process")]
        config: Option<PathBuf>,
        #[arg(long)]
        process: Option<String>,
        #[arg(short, long, default_value_t = 4096)]
        n: usize,
        /// Estimator: compact2, compact4, fejer, haar.
        #[arg(long, default_value = "compact2")]
        estimator: String,
        /// Bandwidth index m.
        #[arg(short, long, conflicts_with = "bandwidth")]
        m: Option<u32>,
        /// Real bandwidth h; converted via m = round(h^-d).
        #[arg(long)]
        bandwidth: Option<f64>,
        /// Evaluation grid lo:hi:count.
        #[arg(long, default_value = "0:1:101")]
        grid: String,
    },

    /// Print rate exponents, the bandwidth schedule, and admissibility.
    Rates {
        /// t1, t2, t3mean or t3as.
        #[arg(long)]
        theorem: String,
        /// Regularity of the marginal density.
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 1)]
        d: u32,
        /// eta or phitilde.
        #[arg(long, default_value = "eta")]
        coefficient: String,
        /// geometric(a,b) or riemannian(a).
        #[arg(long)]
        decay: String,
        #[arg(long, default_value_t = 1.0)]
        decay_constant: f64,
        /// Moment order of the target norm.
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        /// Sample sizes to tabulate m*_n at.
        #[arg(short, long)]
        n: Vec<usize>,
    },

    /// Monte Carlo check of the moment inequality for one configuration.
    VerifyMoment {
        #[arg(long, conflicts_with = "process")]
        config: Option<PathBuf>,
        #[arg(long)]
        process: Option<String>,
        /// Even moment order (2 or 4).
        #[arg(short, long, default_value_t = 2)]
        q: u32,
        /// Window length (<= 64).
        #[arg(short, long, default_value_t = 32)]
        n: usize,
        /// Bandwidth index.
        #[arg(short, long, default_value_t = 4)]
        m: u32,
        #[arg(long, default_value_t = 5000)]
        replicates: usize,
        /// Evaluation point; defaults to 0.5 for [0,1]-valued processes and
        /// 0 otherwise.
        #[arg(short, long)]
        x: Option<f64>,
        #[arg(long, default_value = "compact2")]
        estimator: String,
        /// Monte Carlo slack factor on the comparison.
        #[arg(long, default_value_t = 0.25)]
        slack: f64,
    },

    /// Run a slope experiment described by a config file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Also write a (log n, log error) scatter with the fitted line.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

fn load_process(
    config: &Option<PathBuf>,
    preset: &Option<String>,
    seed_override: Option<u64>,
) -> Result<(ProcessSpec, u64)> {
    let (spec, seed) = match (config, preset) {
        (Some(path), _) => {
            let config = read_config(path)?;
            (config.process, config.seed)
        }
        (None, Some(name)) => (process_preset(name)?, 0),
        (None, None) => (process_preset("doubling")?, 0),
    };
    Ok((spec, seed_override.unwrap_or(seed)))
}

fn open_out(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn default_eval_point(spec: &ProcessSpec) -> f64 {
    use weakdens::processes::InnovationSpec;
    match spec.kind {
        ProcessKind::Doubling { .. } | ProcessKind::Sampled { .. } => 0.5,
        ProcessKind::IidBaseline { law: InnovationSpec::Uniform { lo, hi } } => 0.5 * (lo + hi),
        _ => 0.0,
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(workers) = cli.workers {
        if workers > 0 {
            // Global pool for the subcommands that use it directly; results
            // do not depend on the count.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
        }
    }

    match cli.command {
        Command::Simulate { config, process, n } => {
            let (spec, seed) = load_process(&config, &process, cli.seed)?;
            let path = spec.simulate(n, seed)?;
            write_path_csv(&path.values, open_out(&cli.out)?)?;
            eprintln!("simulated {} values of {} (seed {seed})", path.len(), path.spec_id);
        }

        Command::Estimate { config, process, n, estimator, m, bandwidth, grid } => {
            let (spec, seed) = load_process(&config, &process, cli.seed)?;
            let kernel = estimator_from_str(&estimator)?;
            let m = match (m, bandwidth) {
                (Some(m), _) => m,
                (None, Some(h)) => {
                    if !(h > 0.0) {
                        return Err(Error::domain(format!("bandwidth h = {h} must be > 0")));
                    }
                    ((h.powi(-(kernel.d as i32))).round() as i64).max(1) as u32
                }
                (None, None) => 8,
            };
            let grid = grid_from_str(&grid)?;
            let path = spec.simulate(n, seed)?;
            let xs = grid.values();
            let mut ests = estimate_grid(&path, &kernel, m, &xs);
            if let Some(rho) = spec.regularity {
                ests = ests.into_iter().map(|e| e.with_bias_bound(rho, 1.0)).collect();
            }
            let pairs: Vec<(f64, f64)> = xs.iter().zip(&ests).map(|(x, e)| (*x, e.value)).collect();
            write_density_csv(&pairs, open_out(&cli.out)?)?;
            eprintln!(
                "estimated {} at {} grid points (n = {n}, m = {m}, seed {seed})",
                kernel.kind, grid.points
            );
            if let Some(bound) = ests.first().and_then(|e| e.bias_bound) {
                eprintln!("nominal bias envelope m^-rho = {bound:.3e}");
            }
        }

        Command::Rates { theorem, rho, d, coefficient, decay, decay_constant, q, n } => {
            let params = RateParams {
                rho,
                d,
                decay: DependenceBound::new(
                    coefficient_from_str(&coefficient)?,
                    decay_from_str(&decay)?,
                    decay_constant,
                )?,
                q,
                theorem: theorem_from_str(&theorem)?,
            };
            let mut out = open_out(&cli.out)?;
            let report = check_admissibility(&params);
            writeln!(out, "admissibility:")?;
            writeln!(out, "{report}")?;
            match rate_exponent(&params) {
                Ok(rr) => {
                    writeln!(
                        out,
                        "rate: error ~ n^-{:.6} * log^{:.6}(n)",
                        rr.exponent, rr.log_power
                    )?;
                    writeln!(
                        out,
                        "bandwidth schedule: m*_n = n^{:.6} * log^{:.6}(n)",
                        rr.delta, rr.gamma
                    )?;
                    let ns = if n.is_empty() { weakdens::harness::default_n_grid() } else { n };
                    for n in ns {
                        writeln!(out, "  m*({n}) = {}", optimal_bandwidth(&params, n)?)?;
                    }
                }
                Err(e) => writeln!(out, "rate: unavailable ({e})")?,
            }
        }

        Command::VerifyMoment { config, process, q, n, m, replicates, x, estimator, slack } => {
            let (spec, seed) = load_process(&config, &process, cli.seed)?;
            let kernel = estimator_from_str(&estimator)?;
            let x = x.unwrap_or_else(|| default_eval_point(&spec));
            let report = verify_moment_inequality_with_slack(
                &spec, x, &kernel, m, q, n, replicates, seed, slack,
            )?;
            let mut out = open_out(&cli.out)?;
            writeln!(out, "process:    {spec}")?;
            writeln!(out, "kernel:     {} (m = {m}), x = {x}", kernel.kind)?;
            writeln!(out, "q = {q}, n = {n}, replicates = {replicates}, seed = {seed}")?;
            for (k, v) in &report.v_hat {
                writeln!(out, "V_{k} = {v:.6e}")?;
            }
            writeln!(out, "lhs  E|sum Z|^q        = {:.6e}", report.lhs)?;
            writeln!(out, "rhs  (2q-2)!/(q-1)!max = {:.6e}", report.rhs)?;
            writeln!(
                out,
                "holds at slack {}: {}",
                report.slack,
                if report.holds { "YES" } else { "NO" }
            )?;
            for note in &report.notes {
                writeln!(out, "note: {note}")?;
            }
        }

        Command::Experiment { config, svg } => {
            let mut experiment: ExperimentConfig = read_config(&config)?;
            if let Some(seed) = cli.seed {
                experiment.seed = seed;
            }
            if let Some(workers) = cli.workers {
                experiment.workers = workers;
            }
            let result = run_experiment(&experiment)?;
            if let Some(svg_path) = &svg {
                std::fs::write(svg_path, weakdens::harness::slope_svg(&result))?;
            }
            match &cli.out {
                Some(path) => {
                    write_csv(&result, std::io::BufWriter::new(std::fs::File::create(path)?))?;
                    print!("{}", result.summary());
                    println!("rows written to {}", path.display());
                }
                None => {
                    write_csv(&result, std::io::stdout().lock())?;
                    eprint!("{}", result.summary());
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
