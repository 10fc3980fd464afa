//! `qphase` — quasi-Bayesian sparse phase retrieval from the command line.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "qphase",
    version,
    about = "Sparse phase retrieval via Langevin sampling of a Gibbs quasi-posterior",
    after_help = "Every stochastic subcommand takes --seed (default 1729) and replays \
                  byte-identical outputs for identical arguments within one build."
)]
struct Cli {
    /// Log verbosity on stderr.
    #[arg(long, global = true, value_parser = ["quiet", "error", "warn", "info", "debug"], default_value = "info")]
    log_level: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic problem instance into a directory.
    Generate {
        /// Signal dimension.
        #[arg(long)]
        p: Option<usize>,
        /// Number of nonzero signal entries.
        #[arg(long = "s-star")]
        s_star: Option<usize>,
        /// Number of measurements.
        #[arg(long)]
        m: Option<usize>,
        /// Noise standard deviation.
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for A.csv, y.csv, theta_star.csv, meta.txt.
        #[arg(long)]
        out: Option<PathBuf>,
        /// key = value configuration file (flags take precedence).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Sample the quasi-posterior of a stored instance with LMC or MALA.
    Sample {
        /// Sampling kernel.
        #[arg(long, value_parser = ["lmc", "mala"])]
        method: Option<String>,
        /// Inverse temperature: a number or a multiple of m like "4m".
        #[arg(long)]
        lambda: Option<String>,
        /// Prior shrinkage scale.
        #[arg(long)]
        varsigma: Option<f64>,
        /// Prior support radius; "inf" leaves it unconstrained.
        #[arg(long)]
        h1: Option<String>,
        /// Step size, or "auto" for the method's heuristic.
        #[arg(long)]
        gamma: Option<String>,
        /// Total iterations.
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long = "burn-in")]
        burn_in: Option<usize>,
        /// Keep every k-th post-burn-in sample.
        #[arg(long)]
        thin: Option<usize>,
        /// Acceptance rate MALA adapts toward.
        #[arg(long = "target-acceptance")]
        target_acceptance: Option<f64>,
        /// Chain start: the origin or the spectral initializer.
        #[arg(long, value_parser = ["zero", "spectral"])]
        init: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Instance directory written by `qphase generate`.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Chain CSV; one sample per row, posterior mean appended last,
        /// described by a `.meta` sidecar.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the thresholded Wirtinger-flow baseline on a stored instance.
    Baseline {
        #[arg(long)]
        iters: Option<usize>,
        /// Hard-threshold level, or "auto" (s* when known, else p/10).
        #[arg(long)]
        k: Option<String>,
        /// Gradient step, or "auto" (0.1 / mean(y)).
        #[arg(long)]
        step: Option<String>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Estimate CSV, one coordinate per row.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print tuning constants and rate expressions.
    Theory {
        #[arg(long)]
        sigma: Option<f64>,
        /// Sub-exponential noise scale.
        #[arg(long)]
        xi: Option<f64>,
        /// Design bound entering the constants.
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        kappa0: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long = "s-star")]
        s_star: Option<usize>,
        /// Failure probability.
        #[arg(long)]
        delta: Option<f64>,
        /// Universal constant in front of the rate.
        #[arg(long = "frak-c")]
        frak_c: Option<f64>,
        /// Support radius; a finite value also prints the explicit rate.
        #[arg(long)]
        h1: Option<String>,
        /// Evaluate alpha and beta at this inverse temperature instead of
        /// lambda*.
        #[arg(long)]
        lambda: Option<f64>,
        /// Also append the constants as one CSV row.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run a Monte Carlo sweep over one factor and write tidy records.
    Sweep {
        /// Factor design to run.
        #[arg(long, value_parser = ["sample-size", "noise", "sparsity", "varsigma", "lambda"])]
        preset: Option<String>,
        /// Replications per level.
        #[arg(long)]
        reps: Option<usize>,
        /// Sampler iterations per replication.
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Records CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also render grouped boxplots.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Published design: 100 replications, 30000 iterations.
        #[arg(long = "paper-scale")]
        paper_scale: bool,
        /// Populate the runtime_s column with wall-clock measurements;
        /// this makes the CSV differ between reruns.
        #[arg(long)]
        timings: bool,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Reconstruct a PGM image from simulated intensity measurements.
    Image {
        /// Ground-truth image (PGM, ASCII or binary).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Number of measurements.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        sigma: Option<f64>,
        /// Comma-separated subset of lmc, mala, twf-baseline.
        #[arg(long)]
        methods: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long = "burn-in")]
        burn_in: Option<usize>,
        /// Lift the desk-scale size guard on the pixel count.
        #[arg(long = "allow-large")]
        allow_large: bool,
        /// Directory receiving <method>.pgm and metrics.csv.
        #[arg(long = "out-dir")]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; anything else is a
            // usage error.
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };

    init_logging(&cli.log_level);
    init_worker_pool();

    match commands::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(exit_class(&e))
        }
    }
}

fn exit_class(e: &qphase_core::Error) -> u8 {
    use qphase_core::Error;
    if matches!(e, Error::Divergence { .. }) {
        3
    } else if e.is_io() {
        2
    } else {
        1
    }
}

fn init_logging(level: &str) {
    let filter = match level {
        "quiet" => log::LevelFilter::Off,
        "error" => log::LevelFilter::Error,
        "warn" => log::LevelFilter::Warn,
        "debug" => log::LevelFilter::Debug,
        _ => log::LevelFilter::Info,
    };
    env_logger::Builder::new()
        .filter_level(filter)
        .format_timestamp(None)
        .format_target(false)
        .init();
}

/// `QPHASE_THREADS` caps the sweep worker pool; 0 or unset means one
/// worker per core.
fn init_worker_pool() {
    if let Ok(raw) = std::env::var("QPHASE_THREADS") {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n > 0 {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("could not size the worker pool: {e}");
                }
            }
        } else {
            log::warn!("ignoring unparseable QPHASE_THREADS={raw:?}");
        }
    }
}
