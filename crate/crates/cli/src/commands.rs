//! Subcommand implementations: parameter layering, execution, output files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qphase_core::baseline::{self, BaselineConfig};
use qphase_core::experiments::{self, Method, RunBudget, SweepSpec, PAPER_ITERS, PAPER_REPS};
use qphase_core::imaging::{self, ReconstructConfig};
use qphase_core::model;
use qphase_core::plot;
use qphase_core::rng::{RngState, DEFAULT_SEED};
use qphase_core::sampler::{self, SamplerConfig};
use qphase_core::theory::{self, TheoryParams};
use qphase_core::{Error, LambdaRule, PriorConfig, Result};

use crate::config::{resolve, resolve_required, ConfigFile};
use crate::Command;

pub fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Generate { p, s_star, m, sigma, seed, out, config } => {
            generate(p, s_star, m, sigma, seed, out, config)
        }
        Command::Sample {
            method,
            lambda,
            varsigma,
            h1,
            gamma,
            iters,
            burn_in,
            thin,
            target_acceptance,
            init,
            seed,
            input,
            out,
            config,
        } => sample(
            method,
            lambda,
            varsigma,
            h1,
            gamma,
            iters,
            burn_in,
            thin,
            target_acceptance,
            init,
            seed,
            input,
            out,
            config,
        ),
        Command::Baseline { iters, k, step, input, out, config } => {
            run_baseline(iters, k, step, input, out, config)
        }
        Command::Theory {
            sigma,
            xi,
            c,
            kappa0,
            m,
            p,
            s_star,
            delta,
            frak_c,
            h1,
            lambda,
            csv,
            config,
        } => run_theory(sigma, xi, c, kappa0, m, p, s_star, delta, frak_c, h1, lambda, csv, config),
        Command::Sweep { preset, reps, iters, seed, out, svg, paper_scale, timings, config } => {
            sweep(preset, reps, iters, seed, out, svg, paper_scale, timings, config)
        }
        Command::Image {
            input,
            m,
            sigma,
            methods,
            seed,
            iters,
            burn_in,
            allow_large,
            out_dir,
            config,
        } => image(input, m, sigma, methods, seed, iters, burn_in, allow_large, out_dir, config),
    }
}

fn load_config(path: Option<PathBuf>) -> Result<ConfigFile> {
    match path {
        Some(p) => ConfigFile::load(&p),
        None => Ok(ConfigFile::empty()),
    }
}

fn parse_h1(raw: &str) -> Result<f64> {
    if raw.eq_ignore_ascii_case("inf") || raw.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    raw.parse()
        .map_err(|_| Error::InvalidConfig(format!("h1 must be a number or \"inf\", got {raw:?}")))
}

fn join_csv(row: &[f64]) -> String {
    let mut s = String::new();
    for (i, x) in row.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{x}");
    }
    s
}

fn sidecar_path(out: &Path) -> PathBuf {
    PathBuf::from(format!("{}.meta", out.display()))
}

#[allow(clippy::too_many_arguments)]
fn generate(
    p: Option<usize>,
    s_star: Option<usize>,
    m: Option<usize>,
    sigma: Option<f64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    config: Option<PathBuf>,
) -> Result<()> {
    let cfg = load_config(config)?;
    let p = resolve(p, &cfg, "p", 100)?;
    let s_star = resolve(s_star, &cfg, "s-star", 10)?;
    let m = resolve(m, &cfg, "m", 500)?;
    let sigma = resolve(sigma, &cfg, "sigma", 1.0)?;
    let seed = resolve(seed, &cfg, "seed", DEFAULT_SEED)?;
    let out: PathBuf = resolve_required(out, &cfg, "out")?;
    cfg.reject_unknown()?;
    log::info!(
        "generate: p={p} s-star={s_star} m={m} sigma={sigma} seed={seed} out={}",
        out.display()
    );

    let mut rng = RngState::from_seed(seed);
    let theta_star = model::generate_signal(&mut rng, p, s_star)?;
    let inst = model::generate_instance(&mut rng, &theta_star, m, sigma)?;
    model::save_instance(&inst, &out, seed)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn sample(
    method: Option<String>,
    lambda: Option<String>,
    varsigma: Option<f64>,
    h1: Option<String>,
    gamma: Option<String>,
    iters: Option<usize>,
    burn_in: Option<usize>,
    thin: Option<usize>,
    target_acceptance: Option<f64>,
    init: Option<String>,
    seed: Option<u64>,
    input: Option<PathBuf>,
    out: Option<PathBuf>,
    config: Option<PathBuf>,
) -> Result<()> {
    let cfg = load_config(config)?;
    let method: String = resolve_required(method, &cfg, "method")?;
    if method != "lmc" && method != "mala" {
        return Err(Error::InvalidConfig(format!("method must be lmc or mala, got {method:?}")));
    }
    let lambda_rule = LambdaRule::parse(&resolve(lambda, &cfg, "lambda", "4m".to_string())?)?;
    let varsigma = resolve(varsigma, &cfg, "varsigma", 0.1)?;
    let h1 = parse_h1(&resolve(h1, &cfg, "h1", "inf".to_string())?)?;
    let gamma_raw = resolve(gamma, &cfg, "gamma", "auto".to_string())?;
    let iters = resolve(iters, &cfg, "iters", 30_000)?;
    let burn_in = resolve(burn_in, &cfg, "burn-in", 1_000)?;
    let thin = resolve(thin, &cfg, "thin", 1)?;
    let target_acceptance = resolve(target_acceptance, &cfg, "target-acceptance", 0.5)?;
    let init = resolve(init, &cfg, "init", "zero".to_string())?;
    let seed = resolve(seed, &cfg, "seed", DEFAULT_SEED)?;
    let input: PathBuf = resolve_required(input, &cfg, "in")?;
    let out: PathBuf = resolve_required(out, &cfg, "out")?;
    cfg.reject_unknown()?;

    let inst = model::load_instance(&input)?;
    let lambda = lambda_rule.resolve(inst.n_measurements());
    let prior = PriorConfig::new(varsigma, h1)?;
    let theta0 = match init.as_str() {
        "spectral" => baseline::spectral_init(&inst),
        "zero" => vec![0.0; inst.dim()],
        other => return Err(Error::InvalidConfig(format!("unknown init {other:?}"))),
    };
    let gamma = match gamma_raw.as_str() {
        "auto" => match method.as_str() {
            "mala" => sampler::default_mala_gamma(&inst, &prior, lambda, &theta0),
            _ => sampler::default_lmc_gamma(&inst, lambda),
        },
        raw => raw.parse().map_err(|_| {
            Error::InvalidConfig(format!("gamma must be a number or \"auto\", got {raw:?}"))
        })?,
    };
    log::info!(
        "sample: method={method} lambda={lambda} varsigma={varsigma} h1={h1} gamma={gamma} \
         iters={iters} burn-in={burn_in} thin={thin} target-acceptance={target_acceptance} \
         init={init} seed={seed} in={} out={}",
        input.display(),
        out.display()
    );

    let sampler_cfg = SamplerConfig {
        n_iter: iters,
        burn_in,
        thin,
        target_acceptance,
        seed,
        ..SamplerConfig::new(lambda, gamma, seed)
    };
    let chain = match method.as_str() {
        "lmc" => sampler::lmc_run(&inst, &prior, &sampler_cfg, &theta0)?,
        "mala" => sampler::mala_run(&inst, &prior, &sampler_cfg, &theta0)?,
        other => return Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
    };

    let mut body = String::new();
    for s in &chain.samples {
        body.push_str(&join_csv(s));
        body.push('\n');
    }
    body.push_str(&join_csv(&chain.posterior_mean));
    body.push('\n');
    std::fs::write(&out, body)?;

    let mut meta = String::new();
    let _ = writeln!(meta, "method = {method}");
    let _ = writeln!(meta, "p = {}", inst.dim());
    let _ = writeln!(meta, "kept_samples = {}", chain.samples.len());
    let _ = writeln!(meta, "posterior_mean_row = {}", chain.samples.len() + 1);
    let _ = writeln!(meta, "lambda = {lambda}");
    let _ = writeln!(meta, "varsigma = {varsigma}");
    let _ = writeln!(meta, "h1 = {h1}");
    let _ = writeln!(meta, "gamma_initial = {gamma}");
    let _ = writeln!(meta, "gamma_final = {}", chain.final_gamma);
    let _ = writeln!(meta, "acceptance_rate = {}", chain.acceptance_rate);
    let _ = writeln!(meta, "tuning_failure = {}", chain.tuning_failure);
    let _ = writeln!(meta, "seed = {seed}");
    let _ = writeln!(meta, "iters = {iters}");
    let _ = writeln!(meta, "burn_in = {burn_in}");
    let _ = writeln!(meta, "thin = {thin}");
    let _ = writeln!(meta, "init = {init}");
    std::fs::write(sidecar_path(&out), meta)?;

    log::info!(
        "chain written: {} samples, acceptance {:.3}, final gamma {:.3e}",
        chain.samples.len(),
        chain.acceptance_rate,
        chain.final_gamma
    );
    Ok(())
}

fn run_baseline(
    iters: Option<usize>,
    k: Option<String>,
    step: Option<String>,
    input: Option<PathBuf>,
    out: Option<PathBuf>,
    config: Option<PathBuf>,
) -> Result<()> {
    let cfg = load_config(config)?;
    let iters = resolve(iters, &cfg, "iters", 5_000)?;
    let k_raw = resolve(k, &cfg, "k", "auto".to_string())?;
    let step_raw = resolve(step, &cfg, "step", "auto".to_string())?;
    let input: PathBuf = resolve_required(input, &cfg, "in")?;
    let out: PathBuf = resolve_required(out, &cfg, "out")?;
    cfg.reject_unknown()?;

    let inst = model::load_instance(&input)?;
    let defaults = BaselineConfig::with_defaults(&inst);
    let (sparsity_k, k_source) = match k_raw.as_str() {
        "auto" => (defaults.sparsity_k, if inst.s_star.is_some() { "oracle" } else { "heuristic" }),
        raw => (
            raw.parse().map_err(|_| {
                Error::InvalidConfig(format!("k must be an integer or \"auto\", got {raw:?}"))
            })?,
            "explicit",
        ),
    };
    let step = match step_raw.as_str() {
        "auto" => defaults.step,
        raw => raw.parse().map_err(|_| {
            Error::InvalidConfig(format!("step must be a number or \"auto\", got {raw:?}"))
        })?,
    };
    log::info!(
        "baseline: iters={iters} k={sparsity_k} ({k_source}) step={step} in={} out={}",
        input.display(),
        out.display()
    );

    let bl_cfg = BaselineConfig { n_iter: iters, step, sparsity_k };
    let theta = baseline::thresholded_wf_run(&inst, &bl_cfg)?;

    let mut body = String::new();
    for x in &theta {
        let _ = writeln!(body, "{x}");
    }
    std::fs::write(&out, body)?;

    let mut meta = String::new();
    let _ = writeln!(meta, "method = twf-baseline");
    let _ = writeln!(meta, "iters = {iters}");
    let _ = writeln!(meta, "k = {sparsity_k}");
    let _ = writeln!(meta, "k_source = {k_source}");
    let _ = writeln!(meta, "step = {step}");
    std::fs::write(sidecar_path(&out), meta)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_theory(
    sigma: Option<f64>,
    xi: Option<f64>,
    c: Option<f64>,
    kappa0: Option<f64>,
    m: Option<usize>,
    p: Option<usize>,
    s_star: Option<usize>,
    delta: Option<f64>,
    frak_c: Option<f64>,
    h1: Option<String>,
    lambda: Option<f64>,
    csv: Option<PathBuf>,
    config: Option<PathBuf>,
) -> Result<()> {
    let cfg = load_config(config)?;
    let params = TheoryParams {
        sigma: resolve(sigma, &cfg, "sigma", 1.0)?,
        xi: resolve(xi, &cfg, "xi", 1.0)?,
        c_bound: resolve(c, &cfg, "c", 1.0)?,
        kappa0: resolve(kappa0, &cfg, "kappa0", 1.0)?,
        m: resolve(m, &cfg, "m", 500)?,
        p: resolve(p, &cfg, "p", 100)?,
        s_star: resolve(s_star, &cfg, "s-star", 10)?,
        delta: resolve(delta, &cfg, "delta", 0.05)?,
        frak_c: resolve(frak_c, &cfg, "frak-c", 1.0)?,
    };
    let h1 = parse_h1(&resolve(h1, &cfg, "h1", "inf".to_string())?)?;
    let lambda = resolve(lambda, &cfg, "lambda", f64::NAN)?;
    cfg.reject_unknown()?;

    let k = theory::constants(&params)?;
    let lambda = if lambda.is_nan() { k.lambda_star } else { lambda };
    let (alpha, beta) = theory::alpha_beta(&params, lambda)?;
    let rate = theory::theorem1_rate(&params)?;
    log::info!(
        "theory: sigma={} xi={} c={} kappa0={} m={} p={} s-star={} delta={} frak-c={} h1={h1} lambda={lambda}",
        params.sigma, params.xi, params.c_bound, params.kappa0,
        params.m, params.p, params.s_star, params.delta, params.frak_c
    );

    println!("c1 = {}", k.c1);
    println!("c2 = {}", k.c2);
    println!("lambda_star = {}", k.lambda_star);
    println!("varsigma_star = {}", k.varsigma_star);
    println!("lambda = {lambda}");
    println!("alpha = {alpha}");
    println!("beta = {beta}");
    println!("beta_over_alpha = {}", beta / alpha);
    println!("rate = {rate}");
    let rate_explicit = if h1.is_finite() {
        let r = theory::theorem1_rate_explicit(&params, h1)?;
        println!("rate_explicit = {r}");
        Some(r)
    } else {
        None
    };

    if let Some(path) = csv {
        let mut text = String::from(
            "sigma,xi,c,kappa0,m,p,s_star,delta,frak_c,h1,c1,c2,lambda_star,varsigma_star,lambda,alpha,beta,beta_over_alpha,rate,rate_explicit\n",
        );
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            params.sigma,
            params.xi,
            params.c_bound,
            params.kappa0,
            params.m,
            params.p,
            params.s_star,
            params.delta,
            params.frak_c,
            h1,
            k.c1,
            k.c2,
            k.lambda_star,
            k.varsigma_star,
            lambda,
            alpha,
            beta,
            beta / alpha,
            rate,
            rate_explicit.map(|r| r.to_string()).unwrap_or_default(),
        );
        std::fs::write(path, text)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    preset: Option<String>,
    reps: Option<usize>,
    iters: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    svg: Option<PathBuf>,
    paper_scale: bool,
    timings: bool,
    config: Option<PathBuf>,
) -> Result<()> {
    let cfg = load_config(config)?;
    let preset = resolve_required(preset, &cfg, "preset")?;
    let seed = resolve(seed, &cfg, "seed", DEFAULT_SEED)?;
    let paper_scale = resolve(paper_scale.then_some(true), &cfg, "paper-scale", false)?;
    let timings = resolve(timings.then_some(true), &cfg, "timings", false)?;
    let (default_reps, default_iters) = if paper_scale {
        (PAPER_REPS, PAPER_ITERS)
    } else {
        (experiments::QUICK_REPS, experiments::QUICK_ITERS)
    };
    let reps = resolve(reps, &cfg, "reps", default_reps)?;
    let iters = resolve(iters, &cfg, "iters", default_iters)?;
    let out: PathBuf = resolve_required(out, &cfg, "out")?;
    let svg = match svg {
        Some(p) => Some(p),
        None => cfg.get::<PathBuf>("svg")?,
    };
    cfg.reject_unknown()?;

    let mut spec = SweepSpec::preset(&preset, seed)?;
    spec.n_reps = reps;
    spec.sampler_iters = iters;
    spec.sampler_burn_in = 1_000.min(iters / 3).max(1);
    log::info!(
        "sweep: preset={preset} reps={reps} iters={iters} burn-in={} seed={seed} out={}",
        spec.sampler_burn_in,
        out.display()
    );

    let result = experiments::run_sweep(&spec)?;
    experiments::write_sweep_csv(&result, &out, timings)?;

    let diverged = result.divergence_count();
    if diverged > 0 {
        log::warn!("{diverged} replications diverged; their rows carry mre=inf and diverged=1");
    }
    let summary = experiments::summarize(&result);
    for row in &summary {
        log::info!(
            "level={} method={} n={} diverged={} median={:.4e} q25={:.4e} q75={:.4e}",
            row.level,
            row.method.name(),
            row.n,
            row.n_diverged,
            row.median,
            row.q25,
            row.q75
        );
    }
    if let Some(svg_path) = svg {
        plot::render_boxplots(&summary, spec.factor, &svg_path)?;
        log::info!("boxplots written to {}", svg_path.display());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn image(
    input: Option<PathBuf>,
    m: Option<usize>,
    sigma: Option<f64>,
    methods: Option<String>,
    seed: Option<u64>,
    iters: Option<usize>,
    burn_in: Option<usize>,
    allow_large: bool,
    out_dir: Option<PathBuf>,
    config: Option<PathBuf>,
) -> Result<()> {
    let cfg = load_config(config)?;
    let input: PathBuf = resolve_required(input, &cfg, "input")?;
    let m = resolve(m, &cfg, "m", 4_000)?;
    let sigma = resolve(sigma, &cfg, "sigma", 1.0)?;
    let methods_raw = resolve(methods, &cfg, "methods", "lmc,mala,twf-baseline".to_string())?;
    let seed = resolve(seed, &cfg, "seed", DEFAULT_SEED)?;
    let iters = resolve(iters, &cfg, "iters", 30_000)?;
    let burn_in = resolve(burn_in, &cfg, "burn-in", 1_000)?;
    let allow_large = resolve(allow_large.then_some(true), &cfg, "allow-large", false)?;
    let out_dir: PathBuf = resolve_required(out_dir, &cfg, "out-dir")?;
    cfg.reject_unknown()?;

    let methods: Vec<Method> = methods_raw
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(Method::parse)
        .collect::<Result<_>>()?;
    log::info!(
        "image: input={} m={m} sigma={sigma} methods={methods_raw} seed={seed} iters={iters} \
         burn-in={burn_in} out-dir={}",
        input.display(),
        out_dir.display()
    );

    let img = imaging::load_pgm(&input)?;
    log::info!(
        "loaded {}x{} image, {:.1}% nonzero pixels",
        img.width,
        img.height,
        100.0 * img.nnz_fraction
    );
    let recon_cfg = ReconstructConfig {
        m,
        sigma,
        methods,
        seed,
        budget: RunBudget { sampler_iters: iters, sampler_burn_in: burn_in, baseline_iters: 5_000 },
        allow_large,
        ..ReconstructConfig::new(seed)
    };
    let recons = imaging::reconstruct_image(&img, &recon_cfg)?;

    std::fs::create_dir_all(&out_dir)?;
    let mut metrics = String::from("method,mre,acceptance_rate\n");
    for r in &recons {
        let path = out_dir.join(format!("{}.pgm", r.method.name()));
        imaging::save_pgm(&r.image, &path)?;
        let acceptance = r.acceptance_rate.map(|a| a.to_string()).unwrap_or_default();
        let _ = writeln!(metrics, "{},{},{}", r.method.name(), r.mre, acceptance);
        log::info!("{}: mre {:.4e} -> {}", r.method.name(), r.mre, path.display());
    }
    std::fs::write(out_dir.join("metrics.csv"), metrics)?;
    Ok(())
}
