//! Monte Carlo sweep harness.
//!
//! A sweep varies one factor (sample size, noise, sparsity, prior scale or
//! inverse temperature) over a list of levels, replicates each level with
//! independent data sets, runs every requested method and records the
//! minimum relative estimation error
//!
//! ```text
//! mre = min(|th - th*|^2, |th + th*|^2) / (p |th*|^2)
//! ```
//!
//! which treats the two sign-equivalent solutions as one. Replications get
//! RNG streams derived from `(level, rep, slot)`, so records are identical
//! whatever the worker count or scheduling order.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::baseline::{self, BaselineConfig};
use crate::error::{Error, Result};
use crate::model::{self, ProblemInstance};
use crate::prior::PriorConfig;
use crate::rng::{derive_stream, RngState};
use crate::sampler::{self, SamplerConfig};

/// Estimation methods the harness can compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Lmc,
    Mala,
    TwfBaseline,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Lmc, Method::Mala, Method::TwfBaseline];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Lmc => "lmc",
            Method::Mala => "mala",
            Method::TwfBaseline => "twf-baseline",
        }
    }

    pub fn parse(s: &str) -> Result<Method> {
        match s.trim() {
            "lmc" => Ok(Method::Lmc),
            "mala" => Ok(Method::Mala),
            "twf-baseline" | "twf" => Ok(Method::TwfBaseline),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

/// The factor a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    SampleSize,
    Noise,
    Sparsity,
    Varsigma,
    Lambda,
}

impl Factor {
    pub fn name(&self) -> &'static str {
        match self {
            Factor::SampleSize => "sample_size",
            Factor::Noise => "noise",
            Factor::Sparsity => "sparsity",
            Factor::Varsigma => "varsigma",
            Factor::Lambda => "lambda",
        }
    }
}

/// Inverse temperature, either literal or proportional to the sample size
/// (the `"4m"` form).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaRule {
    Literal(f64),
    TimesM(f64),
}

impl LambdaRule {
    pub fn resolve(&self, m: usize) -> f64 {
        match self {
            LambdaRule::Literal(v) => *v,
            LambdaRule::TimesM(c) => c * m as f64,
        }
    }

    /// Parses `"4m"`, `"0.08m"` or a plain number.
    pub fn parse(s: &str) -> Result<LambdaRule> {
        let s = s.trim();
        if let Some(prefix) = s.strip_suffix(['m', 'M']) {
            let c: f64 = prefix
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("invalid lambda rule {s:?}")))?;
            return Ok(LambdaRule::TimesM(c));
        }
        s.parse()
            .map(LambdaRule::Literal)
            .map_err(|_| Error::InvalidConfig(format!("invalid lambda rule {s:?}")))
    }
}

impl std::fmt::Display for LambdaRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LambdaRule::Literal(v) => write!(f, "{v}"),
            LambdaRule::TimesM(c) => write!(f, "{c}m"),
        }
    }
}

/// Parameters held constant across the sweep (the varied one is ignored).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedParams {
    pub m: usize,
    pub p: usize,
    pub s_star: usize,
    pub sigma: f64,
    pub varsigma: f64,
    pub lambda: LambdaRule,
}

/// Full description of one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub factor: Factor,
    /// Strictly increasing factor levels.
    pub levels: Vec<f64>,
    pub fixed: FixedParams,
    pub n_reps: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
    pub sampler_iters: usize,
    pub sampler_burn_in: usize,
    pub baseline_iters: usize,
}

/// Replication count and sampler iterations restoring the published
/// design; the quick defaults below are for desk-scale runs.
pub const PAPER_REPS: usize = 100;
pub const PAPER_ITERS: usize = 30_000;
pub const QUICK_REPS: usize = 10;
pub const QUICK_ITERS: usize = 3_000;

impl SweepSpec {
    /// The five stock sweep designs at desk scale: all three methods,
    /// 10 replications, 3000 sampler iterations.
    pub fn preset(name: &str, seed: u64) -> Result<SweepSpec> {
        let lambda_4m = LambdaRule::TimesM(4.0);
        let (factor, levels, fixed) = match name {
            "sample-size" => (
                Factor::SampleSize,
                vec![100.0, 200.0, 500.0, 1000.0, 2000.0],
                FixedParams { m: 0, p: 100, s_star: 10, sigma: 1.0, varsigma: 0.1, lambda: lambda_4m },
            ),
            "noise" => (
                Factor::Noise,
                vec![0.5, 1.0, 2.0, 5.0, 10.0],
                FixedParams { m: 500, p: 100, s_star: 10, sigma: 0.0, varsigma: 0.1, lambda: lambda_4m },
            ),
            "sparsity" => (
                Factor::Sparsity,
                vec![5.0, 20.0, 100.0, 250.0, 500.0],
                FixedParams { m: 1000, p: 500, s_star: 0, sigma: 1.0, varsigma: 0.1, lambda: lambda_4m },
            ),
            "varsigma" => (
                Factor::Varsigma,
                vec![0.0001, 0.01, 0.1, 1.0, 10.0],
                FixedParams { m: 200, p: 100, s_star: 10, sigma: 1.0, varsigma: 0.0, lambda: lambda_4m },
            ),
            // Inverse-temperature sensitivity at m = 50: the printed
            // levels m/25, 2m/25, 4m, 100m, 400m resolved to literals.
            "lambda" => {
                let m = 50usize;
                let levels = [1.0 / 25.0, 2.0 / 25.0, 4.0, 100.0, 400.0]
                    .iter()
                    .map(|c| c * m as f64)
                    .collect();
                (
                    Factor::Lambda,
                    levels,
                    FixedParams {
                        m,
                        p: 100,
                        s_star: 10,
                        sigma: 1.0,
                        varsigma: 0.1,
                        lambda: lambda_4m,
                    },
                )
            }
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown preset {other:?}; expected sample-size, noise, sparsity, varsigma or lambda"
                )))
            }
        };
        Ok(SweepSpec {
            factor,
            levels,
            fixed,
            n_reps: QUICK_REPS,
            methods: Method::ALL.to_vec(),
            seed,
            sampler_iters: QUICK_ITERS,
            sampler_burn_in: 1_000,
            baseline_iters: 5_000,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::InvalidConfig("levels must be nonempty".into()));
        }
        if !self.levels.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig("levels must be strictly increasing".into()));
        }
        if self.n_reps == 0 {
            return Err(Error::InvalidConfig("n_reps must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("at least one method is required".into()));
        }
        if self.sampler_burn_in >= self.sampler_iters {
            return Err(Error::InvalidConfig(format!(
                "burn-in {} must be smaller than the iteration count {}",
                self.sampler_burn_in, self.sampler_iters
            )));
        }
        Ok(())
    }

    /// Problem parameters at one level of the varied factor.
    fn resolve_level(&self, level: f64) -> ResolvedLevel {
        let mut r = ResolvedLevel {
            m: self.fixed.m,
            p: self.fixed.p,
            s_star: self.fixed.s_star,
            sigma: self.fixed.sigma,
            varsigma: self.fixed.varsigma,
            lambda_rule: self.fixed.lambda,
        };
        match self.factor {
            Factor::SampleSize => r.m = level as usize,
            Factor::Noise => r.sigma = level,
            Factor::Sparsity => r.s_star = level as usize,
            Factor::Varsigma => r.varsigma = level,
            Factor::Lambda => r.lambda_rule = LambdaRule::Literal(level),
        }
        r
    }
}

#[derive(Debug, Clone, Copy)]
struct ResolvedLevel {
    m: usize,
    p: usize,
    s_star: usize,
    sigma: f64,
    varsigma: f64,
    lambda_rule: LambdaRule,
}

/// One (level, replication, method) measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub factor: Factor,
    pub level: f64,
    pub rep: usize,
    pub method: Method,
    /// `f64::INFINITY` when the replication diverged.
    pub mre: f64,
    pub runtime_seconds: f64,
    pub acceptance_rate: Option<f64>,
    /// Inverse temperature actually used at this level.
    pub lambda: f64,
    /// Prior scale actually used at this level.
    pub varsigma: f64,
    pub diverged: bool,
}

/// All records of a sweep, ordered by (level, replication, method).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    pub fn divergence_count(&self) -> usize {
        self.records.iter().filter(|r| r.diverged).count()
    }
}

/// Result of one method on one instance.
#[derive(Debug, Clone)]
pub struct MethodOutcome {
    pub estimate: Vec<f64>,
    pub acceptance_rate: Option<f64>,
    pub final_gamma: Option<f64>,
    pub tuning_failure: bool,
}

/// Minimum relative estimation error,
/// `min(|th - th*|^2, |th + th*|^2) / (p |th*|^2)`.
pub fn mre(theta_hat: &[f64], theta_star: &[f64]) -> Result<f64> {
    if theta_hat.len() != theta_star.len() {
        return Err(Error::ShapeMismatch { expected: theta_star.len(), got: theta_hat.len() });
    }
    let mut minus = 0.0;
    let mut plus = 0.0;
    let mut norm_sq = 0.0;
    for (&a, &b) in theta_hat.iter().zip(theta_star) {
        minus += (a - b) * (a - b);
        plus += (a + b) * (a + b);
        norm_sq += b * b;
    }
    if norm_sq == 0.0 {
        return Err(Error::UndefinedMetric);
    }
    Ok(minus.min(plus) / (theta_star.len() as f64 * norm_sq))
}

/// Sampler iteration budget shared by the harness entry points.
#[derive(Debug, Clone, Copy)]
pub struct RunBudget {
    pub sampler_iters: usize,
    pub sampler_burn_in: usize,
    pub baseline_iters: usize,
}

impl Default for RunBudget {
    fn default() -> Self {
        Self { sampler_iters: PAPER_ITERS, sampler_burn_in: 1_000, baseline_iters: 5_000 }
    }
}

#[allow(clippy::too_many_arguments)]
/// Runs one method on one instance with the harness conventions: spectral
/// initialization, MALA step adaptation, and the LMC step set to half the
/// adapted MALA step when available.
pub fn run_method(
    method: Method,
    inst: &ProblemInstance,
    varsigma: f64,
    lambda: f64,
    budget: &RunBudget,
    seed: u64,
    stream_id: u64,
    mala_gamma_hint: Option<f64>,
) -> Result<MethodOutcome> {
    match method {
        Method::TwfBaseline => {
            let cfg = BaselineConfig {
                n_iter: budget.baseline_iters,
                ..BaselineConfig::with_defaults(inst)
            };
            let estimate = baseline::thresholded_wf_run(inst, &cfg)?;
            Ok(MethodOutcome {
                estimate,
                acceptance_rate: None,
                final_gamma: None,
                tuning_failure: false,
            })
        }
        Method::Lmc | Method::Mala => {
            let prior = PriorConfig::unconstrained(varsigma)?;
            let init = baseline::spectral_init(inst);
            let gamma = match method {
                Method::Mala => sampler::default_mala_gamma(inst, &prior, lambda, &init),
                // Half the adapted MALA step, capped by the standalone
                // heuristic: without a rejection step the unadjusted chain
                // overshoots the quartic tails in weakly identified
                // regimes (m <= p) when run at MALA-scale steps.
                Method::Lmc => {
                    let standalone = sampler::default_lmc_gamma(inst, lambda);
                    mala_gamma_hint.map(|g| (0.5 * g).min(standalone)).unwrap_or(standalone)
                }
                Method::TwfBaseline => unreachable!(),
            };
            let cfg = SamplerConfig {
                n_iter: budget.sampler_iters,
                burn_in: budget.sampler_burn_in,
                seed,
                stream_id,
                ..SamplerConfig::new(lambda, gamma, seed)
            };
            let chain = match method {
                Method::Mala => sampler::mala_run(inst, &prior, &cfg, &init)?,
                Method::Lmc => sampler::lmc_run(inst, &prior, &cfg, &init)?,
                Method::TwfBaseline => unreachable!(),
            };
            Ok(MethodOutcome {
                estimate: chain.posterior_mean,
                acceptance_rate: Some(chain.acceptance_rate),
                final_gamma: Some(chain.final_gamma),
                tuning_failure: chain.tuning_failure,
            })
        }
    }
}

const SLOT_SIGNAL: u64 = 0;
pub(crate) const SLOT_INSTANCE: u64 = 1;
const SLOT_LMC: u64 = 2;
const SLOT_MALA: u64 = 3;

#[allow(clippy::too_many_arguments)]
/// Runs several methods on one instance, MALA first so its adapted step
/// seeds the LMC step, and returns outcomes in the order requested.
/// Each entry carries its wall-clock runtime in seconds.
pub(crate) fn run_methods_ordered(
    inst: &ProblemInstance,
    varsigma: f64,
    lambda: f64,
    budget: &RunBudget,
    seed: u64,
    level_idx: usize,
    rep: usize,
    methods: &[Method],
) -> Vec<(Method, Result<MethodOutcome>, f64)> {
    let mut ordered = methods.to_vec();
    ordered.sort_by_key(|m| match m {
        Method::Mala => 0,
        Method::Lmc => 1,
        Method::TwfBaseline => 2,
    });
    let mut mala_gamma = None;
    let mut results: Vec<(Method, Result<MethodOutcome>, f64)> = Vec::with_capacity(ordered.len());
    for method in ordered {
        let slot = match method {
            Method::Lmc => SLOT_LMC,
            Method::Mala => SLOT_MALA,
            Method::TwfBaseline => 4,
        };
        let start = Instant::now();
        let outcome = run_method(
            method,
            inst,
            varsigma,
            lambda,
            budget,
            seed,
            derive_stream(level_idx, rep, slot),
            mala_gamma,
        );
        let runtime = start.elapsed().as_secs_f64();
        if method == Method::Mala {
            if let Ok(o) = &outcome {
                mala_gamma = o.final_gamma;
            }
        }
        results.push((method, outcome, runtime));
    }
    // Restore the caller's ordering.
    let mut out = Vec::with_capacity(methods.len());
    for &want in methods {
        let pos =
            results.iter().position(|(m, _, _)| *m == want).expect("every requested method ran");
        out.push(results.remove(pos));
    }
    out
}

/// Runs the full sweep. Replications execute on the current rayon pool;
/// record content and order depend only on the spec.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let budget = RunBudget {
        sampler_iters: spec.sampler_iters,
        sampler_burn_in: spec.sampler_burn_in,
        baseline_iters: spec.baseline_iters,
    };
    let tasks: Vec<(usize, usize)> =
        (0..spec.levels.len()).flat_map(|li| (0..spec.n_reps).map(move |rep| (li, rep))).collect();

    let mut records: Vec<Vec<SweepRecord>> = tasks
        .par_iter()
        .map(|&(level_idx, rep)| run_replication(spec, &budget, level_idx, rep))
        .collect::<Result<_>>()?;

    // Deterministic fold keyed by (level, rep, method list order).
    let mut flat: Vec<SweepRecord> = records.drain(..).flatten().collect();
    let method_order = |m: Method| spec.methods.iter().position(|&x| x == m).unwrap_or(usize::MAX);
    flat.sort_by(|a, b| {
        let ka = (a.level.total_cmp(&b.level), a.rep.cmp(&b.rep));
        match ka.0 {
            std::cmp::Ordering::Equal => match ka.1 {
                std::cmp::Ordering::Equal => method_order(a.method).cmp(&method_order(b.method)),
                other => other,
            },
            other => other,
        }
    });
    Ok(SweepResult { records: flat })
}

fn run_replication(
    spec: &SweepSpec,
    budget: &RunBudget,
    level_idx: usize,
    rep: usize,
) -> Result<Vec<SweepRecord>> {
    let level = spec.levels[level_idx];
    let r = spec.resolve_level(level);
    let lambda = r.lambda_rule.resolve(r.m);

    let mut signal_rng = RngState::new(spec.seed, derive_stream(level_idx, rep, SLOT_SIGNAL));
    let theta_star = model::generate_signal(&mut signal_rng, r.p, r.s_star)?;
    let mut inst_rng = RngState::new(spec.seed, derive_stream(level_idx, rep, SLOT_INSTANCE));
    let inst = model::generate_instance(&mut inst_rng, &theta_star, r.m, r.sigma)?;

    let outcomes = run_methods_ordered(
        &inst,
        r.varsigma,
        lambda,
        budget,
        spec.seed,
        level_idx,
        rep,
        &spec.methods,
    );

    let mut out = Vec::with_capacity(outcomes.len());
    for (method, outcome, runtime_seconds) in outcomes {
        let record = match outcome {
            Ok(o) => SweepRecord {
                factor: spec.factor,
                level,
                rep,
                method,
                mre: mre(&o.estimate, &theta_star)?,
                runtime_seconds,
                acceptance_rate: o.acceptance_rate,
                lambda,
                varsigma: r.varsigma,
                diverged: false,
            },
            Err(Error::Divergence { iteration }) => {
                log::warn!(
                    "{} diverged at iteration {iteration} (level {level}, rep {rep})",
                    method.name()
                );
                SweepRecord {
                    factor: spec.factor,
                    level,
                    rep,
                    method,
                    mre: f64::INFINITY,
                    runtime_seconds,
                    acceptance_rate: None,
                    lambda,
                    varsigma: r.varsigma,
                    diverged: true,
                }
            }
            Err(e) => return Err(e),
        };
        out.push(record);
    }
    Ok(out)
}

/// Five-number summary of the non-diverged errors of one (level, method)
/// group. Diverged replications are excluded from the quantiles and
/// counted separately.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub level: f64,
    pub method: Method,
    pub n: usize,
    pub n_diverged: usize,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Per-(level, method) five-number summaries in level-major order.
pub fn summarize(result: &SweepResult) -> Vec<SummaryRow> {
    let mut levels: Vec<f64> = Vec::new();
    let mut methods: Vec<Method> = Vec::new();
    for r in &result.records {
        if !levels.contains(&r.level) {
            levels.push(r.level);
        }
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
    }
    let mut rows = Vec::new();
    for &level in &levels {
        for &method in &methods {
            let mut vals: Vec<f64> = result
                .records
                .iter()
                .filter(|r| r.level == level && r.method == method && !r.diverged)
                .map(|r| r.mre)
                .collect();
            let n_diverged = result
                .records
                .iter()
                .filter(|r| r.level == level && r.method == method && r.diverged)
                .count();
            if vals.is_empty() && n_diverged == 0 {
                continue;
            }
            vals.sort_by(|a, b| a.total_cmp(b));
            let (min, q25, median, q75, max) = if vals.is_empty() {
                (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN)
            } else {
                (
                    vals[0],
                    quantile(&vals, 0.25),
                    quantile(&vals, 0.5),
                    quantile(&vals, 0.75),
                    vals[vals.len() - 1],
                )
            };
            rows.push(SummaryRow {
                level,
                method,
                n: vals.len(),
                n_diverged,
                min,
                q25,
                median,
                q75,
                max,
            });
        }
    }
    rows
}

/// Median mre of one (level, method) group, for trend assertions.
pub fn median_mre(result: &SweepResult, level: f64, method: Method) -> Option<f64> {
    summarize(result)
        .into_iter()
        .find(|row| row.level == level && row.method == method)
        .map(|row| row.median)
}

/// Writes the tidy records CSV. Timings are nondeterministic, so the
/// `runtime_s` column is only populated when `include_timings` is set;
/// default output is byte-identical across reruns of the same seed.
pub fn write_sweep_csv(result: &SweepResult, path: &Path, include_timings: bool) -> Result<()> {
    let mut out = String::from(
        "factor,level,rep,method,mre,runtime_s,acceptance_rate,lambda,varsigma,diverged\n",
    );
    for r in &result.records {
        let runtime =
            if include_timings { format!("{:.3}", r.runtime_seconds) } else { String::new() };
        let acceptance = r.acceptance_rate.map(|a| a.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.factor.name(),
            r.level,
            r.rep,
            r.method.name(),
            r.mre,
            runtime,
            acceptance,
            r.lambda,
            r.varsigma,
            u8::from(r.diverged),
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}
