//! Acceptance suite: every release-gating property as one test per
//! criterion, each printing a PASS line with the measured values.
//!
//! Run with:
//!
//! ```text
//! cargo test -p qphase-cli --test acceptance -- --nocapture
//! ```

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use qphase_core::experiments::{
    self, mre, run_method, run_sweep, Factor, FixedParams, LambdaRule, Method, RunBudget, SweepSpec,
};
use qphase_core::imaging::{self, ReconstructConfig};
use qphase_core::model::{empirical_risk, generate_instance, generate_signal, risk_gradient};
use qphase_core::prior::{log_prior_gradient, PriorConfig};
use qphase_core::rng::RngState;
use qphase_core::sampler::{
    grad_log_posterior, log_posterior_unnorm, mala_run_target, SamplerConfig, Target,
};
use qphase_core::theory::{self, TheoryParams};

fn pass(n: usize, detail: &str) {
    println!("acceptance criterion {n:2}: PASS  {detail}");
}

fn finite_difference(f: impl Fn(&[f64]) -> f64, theta: &[f64], h: f64) -> Vec<f64> {
    let mut grad = vec![0.0; theta.len()];
    let mut probe = theta.to_vec();
    for i in 0..theta.len() {
        probe[i] = theta[i] + h;
        let up = f(&probe);
        probe[i] = theta[i] - h;
        let down = f(&probe);
        probe[i] = theta[i];
        grad[i] = (up - down) / (2.0 * h);
    }
    grad
}

fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = a.iter().map(|x| x * x).sum::<f64>().max(1e-300);
    (num / den).sqrt()
}

/// Standard error of the mean of a correlated sequence by batch means.
fn batch_means_stderr(xs: &[f64], n_batches: usize) -> f64 {
    let batch = xs.len() / n_batches;
    let means: Vec<f64> = (0..n_batches)
        .map(|b| xs[b * batch..(b + 1) * batch].iter().sum::<f64>() / batch as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / n_batches as f64;
    let var = means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>() / (n_batches - 1) as f64;
    (var / n_batches as f64).sqrt()
}

/// Criterion 1: on 50 random configurations (p <= 30, m <= 100,
/// varsigma in {0.05, 0.1, 1}, lambda in {1, m, 4m}) the analytic
/// posterior gradient matches central finite differences of the log
/// posterior to relative error < 1e-5, in under 5 seconds.
#[test]
fn criterion_01_gradient_oracle() {
    let start = Instant::now();
    let mut rng = RngState::from_seed(101);
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let p = 2 + rng.index(29);
        let m = 5 + rng.index(96);
        let s_star = 1 + rng.index(p);
        let theta_star = generate_signal(&mut rng, p, s_star).unwrap();
        let inst = generate_instance(&mut rng, &theta_star, m, 0.3).unwrap();
        let varsigma = [0.05, 0.1, 1.0][trial % 3];
        let lambda = [1.0, m as f64, 4.0 * m as f64][(trial / 3) % 3];
        let prior = PriorConfig::unconstrained(varsigma).unwrap();
        let theta: Vec<f64> = rng.normal_vector(p).unwrap().iter().map(|x| 0.5 * x).collect();
        let analytic = grad_log_posterior(&inst, &prior, lambda, &theta).unwrap();
        let fd = finite_difference(
            |t| log_posterior_unnorm(&inst, &prior, lambda, t).unwrap(),
            &theta,
            1e-6,
        );
        let err = relative_error(&fd, &analytic);
        assert!(err < 1e-5, "config {trial}: relative error {err}");
        worst = worst.max(err);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "oracle took {elapsed:?}");
    pass(1, &format!("worst relative error {worst:.2e} over 50 configs in {elapsed:.2?}"));
}

/// Criterion 2: evenness of the risk, oddness of both gradients, and the
/// sign invariances of mre and the loss product hold exactly on 1e3
/// random inputs (bitwise for the evenness identities).
#[test]
fn criterion_02_symmetry_suite() {
    let mut rng = RngState::from_seed(202);
    let mut inst = None;
    let prior = PriorConfig::unconstrained(0.1).unwrap();
    for trial in 0..1_000 {
        if trial % 100 == 0 {
            let theta_star = generate_signal(&mut rng, 8, 3).unwrap();
            inst = Some(generate_instance(&mut rng, &theta_star, 25, 0.3).unwrap());
        }
        let inst = inst.as_ref().unwrap();
        let theta = rng.normal_vector(8).unwrap();
        let neg: Vec<f64> = theta.iter().map(|x| -x).collect();

        assert_eq!(
            empirical_risk(inst, &theta).unwrap().to_bits(),
            empirical_risk(inst, &neg).unwrap().to_bits()
        );
        let g = risk_gradient(inst, &theta).unwrap();
        let gn = risk_gradient(inst, &neg).unwrap();
        for (a, b) in g.iter().zip(&gn) {
            assert!(*a == -b && a.abs().to_bits() == b.abs().to_bits());
        }
        let pg = log_prior_gradient(&prior, &theta).unwrap();
        let pgn = log_prior_gradient(&prior, &neg).unwrap();
        for (a, b) in pg.iter().zip(&pgn) {
            assert!(*a == -b && a.abs().to_bits() == b.abs().to_bits());
        }

        let reference = rng.normal_vector(8).unwrap();
        let nref: Vec<f64> = reference.iter().map(|x| -x).collect();
        let base = mre(&theta, &reference).unwrap();
        assert_eq!(base.to_bits(), mre(&neg, &reference).unwrap().to_bits());
        assert_eq!(base.to_bits(), mre(&theta, &nref).unwrap().to_bits());

        let lp = theory::loss_product(&theta, &reference).unwrap();
        assert_eq!(lp.to_bits(), theory::loss_product(&neg, &reference).unwrap().to_bits());
        assert_eq!(lp.to_bits(), theory::loss_product(&theta, &nref).unwrap().to_bits());
    }
    pass(2, "all symmetry identities exact on 1000 random inputs");
}

/// Criterion 3: over the 5x5x5 grid sigma, xi, C in {0.5, 1, 2, 5, 10},
/// lambda* < m/C2, alpha > 0 and beta/alpha <= 3 at lambda = lambda*;
/// the instance sigma = xi = C = 1, m = 144 gives lambda* = 1,
/// alpha = 0.9, beta = 1.1 within 1e-12.
#[test]
fn criterion_03_theory_constants() {
    let grid = [0.5, 1.0, 2.0, 5.0, 10.0];
    for &sigma in &grid {
        for &xi in &grid {
            for &c in &grid {
                let params = TheoryParams {
                    sigma,
                    xi,
                    c_bound: c,
                    kappa0: 1.0,
                    m: 144,
                    p: 20,
                    s_star: 4,
                    delta: 0.05,
                    frak_c: 1.0,
                };
                let k = theory::constants(&params).unwrap();
                assert!(k.lambda_star < 144.0 / k.c2);
                let (alpha, beta) = theory::alpha_beta(&params, k.lambda_star).unwrap();
                assert!(alpha > 0.0, "alpha {alpha} at sigma={sigma} xi={xi} c={c}");
                assert!(beta / alpha <= 3.0 + 1e-12, "ratio {} > 3", beta / alpha);
            }
        }
    }
    let params = TheoryParams {
        sigma: 1.0,
        xi: 1.0,
        c_bound: 1.0,
        kappa0: 1.0,
        m: 144,
        p: 20,
        s_star: 4,
        delta: 0.05,
        frak_c: 1.0,
    };
    let k = theory::constants(&params).unwrap();
    assert!((k.lambda_star - 1.0).abs() < 1e-12);
    let (alpha, beta) = theory::alpha_beta(&params, k.lambda_star).unwrap();
    assert!((alpha - 0.9).abs() < 1e-12, "alpha {alpha}");
    assert!((beta - 1.1).abs() < 1e-12, "beta {beta}");
    pass(3, "125-point grid satisfies the bounds; unit instance gives (1, 0.9, 1.1) exactly");
}

struct StdGaussian1D;

impl Target for StdGaussian1D {
    fn dim(&self) -> usize {
        1
    }
    fn log_density(&self, theta: &[f64]) -> f64 {
        -0.5 * theta[0] * theta[0]
    }
    fn grad_log_density(&self, theta: &[f64], out: &mut [f64]) {
        out[0] = -theta[0];
    }
}

/// Criterion 4: MALA on the injected 1-D standard Gaussian recovers mean
/// and variance within 3 standard errors over 1e5 post-burn-in steps and
/// lands its acceptance rate in [0.4, 0.7].
#[test]
fn criterion_04_sampler_calibration() {
    let cfg =
        SamplerConfig { n_iter: 105_000, burn_in: 5_000, ..SamplerConfig::new(1.0, 1.0, 404) };
    let chain = mala_run_target(&StdGaussian1D, &cfg, &[0.0]).unwrap();
    let xs: Vec<f64> = chain.samples.iter().map(|s| s[0]).collect();
    assert_eq!(xs.len(), 100_000);

    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let se_mean = batch_means_stderr(&xs, 100);
    assert!(mean.abs() < 3.0 * se_mean, "mean {mean}, se {se_mean}");

    let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let var = sq.iter().sum::<f64>() / sq.len() as f64 - mean * mean;
    let se_var = batch_means_stderr(&sq, 100);
    assert!((var - 1.0).abs() < 3.0 * se_var, "variance {var}, se {se_var}");

    assert!((0.4..=0.7).contains(&chain.acceptance_rate), "acceptance {}", chain.acceptance_rate);
    pass(
        4,
        &format!(
            "mean {mean:.4} (se {se_mean:.4}), variance {var:.4} (se {se_var:.4}), acceptance {:.3}",
            chain.acceptance_rate
        ),
    );
}

/// Criterion 5: noiseless configuration p=20, s*=3, m=200 with the
/// defaults varsigma=0.1, lambda=4m at 30000 iterations: every method
/// reaches mre < 1e-3 in under 60 seconds.
#[test]
fn criterion_05_noiseless_recovery() {
    let mut rng = RngState::from_seed(1729);
    let theta_star = generate_signal(&mut rng, 20, 3).unwrap();
    let inst = generate_instance(&mut rng, &theta_star, 200, 0.0).unwrap();
    let lambda = 800.0;
    let budget = RunBudget::default();
    let mut hint = None;
    let mut detail = String::new();
    for method in [Method::Mala, Method::Lmc, Method::TwfBaseline] {
        let start = Instant::now();
        let out = run_method(method, &inst, 0.1, lambda, &budget, 1729, 3, hint).unwrap();
        let elapsed = start.elapsed();
        if method == Method::Mala {
            hint = out.final_gamma;
        }
        let err = mre(&out.estimate, &theta_star).unwrap();
        assert!(err < 1e-3, "{}: mre {err}", method.name());
        assert!(elapsed.as_secs_f64() < 60.0, "{}: took {elapsed:?}", method.name());
        detail.push_str(&format!("{} mre {err:.1e} in {elapsed:.2?}; ", method.name()));
    }
    pass(5, detail.trim_end_matches("; "));
}

fn trend_spec(factor: Factor, levels: Vec<f64>, fixed: FixedParams, iters: usize) -> SweepSpec {
    SweepSpec {
        factor,
        levels,
        fixed,
        n_reps: 10,
        methods: Method::ALL.to_vec(),
        seed: 606,
        sampler_iters: iters,
        sampler_burn_in: 1_000.min(iters / 3),
        baseline_iters: 5_000,
    }
}

/// Criterion 6: sample-size trend at p=100, s*=10, sigma=1 over
/// m in {100, 500, 2000}, 10 replications, 3000 iterations: per method
/// the median error is non-increasing in m with at most one inversion;
/// total runtime under 15 minutes.
#[test]
fn criterion_06_sample_size_trend() {
    let start = Instant::now();
    let spec = trend_spec(
        Factor::SampleSize,
        vec![100.0, 500.0, 2000.0],
        FixedParams {
            m: 0,
            p: 100,
            s_star: 10,
            sigma: 1.0,
            varsigma: 0.1,
            lambda: LambdaRule::TimesM(4.0),
        },
        3_000,
    );
    let result = run_sweep(&spec).unwrap();
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 900.0, "sweep took {elapsed:?}");

    let mut detail = String::new();
    for method in Method::ALL {
        let medians: Vec<f64> = spec
            .levels
            .iter()
            .map(|&l| experiments::median_mre(&result, l, method).unwrap())
            .collect();
        let inversions = medians.windows(2).filter(|w| w[1] > w[0]).count();
        assert!(
            inversions <= 1,
            "{}: medians {medians:?} have {inversions} inversions",
            method.name()
        );
        detail.push_str(&format!(
            "{} medians {:.1e}/{:.1e}/{:.1e}; ",
            method.name(),
            medians[0],
            medians[1],
            medians[2]
        ));
    }
    pass(6, &format!("{}wall {elapsed:.1?}", detail));
}

/// Criterion 7: noise trend at m=500: the median error at sigma=10
/// exceeds the median at sigma=0.5 for every method over 10 replications.
#[test]
fn criterion_07_noise_trend() {
    let spec = trend_spec(
        Factor::Noise,
        vec![0.5, 10.0],
        FixedParams {
            m: 500,
            p: 100,
            s_star: 10,
            sigma: 0.0,
            varsigma: 0.1,
            lambda: LambdaRule::TimesM(4.0),
        },
        3_000,
    );
    let result = run_sweep(&spec).unwrap();
    let mut detail = String::new();
    for method in Method::ALL {
        let low = experiments::median_mre(&result, 0.5, method).unwrap();
        let high = experiments::median_mre(&result, 10.0, method).unwrap();
        assert!(
            high > low,
            "{}: median at sigma=10 ({high:.3e}) not above sigma=0.5 ({low:.3e})",
            method.name()
        );
        detail.push_str(&format!("{} {low:.1e} -> {high:.1e}; ", method.name()));
    }
    pass(7, detail.trim_end_matches("; "));
}

/// Criterion 8: tuning sanity for both samplers over 10 replications at
/// the published 30000-iteration budget: the median error at
/// varsigma=0.1 is strictly below varsigma=10, and the median error at
/// lambda=400m exceeds lambda=4m.
#[test]
fn criterion_08_tuning_sanity() {
    let samplers = vec![Method::Lmc, Method::Mala];

    let mut varsigma_spec = trend_spec(
        Factor::Varsigma,
        vec![0.1, 10.0],
        FixedParams {
            m: 200,
            p: 100,
            s_star: 10,
            sigma: 1.0,
            varsigma: 0.0,
            lambda: LambdaRule::TimesM(4.0),
        },
        30_000,
    );
    varsigma_spec.seed = 111;
    varsigma_spec.methods = samplers.clone();
    let varsigma_result = run_sweep(&varsigma_spec).unwrap();

    // Printed design of the inverse-temperature sweep: m = 50, levels
    // 4m = 200 and 400m = 20000.
    let mut lambda_spec = trend_spec(
        Factor::Lambda,
        vec![200.0, 20_000.0],
        FixedParams {
            m: 50,
            p: 100,
            s_star: 10,
            sigma: 1.0,
            varsigma: 0.1,
            lambda: LambdaRule::TimesM(4.0),
        },
        30_000,
    );
    lambda_spec.seed = 111;
    lambda_spec.methods = samplers.clone();
    let lambda_result = run_sweep(&lambda_spec).unwrap();

    let mut detail = String::new();
    for &method in &samplers {
        let good = experiments::median_mre(&varsigma_result, 0.1, method).unwrap();
        let bad = experiments::median_mre(&varsigma_result, 10.0, method).unwrap();
        assert!(
            good < bad,
            "{}: varsigma=0.1 median ({good:.3e}) not below varsigma=10 ({bad:.3e})",
            method.name()
        );
        let moderate = experiments::median_mre(&lambda_result, 200.0, method).unwrap();
        let extreme = experiments::median_mre(&lambda_result, 20_000.0, method).unwrap();
        assert!(
            extreme > moderate,
            "{}: lambda=400m median ({extreme:.3e}) not above lambda=4m ({moderate:.3e})",
            method.name()
        );
        detail.push_str(&format!(
            "{}: varsigma {good:.1e}<{bad:.1e}, lambda {moderate:.1e}<{extreme:.1e}; ",
            method.name()
        ));
    }
    pass(8, detail.trim_end_matches("; "));
}

fn qphase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qphase"))
        .args(args)
        .env("QPHASE_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn rerun_identical(label: &str, args: &[&str], outputs: &[PathBuf]) {
    let first = qphase(args);
    assert!(first.status.success(), "{label}: {}", String::from_utf8_lossy(&first.stderr));
    let snapshots: Vec<Vec<u8>> = outputs
        .iter()
        .map(|p| std::fs::read(p).unwrap_or_else(|_| panic!("{label}: missing {}", p.display())))
        .collect();
    let second = qphase(args);
    assert!(second.status.success(), "{label}: rerun failed");
    for (path, snap) in outputs.iter().zip(&snapshots) {
        assert_eq!(
            &std::fs::read(path).unwrap(),
            snap,
            "{label}: {} differs between reruns",
            path.display()
        );
    }
}

/// Criterion 9: every subcommand is byte-deterministic: identical
/// arguments and seed reproduce identical CSV/SVG/PGM outputs.
#[test]
fn criterion_09_determinism() {
    let dir = std::env::temp_dir().join(format!("qphase-acc9-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let inst_dir = dir.join("inst");

    rerun_identical(
        "generate",
        &[
            "generate",
            "--p",
            "12",
            "--s-star",
            "3",
            "--m",
            "50",
            "--sigma",
            "0.5",
            "--seed",
            "17",
            "--out",
            inst_dir.to_str().unwrap(),
        ],
        &["A.csv", "y.csv", "theta_star.csv", "meta.txt"]
            .iter()
            .map(|f| inst_dir.join(f))
            .collect::<Vec<_>>(),
    );

    let chain = dir.join("chain.csv");
    rerun_identical(
        "sample",
        &[
            "sample",
            "--method",
            "mala",
            "--iters",
            "500",
            "--burn-in",
            "100",
            "--seed",
            "7",
            "--in",
            inst_dir.to_str().unwrap(),
            "--out",
            chain.to_str().unwrap(),
        ],
        &[chain.clone(), dir.join("chain.csv.meta")],
    );

    let theta = dir.join("theta.csv");
    rerun_identical(
        "baseline",
        &[
            "baseline",
            "--iters",
            "300",
            "--in",
            inst_dir.to_str().unwrap(),
            "--out",
            theta.to_str().unwrap(),
        ],
        std::slice::from_ref(&theta),
    );

    let theory_csv = dir.join("theory.csv");
    rerun_identical(
        "theory",
        &[
            "theory",
            "--sigma",
            "2",
            "--xi",
            "1",
            "--c",
            "1.5",
            "--m",
            "500",
            "--p",
            "100",
            "--s-star",
            "10",
            "--h1",
            "10",
            "--csv",
            theory_csv.to_str().unwrap(),
        ],
        std::slice::from_ref(&theory_csv),
    );

    let sweep_csv = dir.join("results.csv");
    let sweep_svg = dir.join("plots.svg");
    rerun_identical(
        "sweep",
        &[
            "sweep",
            "--preset",
            "lambda",
            "--reps",
            "2",
            "--iters",
            "300",
            "--seed",
            "11",
            "--out",
            sweep_csv.to_str().unwrap(),
            "--svg",
            sweep_svg.to_str().unwrap(),
        ],
        &[sweep_csv.clone(), sweep_svg.clone()],
    );

    let pgm = dir.join("tiny.pgm");
    std::fs::write(&pgm, "P2\n4 4\n255\n0 200 0 0\n0 180 120 0\n0 0 160 0\n0 0 140 30\n").unwrap();
    let recon = dir.join("recon");
    rerun_identical(
        "image",
        &[
            "image",
            "--input",
            pgm.to_str().unwrap(),
            "--m",
            "100",
            "--sigma",
            "0.2",
            "--methods",
            "lmc,twf-baseline",
            "--seed",
            "13",
            "--iters",
            "400",
            "--burn-in",
            "100",
            "--out-dir",
            recon.to_str().unwrap(),
        ],
        &[recon.join("lmc.pgm"), recon.join("twf-baseline.pgm"), recon.join("metrics.csv")],
    );

    std::fs::remove_dir_all(&dir).ok();
    pass(9, "all six subcommands byte-identical across reruns");
}

/// Largest error observed for any method on the digit-2 fixture across
/// oracle runs at seeds {1729, 7, 42} was 9.5e-5; the committed gate
/// allows three times that.
const DIGIT2_MRE_GATE: f64 = 3e-4;

/// Criterion 10: the committed 16x22 digit fixture (42.6% nonzero)
/// reconstructs at m=4000, sigma=1 with mre below the committed gate for
/// all three methods, and the PGM writer-reader pair is exact on
/// quantized images.
#[test]
fn criterion_10_image_pipeline() {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/digit2.pgm");
    let img = imaging::load_pgm(&fixture).unwrap();
    assert_eq!((img.width, img.height), (16, 22));
    assert!((img.nnz_fraction - 0.426).abs() < 5e-4, "{}", img.nnz_fraction);

    let cfg = ReconstructConfig::new(1729);
    let recons = imaging::reconstruct_image(&img, &cfg).unwrap();
    assert_eq!(recons.len(), 3);
    let mut detail = String::new();
    for r in &recons {
        assert!(
            r.mre < DIGIT2_MRE_GATE,
            "{}: mre {} above the committed gate {DIGIT2_MRE_GATE}",
            r.method.name(),
            r.mre
        );
        detail.push_str(&format!("{} mre {:.1e}; ", r.method.name(), r.mre));
    }

    // Quantized roundtrip: save -> load -> save reproduces the file.
    let dir = std::env::temp_dir().join(format!("qphase-acc10-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let first = dir.join("first.pgm");
    imaging::save_pgm(&img, &first).unwrap();
    let second = dir.join("second.pgm");
    imaging::save_pgm(&imaging::load_pgm(&first).unwrap(), &second).unwrap();
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    std::fs::remove_dir_all(&dir).ok();
    pass(10, &format!("{}roundtrip exact", detail));
}
