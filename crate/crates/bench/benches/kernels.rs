use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qphase_bench::bench_instance;
use qphase_core::baseline::{spectral_init, thresholded_wf_run, BaselineConfig};
use qphase_core::model::{empirical_risk, risk_gradient};
use qphase_core::prior::log_prior_gradient;
use qphase_core::sampler::{default_lmc_gamma, lmc_run, SamplerConfig};
use qphase_core::{PriorConfig, RngState};

fn risk_kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("risk");
    for m in [100usize, 500, 2000] {
        let (inst, theta_star) = bench_instance(m);
        group.bench_with_input(BenchmarkId::new("empirical_risk", m), &m, |b, _| {
            b.iter(|| empirical_risk(black_box(&inst), black_box(&theta_star)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("risk_gradient", m), &m, |b, _| {
            b.iter(|| risk_gradient(black_box(&inst), black_box(&theta_star)).unwrap())
        });
    }
    group.finish();
}

fn prior_kernel(c: &mut Criterion) {
    let cfg = PriorConfig::default();
    let mut rng = RngState::from_seed(1);
    let theta = rng.normal_vector(1000).unwrap();
    c.bench_function("log_prior_gradient_p1000", |b| {
        b.iter(|| log_prior_gradient(black_box(&cfg), black_box(&theta)).unwrap())
    });
}

fn sampler_kernel(c: &mut Criterion) {
    let (inst, _) = bench_instance(500);
    let lambda = 4.0 * 500.0;
    let prior = PriorConfig::default();
    let init = spectral_init(&inst);
    c.bench_function("lmc_100_iters_m500_p100", |b| {
        let cfg = SamplerConfig {
            n_iter: 100,
            burn_in: 0,
            ..SamplerConfig::new(lambda, default_lmc_gamma(&inst, lambda), 7)
        };
        b.iter(|| lmc_run(black_box(&inst), &prior, &cfg, &init).unwrap())
    });
}

fn baseline_kernel(c: &mut Criterion) {
    let (inst, _) = bench_instance(500);
    c.bench_function("spectral_init_m500_p100", |b| b.iter(|| spectral_init(black_box(&inst))));
    c.bench_function("twf_100_iters_m500_p100", |b| {
        let cfg = BaselineConfig { n_iter: 100, ..BaselineConfig::with_defaults(&inst) };
        b.iter(|| thresholded_wf_run(black_box(&inst), &cfg).unwrap())
    });
}

criterion_group!(benches, risk_kernels, prior_kernel, sampler_kernel, baseline_kernel);
criterion_main!(benches);
