//! Shared fixtures for the kernel benchmarks.

use qphase_core::model::{generate_instance, generate_signal};
use qphase_core::{ProblemInstance, RngState};

/// A seeded instance at simulation scale (p = 100, s* = 10, sigma = 1).
pub fn bench_instance(m: usize) -> (ProblemInstance, Vec<f64>) {
    let mut rng = RngState::from_seed(0xbe7c);
    let theta_star = generate_signal(&mut rng, 100, 10).expect("valid sparsity");
    let inst = generate_instance(&mut rng, &theta_star, m, 1.0).expect("valid instance");
    (inst, theta_star)
}
