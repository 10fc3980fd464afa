//! Quasi-Bayesian sparse phase retrieval.
//!
//! Recovers a sparse signal `theta*` from noisy intensity measurements
//! `y_j = (A_j' theta*)^2 + eps_j` by sampling the Gibbs quasi-posterior
//! `exp(-lambda r(theta)) pi(theta)`, where `r` is the quartic empirical
//! risk and `pi` a scaled-Student shrinkage prior. Langevin Monte Carlo
//! and its Metropolis-adjusted variant explore the quasi-posterior; a
//! thresholded Wirtinger-flow baseline provides a frequentist comparator.
//!
//! Module map:
//!
//! * [`rng`] — seedable streams and the reproducibility contract;
//! * [`model`] — measurement model, empirical risk, gradient, synthetic
//!   data, design diagnostics;
//! * [`prior`] — scaled-Student log prior and its gradient;
//! * [`sampler`] — LMC and MALA kernels over any [`sampler::Target`];
//! * [`baseline`] — spectral initialization and hard-thresholded
//!   Wirtinger flow;
//! * [`theory`] — tuning constants and minimax-rate expressions;
//! * [`experiments`] — Monte Carlo sweep harness and the `mre` metric;
//! * [`plot`] — SVG boxplots of sweep summaries;
//! * [`imaging`] — PGM ingestion and image reconstruction.

pub mod baseline;
pub mod error;
pub mod experiments;
pub mod imaging;
pub mod model;
pub mod plot;
pub mod prior;
pub mod rng;
pub mod sampler;
pub mod theory;

#[cfg(test)]
pub(crate) mod test_util;

pub use baseline::BaselineConfig;
pub use error::{Error, Result};
pub use experiments::{Factor, LambdaRule, Method, SweepRecord, SweepResult, SweepSpec};
pub use imaging::ImageSignal;
pub use model::ProblemInstance;
pub use prior::PriorConfig;
pub use rng::RngState;
pub use sampler::{Chain, SamplerConfig};
pub use theory::TheoryParams;
