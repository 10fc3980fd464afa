//! Quadratic (intensity-only) measurement model.
//!
//! Observations follow `y_j = (A_j' theta*)^2 + eps_j` with Gaussian sensing
//! rows `A_j ~ N(0, I_p)`. The empirical risk is the quartic
//!
//! ```text
//! r(theta) = (1/4m) sum_j ((A_j' theta)^2 - y_j)^2
//! ```
//!
//! with gradient `(1/m) sum_j ((A_j' theta)^2 - y_j)(A_j' theta) A_j`.
//! Both are even/odd in `theta`, reflecting the inherent sign ambiguity of
//! intensity measurements: `theta` and `-theta` are indistinguishable.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::RngState;

/// Dense row-major matrix of sensing vectors; row `j` is `A_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    m: usize,
    p: usize,
    data: Vec<f64>,
}

impl SensingMatrix {
    pub fn from_rows(m: usize, p: usize, data: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidCount);
        }
        if p == 0 {
            return Err(Error::InvalidDimension);
        }
        if data.len() != m * p {
            return Err(Error::ShapeMismatch { expected: m * p, got: data.len() });
        }
        Ok(Self { m, p, data })
    }

    pub fn n_rows(&self) -> usize {
        self.m
    }

    pub fn n_cols(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.p..(j + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.p)
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One phase-retrieval data set: sensing matrix, observations and, when the
/// data are synthetic, the ground truth used to generate them.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub a: SensingMatrix,
    pub y: Vec<f64>,
    pub theta_star: Option<Vec<f64>>,
    pub sigma: Option<f64>,
    pub s_star: Option<usize>,
}

impl ProblemInstance {
    pub fn new(a: SensingMatrix, y: Vec<f64>) -> Result<Self> {
        if y.len() != a.n_rows() {
            return Err(Error::ShapeMismatch { expected: a.n_rows(), got: y.len() });
        }
        Ok(Self { a, y, theta_star: None, sigma: None, s_star: None })
    }

    pub fn n_measurements(&self) -> usize {
        self.a.n_rows()
    }

    pub fn dim(&self) -> usize {
        self.a.n_cols()
    }

    fn check_dim(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.dim() {
            return Err(Error::ShapeMismatch { expected: self.dim(), got: theta.len() });
        }
        Ok(())
    }

    /// Largest observation, used by step-size heuristics.
    pub fn max_y(&self) -> f64 {
        self.y.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean_y(&self) -> f64 {
        self.y.iter().sum::<f64>() / self.y.len() as f64
    }
}

/// Draws a unit-norm `s_star`-sparse signal: `p - s_star` positions chosen
/// uniformly without replacement are zeroed, the rest are i.i.d. N(0,1),
/// and the vector is rescaled to unit Euclidean norm.
pub fn generate_signal(state: &mut RngState, p: usize, s_star: usize) -> Result<Vec<f64>> {
    if p == 0 {
        return Err(Error::InvalidDimension);
    }
    if s_star == 0 || s_star > p {
        return Err(Error::InvalidSparsity { s_star, p });
    }
    // Fisher-Yates selection of the retained support.
    let mut idx: Vec<usize> = (0..p).collect();
    for i in 0..p.min(s_star) {
        let j = i + state.index(p - i);
        idx.swap(i, j);
    }
    let mut theta = vec![0.0; p];
    let mut support: Vec<usize> = idx[..s_star].to_vec();
    support.sort_unstable();
    for &i in &support {
        theta[i] = state.standard_normal();
    }
    let norm = dot(&theta, &theta).sqrt();
    debug_assert!(norm > 0.0);
    for x in theta.iter_mut() {
        *x /= norm;
    }
    Ok(theta)
}

/// Samples `m` Gaussian sensing rows and assembles observations
/// `y_j = (A_j' theta*)^2 + eps_j` with `eps_j ~ N(0, sigma^2)`.
pub fn generate_instance(
    state: &mut RngState,
    theta_star: &[f64],
    m: usize,
    sigma: f64,
) -> Result<ProblemInstance> {
    if m == 0 {
        return Err(Error::InvalidCount);
    }
    if theta_star.is_empty() {
        return Err(Error::InvalidDimension);
    }
    if sigma.is_nan() || sigma < 0.0 {
        return Err(Error::InvalidConfig(format!("noise std must be nonnegative, got {sigma}")));
    }
    let p = theta_star.len();
    let mut data = vec![0.0; m * p];
    let mut y = vec![0.0; m];
    for j in 0..m {
        let row = &mut data[j * p..(j + 1) * p];
        state.fill_standard_normal(row);
        let z = dot(row, theta_star);
        y[j] = z * z;
    }
    if sigma > 0.0 {
        for yj in y.iter_mut() {
            *yj += sigma * state.standard_normal();
        }
    }
    let s_star = theta_star.iter().filter(|&&x| x != 0.0).count();
    let mut inst = ProblemInstance::new(SensingMatrix::from_rows(m, p, data)?, y)?;
    inst.theta_star = Some(theta_star.to_vec());
    inst.sigma = Some(sigma);
    inst.s_star = Some(s_star);
    Ok(inst)
}

/// Empirical risk `r(theta) = (1/4m) sum_j ((A_j' theta)^2 - y_j)^2`.
pub fn empirical_risk(inst: &ProblemInstance, theta: &[f64]) -> Result<f64> {
    inst.check_dim(theta)?;
    let m = inst.n_measurements() as f64;
    let sum: f64 = inst
        .a
        .rows()
        .zip(&inst.y)
        .map(|(row, &yj)| {
            let z = dot(row, theta);
            let d = z * z - yj;
            d * d
        })
        .sum();
    Ok(sum / (4.0 * m))
}

/// Gradient of the empirical risk,
/// `(1/m) sum_j ((A_j' theta)^2 - y_j)(A_j' theta) A_j`.
pub fn risk_gradient(inst: &ProblemInstance, theta: &[f64]) -> Result<Vec<f64>> {
    let mut grad = vec![0.0; inst.dim()];
    risk_gradient_into(inst, theta, &mut grad)?;
    Ok(grad)
}

pub(crate) fn risk_gradient_into(
    inst: &ProblemInstance,
    theta: &[f64],
    grad: &mut [f64],
) -> Result<()> {
    inst.check_dim(theta)?;
    grad.fill(0.0);
    for (row, &yj) in inst.a.rows().zip(&inst.y) {
        let z = dot(row, theta);
        let w = (z * z - yj) * z;
        for (g, &a) in grad.iter_mut().zip(row) {
            *g += w * a;
        }
    }
    let inv_m = 1.0 / inst.n_measurements() as f64;
    for g in grad.iter_mut() {
        *g *= inv_m;
    }
    Ok(())
}

/// Empirical stand-ins for the design-boundedness and anti-concentration
/// preconditions, reported for logging only and never enforced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignDiagnostics {
    /// `max_j |A_j' theta|`, a realized value for the design bound along
    /// `theta`. Gaussian rows are unbounded, so this grows like
    /// `sqrt(2 log m) |theta|` rather than settling at a constant.
    pub realized_bound: f64,
    /// Smallest eigenvalue of `(1/m) sum_j A_j A_j'`, estimated by
    /// two-stage power iteration. Near zero whenever `m < p`.
    pub min_eigenvalue_proxy: f64,
}

/// Computes [`DesignDiagnostics`] for the instance along `theta`.
pub fn assumption_diagnostics(inst: &ProblemInstance, theta: &[f64]) -> Result<DesignDiagnostics> {
    inst.check_dim(theta)?;
    let realized_bound = inst.a.rows().map(|row| dot(row, theta).abs()).fold(0.0, f64::max);

    // lambda_min(M) = lambda_max(M) - lambda_max(lambda_max I - M).
    let p = inst.dim();
    let inv_m = 1.0 / inst.n_measurements() as f64;
    let apply = |v: &[f64], out: &mut Vec<f64>| {
        out.clear();
        out.resize(p, 0.0);
        for row in inst.a.rows() {
            let z = dot(row, v);
            for (o, &a) in out.iter_mut().zip(row) {
                *o += z * a;
            }
        }
        for o in out.iter_mut() {
            *o *= inv_m;
        }
    };
    let (_, lambda_max, _) = power_iteration(p, &apply, 100, 1e-8);
    let shifted = |v: &[f64], out: &mut Vec<f64>| {
        apply(v, out);
        for (o, &vi) in out.iter_mut().zip(v) {
            *o = lambda_max * vi - *o;
        }
    };
    let (_, spread, _) = power_iteration(p, &shifted, 100, 1e-8);
    let lambda_min = lambda_max - spread;
    Ok(DesignDiagnostics { realized_bound, min_eigenvalue_proxy: lambda_min.max(0.0) })
}

/// Power iteration for the dominant eigenpair of the operator `apply`,
/// started from a fixed seeded unit vector so results are deterministic.
///
/// Returns `(eigenvector, rayleigh_quotient, converged)`; convergence means
/// the Rayleigh quotient moved by less than `tol` (relative) between steps.
pub(crate) fn power_iteration(
    p: usize,
    apply: &dyn Fn(&[f64], &mut Vec<f64>),
    max_iter: usize,
    tol: f64,
) -> (Vec<f64>, f64, bool) {
    let mut state = RngState::new(0x5eed, 0);
    let mut v = state.normal_vector(p).expect("p >= 1");
    normalize(&mut v);
    let mut w = Vec::with_capacity(p);
    let mut eig = f64::NAN;
    for _ in 0..max_iter {
        apply(&v, &mut w);
        let next = dot(&v, &w);
        let norm = dot(&w, &w).sqrt();
        if norm == 0.0 {
            // v lies in the kernel; the quotient is exactly zero.
            return (v, 0.0, true);
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
        if (next - eig).abs() <= tol * next.abs().max(1.0) {
            return (v, next, true);
        }
        eig = next;
    }
    (v, eig, false)
}

/// Dominant eigenpair of the observation-weighted second-moment matrix
/// `(1/m) sum_j y_j A_j A_j'`, computed matrix-free.
pub(crate) fn weighted_top_eigenpair(inst: &ProblemInstance) -> (Vec<f64>, f64, bool) {
    let p = inst.dim();
    let inv_m = 1.0 / inst.n_measurements() as f64;
    let apply = |v: &[f64], out: &mut Vec<f64>| {
        out.clear();
        out.resize(p, 0.0);
        for (row, &yj) in inst.a.rows().zip(&inst.y) {
            let z = yj * dot(row, v);
            for (o, &a) in out.iter_mut().zip(row) {
                *o += z * a;
            }
        }
        for o in out.iter_mut() {
            *o *= inv_m;
        }
    };
    power_iteration(p, &apply, 100, 1e-8)
}

pub(crate) fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

/// Writes `A.csv`, `y.csv`, `meta.txt` and, when ground truth is known,
/// `theta_star.csv` into `dir`.
pub fn save_instance(inst: &ProblemInstance, dir: &Path, seed: u64) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut a_csv = String::new();
    for row in inst.a.rows() {
        writeln!(a_csv, "{}", join_csv(row)).expect("string write");
    }
    std::fs::write(dir.join("A.csv"), a_csv)?;

    let mut y_csv = String::new();
    for yj in &inst.y {
        writeln!(y_csv, "{yj}").expect("string write");
    }
    std::fs::write(dir.join("y.csv"), y_csv)?;

    let mut meta = String::new();
    writeln!(meta, "m = {}", inst.n_measurements()).expect("string write");
    writeln!(meta, "p = {}", inst.dim()).expect("string write");
    if let Some(s) = inst.s_star {
        writeln!(meta, "s_star = {s}").expect("string write");
    }
    if let Some(sigma) = inst.sigma {
        writeln!(meta, "sigma = {sigma}").expect("string write");
    }
    writeln!(meta, "seed = {seed}").expect("string write");
    std::fs::write(dir.join("meta.txt"), meta)?;

    if let Some(theta) = &inst.theta_star {
        let mut t_csv = String::new();
        for x in theta {
            writeln!(t_csv, "{x}").expect("string write");
        }
        std::fs::write(dir.join("theta_star.csv"), t_csv)?;
    }
    Ok(())
}

/// Loads an instance written by [`save_instance`]. `theta_star.csv` is
/// optional; `meta.txt` supplies sparsity and noise level when present.
pub fn load_instance(dir: &Path) -> Result<ProblemInstance> {
    let a_path = dir.join("A.csv");
    let text = std::fs::read_to_string(&a_path)?;
    let mut data = Vec::new();
    let mut p = 0usize;
    let mut m = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> =
            line.split(',').map(|tok| parse_float(tok, &a_path, lineno)).collect::<Result<_>>()?;
        if p == 0 {
            p = row.len();
        } else if row.len() != p {
            return Err(Error::FileFormat {
                path: a_path.display().to_string(),
                msg: format!("row {} has {} columns, expected {p}", lineno + 1, row.len()),
            });
        }
        data.extend_from_slice(&row);
        m += 1;
    }
    if m == 0 || p == 0 {
        return Err(Error::FileFormat {
            path: a_path.display().to_string(),
            msg: "empty sensing matrix".into(),
        });
    }

    let y_path = dir.join("y.csv");
    let y = read_column(&y_path)?;
    let mut inst = ProblemInstance::new(SensingMatrix::from_rows(m, p, data)?, y)?;

    let t_path = dir.join("theta_star.csv");
    if t_path.exists() {
        let theta = read_column(&t_path)?;
        if theta.len() != p {
            return Err(Error::FileFormat {
                path: t_path.display().to_string(),
                msg: format!("expected {p} entries, got {}", theta.len()),
            });
        }
        inst.theta_star = Some(theta);
    }

    let meta_path = dir.join("meta.txt");
    if meta_path.exists() {
        for line in std::fs::read_to_string(&meta_path)?.lines() {
            let Some((key, value)) = line.split_once('=') else { continue };
            match key.trim() {
                "s_star" => inst.s_star = value.trim().parse().ok(),
                "sigma" => inst.sigma = value.trim().parse().ok(),
                _ => {}
            }
        }
    }
    Ok(inst)
}

fn read_column(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(lineno, line)| parse_float(line, path, lineno))
        .collect()
}

fn parse_float(tok: &str, path: &Path, lineno: usize) -> Result<f64> {
    tok.trim().parse::<f64>().map_err(|_| Error::FileFormat {
        path: path.display().to_string(),
        msg: format!("invalid number {:?} on line {}", tok.trim(), lineno + 1),
    })
}

pub(crate) fn join_csv(row: &[f64]) -> String {
    let mut s = String::new();
    for (i, x) in row.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        write!(s, "{x}").expect("string write");
    }
    s
}
