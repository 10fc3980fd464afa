//! Helpers shared by unit tests: independent oracles kept separate from the
//! implementation paths they check.

/// Central finite differences of `f` at `theta` with step `h`.
pub(crate) fn finite_difference(f: impl Fn(&[f64]) -> f64, theta: &[f64], h: f64) -> Vec<f64> {
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

/// Relative L2 distance between a gradient and its oracle.
pub(crate) fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = a.iter().map(|x| x * x).sum::<f64>().max(1e-300);
    (num / den).sqrt()
}

/// Standard error of the mean of a correlated sequence, by batch means.
pub(crate) fn batch_means_stderr(xs: &[f64], n_batches: usize) -> f64 {
    let batch = xs.len() / n_batches;
    assert!(batch >= 2, "sequence too short for {n_batches} batches");
    let means: Vec<f64> = (0..n_batches)
        .map(|b| xs[b * batch..(b + 1) * batch].iter().sum::<f64>() / batch as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / n_batches as f64;
    let var = means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>() / (n_batches - 1) as f64;
    (var / n_batches as f64).sqrt()
}
