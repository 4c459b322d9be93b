//! Penalty functions `pen(k, n)` subtracted from the log-criteria.

use crate::special::ln_gamma;

/// Coefficient of `ln n` shared by the NML and DNML penalties:
/// `k(k-1)(2k-1)/12 + (k-1)(k+1+ε)/2`.
fn log_n_coefficient(k: usize, epsilon: f64) -> f64 {
    let k = k as f64;
    k * (k - 1.0) * (2.0 * k - 1.0) / 12.0 + (k - 1.0) * (k + 1.0 + epsilon) / 2.0
}

/// Penalty of order `k³ ln n` used with the integrated-likelihood criterion.
pub fn pen_nml(k: usize, n: usize, epsilon: f64) -> f64 {
    if k <= 1 {
        return 0.0;
    }
    log_n_coefficient(k, epsilon) * (n as f64).ln()
}

/// `pen_nml` plus the label-coding term `n · ln((k-1)!)`.
pub fn pen_dnml(k: usize, n: usize, epsilon: f64) -> f64 {
    if k <= 1 {
        return 0.0;
    }
    pen_nml(k, n, epsilon) + n as f64 * ln_gamma(k as f64)
}

/// Corrected-BIC penalty `λ · [k(k+1)/2 · ln n + n ln k]`.
pub fn pen_cbic(k: usize, n: usize, lambda: f64) -> f64 {
    let kf = k as f64;
    let nf = n as f64;
    lambda * (kf * (kf + 1.0) / 2.0 * nf.ln() + nf * kf.ln())
}
