//! Parametric complexity of the multinomial maximum-likelihood code.
//!
//! `C_MN(m, Q)` is the sum, over all `Q^m` sequences of length `m`, of the
//! maximized multinomial likelihood. It is computed from the binary case by
//! the linear recurrence
//!
//! ```text
//! C_MN(m, 1) = 1
//! C_MN(m, Q) = C_MN(m, Q - 1) + m / (Q - 2) · C_MN(m, Q - 2),   Q >= 3
//! ```
//!
//! everything in natural-log space.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::error::{domain, Result};
use crate::special::{ln_factorial, log_add_exp, xlogy, CompensatedSum};

/// `ln C_MN(m, 2)`, a compensated sum over the `m + 1` possible counts.
///
/// Each summand `binom(m, t) (t/m)^t ((m-t)/m)^(m-t)` is at most 1 and equals
/// 1 at both ends, so the sum is accumulated directly without rescaling.
pub fn log_binary_complexity(m: u64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let mf = m as f64;
    let ln_m_fact = ln_factorial(m);
    let term = |t: u64| -> f64 {
        let (tf, rf) = (t as f64, (m - t) as f64);
        let log = ln_m_fact - ln_factorial(t) - ln_factorial(m - t)
            + xlogy(tf, tf / mf)
            + xlogy(rf, rf / mf);
        log.exp()
    };
    // term(t) == term(m - t)
    let mut acc = CompensatedSum::default();
    for t in 0..m.div_ceil(2) {
        acc.add(2.0 * term(t));
    }
    if m.is_multiple_of(2) {
        acc.add(term(m / 2));
    }
    acc.value().ln()
}

/// Runs the recurrence up from `ln C_MN(m, 2)`.
fn extend(m: u64, q: u64, log_binary: f64) -> f64 {
    match q {
        1 => 0.0,
        2 => log_binary,
        _ => {
            let ln_m = if m == 0 {
                f64::NEG_INFINITY
            } else {
                (m as f64).ln()
            };
            let (mut prev2, mut prev1) = (0.0, log_binary);
            for j in 3..=q {
                let next = log_add_exp(prev1, ln_m - ((j - 2) as f64).ln() + prev2);
                prev2 = prev1;
                prev1 = next;
            }
            prev1
        }
    }
}

/// `ln C_MN(m, q)` for `m >= 0` trials over `q >= 1` categories, in
/// `O(m + q)` time.
pub fn log_multinomial_complexity(m: u64, q: u64) -> Result<f64> {
    if q == 0 {
        return Err(domain("multinomial complexity needs at least one category"));
    }
    if q == 1 {
        return Ok(0.0);
    }
    Ok(extend(m, q, log_binary_complexity(m)))
}

/// Memo of `ln C_MN(m, 2)` keyed by `m`.
///
/// Block capacities recur across candidate community counts, so a selection
/// run shares one cache between all of its `k`. Safe to use from several
/// threads at once.
#[derive(Debug, Default)]
pub struct ComplexityCache {
    binary: RwLock<HashMap<u64, f64>>,
}

impl ComplexityCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn log_binary(&self, m: u64) -> f64 {
        if m == 0 {
            return 0.0;
        }
        if let Some(&v) = self.binary.read().unwrap().get(&m) {
            return v;
        }
        let v = log_binary_complexity(m);
        self.binary.write().unwrap().insert(m, v);
        v
    }

    pub fn log_multinomial(&self, m: u64, q: u64) -> Result<f64> {
        if q == 0 {
            return Err(domain("multinomial complexity needs at least one category"));
        }
        if q == 1 {
            return Ok(0.0);
        }
        Ok(extend(m, q, self.log_binary(m)))
    }

    pub fn len(&self) -> usize {
        self.binary.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
