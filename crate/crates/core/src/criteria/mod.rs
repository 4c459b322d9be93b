//! Model-selection criteria computed from block statistics.
//!
//! Three penalized scores are supported, all in natural-log units:
//!
//! * **DNML**: maximized graph likelihood and maximized label likelihood, each
//!   normalized by its own parametric complexity, minus [`pen_dnml`].
//! * **CBIC**: profile (complete) log-likelihood minus the corrected-BIC
//!   penalty [`pen_cbic`].
//! * **IL**: Beta(½,½)/Dirichlet(½) integrated likelihood minus [`pen_nml`].
//!
//! Empty communities and empty block pairs are allowed everywhere and
//! contribute nothing, following `0 · ln 0 = 0`.

mod complexity;
mod penalty;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use complexity::{log_binary_complexity, log_multinomial_complexity, ComplexityCache};
pub use penalty::{pen_cbic, pen_dnml, pen_nml};

use crate::error::{domain, Error, Result};
use crate::graph::BlockStats;
use crate::special::{ln_gamma, xlogy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dnml,
    Cbic,
    Il,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Dnml, Method::Cbic, Method::Il];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Dnml => "dnml",
            Method::Cbic => "cbic",
            Method::Il => "il",
        }
    }

    /// Penalty this method charges for `k` communities on `n` nodes.
    pub fn penalty(self, k: usize, n: usize, config: &PenaltyConfig) -> f64 {
        match self {
            Method::Dnml => pen_dnml(k, n, config.epsilon),
            Method::Cbic => pen_cbic(k, n, config.cbic_lambda),
            Method::Il => pen_nml(k, n, config.epsilon),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dnml" => Ok(Method::Dnml),
            "cbic" => Ok(Method::Cbic),
            "il" => Ok(Method::Il),
            other => Err(domain(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyConfig {
    /// Slack `ε > 0` in the NML/DNML penalties.
    pub epsilon: f64,
    /// Tuning constant `λ > 0` of the corrected BIC.
    pub cbic_lambda: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        PenaltyConfig {
            epsilon: 0.5,
            cbic_lambda: 1.0,
        }
    }
}

impl PenaltyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(domain(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.cbic_lambda > 0.0 && self.cbic_lambda.is_finite()) {
            return Err(domain(format!(
                "CBIC lambda must be positive, got {}",
                self.cbic_lambda
            )));
        }
        Ok(())
    }
}

/// A criterion evaluated at one candidate `k`. `penalized` is always
/// `log_score - penalty`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriterionScore {
    pub method: Method,
    pub k: usize,
    pub log_score: f64,
    pub penalty: f64,
    pub penalized: f64,
}

impl CriterionScore {
    pub fn new(method: Method, k: usize, log_score: f64, penalty: f64) -> Self {
        CriterionScore {
            method,
            k,
            log_score,
            penalty,
            penalized: log_score - penalty,
        }
    }
}

/// `Σ_{a<=b} [o ln(o/n_ab) + (n_ab - o) ln(1 - o/n_ab)]`, the log-likelihood
/// of the graph at the block-density MLE.
pub fn cond_loglik_sup(stats: &BlockStats) -> f64 {
    stats
        .pairs()
        .filter(|&(cap, _)| cap > 0)
        .map(|(cap, o)| {
            let (cap, o) = (cap as f64, o as f64);
            let p = o / cap;
            xlogy(o, p) + xlogy(cap - o, 1.0 - p)
        })
        .sum()
}

/// `Σ_a n_a ln(n_a / n)`, the log-likelihood of the labels at the MLE of the
/// community proportions.
pub fn label_loglik_sup(stats: &BlockStats) -> f64 {
    let n = stats.node_count() as f64;
    stats
        .sizes()
        .iter()
        .map(|&s| xlogy(s as f64, s as f64 / n))
        .sum()
}

/// Log-DNML of a labeled graph:
///
/// ```text
/// label_loglik_sup + cond_loglik_sup - ln C_MN(n, k) - Σ_{a<=b} ln C_MN(n_ab, 2)
/// ```
pub fn log_dnml(stats: &BlockStats) -> f64 {
    log_dnml_cached(stats, &ComplexityCache::new())
}

pub fn log_dnml_cached(stats: &BlockStats, cache: &ComplexityCache) -> f64 {
    let graph_complexity: f64 = stats.pairs().map(|(cap, _)| cache.log_binary(cap)).sum();
    let label_complexity = cache
        .log_multinomial(stats.node_count(), stats.k() as u64)
        .expect("block statistics have k >= 1");
    label_loglik_sup(stats) + cond_loglik_sup(stats) - label_complexity - graph_complexity
}

/// `ln Q(a | z)`: graph likelihood integrated against independent
/// Beta(½, ½) priors on every block density.
pub fn log_integrated_graph(stats: &BlockStats) -> f64 {
    let half = ln_gamma(0.5);
    stats
        .pairs()
        .map(|(cap, o)| {
            let (cap, o) = (cap as f64, o as f64);
            ln_gamma(o + 0.5) + ln_gamma(cap - o + 0.5) - ln_gamma(cap + 1.0) - 2.0 * half
        })
        .sum()
}

/// `ln Q(z)`: label likelihood integrated against a Dirichlet(½, …, ½) prior.
pub fn log_integrated_labels(stats: &BlockStats) -> f64 {
    let k = stats.k() as f64;
    let n = stats.node_count() as f64;
    let members: f64 = stats
        .sizes()
        .iter()
        .map(|&s| ln_gamma(s as f64 + 0.5))
        .sum();
    ln_gamma(k / 2.0) - k * ln_gamma(0.5) + members - ln_gamma(n + k / 2.0)
}

/// `ln Q(a | z) + ln Q(z)`.
pub fn log_integrated_lik(stats: &BlockStats) -> f64 {
    log_integrated_graph(stats) + log_integrated_labels(stats)
}

/// Unpenalized log-criterion of `method` for one labeled graph.
pub fn log_score(method: Method, stats: &BlockStats, cache: &ComplexityCache) -> f64 {
    match method {
        Method::Dnml => log_dnml_cached(stats, cache),
        Method::Cbic => cond_loglik_sup(stats) + label_loglik_sup(stats),
        Method::Il => log_integrated_lik(stats),
    }
}

/// Penalized score of `method` at `k = stats.k()`.
pub fn score(
    method: Method,
    stats: &BlockStats,
    config: &PenaltyConfig,
    cache: &ComplexityCache,
) -> Result<CriterionScore> {
    config.validate()?;
    let k = stats.k();
    let n = stats.node_count() as usize;
    Ok(CriterionScore::new(
        method,
        k,
        log_score(method, stats, cache),
        method.penalty(k, n, config),
    ))
}
