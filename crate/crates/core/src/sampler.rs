//! Stochastic block model sampling.
//!
//! Randomness comes from ChaCha8 keyed by a [`Seed`]. Labels and edges are
//! drawn from separate streams of the same key, and node pairs are visited in
//! a fixed `(i < j)` order, so a `(params, seed)` pair always produces the
//! same graph regardless of how many replications run in parallel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, shape, Result};
use crate::graph::{Graph, Labeling};

const LABEL_STREAM: u64 = 0;
const EDGE_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Seed(pub u64);

impl Seed {
    /// Seed of replication `index`: `seed ⊕ index`.
    pub fn replication(self, index: u64) -> Seed {
        Seed(self.0 ^ index)
    }

    pub(crate) fn rng(self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(stream);
        rng
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// Parameters `(k, π, P)` of an SBM, optionally in the sparse form `P = ρ S`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SbmParams {
    k: usize,
    pi: Vec<f64>,
    /// Row-major `k × k`.
    p: Vec<f64>,
    sparse: Option<(f64, Vec<f64>)>,
}

fn validate_pi(pi: &[f64]) -> Result<()> {
    if pi.is_empty() {
        return Err(domain("community proportions are empty"));
    }
    if let Some(p) = pi.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(domain(format!("community proportion {p} is not positive")));
    }
    let total: f64 = pi.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(domain(format!(
            "community proportions sum to {total}, not 1"
        )));
    }
    Ok(())
}

fn flatten_symmetric(k: usize, rows: &[Vec<f64>], what: &str) -> Result<Vec<f64>> {
    if rows.len() != k || rows.iter().any(|r| r.len() != k) {
        return Err(shape(format!("{what} must be {k} × {k}")));
    }
    for (a, row) in rows.iter().enumerate() {
        for (b, &v) in row.iter().enumerate() {
            if v != rows[b][a] {
                return Err(domain(format!("{what} is not symmetric at ({a}, {b})")));
            }
        }
    }
    Ok(rows.iter().flatten().copied().collect())
}

fn check_unit_interval(p: &[f64]) -> Result<()> {
    match p.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        Some(x) => Err(domain(format!("edge probability {x} is outside [0, 1]"))),
        None => Ok(()),
    }
}

impl SbmParams {
    pub fn new(pi: Vec<f64>, p: &[Vec<f64>]) -> Result<Self> {
        validate_pi(&pi)?;
        let k = pi.len();
        let p = flatten_symmetric(k, p, "P")?;
        check_unit_interval(&p)?;
        Ok(SbmParams {
            k,
            pi,
            p,
            sparse: None,
        })
    }

    /// `P = ρ S` with `ρ ∈ (0, 1]` and `ρ · max(S) <= 1`.
    pub fn sparse(pi: Vec<f64>, rho: f64, s: &[Vec<f64>]) -> Result<Self> {
        validate_pi(&pi)?;
        let k = pi.len();
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(domain(format!("rho must lie in (0, 1], got {rho}")));
        }
        let s = flatten_symmetric(k, s, "S")?;
        if let Some(x) = s.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(domain(format!("S entry {x} is negative")));
        }
        let s_max = s.iter().copied().fold(0.0, f64::max);
        if rho * s_max > 1.0 {
            return Err(domain(format!("rho · max(S) = {} exceeds 1", rho * s_max)));
        }
        let p = s.iter().map(|x| rho * x).collect();
        Ok(SbmParams {
            k,
            pi,
            p,
            sparse: Some((rho, s)),
        })
    }

    /// Probability `within` on the diagonal and `between` elsewhere.
    pub fn planted(pi: Vec<f64>, within: f64, between: f64) -> Result<Self> {
        let k = pi.len();
        Self::new(pi, &planted_matrix(k, within, between))
    }

    pub fn balanced(k: usize) -> Vec<f64> {
        vec![1.0 / k as f64; k]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn prob(&self, a: usize, b: usize) -> f64 {
        self.p[a * self.k + b]
    }

    pub fn rho(&self) -> Option<f64> {
        self.sparse.as_ref().map(|(rho, _)| *rho)
    }
}

pub fn planted_matrix(k: usize, within: f64, between: f64) -> Vec<Vec<f64>> {
    (0..k)
        .map(|a| {
            (0..k)
                .map(|b| if a == b { within } else { between })
                .collect()
        })
        .collect()
}

/// Draws `n` i.i.d. community labels with `P(label = a) = pi[a]`.
pub fn sample_labels(n: usize, pi: &[f64], seed: Seed) -> Result<Labeling> {
    validate_pi(pi)?;
    let k = pi.len();
    let mut cumulative = Vec::with_capacity(k);
    let mut acc = 0.0;
    for p in pi {
        acc += p;
        cumulative.push(acc);
    }
    let mut rng = seed.rng(LABEL_STREAM);
    let labels = (0..n)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * acc;
            cumulative.partition_point(|&c| c <= u).min(k - 1)
        })
        .collect();
    Labeling::new(k, labels)
}

/// Draws each pair `i < j` once as Bernoulli(`P[z_i][z_j]`).
pub fn sample_graph(labels: &Labeling, params: &SbmParams, seed: Seed) -> Result<Graph> {
    if labels.k() != params.k() {
        return Err(shape(format!(
            "labeling has k = {} but P is {} × {}",
            labels.k(),
            params.k(),
            params.k()
        )));
    }
    let n = labels.len();
    let mut rng = seed.rng(EDGE_STREAM);
    let mut edges = Vec::new();
    for i in 0..n {
        let row = labels.label(i) * params.k;
        for j in i + 1..n {
            let p = params.p[row + labels.label(j)];
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Labels then graph, both from `seed`.
pub fn sample(n: usize, params: &SbmParams, seed: Seed) -> Result<(Labeling, Graph)> {
    let labels = sample_labels(n, params.pi(), seed)?;
    let graph = sample_graph(&labels, params, seed)?;
    Ok((labels, graph))
}
