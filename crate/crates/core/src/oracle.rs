//! Brute-force reference values on tiny instances.
//!
//! Everything here enumerates the full outcome space (all graphs on `n`
//! nodes, all labelings in `[k]^n`, all multinomial sequences) and works in
//! linear space with its own pair counting, so it shares no code path with
//! the log-space kernels in [`crate::criteria`] except where a function is
//! explicitly about checking those kernels.

use crate::criteria::{log_dnml, log_integrated_graph, log_integrated_labels};
use crate::error::{domain, Result};
use crate::graph::{block_stats, Graph, Labeling};

/// Size limits of the exhaustive enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TinyInstanceBound {
    pub max_nodes: usize,
    pub max_k: usize,
    pub max_trials: usize,
    pub max_categories: usize,
}

pub const TINY: TinyInstanceBound = TinyInstanceBound {
    max_nodes: 4,
    max_k: 3,
    max_trials: 8,
    max_categories: 4,
};

impl TinyInstanceBound {
    fn check_graph(&self, n: usize, k: usize) -> Result<()> {
        if n == 0 || n > self.max_nodes || k == 0 || k > self.max_k {
            return Err(domain(format!(
                "oracle limited to 1 <= n <= {} and 1 <= k <= {}, got n = {n}, k = {k}",
                self.max_nodes, self.max_k
            )));
        }
        Ok(())
    }
}

/// All `2^(n(n-1)/2)` simple graphs on `n` nodes.
pub fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let count = 1u64 << pairs.len();
    (0..count).map(move |mask| {
        Graph::from_edges(
            n,
            pairs
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &p)| p),
        )
        .expect("valid pairs")
    })
}

/// All `k^n` labelings, empty communities included.
pub fn all_labelings(n: usize, k: usize) -> impl Iterator<Item = Labeling> {
    let total = (k as u64).pow(n as u32);
    (0..total).map(move |mut code| {
        let labels = (0..n)
            .map(|_| {
                let l = (code % k as u64) as usize;
                code /= k as u64;
                l
            })
            .collect();
        Labeling::new(k, labels).expect("labels below k")
    })
}

/// `C_MN(m, q)` summed over all `q^m` sequences.
pub fn brute_c_mn(m: usize, q: usize) -> Result<f64> {
    if q == 0 || q > TINY.max_categories || m > TINY.max_trials {
        return Err(domain(format!(
            "oracle limited to m <= {} and 1 <= q <= {}",
            TINY.max_trials, TINY.max_categories
        )));
    }
    let mut total = 0.0;
    let mut counts = vec![0usize; q];
    for mut code in 0..(q as u64).pow(m as u32) {
        counts.iter_mut().for_each(|c| *c = 0);
        for _ in 0..m {
            counts[(code % q as u64) as usize] += 1;
            code /= q as u64;
        }
        total += counts
            .iter()
            .map(|&c| (c as f64 / m as f64).powi(c as i32))
            .product::<f64>();
    }
    Ok(total)
}

/// Maximized conditional likelihood `sup_P P(x | z)`, counting node pairs
/// directly.
fn sup_conditional(graph: &Graph, z: &Labeling) -> f64 {
    let k = z.k();
    let n = z.len();
    let mut pairs = vec![0i32; k * k];
    let mut edges = vec![0i32; k * k];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (z.label(i).min(z.label(j)), z.label(i).max(z.label(j)));
            pairs[a * k + b] += 1;
            if graph.has_edge(i, j) {
                edges[a * k + b] += 1;
            }
        }
    }
    pairs
        .iter()
        .zip(&edges)
        .filter(|(&m, _)| m > 0)
        .map(|(&m, &o)| {
            let p = o as f64 / m as f64;
            p.powi(o) * (1.0 - p).powi(m - o)
        })
        .product()
}

/// Maximized label likelihood `sup_π P(z) = Π (n_a/n)^{n_a}`.
fn sup_labels(z: &Labeling) -> f64 {
    let n = z.len() as f64;
    let mut sizes = vec![0i32; z.k()];
    z.iter().for_each(|l| sizes[l] += 1);
    sizes.iter().map(|&s| (s as f64 / n).powi(s)).product()
}

/// `Σ_x sup_P P(x | z)` over every graph `x` on `z.len()` nodes.
pub fn brute_c_dnml_a(z: &Labeling) -> Result<f64> {
    TINY.check_graph(z.len(), z.k())?;
    Ok(all_graphs(z.len()).map(|g| sup_conditional(&g, z)).sum())
}

/// `Σ_z Σ_x exp(log_dnml(x, z))`, which is exactly 1 when the DNML is
/// correctly normalized.
pub fn brute_dnml_normalization(n: usize, k: usize) -> Result<f64> {
    TINY.check_graph(n, k)?;
    let graphs: Vec<Graph> = all_graphs(n).collect();
    let mut total = 0.0;
    for z in all_labelings(n, k) {
        for g in &graphs {
            total += log_dnml(&block_stats(g, &z)?).exp();
        }
    }
    Ok(total)
}

/// Normalizer of the maximized complete likelihood,
/// `Σ_z Σ_x sup_{π,P} P(x, z)`.
pub fn brute_c_nmcl(n: usize, k: usize) -> Result<f64> {
    TINY.check_graph(n, k)?;
    let graphs: Vec<Graph> = all_graphs(n).collect();
    Ok(all_labelings(n, k)
        .map(|z| sup_labels(&z) * graphs.iter().map(|g| sup_conditional(g, &z)).sum::<f64>())
        .sum())
}

/// `Σ_x exp(ln Q(x | z))` over every graph; 1 for a proper distribution.
pub fn brute_integrated_graph_mass(z: &Labeling) -> Result<f64> {
    TINY.check_graph(z.len(), z.k())?;
    let mut total = 0.0;
    for g in all_graphs(z.len()) {
        total += log_integrated_graph(&block_stats(&g, z)?).exp();
    }
    Ok(total)
}

/// `Σ_z exp(ln Q(z))` over every labeling; 1 for a proper distribution.
pub fn brute_integrated_label_mass(n: usize, k: usize) -> Result<f64> {
    TINY.check_graph(n, k)?;
    let g = Graph::empty(n)?;
    let mut total = 0.0;
    for z in all_labelings(n, k) {
        total += log_integrated_labels(&block_stats(&g, &z)?).exp();
    }
    Ok(total)
}
