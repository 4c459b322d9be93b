//! Selection of the number of communities: for each candidate `k` obtain
//! plug-in labels, score them, and keep the best penalized score.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::{self, ComplexityCache, CriterionScore, Method, PenaltyConfig};
use crate::error::{domain, Result};
use crate::graph::{block_stats, BlockStats, Graph, Labeling};
use crate::spectral::{DetectorConfig, Embedding};

/// Default candidate cap: `min(n, 10)`.
pub fn default_k_max(n: usize) -> usize {
    n.min(10)
}

/// Plug-in labels for `k = 1..=k_max`. A `k` whose detector failed carries the
/// error message instead of a labeling.
#[derive(Debug, Clone)]
pub struct Detection {
    pub labels: Vec<std::result::Result<Labeling, String>>,
    pub elapsed_ns: u64,
}

impl Detection {
    pub fn k_max(&self) -> usize {
        self.labels.len()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KRecord {
    pub k: usize,
    pub labeling: Option<Labeling>,
    pub score: Option<CriterionScore>,
    /// Why this `k` has no score; such records never win the argmax.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectionResult {
    pub method: Method,
    pub k_max: usize,
    pub records: Vec<KRecord>,
    pub k_hat: usize,
    pub detection_ns: u64,
    pub criterion_ns: u64,
}

impl SelectionResult {
    pub fn record(&self, k: usize) -> &KRecord {
        &self.records[k - 1]
    }

    pub fn best(&self) -> &CriterionScore {
        self.record(self.k_hat)
            .score
            .as_ref()
            .expect("the selected k always has a score")
    }
}

fn check_k_max(graph: &Graph, k_max: usize) -> Result<()> {
    let n = graph.node_count();
    if k_max == 0 || k_max > n {
        return Err(domain(format!("k_max must lie in 1..={n}, got {k_max}")));
    }
    Ok(())
}

/// Runs spectral clustering once per candidate `k`, sharing one
/// eigendecomposition.
pub fn detect(graph: &Graph, k_max: usize, detector: &DetectorConfig) -> Result<Detection> {
    check_k_max(graph, k_max)?;
    detector.validate()?;
    let start = Instant::now();
    let embedding = if k_max > 1 {
        Some(Embedding::compute(graph, detector).map_err(|e| e.to_string()))
    } else {
        None
    };
    let labels = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            if k == 1 {
                return Ok(Labeling::single(graph.node_count()));
            }
            match embedding.as_ref().expect("computed for k_max > 1") {
                Ok(emb) => emb.cluster(k, detector).map_err(|e| e.to_string()),
                Err(e) => Err(e.clone()),
            }
        })
        .collect();
    Ok(Detection {
        labels,
        elapsed_ns: start.elapsed().as_nanos() as u64,
    })
}

/// Scores every detected labeling with `scorer` and picks the argmax of the
/// penalized score, ties going to the smaller `k`.
pub fn evaluate<F>(
    graph: &Graph,
    detection: &Detection,
    method: Method,
    scorer: F,
) -> Result<SelectionResult>
where
    F: Fn(&BlockStats) -> Result<CriterionScore> + Sync,
{
    let start = Instant::now();
    let records: Vec<KRecord> = detection
        .labels
        .par_iter()
        .enumerate()
        .map(|(idx, labels)| {
            let k = idx + 1;
            let outcome = labels.clone().and_then(|z| {
                let stats = block_stats(graph, &z).map_err(|e| e.to_string())?;
                let s = scorer(&stats).map_err(|e| e.to_string())?;
                if s.penalized.is_finite() {
                    Ok((z, s))
                } else {
                    Err(format!("non-finite criterion value {}", s.penalized))
                }
            });
            match outcome {
                Ok((z, s)) => KRecord {
                    k,
                    labeling: Some(z),
                    score: Some(s),
                    failure: None,
                },
                Err(msg) => {
                    log::warn!("k = {k} excluded from selection: {msg}");
                    KRecord {
                        k,
                        labeling: labels.as_ref().ok().cloned(),
                        score: None,
                        failure: Some(msg),
                    }
                }
            }
        })
        .collect();
    let criterion_ns = start.elapsed().as_nanos() as u64;

    let mut k_hat: Option<(usize, f64)> = None;
    for r in &records {
        if let Some(s) = &r.score {
            if k_hat.is_none_or(|(_, best)| s.penalized > best) {
                k_hat = Some((r.k, s.penalized));
            }
        }
    }
    let (k_hat, _) = k_hat.ok_or_else(|| domain("no candidate k produced a score"))?;
    Ok(SelectionResult {
        method,
        k_max: detection.k_max(),
        records,
        k_hat,
        detection_ns: detection.elapsed_ns,
        criterion_ns,
    })
}

/// Estimates the number of communities of `graph` with one criterion.
pub fn select_k(
    graph: &Graph,
    k_max: usize,
    method: Method,
    penalty: &PenaltyConfig,
    detector: &DetectorConfig,
) -> Result<SelectionResult> {
    Ok(select_k_all(graph, k_max, &[method], penalty, detector)?.remove(0))
}

/// Like [`select_k`] for several criteria at once; the plug-in labels are
/// computed a single time and shared.
pub fn select_k_all(
    graph: &Graph,
    k_max: usize,
    methods: &[Method],
    penalty: &PenaltyConfig,
    detector: &DetectorConfig,
) -> Result<Vec<SelectionResult>> {
    penalty.validate()?;
    if methods.is_empty() {
        return Err(domain("no selection method given"));
    }
    let detection = detect(graph, k_max, detector)?;
    let cache = ComplexityCache::new();
    methods
        .iter()
        .map(|&m| {
            evaluate(graph, &detection, m, |stats| {
                criteria::score(m, stats, penalty, &cache)
            })
        })
        .collect()
}
