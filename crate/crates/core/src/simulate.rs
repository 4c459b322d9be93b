//! Replicated simulation studies: sample SBM graphs over a parameter grid and
//! record the number of communities each criterion selects.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::{self, ComplexityCache, Method, PenaltyConfig};
use crate::error::{domain, Error, Result};
use crate::sampler::{planted_matrix, sample, SbmParams, Seed};
use crate::selector::{default_k_max, detect, evaluate, select_k_all};
use crate::spectral::DetectorConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// Grid over the node count with fixed `a`, `b`.
    VaryN,
    /// Grid over the between-community probability `b` with fixed `n`, `a`.
    VaryB,
    /// Grid over `ρ` with `P = ρ S`, `S` having `a` on the diagonal and `b`
    /// elsewhere.
    Sparsity,
    /// A single `(n, a, b)` setting.
    Custom,
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vary-n" => Ok(ScenarioKind::VaryN),
            "vary-b" => Ok(ScenarioKind::VaryB),
            "sparsity" => Ok(ScenarioKind::Sparsity),
            "custom" => Ok(ScenarioKind::Custom),
            other => Err(domain(format!("unknown scenario {other:?}"))),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::VaryN => "vary-n",
            ScenarioKind::VaryB => "vary-b",
            ScenarioKind::Sparsity => "sparsity",
            ScenarioKind::Custom => "custom",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Proportions {
    Balanced,
    Explicit(Vec<f64>),
}

impl Proportions {
    fn resolve(&self, k0: usize) -> Result<Vec<f64>> {
        match self {
            Proportions::Balanced => Ok(SbmParams::balanced(k0)),
            Proportions::Explicit(pi) if pi.len() == k0 => Ok(pi.clone()),
            Proportions::Explicit(pi) => Err(domain(format!(
                "{} proportions given for k0 = {k0}",
                pi.len()
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    /// Node counts; `vary-n` sweeps them, other scenarios need exactly one.
    pub n_grid: Vec<usize>,
    pub k0: usize,
    pub pi: Proportions,
    pub a: f64,
    /// Between-community value; `vary-b` sweeps `b_grid` instead.
    pub b: f64,
    pub b_grid: Vec<f64>,
    pub rho_grid: Vec<f64>,
    pub replications: usize,
    pub seed: Seed,
    pub methods: Vec<Method>,
    pub penalty: PenaltyConfig,
    /// Candidate cap; `None` means `min(n, 10)`.
    pub k_max: Option<usize>,
}

impl ScenarioConfig {
    /// Balanced five-community setting with `a = 0.8`, `b = 0.3`, DNML only.
    pub fn new(kind: ScenarioKind) -> Self {
        ScenarioConfig {
            kind,
            n_grid: vec![200],
            k0: 5,
            pi: Proportions::Balanced,
            a: 0.8,
            b: 0.3,
            b_grid: Vec::new(),
            rho_grid: Vec::new(),
            replications: 20,
            seed: Seed(0),
            methods: vec![Method::Dnml],
            penalty: PenaltyConfig::default(),
            k_max: None,
        }
    }
}

/// One point of the parameter grid.
#[derive(Debug, Clone)]
pub struct Setting {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub rho: Option<f64>,
    pub params: SbmParams,
}

fn single_n(config: &ScenarioConfig) -> Result<usize> {
    match config.n_grid.as_slice() {
        [n] => Ok(*n),
        other => Err(domain(format!(
            "scenario {} needs exactly one n, got {}",
            config.kind,
            other.len()
        ))),
    }
}

fn nonempty<T>(grid: &[T], what: &str) -> Result<()> {
    if grid.is_empty() {
        Err(domain(format!("{what} grid is empty")))
    } else {
        Ok(())
    }
}

/// Expands the scenario into its grid of settings, validating every one.
pub fn settings(config: &ScenarioConfig) -> Result<Vec<Setting>> {
    if config.replications == 0 {
        return Err(domain("replications must be at least 1"));
    }
    if config.k0 == 0 {
        return Err(domain("k0 must be at least 1"));
    }
    if config.methods.is_empty() {
        return Err(domain("no selection method given"));
    }
    config.penalty.validate()?;
    let pi = config.pi.resolve(config.k0)?;
    let dense = |n: usize, b: f64| -> Result<Setting> {
        Ok(Setting {
            n,
            a: config.a,
            b,
            rho: None,
            params: SbmParams::planted(pi.clone(), config.a, b)?,
        })
    };
    let out: Vec<Setting> = match config.kind {
        ScenarioKind::VaryN => {
            nonempty(&config.n_grid, "n")?;
            config
                .n_grid
                .iter()
                .map(|&n| dense(n, config.b))
                .collect::<Result<_>>()?
        }
        ScenarioKind::VaryB => {
            nonempty(&config.b_grid, "b")?;
            let n = single_n(config)?;
            config
                .b_grid
                .iter()
                .map(|&b| dense(n, b))
                .collect::<Result<_>>()?
        }
        ScenarioKind::Sparsity => {
            nonempty(&config.rho_grid, "rho")?;
            let n = single_n(config)?;
            let s = planted_matrix(config.k0, config.a, config.b);
            config
                .rho_grid
                .iter()
                .map(|&rho| {
                    Ok(Setting {
                        n,
                        a: config.a,
                        b: config.b,
                        rho: Some(rho),
                        params: SbmParams::sparse(pi.clone(), rho, &s)?,
                    })
                })
                .collect::<Result<_>>()?
        }
        ScenarioKind::Custom => vec![dense(single_n(config)?, config.b)?],
    };
    for s in &out {
        if s.n == 0 {
            return Err(domain("n must be positive"));
        }
        if let Some(k_max) = config.k_max {
            if k_max == 0 || k_max > s.n {
                return Err(domain(format!("k_max {k_max} is outside 1..={}", s.n)));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationRow {
    pub setting: usize,
    pub n: usize,
    pub k0: usize,
    pub a: f64,
    pub b: f64,
    pub rho: Option<f64>,
    pub replication: usize,
    pub seed: u64,
    pub method: Method,
    pub k_hat: usize,
    pub detection_ns: u64,
    pub criterion_ns: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub setting: usize,
    pub n: usize,
    pub k0: usize,
    pub a: f64,
    pub b: f64,
    pub rho: Option<f64>,
    pub method: Method,
    pub replications: usize,
    pub mean_k_hat: f64,
    pub sd_k_hat: f64,
    /// Fraction of replications with `k_hat == k0`.
    pub hit_rate: f64,
}

/// Runs every `(setting, replication)` pair. Replication `r` uses the seed
/// `seed ⊕ r` in every setting, so settings share their random labels.
/// Rows come back sorted by setting, replication, then method.
pub fn run(config: &ScenarioConfig) -> Result<Vec<ReplicationRow>> {
    let grid = settings(config)?;
    let jobs: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|s| (0..config.replications).map(move |r| (s, r)))
        .collect();
    let mut rows: Vec<ReplicationRow> = jobs
        .par_iter()
        .map(|&(s, r)| -> Result<Vec<ReplicationRow>> {
            let setting = &grid[s];
            let seed = config.seed.replication(r as u64);
            let (_, graph) = sample(setting.n, &setting.params, seed)?;
            let k_max = config.k_max.unwrap_or_else(|| default_k_max(setting.n));
            let results = select_k_all(
                &graph,
                k_max,
                &config.methods,
                &config.penalty,
                &DetectorConfig::with_seed(seed),
            )?;
            Ok(results
                .into_iter()
                .map(|res| ReplicationRow {
                    setting: s,
                    n: setting.n,
                    k0: config.k0,
                    a: setting.a,
                    b: setting.b,
                    rho: setting.rho,
                    replication: r,
                    seed: seed.0,
                    method: res.method,
                    k_hat: res.k_hat,
                    detection_ns: res.detection_ns,
                    criterion_ns: res.criterion_ns,
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    rows.sort_by(|x, y| {
        (x.setting, x.replication, x.method).cmp(&(y.setting, y.replication, y.method))
    });
    Ok(rows)
}

/// Mean selected `k` per (setting, method).
pub fn summarize(rows: &[ReplicationRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(usize, Method)> = rows.iter().map(|r| (r.setting, r.method)).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(setting, method)| {
            let group: Vec<&ReplicationRow> = rows
                .iter()
                .filter(|r| r.setting == setting && r.method == method)
                .collect();
            let first = group[0];
            let count = group.len() as f64;
            let mean = group.iter().map(|r| r.k_hat as f64).sum::<f64>() / count;
            let var = if group.len() > 1 {
                group
                    .iter()
                    .map(|r| (r.k_hat as f64 - mean).powi(2))
                    .sum::<f64>()
                    / (count - 1.0)
            } else {
                0.0
            };
            let hits = group.iter().filter(|r| r.k_hat == r.k0).count() as f64;
            SummaryRow {
                setting,
                n: first.n,
                k0: first.k0,
                a: first.a,
                b: first.b,
                rho: first.rho,
                method,
                replications: group.len(),
                mean_k_hat: mean,
                sd_k_hat: var.sqrt(),
                hit_rate: hits / count,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub k_max: usize,
    pub edges: usize,
    pub k_hat: usize,
    pub detection_ns: u64,
    pub criterion_ns: u64,
}

/// Times DNML selection on one balanced five-community graph per `n`
/// (`a = 0.8`, `b = 0.3`), separating detection from criterion evaluation.
/// Detection runs once per size. The criterion phase is repeated `repeats`
/// times, cycling through the sizes so that slow periods on the host hit all
/// of them alike, each time with a fresh complexity cache; the fastest run is
/// reported.
pub fn bench(n_grid: &[usize], k_max: usize, seed: Seed, repeats: usize) -> Result<Vec<BenchRow>> {
    nonempty(n_grid, "n")?;
    if k_max == 0 {
        return Err(domain("k_max must be at least 1"));
    }
    if let Some(&n) = n_grid.iter().find(|&&n| k_max > n) {
        return Err(domain(format!("k_max {k_max} exceeds n = {n}")));
    }
    let params = SbmParams::planted(SbmParams::balanced(5), 0.8, 0.3)?;
    let penalty = PenaltyConfig::default();
    let mut rows = Vec::with_capacity(n_grid.len());
    let mut inputs = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let (_, graph) = sample(n, &params, seed)?;
        let detection = detect(&graph, k_max, &DetectorConfig::with_seed(seed))?;
        rows.push(BenchRow {
            n,
            k_max,
            edges: graph.edge_count(),
            k_hat: 0,
            detection_ns: detection.elapsed_ns,
            criterion_ns: u64::MAX,
        });
        inputs.push((graph, detection));
    }
    for _ in 0..repeats.max(1) {
        for (row, (graph, detection)) in rows.iter_mut().zip(&inputs) {
            let cache = ComplexityCache::new();
            let res = evaluate(graph, detection, Method::Dnml, |stats| {
                criteria::score(Method::Dnml, stats, &penalty, &cache)
            })?;
            row.criterion_ns = row.criterion_ns.min(res.criterion_ns);
            row.k_hat = res.k_hat;
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        let mut cfg = ScenarioConfig::new(ScenarioKind::VaryB);
        assert!(settings(&cfg).is_err());
        cfg.b_grid = vec![0.1, 0.2];
        assert_eq!(settings(&cfg).unwrap().len(), 2);
        cfg.n_grid = vec![100, 200];
        assert!(settings(&cfg).is_err());

        let mut cfg = ScenarioConfig::new(ScenarioKind::Sparsity);
        cfg.a = 5.0;
        cfg.b = 1.0;
        cfg.rho_grid = vec![0.05, 0.3];
        assert!(settings(&cfg).is_err());
        cfg.rho_grid = vec![0.05, 0.2];
        assert_eq!(settings(&cfg).unwrap().len(), 2);

        let mut cfg = ScenarioConfig::new(ScenarioKind::Custom);
        cfg.replications = 0;
        assert!(settings(&cfg).is_err());
        cfg.replications = 1;
        cfg.pi = Proportions::Explicit(vec![0.5, 0.5]);
        assert!(settings(&cfg).is_err());
        cfg.k_max = Some(500);
        cfg.pi = Proportions::Balanced;
        assert!(settings(&cfg).is_err());
    }

    #[test]
    fn scenario_names() {
        for name in ["vary-n", "vary-b", "sparsity", "custom"] {
            assert_eq!(name.parse::<ScenarioKind>().unwrap().to_string(), name);
        }
        assert!("other".parse::<ScenarioKind>().is_err());
    }

    #[test]
    fn runs_are_reproducible() {
        let mut cfg = ScenarioConfig::new(ScenarioKind::VaryN);
        cfg.n_grid = vec![40, 60];
        cfg.replications = 3;
        cfg.seed = Seed(17);
        cfg.methods = Method::ALL.to_vec();
        let strip = |rows: Vec<ReplicationRow>| -> Vec<(usize, usize, Method, usize)> {
            rows.into_iter()
                .map(|r| (r.setting, r.replication, r.method, r.k_hat))
                .collect()
        };
        let a = strip(run(&cfg).unwrap());
        let b = strip(run(&cfg).unwrap());
        assert_eq!(a.len(), 2 * 3 * 3);
        assert_eq!(a, b);
    }

    #[test]
    fn summary_statistics() {
        let row = |rep: usize, k_hat: usize| ReplicationRow {
            setting: 0,
            n: 10,
            k0: 2,
            a: 0.5,
            b: 0.1,
            rho: None,
            replication: rep,
            seed: rep as u64,
            method: Method::Dnml,
            k_hat,
            detection_ns: 0,
            criterion_ns: 0,
        };
        let s = summarize(&[row(0, 1), row(1, 2), row(2, 3)]);
        assert_eq!(s.len(), 1);
        assert!((s[0].mean_k_hat - 2.0).abs() < 1e-15);
        assert!((s[0].sd_k_hat - 1.0).abs() < 1e-15);
        assert!((s[0].hit_rate - 1.0 / 3.0).abs() < 1e-15);
    }
}
