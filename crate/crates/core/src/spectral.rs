//! Adjacency spectral clustering: k-means on the rows of the eigenvectors
//! belonging to the `k` largest-magnitude eigenvalues of the adjacency matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::graph::{Graph, Labeling};
use crate::sampler::Seed;

const KMEANS_STREAM_BASE: u64 = 0x100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectorConfig {
    /// Convergence threshold of the symmetric QR iteration.
    pub eig_tolerance: f64,
    pub kmeans_restarts: usize,
    pub kmeans_max_iter: usize,
    pub seed: Seed,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            eig_tolerance: 1e-8,
            kmeans_restarts: 10,
            kmeans_max_iter: 300,
            seed: Seed(0),
        }
    }
}

impl DetectorConfig {
    pub fn with_seed(seed: Seed) -> Self {
        DetectorConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kmeans_restarts == 0 {
            return Err(domain("k-means needs at least one restart"));
        }
        if self.eig_tolerance.is_nan() || self.eig_tolerance <= 0.0 {
            return Err(domain("eigensolver tolerance must be positive"));
        }
        Ok(())
    }
}

/// Full eigendecomposition of the adjacency matrix, columns ordered by
/// decreasing `|λ|` (ties: larger `λ` first) with signs normalized so the
/// largest-magnitude entry of each column is positive.
#[derive(Debug, Clone)]
pub struct Embedding {
    eigenvalues: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl Embedding {
    pub fn compute(graph: &Graph, config: &DetectorConfig) -> Result<Self> {
        config.validate()?;
        let n = graph.node_count();
        let mut adj = DMatrix::<f64>::zeros(n, n);
        for &(i, j) in graph.edges() {
            adj[(i as usize, j as usize)] = 1.0;
            adj[(j as usize, i as usize)] = 1.0;
        }
        let max_iter = (30 * n).max(1000);
        let eig = SymmetricEigen::try_new(adj, config.eig_tolerance, max_iter)
            .ok_or(Error::NoConvergence { n })?;

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            let (la, lb) = (eig.eigenvalues[a], eig.eigenvalues[b]);
            lb.abs()
                .total_cmp(&la.abs())
                .then(lb.total_cmp(&la))
                .then(a.cmp(&b))
        });
        let eigenvalues = order.iter().map(|&c| eig.eigenvalues[c]).collect();
        let mut vectors = DMatrix::<f64>::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            let col = eig.eigenvectors.column(src);
            let mut pivot = 0;
            for i in 1..n {
                if col[i].abs() > col[pivot].abs() {
                    pivot = i;
                }
            }
            let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
            for i in 0..n {
                vectors[(i, dst)] = sign * col[i];
            }
        }
        Ok(Embedding {
            eigenvalues,
            vectors,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// The leading `k` eigenvectors as an `n × k` matrix.
    pub fn leading(&self, k: usize) -> Result<DMatrix<f64>> {
        let n = self.eigenvalues.len();
        if k == 0 || k > n {
            return Err(domain(format!("need 1 <= k <= {n}, got k = {k}")));
        }
        Ok(self.vectors.columns(0, k).into_owned())
    }

    /// Clusters the rows of the leading `k` eigenvectors.
    pub fn cluster(&self, k: usize, config: &DetectorConfig) -> Result<Labeling> {
        let n = self.eigenvalues.len();
        if k == 0 || k > n {
            return Err(domain(format!("need 1 <= k <= {n}, got k = {k}")));
        }
        if k == 1 {
            return Ok(Labeling::single(n));
        }
        Ok(kmeans(&self.leading(k)?, k, config)?.labeling)
    }
}

/// Leading `k` eigenvalues and the matching `n × k` eigenvector matrix.
pub fn leading_eigenvectors(
    graph: &Graph,
    k: usize,
    config: &DetectorConfig,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if k == 0 || k > graph.node_count() {
        return Err(domain(format!(
            "need 1 <= k <= {}, got k = {k}",
            graph.node_count()
        )));
    }
    let emb = Embedding::compute(graph, config)?;
    Ok((emb.eigenvalues[..k].to_vec(), emb.leading(k)?))
}

/// Spectral clustering of `graph` into `k` groups. `k = 1` skips the
/// eigensolver.
pub fn spectral_cluster(graph: &Graph, k: usize, config: &DetectorConfig) -> Result<Labeling> {
    let n = graph.node_count();
    if k == 0 || k > n {
        return Err(domain(format!("need 1 <= k <= {n}, got k = {k}")));
    }
    if k == 1 {
        return Ok(Labeling::single(n));
    }
    Embedding::compute(graph, config)?.cluster(k, config)
}

#[derive(Debug, Clone)]
pub struct KMeans {
    pub labeling: Labeling,
    /// Within-cluster sum of squared distances.
    pub wcss: f64,
    pub iterations: usize,
}

struct Points<'a> {
    data: &'a DMatrix<f64>,
}

impl Points<'_> {
    fn len(&self) -> usize {
        self.data.nrows()
    }

    fn dim(&self) -> usize {
        self.data.ncols()
    }

    fn dist2(&self, i: usize, center: &[f64]) -> f64 {
        center
            .iter()
            .enumerate()
            .map(|(d, c)| {
                let diff = self.data[(i, d)] - c;
                diff * diff
            })
            .sum()
    }

    fn row(&self, i: usize) -> Vec<f64> {
        (0..self.dim()).map(|d| self.data[(i, d)]).collect()
    }
}

/// Best of `config.kmeans_restarts` Lloyd runs on the rows of `rows`, each
/// seeded by greedy k-means++. Returns the run with the lowest
/// within-cluster sum of squares, earliest restart on ties.
pub fn kmeans(rows: &DMatrix<f64>, k: usize, config: &DetectorConfig) -> Result<KMeans> {
    config.validate()?;
    let n = rows.nrows();
    if k == 0 {
        return Err(domain("k-means needs k >= 1"));
    }
    if n == 0 {
        return Err(domain("k-means needs at least one point"));
    }
    let points = Points { data: rows };
    if k == 1 {
        let center = centroids(&points, &vec![0; n], 1).remove(0);
        let wcss = (0..n).map(|i| points.dist2(i, &center)).sum();
        return Ok(KMeans {
            labeling: Labeling::single(n),
            wcss,
            iterations: 0,
        });
    }
    let runs: Vec<(Vec<usize>, f64, usize)> = (0..config.kmeans_restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = config.seed.rng(KMEANS_STREAM_BASE + r as u64);
            let centers = greedy_plus_plus(&points, k, &mut rng);
            lloyd(&points, centers, config.kmeans_max_iter)
        })
        .collect();
    let mut best = 0;
    for (r, run) in runs.iter().enumerate() {
        if run.1 < runs[best].1 {
            best = r;
        }
    }
    let (labels, wcss, iterations) = runs.into_iter().nth(best).unwrap();
    Ok(KMeans {
        labeling: Labeling::new(k, labels)?,
        wcss,
        iterations,
    })
}

fn pick_weighted<R: Rng>(weights: &[f64], total: f64, rng: &mut R) -> usize {
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if acc > target {
            return i;
        }
    }
    weights
        .iter()
        .rposition(|&w| w > 0.0)
        .unwrap_or(weights.len() - 1)
}

/// k-means++ seeding that draws `2 + ln k` candidates per step and keeps the
/// one that lowers the potential most.
fn greedy_plus_plus<R: Rng>(points: &Points<'_>, k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = points.len();
    let trials = 2 + (k as f64).ln() as usize;
    let mut centers = vec![points.row(rng.random_range(0..n))];
    let mut closest: Vec<f64> = (0..n).map(|i| points.dist2(i, &centers[0])).collect();
    while centers.len() < k {
        let potential: f64 = closest.iter().sum();
        if potential <= 0.0 {
            centers.push(points.row(rng.random_range(0..n)));
            continue;
        }
        let mut best: Option<(f64, usize, Vec<f64>)> = None;
        for _ in 0..trials {
            let cand = pick_weighted(&closest, potential, rng);
            let c = points.row(cand);
            let updated: Vec<f64> = (0..n)
                .map(|i| closest[i].min(points.dist2(i, &c)))
                .collect();
            let pot: f64 = updated.iter().sum();
            if best.as_ref().is_none_or(|(p, _, _)| pot < *p) {
                best = Some((pot, cand, updated));
            }
        }
        let (_, cand, updated) = best.unwrap();
        centers.push(points.row(cand));
        closest = updated;
    }
    centers
}

fn centroids(points: &Points<'_>, labels: &[usize], k: usize) -> Vec<Vec<f64>> {
    let dim = points.dim();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for (d, s) in sums[l].iter_mut().enumerate() {
            *s += points.data[(i, d)];
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        if c > 0 {
            s.iter_mut().for_each(|x| *x /= c as f64);
        }
    }
    sums
}

fn nearest(points: &Points<'_>, i: usize, centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, points.dist2(i, &centers[0]));
    for (c, center) in centers.iter().enumerate().skip(1) {
        let d = points.dist2(i, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Moves the point farthest from its own centroid into each empty cluster.
/// Only points from clusters with more than one member are eligible.
fn repair_empty(points: &Points<'_>, labels: &mut [usize], centers: &mut [Vec<f64>]) {
    let k = centers.len();
    let mut counts = vec![0usize; k];
    labels.iter().for_each(|&l| counts[l] += 1);
    for empty in 0..k {
        if counts[empty] > 0 {
            continue;
        }
        let mut far: Option<(usize, f64)> = None;
        for (i, &l) in labels.iter().enumerate() {
            if counts[l] < 2 {
                continue;
            }
            let d = points.dist2(i, &centers[l]);
            if far.is_none_or(|(_, best)| d > best) {
                far = Some((i, d));
            }
        }
        let Some((i, _)) = far else { break };
        counts[labels[i]] -= 1;
        counts[empty] += 1;
        labels[i] = empty;
        centers[empty] = points.row(i);
    }
}

fn lloyd(
    points: &Points<'_>,
    mut centers: Vec<Vec<f64>>,
    max_iter: usize,
) -> (Vec<usize>, f64, usize) {
    let n = points.len();
    let k = centers.len();
    let mut previous: Option<Vec<usize>> = None;
    let mut labels = vec![0usize; n];
    let mut iterations = 0;
    for it in 0..max_iter.max(1) {
        iterations = it + 1;
        let assigned: Vec<usize> = (0..n).map(|i| nearest(points, i, &centers).0).collect();
        let converged = previous.as_ref() == Some(&assigned);
        labels.clone_from(&assigned);
        centers = centroids(points, &labels, k);
        repair_empty(points, &mut labels, &mut centers);
        if converged {
            break;
        }
        previous = Some(assigned);
        centers = centroids(points, &labels, k);
    }
    let centers = centroids(points, &labels, k);
    let wcss = (0..n).map(|i| points.dist2(i, &centers[labels[i]])).sum();
    (labels, wcss, iterations)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cliques(size: usize) -> Graph {
        let mut edges = Vec::new();
        for block in 0..2 {
            let base = block * size;
            for i in 0..size {
                for j in i + 1..size {
                    edges.push((base + i, base + j));
                }
            }
        }
        Graph::from_edges(2 * size, edges).unwrap()
    }

    fn same_partition(a: &Labeling, b: &[usize]) -> bool {
        let n = b.len();
        (0..n).all(|i| (0..n).all(|j| (a.label(i) == a.label(j)) == (b[i] == b[j])))
    }

    #[test]
    fn complete_graph_perron_vector() {
        let g = Graph::complete(3).unwrap();
        let (vals, vecs) = leading_eigenvectors(&g, 1, &DetectorConfig::default()).unwrap();
        assert!((vals[0] - 2.0).abs() < 1e-10);
        for i in 0..3 {
            assert!((vecs[(i, 0)] - 1.0 / 3f64.sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn disjoint_cliques_span_indicators() {
        let g = two_cliques(5);
        let (vals, vecs) = leading_eigenvectors(&g, 2, &DetectorConfig::default()).unwrap();
        assert!((vals[0] - 4.0).abs() < 1e-9 && (vals[1] - 4.0).abs() < 1e-9);
        // projecting each component indicator onto the span recovers it
        for block in 0..2 {
            let ind: Vec<f64> = (0..10)
                .map(|i| f64::from(u8::from(i / 5 == block)))
                .collect();
            let mut proj = [0.0; 10];
            for c in 0..2 {
                let dot: f64 = (0..10).map(|i| ind[i] * vecs[(i, c)]).sum();
                for i in 0..10 {
                    proj[i] += dot * vecs[(i, c)];
                }
            }
            for i in 0..10 {
                assert!((proj[i] - ind[i]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn columns_are_orthonormal_with_fixed_signs() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 3)]).unwrap();
        let (_, v) = leading_eigenvectors(&g, 4, &DetectorConfig::default()).unwrap();
        let gram = v.transpose() * &v;
        for a in 0..4 {
            for b in 0..4 {
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((gram[(a, b)] - expect).abs() < 1e-9);
            }
            let col = v.column(a);
            let pivot = col
                .iter()
                .copied()
                .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            assert!(pivot > 0.0);
        }
    }

    #[test]
    fn k_out_of_range() {
        let g = Graph::empty(3).unwrap();
        let cfg = DetectorConfig::default();
        assert!(leading_eigenvectors(&g, 4, &cfg).is_err());
        assert!(spectral_cluster(&g, 0, &cfg).is_err());
    }

    #[test]
    fn empty_graph_still_clusters() {
        let g = Graph::empty(8).unwrap();
        let z = spectral_cluster(&g, 3, &DetectorConfig::default()).unwrap();
        assert_eq!(z.len(), 8);
        assert!(z.iter().all(|l| l < 3));
    }

    #[test]
    fn single_cluster_short_circuit() {
        let g = two_cliques(4);
        assert_eq!(
            spectral_cluster(&g, 1, &DetectorConfig::default()).unwrap(),
            Labeling::single(8)
        );
    }

    #[test]
    fn recovers_disjoint_cliques() {
        let g = two_cliques(10);
        let z = spectral_cluster(&g, 2, &DetectorConfig::with_seed(Seed(4))).unwrap();
        let truth: Vec<usize> = (0..20).map(|i| i / 10).collect();
        assert!(same_partition(&z, &truth));
    }

    #[test]
    fn kmeans_separated_clouds() {
        let mut data = Vec::new();
        for i in 0..30 {
            let jitter = (i % 5) as f64 * 0.01;
            let base = if i < 15 { 0.0 } else { 100.0 };
            data.push(base + jitter);
            data.push(base - jitter);
        }
        let rows = DMatrix::from_row_slice(30, 2, &data);
        let km = kmeans(&rows, 2, &DetectorConfig::default()).unwrap();
        let truth: Vec<usize> = (0..30).map(|i| usize::from(i >= 15)).collect();
        assert!(same_partition(&km.labeling, &truth));
    }

    #[test]
    fn kmeans_identical_points() {
        let rows = DMatrix::from_element(7, 2, 0.25);
        let km = kmeans(&rows, 2, &DetectorConfig::default()).unwrap();
        assert_eq!(km.wcss, 0.0);
        assert_eq!(km.labeling.len(), 7);
        let km = kmeans(&rows, 1, &DetectorConfig::default()).unwrap();
        assert!(km.labeling.iter().all(|l| l == 0));
    }

    #[test]
    fn kmeans_deterministic() {
        let data: Vec<f64> = (0..80).map(|i| ((i * 37) % 17) as f64 / 3.0).collect();
        let rows = DMatrix::from_row_slice(40, 2, &data);
        let cfg = DetectorConfig::with_seed(Seed(99));
        let a = kmeans(&rows, 4, &cfg).unwrap();
        let b = kmeans(&rows, 4, &cfg).unwrap();
        assert_eq!(a.labeling, b.labeling);
        assert_eq!(a.wcss, b.wcss);
    }

    #[test]
    fn zero_restarts_rejected() {
        let cfg = DetectorConfig {
            kmeans_restarts: 0,
            ..Default::default()
        };
        assert!(kmeans(&DMatrix::zeros(3, 1), 2, &cfg).is_err());
    }
}
