//! Undirected simple graphs, community labelings, and the block sufficient
//! statistics `(n_a, n_ab, o_ab)` every criterion is computed from.

use std::fmt;

use serde::Serialize;

use crate::error::{domain, shape, Result};

/// Graphs with at most this many nodes also carry a dense bit matrix for O(1)
/// edge lookups.
pub const DEFAULT_DENSE_LIMIT: usize = 4096;

/// An undirected graph without self-loops or multi-edges.
///
/// Edges are kept as a sorted list of `(i, j)` pairs with `i < j`, together
/// with sorted neighbor lists. Nodes are `0..n`; `original_id` maps them back
/// to the ids used in the file they were read from.
#[derive(Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    dense: Option<BitMatrix>,
    id_offset: u64,
}

#[derive(Clone)]
struct BitMatrix {
    n: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    fn new(n: usize) -> Self {
        BitMatrix {
            n,
            words: vec![0; (n * n).div_ceil(64)],
        }
    }

    fn set(&mut self, i: usize, j: usize) {
        let bit = i * self.n + j;
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    fn get(&self, i: usize, j: usize) -> bool {
        let bit = i * self.n + j;
        self.words[bit / 64] & (1 << (bit % 64)) != 0
    }
}

impl Graph {
    /// Builds a graph on `n` nodes. Pairs may appear in either orientation and
    /// more than once; duplicates collapse to a single edge.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges_with_dense_limit(n, edges, DEFAULT_DENSE_LIMIT)
    }

    pub fn from_edges_with_dense_limit<I>(n: usize, edges: I, dense_limit: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(domain("a graph needs at least one node"));
        }
        if n > u32::MAX as usize {
            return Err(domain(format!("node count {n} exceeds u32 range")));
        }
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(domain(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                return Err(domain(format!("self-loop on node {u}")));
            }
            let (i, j) = if u < v { (u, v) } else { (v, u) };
            list.push((i as u32, j as u32));
        }
        list.sort_unstable();
        list.dedup();
        Ok(Self::from_sorted(n, list, dense_limit))
    }

    fn from_sorted(n: usize, edges: Vec<(u32, u32)>, dense_limit: usize) -> Self {
        let mut degree = vec![0usize; n];
        for &(i, j) in &edges {
            degree[i as usize] += 1;
            degree[j as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; 2 * edges.len()];
        for &(i, j) in &edges {
            neighbors[fill[i as usize]] = j;
            fill[i as usize] += 1;
            neighbors[fill[j as usize]] = i;
            fill[j as usize] += 1;
        }
        for v in 0..n {
            neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        let dense = (n <= dense_limit).then(|| {
            let mut bits = BitMatrix::new(n);
            for &(i, j) in &edges {
                bits.set(i as usize, j as usize);
                bits.set(j as usize, i as usize);
            }
            bits
        });
        Graph {
            n,
            edges,
            offsets,
            neighbors,
            dense,
            id_offset: 0,
        }
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::from_edges(n, std::iter::empty())
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
    }

    pub(crate) fn with_id_offset(mut self, offset: u64) -> Self {
        self.id_offset = offset;
        self
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted `(i, j)` pairs with `i < j`.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u == v || u >= self.n || v >= self.n {
            return false;
        }
        match &self.dense {
            Some(bits) => bits.get(u, v),
            None => self.neighbors(u).binary_search(&(v as u32)).is_ok(),
        }
    }

    /// The id node `v` carried in its source file.
    pub fn original_id(&self, v: usize) -> u64 {
        v as u64 + self.id_offset
    }

    /// Returns the graph with node `v` renamed to `perm[v]`.
    pub fn permute_nodes(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        Self::from_edges(
            self.n,
            self.edges
                .iter()
                .map(|&(i, j)| (perm[i as usize], perm[j as usize])),
        )
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges.len())
            .finish()
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for Graph {}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(shape(format!(
            "permutation has length {}, expected {n}",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(domain("not a permutation"));
        }
    }
    Ok(())
}

/// Assignment of each node to one of `k` communities, stored 0-based.
/// Communities may be empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Labeling {
    k: usize,
    labels: Vec<u32>,
}

impl Labeling {
    pub fn new(k: usize, labels: Vec<usize>) -> Result<Self> {
        if k == 0 {
            return Err(domain("a labeling needs k >= 1"));
        }
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
            return Err(domain(format!("label {l} of node {i} is outside 0..{k}")));
        }
        Ok(Labeling {
            k,
            labels: labels.into_iter().map(|l| l as u32).collect(),
        })
    }

    /// Builds a labeling from community ids in `1..=k`.
    pub fn from_one_based(k: usize, labels: &[usize]) -> Result<Self> {
        if let Some(i) = labels.iter().position(|&l| l == 0) {
            return Err(domain(format!(
                "node {i} has label 0 in a 1-based labeling"
            )));
        }
        Self::new(k, labels.iter().map(|&l| l - 1).collect())
    }

    /// Every node in community 0, with `k = 1`.
    pub fn single(n: usize) -> Self {
        Labeling {
            k: 1,
            labels: vec![0; n],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v] as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels.iter().map(|&l| l as usize)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Number of communities with at least one member.
    pub fn occupied(&self) -> usize {
        let mut seen = vec![false; self.k];
        self.labels.iter().for_each(|&l| seen[l as usize] = true);
        seen.into_iter().filter(|&s| s).count()
    }

    /// Applies `sigma` to community ids: node `v` moves to `sigma[label(v)]`.
    pub fn relabel(&self, sigma: &[usize]) -> Result<Self> {
        check_permutation(sigma, self.k)?;
        Ok(Labeling {
            k: self.k,
            labels: self
                .labels
                .iter()
                .map(|&l| sigma[l as usize] as u32)
                .collect(),
        })
    }

    /// Returns the labeling of the node-permuted graph: node `perm[v]` gets
    /// the label of `v`.
    pub fn permute_nodes(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.labels.len())?;
        let mut labels = vec![0; self.labels.len()];
        for (v, &p) in perm.iter().enumerate() {
            labels[p] = self.labels[v];
        }
        Ok(Labeling { k: self.k, labels })
    }
}

/// Block sufficient statistics of a (graph, labeling) pair.
///
/// Pair quantities are stored for `a <= b` only, in row-major upper-triangular
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStats {
    k: usize,
    sizes: Vec<u64>,
    capacity: Vec<u64>,
    edges: Vec<u64>,
}

/// Position of `(a, b)`, `a <= b < k`, in upper-triangular storage.
#[inline]
fn tri_index(k: usize, a: usize, b: usize) -> usize {
    debug_assert!(a <= b && b < k);
    a * (2 * k - a + 1) / 2 + (b - a)
}

fn pair_capacity(sizes: &[u64], a: usize, b: usize) -> u64 {
    if a == b {
        sizes[a] * sizes[a].saturating_sub(1) / 2
    } else {
        sizes[a] * sizes[b]
    }
}

impl BlockStats {
    /// Builds statistics from community sizes and per-pair edge counts given
    /// in upper-triangular order `(0,0), (0,1), …, (0,k-1), (1,1), …`.
    pub fn from_parts(sizes: Vec<u64>, edges: Vec<u64>) -> Result<Self> {
        let k = sizes.len();
        if k == 0 {
            return Err(domain("block statistics need k >= 1"));
        }
        if edges.len() != k * (k + 1) / 2 {
            return Err(shape(format!(
                "expected {} pair counts for k = {k}, got {}",
                k * (k + 1) / 2,
                edges.len()
            )));
        }
        let mut capacity = Vec::with_capacity(edges.len());
        for a in 0..k {
            for b in a..k {
                capacity.push(pair_capacity(&sizes, a, b));
            }
        }
        if let Some(idx) = (0..edges.len()).find(|&i| edges[i] > capacity[i]) {
            return Err(domain(format!(
                "pair {idx} has {} edges but only {} node pairs",
                edges[idx], capacity[idx]
            )));
        }
        Ok(BlockStats {
            k,
            sizes,
            capacity,
            edges,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn node_count(&self) -> u64 {
        self.sizes.iter().sum()
    }

    pub fn edge_total(&self) -> u64 {
        self.edges.iter().sum()
    }

    /// `n_a`: members of community `a`.
    pub fn size(&self, a: usize) -> u64 {
        self.sizes[a]
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    /// `n_ab`: node pairs between communities `a` and `b` (order-insensitive).
    pub fn capacity(&self, a: usize, b: usize) -> u64 {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.capacity[tri_index(self.k, a, b)]
    }

    /// `o_ab`: edges between communities `a` and `b` (order-insensitive).
    pub fn edge_count(&self, a: usize, b: usize) -> u64 {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.edges[tri_index(self.k, a, b)]
    }

    /// `(n_ab, o_ab)` for every `a <= b`.
    pub fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.capacity
            .iter()
            .copied()
            .zip(self.edges.iter().copied())
    }

    /// Statistics after renaming community `a` to `sigma[a]`.
    pub fn relabel(&self, sigma: &[usize]) -> Result<Self> {
        check_permutation(sigma, self.k)?;
        let k = self.k;
        let mut sizes = vec![0; k];
        let mut edges = vec![0; self.edges.len()];
        for a in 0..k {
            sizes[sigma[a]] = self.sizes[a];
            for b in a..k {
                let (x, y) = (sigma[a].min(sigma[b]), sigma[a].max(sigma[b]));
                edges[tri_index(k, x, y)] = self.edges[tri_index(k, a, b)];
            }
        }
        Self::from_parts(sizes, edges)
    }
}

/// Counts `(n_a, n_ab, o_ab)` for `graph` under `labeling`.
///
/// Runs in `O(n + E + k²)`.
pub fn block_stats(graph: &Graph, labeling: &Labeling) -> Result<BlockStats> {
    if labeling.len() != graph.node_count() {
        return Err(shape(format!(
            "labeling has {} entries for a graph with {} nodes",
            labeling.len(),
            graph.node_count()
        )));
    }
    let k = labeling.k();
    let mut sizes = vec![0u64; k];
    for l in labeling.iter() {
        sizes[l] += 1;
    }
    let mut edges = vec![0u64; k * (k + 1) / 2];
    for &(i, j) in graph.edges() {
        let (a, b) = (labeling.label(i as usize), labeling.label(j as usize));
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        edges[tri_index(k, a, b)] += 1;
    }
    let mut capacity = Vec::with_capacity(edges.len());
    for a in 0..k {
        for b in a..k {
            capacity.push(pair_capacity(&sizes, a, b));
        }
    }
    Ok(BlockStats {
        k,
        sizes,
        capacity,
        edges,
    })
}
