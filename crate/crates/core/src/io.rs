//! Graph ingestion: whitespace-separated edge lists and dense 0/1 adjacency CSV.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// First node id in an edge-list file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Indexing {
    Zero,
    #[default]
    One,
}

impl Indexing {
    fn offset(self) -> u64 {
        match self {
            Indexing::Zero => 0,
            Indexing::One => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EdgeListOptions {
    pub indexing: Indexing,
    /// Lines starting with any of these (after leading whitespace) are skipped.
    pub comment_prefixes: Vec<String>,
    /// Node count; defaults to the largest id seen. Must cover every id.
    pub node_count: Option<usize>,
}

impl Default for EdgeListOptions {
    fn default() -> Self {
        EdgeListOptions {
            indexing: Indexing::One,
            comment_prefixes: vec!["#".into(), "%".into()],
            node_count: None,
        }
    }
}

/// A graph read from disk, with counts of the lines that were dropped to keep
/// it simple.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub self_loops: usize,
    pub duplicates: usize,
}

impl LoadedGraph {
    pub fn warnings(&self) -> usize {
        self.self_loops + self.duplicates
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Reads an edge list: one `u v` pair per line, extra columns ignored.
pub fn load_edge_list(path: impl AsRef<Path>, options: &EdgeListOptions) -> Result<LoadedGraph> {
    let path = path.as_ref();
    parse_edge_list(&read(path)?, path, options)
}

pub fn parse_edge_list(text: &str, path: &Path, options: &EdgeListOptions) -> Result<LoadedGraph> {
    let offset = options.indexing.offset();
    let mut pairs = Vec::new();
    let mut self_loops = 0;
    let mut max_id: Option<u64> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty()
            || options
                .comment_prefixes
                .iter()
                .any(|p| !p.is_empty() && line.starts_with(p.as_str()))
        {
            continue;
        }
        let mut fields = line.split_whitespace();
        let mut next_id = || -> Result<u64> {
            let tok = fields
                .next()
                .ok_or_else(|| parse_error(path, lineno, "expected two node ids"))?;
            let id: u64 = tok
                .parse()
                .map_err(|_| parse_error(path, lineno, format!("invalid node id {tok:?}")))?;
            if id < offset {
                return Err(parse_error(
                    path,
                    lineno,
                    format!("node id {id} is below the first id {offset}"),
                ));
            }
            Ok(id)
        };
        let (u, v) = (next_id()?, next_id()?);
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        if u == v {
            self_loops += 1;
            continue;
        }
        pairs.push(((u - offset) as usize, (v - offset) as usize));
    }

    let inferred = match max_id {
        Some(m) => (m - offset + 1) as usize,
        None if options.node_count.is_some() => 0,
        None => {
            return Err(Error::Domain(format!(
                "{} contains no edges",
                path.display()
            )))
        }
    };
    let n = match options.node_count {
        Some(n) if n < inferred => {
            return Err(Error::Domain(format!(
                "node count {n} is smaller than the largest id in {}",
                path.display()
            )))
        }
        Some(n) => n,
        None => inferred,
    };

    let listed = pairs.len();
    let graph = Graph::from_edges(n, pairs)?.with_id_offset(offset);
    let duplicates = listed - graph.edge_count();
    if self_loops > 0 || duplicates > 0 {
        log::warn!(
            "{}: dropped {self_loops} self-loop(s) and {duplicates} duplicate edge(s)",
            path.display()
        );
    }
    Ok(LoadedGraph {
        graph,
        self_loops,
        duplicates,
    })
}

/// Reads an `n × n` comma-separated 0/1 adjacency matrix. The matrix must be
/// symmetric with a zero diagonal.
pub fn load_adjacency_csv(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    parse_adjacency_csv(&read(path)?, path)
}

pub fn parse_adjacency_csv(text: &str, path: &Path) -> Result<Graph> {
    let rows: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let n = rows.len();
    if n == 0 {
        return Err(Error::Domain(format!("{} is empty", path.display())));
    }
    let mut matrix = Vec::with_capacity(n);
    for &(lineno, line) in &rows {
        let row = line
            .split(',')
            .map(|cell| match cell.trim() {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(parse_error(
                    path,
                    lineno,
                    format!("expected 0 or 1, got {other:?}"),
                )),
            })
            .collect::<Result<Vec<bool>>>()?;
        if row.len() != n {
            return Err(parse_error(
                path,
                lineno,
                format!("row has {} entries, expected {n}", row.len()),
            ));
        }
        matrix.push(row);
    }
    let mut edges = Vec::new();
    for i in 0..n {
        if matrix[i][i] {
            return Err(parse_error(
                path,
                rows[i].0,
                format!("self-loop at node {i}"),
            ));
        }
        for j in i + 1..n {
            if matrix[i][j] != matrix[j][i] {
                return Err(parse_error(
                    path,
                    rows[j].0,
                    format!("matrix is not symmetric at ({i}, {j})"),
                ));
            }
            if matrix[i][j] {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Picks the loader from a file extension: `.csv` is adjacency, anything else
/// an edge list.
pub fn guess_is_adjacency(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}
