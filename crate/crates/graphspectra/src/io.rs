//! Graph and signal files.
//!
//! Edge lists hold one `i j [w]` edge per line with 1-based vertices, `#`
//! comments and a default weight of 1. Either orientation of an edge may be
//! listed, and repeating it with the same weight is harmless. MatrixMarket
//! files use the `coordinate` layout with `real`, `integer` or `pattern`
//! entries and `general` or `symmetric` storage.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use graphspectra_core::{Graph, SignalSet};
use serde::Serialize;

use crate::error::{AppError, Result};
use crate::output;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GraphFormat {
    Edgelist,
    Matrixmarket,
}

impl GraphFormat {
    /// `.mtx` files are MatrixMarket, anything else an edge list.
    pub fn infer(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("mtx") => Self::Matrixmarket,
            _ => Self::Edgelist,
        }
    }
}

/// A parsed graph plus anything worth telling the user that is not an error.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub warnings: Vec<String>,
}

pub fn load_graph(path: &Path, format: Option<GraphFormat>) -> Result<LoadedGraph> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    match format.unwrap_or_else(|| GraphFormat::infer(path)) {
        GraphFormat::Edgelist => parse_edgelist(&text),
        GraphFormat::Matrixmarket => parse_matrix_market(&text),
    }
}

/// Symmetric closure of a directed edge list.
#[derive(Default)]
struct Closure {
    edges: BTreeMap<(usize, usize), f64>,
    n: usize,
}

impl Closure {
    /// `i`, `j` are 1-based.
    fn insert(&mut self, line: usize, i: usize, j: usize, w: f64) -> Result<()> {
        if i == 0 || j == 0 {
            return Err(parse_error(line, "vertex indices start at 1"));
        }
        if i == j {
            return Err(parse_error(line, format!("self-loop at vertex {i}")));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(parse_error(line, format!("invalid weight {w}")));
        }
        let key = (i.min(j), i.max(j));
        match self.edges.get(&key) {
            Some(&first) if first != w => {
                return Err(AppError::AsymmetricWeight {
                    i: key.0,
                    j: key.1,
                    first,
                    second: w,
                })
            }
            Some(_) => {}
            None => {
                self.edges.insert(key, w);
            }
        }
        self.n = self.n.max(key.1);
        Ok(())
    }

    fn finish(self, n: usize) -> Result<LoadedGraph> {
        let graph = Graph::from_edges(
            n,
            self.edges.into_iter().map(|((i, j), w)| (i - 1, j - 1, w)),
        )?;
        let mut warnings = Vec::new();
        let components = graph.component_count();
        if components > 1 {
            warnings.push(format!(
                "graph has {components} connected components; spectral commands will reject it"
            ));
        }
        Ok(LoadedGraph { graph, warnings })
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> AppError {
    AppError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_index(line: usize, token: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| parse_error(line, format!("bad vertex index {token:?}")))
}

fn parse_weight(line: usize, token: &str) -> Result<f64> {
    token
        .parse()
        .map_err(|_| parse_error(line, format!("bad weight {token:?}")))
}

pub fn parse_edgelist(text: &str) -> Result<LoadedGraph> {
    let mut closure = Closure::default();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens.as_slice() {
            [] => continue,
            [i, j] => closure.insert(line, parse_index(line, i)?, parse_index(line, j)?, 1.0)?,
            [i, j, w] => closure.insert(
                line,
                parse_index(line, i)?,
                parse_index(line, j)?,
                parse_weight(line, w)?,
            )?,
            _ => return Err(parse_error(line, "expected `i j [w]`")),
        }
    }
    if closure.edges.is_empty() {
        return Err(parse_error(0, "no edges"));
    }
    let n = closure.n;
    closure.finish(n)
}

pub fn parse_matrix_market(text: &str) -> Result<LoadedGraph> {
    let mut lines = text.lines().enumerate();
    let (_, banner) = lines.next().ok_or_else(|| parse_error(1, "empty file"))?;
    let banner: Vec<String> = banner
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if banner.len() != 5 || banner[0] != "%%matrixmarket" || banner[1] != "matrix" {
        return Err(parse_error(1, "missing %%MatrixMarket matrix header"));
    }
    if banner[2] != "coordinate" {
        return Err(parse_error(1, "only coordinate storage is supported"));
    }
    let pattern = match banner[3].as_str() {
        "real" | "integer" => false,
        "pattern" => true,
        other => return Err(parse_error(1, format!("unsupported field {other}"))),
    };
    match banner[4].as_str() {
        "general" | "symmetric" => {}
        other => return Err(parse_error(1, format!("unsupported symmetry {other}"))),
    }

    let mut size = None;
    let mut closure = Closure::default();
    let mut entries = 0;
    for (k, raw) in lines {
        let line = k + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((rows, cols, _)) = size else {
            let [r, c, z] = tokens.as_slice() else {
                return Err(parse_error(line, "expected `rows cols entries`"));
            };
            let (r, c, z) = (
                parse_index(line, r)?,
                parse_index(line, c)?,
                parse_index(line, z)?,
            );
            if r != c {
                return Err(parse_error(
                    line,
                    format!("matrix is {r} x {c}, not square"),
                ));
            }
            size = Some((r, c, z));
            continue;
        };
        let (i, j, w) = match (pattern, tokens.as_slice()) {
            (true, [i, j]) => (parse_index(line, i)?, parse_index(line, j)?, 1.0),
            (false, [i, j, w]) => (
                parse_index(line, i)?,
                parse_index(line, j)?,
                parse_weight(line, w)?,
            ),
            _ => return Err(parse_error(line, "wrong number of fields")),
        };
        if i > rows || j > cols {
            return Err(parse_error(
                line,
                format!("entry ({i}, {j}) outside the matrix"),
            ));
        }
        closure.insert(line, i, j, w)?;
        entries += 1;
    }
    let Some((n, _, nnz)) = size else {
        return Err(parse_error(0, "missing size line"));
    };
    if entries != nnz {
        return Err(parse_error(
            0,
            format!("header announces {nnz} entries, found {entries}"),
        ));
    }
    closure.finish(n)
}

/// Edge list with 1-based vertices, each edge once.
pub fn write_edgelist(path: &Path, graph: &Graph) -> Result<()> {
    let mut text = String::new();
    for e in graph.edges() {
        text.push_str(&format!(
            "{} {} {}\n",
            e.i + 1,
            e.j + 1,
            output::fmt_float(e.weight)
        ));
    }
    fs::write(path, text).map_err(|e| AppError::io(path, e))
}

/// One column per signal, one row per vertex, labels in the header.
pub fn write_signals(path: &Path, set: &SignalSet) -> Result<()> {
    let n = set.n_vertices();
    let rows = (0..n).map(|i| set.signals().iter().map(|s| s[i]).collect::<Vec<_>>());
    output::write_table(path, set.labels(), rows)
}

pub fn read_signals(path: &Path) -> Result<SignalSet> {
    let csv_error = |source| AppError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(csv_error)?;
    let labels: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut signals = vec![Vec::new(); labels.len()];
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        for (s, field) in signals.iter_mut().zip(record.iter()) {
            let v = field
                .trim()
                .parse()
                .map_err(|_| parse_error(k + 2, format!("bad value {field:?}")))?;
            s.push(v);
        }
    }
    let n = signals.first().map_or(0, Vec::len);
    Ok(SignalSet::new(n, signals, labels)?)
}
