//! File formats: CSV data ingestion, DOT graphs, CSV/JSON result tables.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::chordal::CliqueDecomposition;
use crate::cli::WorkbenchError;
use crate::graph::LabeledGraph;
use crate::mcmc::{ExactEntry, TraceRecord};

/// A numeric table with named columns; rows are observations.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub names: Vec<String>,
    pub values: DMatrix<f64>,
}

impl Dataset {
    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    /// Rows `start..end` (0-based, half open).
    pub fn slice(&self, start: usize, end: usize) -> DMatrix<f64> {
        self.values.rows(start, end - start).into_owned()
    }
}

pub fn read_dataset(path: &Path) -> Result<Dataset, WorkbenchError> {
    let data_err = |msg: String| WorkbenchError::Data(format!("{}: {msg}", path.display()));
    let text = fs::read_to_string(path).map_err(|e| data_err(format!("cannot read data file: {e}")))?;
    parse_dataset(&text).map_err(|e| match e {
        WorkbenchError::Data(msg) => data_err(msg),
        other => other,
    })
}

/// Parses CSV text with a header row of variable names.
pub fn parse_dataset(text: &str) -> Result<Dataset, WorkbenchError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| WorkbenchError::Data(format!("bad header: {e}")))?
        .iter()
        .map(str::to_owned)
        .collect();
    if names.is_empty() || names.iter().all(String::is_empty) {
        return Err(WorkbenchError::Data("missing header row".into()));
    }
    let mut flat = Vec::new();
    let mut rows = 0;
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2;
        let record = record.map_err(|e| WorkbenchError::Data(format!("line {line}: {e}")))?;
        if record.len() != names.len() {
            return Err(WorkbenchError::Data(format!(
                "line {line}: expected {} fields, found {}",
                names.len(),
                record.len()
            )));
        }
        for (col, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                WorkbenchError::Data(format!("line {line}, column `{}`: non-numeric value `{cell}`", names[col]))
            })?;
            if !v.is_finite() {
                return Err(WorkbenchError::Data(format!("line {line}, column `{}`: non-finite value", names[col])));
            }
            flat.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(WorkbenchError::Data("no data rows".into()));
    }
    Ok(Dataset { values: DMatrix::from_row_slice(rows, names.len(), &flat), names })
}

fn escape_label(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Undirected DOT with 1-based node ids and the variable names as labels.
pub fn to_dot(g: &LabeledGraph, names: &[String]) -> String {
    let mut out = String::from("graph G {\n");
    for (v, name) in names.iter().enumerate().take(g.n()) {
        out.push_str(&format!("  {} [label=\"{}\"];\n", v + 1, escape_label(name)));
    }
    for (i, j) in g.edges() {
        out.push_str(&format!("  {} -- {};\n", i + 1, j + 1));
    }
    out.push_str("}\n");
    out
}

/// Parses the DOT subset written by [`to_dot`], returning the graph and node labels.
pub fn parse_dot(text: &str) -> Result<(LabeledGraph, Vec<String>), WorkbenchError> {
    let bad = |line: &str| WorkbenchError::Data(format!("unrecognised DOT line `{line}`"));
    let mut labels: Vec<(usize, String)> = Vec::new();
    let mut edges = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with("graph") || line == "}" {
            continue;
        }
        let body = line.strip_suffix(';').ok_or_else(|| bad(line))?;
        if let Some((a, b)) = body.split_once("--") {
            let a: usize = a.trim().parse().map_err(|_| bad(line))?;
            let b: usize = b.trim().parse().map_err(|_| bad(line))?;
            edges.push((a, b));
        } else if let Some((id, rest)) = body.split_once('[') {
            let id: usize = id.trim().parse().map_err(|_| bad(line))?;
            let label =
                rest.trim().strip_prefix("label=\"").and_then(|s| s.strip_suffix("\"]")).ok_or_else(|| bad(line))?;
            labels.push((id, label.replace("\\\"", "\"").replace("\\\\", "\\")));
        } else {
            return Err(bad(line));
        }
    }
    labels.sort_by_key(|(id, _)| *id);
    if labels.iter().enumerate().any(|(k, (id, _))| *id != k + 1) {
        return Err(WorkbenchError::Data("DOT node ids must be 1..n".into()));
    }
    let n = labels.len();
    let edges = edges.into_iter().map(|(a, b)| (a.wrapping_sub(1), b.wrapping_sub(1)));
    let g = LabeledGraph::from_edges(n, edges).map_err(|e| WorkbenchError::Data(e.to_string()))?;
    Ok((g, labels.into_iter().map(|(_, l)| l).collect()))
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 csv")
}

pub fn trace_csv(traces: &[TraceRecord]) -> String {
    let mut w = csv_writer();
    w.write_record(["chain", "iteration", "n_c", "n_s", "r", "log_prior", "log_ml"]).unwrap();
    for t in traces {
        w.write_record([
            t.chain.to_string(),
            t.iteration.to_string(),
            t.n_c.to_string(),
            t.n_s.to_string(),
            t.r.to_string(),
            t.log_prior.to_string(),
            t.log_ml.to_string(),
        ])
        .unwrap();
    }
    finish(w)
}

/// Square matrix with a header row and a leading name column.
pub fn matrix_csv(names: &[String], m: &[Vec<f64>]) -> String {
    let mut w = csv_writer();
    let mut header = vec![String::new()];
    header.extend(names.iter().cloned());
    w.write_record(&header).unwrap();
    for (name, row) in names.iter().zip(m) {
        let mut rec = vec![name.clone()];
        rec.extend(row.iter().map(f64::to_string));
        w.write_record(&rec).unwrap();
    }
    finish(w)
}

/// `edges,probability,log_weight,n_c,n_s,r` for every enumerated graph.
pub fn exact_csv(entries: &[ExactEntry]) -> String {
    let mut w = csv_writer();
    w.write_record(["edges", "probability", "log_weight", "n_c", "n_s", "r"]).unwrap();
    for e in entries {
        w.write_record([
            e.graph.to_edge_list(),
            e.probability.to_string(),
            e.log_weight.to_string(),
            e.decomposition.clique_count().to_string(),
            e.decomposition.nonempty_separator_count().to_string(),
            e.graph.edge_count().to_string(),
        ])
        .unwrap();
    }
    finish(w)
}

/// Histogram of clique and non-empty separator sizes over a set of decompositions.
pub fn size_histogram_csv<'a>(decompositions: impl IntoIterator<Item = &'a CliqueDecomposition>, n: usize) -> String {
    let mut cliques = vec![0u64; n + 1];
    let mut separators = vec![0u64; n + 1];
    for d in decompositions {
        for k in d.clique_sizes() {
            cliques[k] += 1;
        }
        for k in d.separator_sizes() {
            separators[k] += 1;
        }
    }
    let mut w = csv_writer();
    w.write_record(["kind", "size", "count"]).unwrap();
    for (kind, counts) in [("clique", &cliques), ("separator", &separators)] {
        for (k, &c) in counts.iter().enumerate().skip(1) {
            if c > 0 {
                w.write_record([kind.to_string(), k.to_string(), c.to_string()]).unwrap();
            }
        }
    }
    finish(w)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), WorkbenchError> {
    fs::write(path, contents).map_err(|e| WorkbenchError::Io(format!("{}: {e}", path.display())))
}
