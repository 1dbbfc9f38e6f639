//! Plain-text edge-list reader for weighted graphs.
//!
//! Each data line is `u v` or `u v w` with 0-based endpoints and an
//! optional weight (default 1). Lines starting with `#` and blank lines
//! are skipped. A leading `n m` header is recognized when its line has
//! exactly two tokens, the second equals the number of remaining data
//! lines, and the first is positive; otherwise the first line is an edge
//! like any other (a 2-token edge line `u v` with `v` equal to the edge
//! count would be ambiguous, so emit a header or weights when generating
//! files).

use crate::{CliResult, DataError};
use chrsolve_core::apps::graph::Graph;

pub fn parse_graph(text: &str) -> CliResult<Graph<f64>> {
    // (line number, tokens) for every data line.
    let mut data: Vec<(usize, Vec<&str>)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        data.push((lineno + 1, line.split_whitespace().collect()));
    }
    if data.is_empty() {
        return Err(DataError("graph: no data lines".into()));
    }

    let header = {
        let (_, first) = &data[0];
        first.len() == 2
            && first[0].parse::<usize>().is_ok_and(|n| n > 0)
            && first[1].parse::<usize>() == Ok(data.len() - 1)
    };
    let declared_n = if header {
        Some(data[0].1[0].parse::<usize>().expect("checked above"))
    } else {
        None
    };
    let edge_lines = if header { &data[1..] } else { &data[..] };

    let mut edges = Vec::with_capacity(edge_lines.len());
    let mut max_node = 0usize;
    for (lineno, toks) in edge_lines {
        if toks.len() != 2 && toks.len() != 3 {
            return Err(DataError(format!(
                "graph line {lineno}: expected `u v [w]`, got {} tokens",
                toks.len()
            )));
        }
        let u = toks[0].parse::<usize>().map_err(|_| {
            DataError(format!("graph line {lineno}: bad node `{}`", toks[0]))
        })?;
        let v = toks[1].parse::<usize>().map_err(|_| {
            DataError(format!("graph line {lineno}: bad node `{}`", toks[1]))
        })?;
        let w = if toks.len() == 3 {
            let w = toks[2].parse::<f64>().map_err(|_| {
                DataError(format!("graph line {lineno}: bad weight `{}`", toks[2]))
            })?;
            if !w.is_finite() {
                return Err(DataError(format!("graph line {lineno}: non-finite weight")));
            }
            w
        } else {
            1.0
        };
        if u == v {
            return Err(DataError(format!("graph line {lineno}: self-loop at node {u}")));
        }
        if let Some(n) = declared_n {
            if u >= n || v >= n {
                return Err(DataError(format!(
                    "graph line {lineno}: edge ({u}, {v}) out of range for declared n = {n}"
                )));
            }
        }
        let key = (u.min(v), u.max(v));
        if edges.iter().any(|&(a, b, _)| (a, b) == key) {
            return Err(DataError(format!(
                "graph line {lineno}: duplicate edge ({u}, {v})"
            )));
        }
        edges.push((key.0, key.1, w));
        max_node = max_node.max(key.1);
    }
    let n = declared_n.unwrap_or(max_node + 1);
    Graph::new(n, edges).map_err(|e| DataError(format!("graph: {e}")))
}
