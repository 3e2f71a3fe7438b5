//! JSON text formats for graphs, states and dense matrices.
//!
//! Graph: `{"n": 4, "edges": [[0, 1], [1, 2, 0.5]]}` (weight defaults to 1).
//! State: `[1.0, 0.0, -1.0]`. Matrix: `{"n": 2, "rows": [[..], [..]]}`.
//! Floats are written with 17 significant digits so that reading them back
//! reproduces the same bits.

use crate::error::{PstError, Result};
use crate::graph::Graph;
use crate::state::PureState;
use nalgebra::{DMatrix, DVector};
use serde::Deserialize;
use serde_json::Value;
use std::fmt::Write as _;
use std::path::Path;

/// One float in 17-significant-digit scientific notation.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_row(xs: impl IntoIterator<Item = f64>) -> String {
    let items: Vec<String> = xs.into_iter().map(format_f64).collect();
    format!("[{}]", items.join(", "))
}

fn parse_err(what: &str, e: impl std::fmt::Display) -> PstError {
    PstError::Parse(format!("{what}: {e}"))
}

#[derive(Deserialize)]
struct GraphDoc {
    n: usize,
    edges: Vec<Vec<f64>>,
}

fn index(x: f64, what: &str) -> Result<usize> {
    if x < 0.0 || x.fract() != 0.0 || !x.is_finite() {
        return Err(PstError::Parse(format!("{what} {x} is not a vertex index")));
    }
    Ok(x as usize)
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let doc: GraphDoc = serde_json::from_str(text).map_err(|e| parse_err("graph", e))?;
    let mut edges = Vec::with_capacity(doc.edges.len());
    for e in &doc.edges {
        let w = match e.len() {
            2 => 1.0,
            3 => e[2],
            k => return Err(PstError::Parse(format!("edge has {k} entries, expected 2 or 3"))),
        };
        edges.push((index(e[0], "edge endpoint")?, index(e[1], "edge endpoint")?, w));
    }
    Graph::new(doc.n, edges)
}

pub fn graph_to_json(g: &Graph) -> String {
    let mut out = format!("{{\"n\": {}, \"edges\": [", g.n());
    for (i, &(u, v, w)) in g.edges().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write!(out, "[{u}, {v}, {}]", format_f64(w)).unwrap();
    }
    out.push_str("]}");
    out
}

pub fn parse_vector(text: &str) -> Result<DVector<f64>> {
    let v: Vec<f64> = serde_json::from_str(text).map_err(|e| parse_err("state", e))?;
    Ok(DVector::from_vec(v))
}

pub fn parse_state(text: &str) -> Result<PureState> {
    PureState::new(parse_vector(text)?)
}

pub fn vector_to_json(v: &DVector<f64>) -> String {
    format_row(v.iter().copied())
}

pub fn state_to_json(x: &PureState) -> String {
    vector_to_json(x.vector())
}

#[derive(Deserialize)]
struct MatrixDoc {
    n: usize,
    rows: Vec<Vec<f64>>,
}

pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let doc: MatrixDoc = serde_json::from_str(text).map_err(|e| parse_err("matrix", e))?;
    if doc.rows.len() != doc.n || doc.rows.iter().any(|r| r.len() != doc.n) {
        return Err(PstError::Parse(format!("matrix rows do not form a {0}x{0} array", doc.n)));
    }
    Ok(DMatrix::from_fn(doc.n, doc.n, |i, j| doc.rows[i][j]))
}

pub fn matrix_to_json(m: &DMatrix<f64>) -> String {
    let rows: Vec<String> = m.row_iter().map(|r| format_row(r.iter().copied())).collect();
    format!("{{\"n\": {}, \"rows\": [{}]}}", m.nrows(), rows.join(", "))
}

/// Re-serializes a JSON value with every float in 17-digit form. Integers
/// stay integers.
pub fn to_exact_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, &mut out);
    out
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Number(num) if num.is_f64() => {
            let x = num.as_f64().unwrap();
            out.push_str(&format_f64(x));
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(item, out);
            }
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| PstError::Parse(format!("{}: {e}", path.display())))
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    parse_graph(&read_text(path)?)
}

pub fn read_state(path: &Path) -> Result<PureState> {
    parse_state(&read_text(path)?)
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    parse_matrix(&read_text(path)?)
}
