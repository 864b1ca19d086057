//! Text edge-list formats and the JSON matrix encoding used by the CLI.
//!
//! Complex edge list (`.cwel`): first non-comment line is `n`, then one line
//! `i j r phi` per edge (0-based indices, phase in radians in `[0, 2π)`).
//! Directed edge list (`.del`): first line `n`, then lines `i j w`.
//! `#` starts a comment; blank lines are ignored.

use crate::graph::{ComplexGraph, DirectedGraph, EdgeRecord};
use crate::{Error, Result};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::ParseError { line, message: message.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(idx, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((idx + 1, line))
        }
    })
}

/// Parses the complex edge-list format from a string.
pub fn parse_edge_list(text: &str) -> Result<ComplexGraph> {
    let mut lines = content_lines(text);
    let (lineno, header) = lines.next().ok_or_else(|| parse_error(0, "empty file"))?;
    let n: usize = header
        .parse()
        .map_err(|_| parse_error(lineno, format!("expected node count, got '{header}'")))?;
    let mut records: Vec<EdgeRecord> = Vec::new();
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_error(lineno, format!("expected 'i j r phi', got '{line}'")));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| parse_error(lineno, format!("bad node index '{}'", fields[0])))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| parse_error(lineno, format!("bad node index '{}'", fields[1])))?;
        let r: f64 = fields[2]
            .parse()
            .map_err(|_| parse_error(lineno, format!("bad magnitude '{}'", fields[2])))?;
        let phi: f64 = fields[3]
            .parse()
            .map_err(|_| parse_error(lineno, format!("bad phase '{}'", fields[3])))?;
        records.push((i, j, r, phi));
    }
    ComplexGraph::new(n, &records)
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<ComplexGraph> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

/// Serializes a graph in the complex edge-list format. Magnitudes and phases
/// are written with shortest round-trip formatting, so `load(save(g))`
/// reproduces them bit-exactly.
pub fn format_edge_list(g: &ComplexGraph) -> String {
    let mut out = String::new();
    out.push_str(&format!("{}\n", g.node_count()));
    for e in g.edges() {
        out.push_str(&format!(
            "{} {} {} {}\n",
            e.source, e.target, e.weight.magnitude, e.weight.phase
        ));
    }
    out
}

pub fn save_edge_list(g: &ComplexGraph, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_edge_list(g))?;
    Ok(())
}

/// Parses the directed edge-list format from a string.
pub fn parse_directed_edge_list(text: &str) -> Result<DirectedGraph> {
    let mut lines = content_lines(text);
    let (lineno, header) = lines.next().ok_or_else(|| parse_error(0, "empty file"))?;
    let n: usize = header
        .parse()
        .map_err(|_| parse_error(lineno, format!("expected node count, got '{header}'")))?;
    let mut edges = Vec::new();
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_error(lineno, format!("expected 'i j w', got '{line}'")));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| parse_error(lineno, format!("bad node index '{}'", fields[0])))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| parse_error(lineno, format!("bad node index '{}'", fields[1])))?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| parse_error(lineno, format!("bad weight '{}'", fields[2])))?;
        edges.push((i, j, w));
    }
    DirectedGraph::new(n, &edges)
}

pub fn load_directed_edge_list(path: impl AsRef<Path>) -> Result<DirectedGraph> {
    parse_directed_edge_list(&std::fs::read_to_string(path)?)
}

pub fn format_directed_edge_list(g: &DirectedGraph) -> String {
    let mut out = String::new();
    out.push_str(&format!("{}\n", g.node_count()));
    for &(i, j, w) in g.edges() {
        out.push_str(&format!("{i} {j} {w}\n"));
    }
    out
}

pub fn save_directed_edge_list(g: &DirectedGraph, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_directed_edge_list(g))?;
    Ok(())
}

/// Initial walker state file: one line `i re im` per node mentioned;
/// unmentioned nodes start at zero.
pub fn parse_initial_state(text: &str, n: usize) -> Result<Array1<Complex64>> {
    let mut x = Array1::from_elem(n, Complex64::new(0.0, 0.0));
    for (lineno, line) in content_lines(text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_error(lineno, format!("expected 'i re im', got '{line}'")));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| parse_error(lineno, format!("bad node index '{}'", fields[0])))?;
        if i >= n {
            return Err(parse_error(lineno, format!("node index {i} out of range (n = {n})")));
        }
        let re: f64 = fields[1]
            .parse()
            .map_err(|_| parse_error(lineno, format!("bad real part '{}'", fields[1])))?;
        let im: f64 = fields[2]
            .parse()
            .map_err(|_| parse_error(lineno, format!("bad imaginary part '{}'", fields[2])))?;
        x[i] = Complex64::new(re, im);
    }
    Ok(x)
}

/// JSON encoding of a complex matrix as `{"re": [[...]], "im": [[...]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&Array2<Complex64>> for MatrixJson {
    fn from(m: &Array2<Complex64>) -> Self {
        let re = m.rows().into_iter().map(|r| r.iter().map(|z| z.re).collect()).collect();
        let im = m.rows().into_iter().map(|r| r.iter().map(|z| z.im).collect()).collect();
        MatrixJson { re, im }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<Array2<Complex64>> {
        let rows = self.re.len();
        if rows == 0 || self.im.len() != rows {
            return Err(Error::InvalidParameter("re/im row counts differ".into()));
        }
        let cols = self.re[0].len();
        let mut m = Array2::zeros((rows, cols));
        for i in 0..rows {
            if self.re[i].len() != cols || self.im[i].len() != cols {
                return Err(Error::InvalidParameter("ragged matrix rows".into()));
            }
            for j in 0..cols {
                m[(i, j)] = Complex64::new(self.re[i][j], self.im[i][j]);
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_triangle_with_comments() {
        let g = parse_edge_list("# toy\n3\n0 1 1.0 0.0\n1 2 1.0 0.0\n2 0 1.0 0.0 # closing\n")
            .unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges().len(), 3);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_edge_list("3\n0 1 1.0 0.0\nnot an edge\n").unwrap_err();
        match err {
            Error::ParseError { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(matches!(
            parse_edge_list("2\n0 0 1.0 0.0\n"),
            Err(Error::InvalidEdge(_))
        ));
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let g = ComplexGraph::new(4, &[
            (0, 1, 0.1 + 0.2, 1.2345678901234567),
            (1, 2, std::f64::consts::E, 0.000000123),
            (2, 3, 1.0 / 3.0, 6.283185),
            (3, 0, 2.0_f64.sqrt(), 3.3),
        ])
        .unwrap();
        let text = format_edge_list(&g);
        let back = parse_edge_list(&text).unwrap();
        assert_eq!(g.edges().len(), back.edges().len());
        for (a, b) in g.edges().iter().zip(back.edges()) {
            assert_eq!(a.source, b.source);
            assert_eq!(a.target, b.target);
            assert_eq!(a.weight.magnitude.to_bits(), b.weight.magnitude.to_bits());
            assert_eq!(a.weight.phase.to_bits(), b.weight.phase.to_bits());
        }
    }

    #[test]
    fn matrix_json_round_trip() {
        let g = ComplexGraph::new(2, &[(0, 1, 2.0, 1.0)]).unwrap();
        let w = g.weight_matrix();
        let json = MatrixJson::from(&w);
        let back = json.to_matrix().unwrap();
        assert_eq!(w, back);
    }

    #[test]
    fn initial_state_parsing() {
        let x = parse_initial_state("0 1.0 0.0\n2 0.0 -0.5\n", 3).unwrap();
        assert_eq!(x[0], Complex64::new(1.0, 0.0));
        assert_eq!(x[1], Complex64::new(0.0, 0.0));
        assert_eq!(x[2], Complex64::new(0.0, -0.5));
    }
}
