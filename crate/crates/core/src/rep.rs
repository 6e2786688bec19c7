//! Matrix representations of the graph product monoid.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{SimpleGraph, Vertex, VertexSet};
use crate::linalg::{self, c, CMatrix};
use crate::word::Word;

pub const DEFAULT_TOL: f64 = 1e-9;

/// Row-major matrix of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|k| [m[(r, k)].re, m[(r, k)].im]).collect()).collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::DimensionMismatch("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(n, m, |r, k| c(rows[r][k][0], rows[r][k][1])))
}

#[derive(Deserialize, Serialize)]
struct RepFile {
    dim: usize,
    generators: BTreeMap<String, MatrixJson>,
}

/// Per-generator norms and per-edge commutator residuals found at load time.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub tol: f64,
    pub effective_tol: f64,
    pub norms: Vec<(String, f64)>,
    pub commutators: Vec<(String, String, f64)>,
}

/// Contractions `T_v` on `C^d`, one per vertex, commuting along edges.
#[derive(Clone, Debug)]
pub struct Representation {
    graph: SimpleGraph,
    dim: usize,
    gens: Vec<CMatrix>,
    report: ValidationReport,
}

impl Representation {
    /// Validates generators given in vertex order.
    ///
    /// Norm and commutator checks use `tol · d · max(1, max ‖T_v‖)`.
    pub fn new(graph: SimpleGraph, gens: Vec<CMatrix>, tol: f64) -> Result<Self> {
        if gens.len() < graph.len() {
            return Err(Error::MissingGenerator(graph.label(gens.len()).to_string()));
        }
        if gens.len() > graph.len() {
            return Err(Error::DimensionMismatch(format!("{} generators for {} vertices", gens.len(), graph.len())));
        }
        let dim = gens.first().map_or(1, CMatrix::nrows);
        if dim == 0 {
            return Err(Error::DimensionMismatch("dimension must be positive".into()));
        }
        for (v, t) in gens.iter().enumerate() {
            if t.nrows() != dim || t.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "generator `{}` is {}x{}, expected {dim}x{dim}",
                    graph.label(v),
                    t.nrows(),
                    t.ncols()
                )));
            }
        }
        let norms: Vec<f64> = gens.iter().map(linalg::op_norm).collect();
        let max_norm = norms.iter().fold(1.0f64, |a, &b| a.max(b));
        let effective_tol = tol * dim as f64 * max_norm;
        for (v, &n) in norms.iter().enumerate() {
            if n > 1.0 + effective_tol {
                return Err(Error::NotContractive { vertex: graph.label(v).to_string(), norm: n });
            }
        }
        let mut commutators = Vec::new();
        for (a, b) in graph.edges() {
            let r = linalg::op_norm(&(&gens[a] * &gens[b] - &gens[b] * &gens[a]));
            if r > effective_tol {
                return Err(Error::NotCommuting {
                    a: graph.label(a).to_string(),
                    b: graph.label(b).to_string(),
                    residual: r,
                });
            }
            commutators.push((graph.label(a).to_string(), graph.label(b).to_string(), r));
        }
        let report = ValidationReport {
            tol,
            effective_tol,
            norms: graph.labels().iter().cloned().zip(norms).collect(),
            commutators,
        };
        Ok(Representation { graph, dim, gens, report })
    }

    /// Scalar representation (`d = 1`) with real values in vertex order.
    pub fn scalars(graph: SimpleGraph, values: &[f64]) -> Result<Self> {
        let gens = values.iter().map(|&x| linalg::scalar(x)).collect();
        Representation::new(graph, gens, DEFAULT_TOL)
    }

    /// Parses `{"dim": d, "generators": {"label": [[[re, im], ..], ..], ..}}`.
    pub fn from_json(text: &str, graph: &SimpleGraph, tol: f64) -> Result<Self> {
        let file: RepFile = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let mut gens = Vec::with_capacity(graph.len());
        for label in graph.labels() {
            let m = file.generators.get(label).ok_or_else(|| Error::MissingGenerator(label.clone()))?;
            let m = matrix_from_json(m)?;
            if m.nrows() != file.dim || m.ncols() != file.dim {
                return Err(Error::DimensionMismatch(format!(
                    "generator `{label}` is {}x{}, declared dim {}",
                    m.nrows(),
                    m.ncols(),
                    file.dim
                )));
            }
            gens.push(m);
        }
        if let Some(extra) = file.generators.keys().find(|k| graph.vertex(k).is_none()) {
            return Err(Error::UndeclaredVertex(extra.clone()));
        }
        Representation::new(graph.clone(), gens, tol)
    }

    pub fn to_json(&self) -> String {
        let file = RepFile {
            dim: self.dim,
            generators: self
                .graph
                .vertices()
                .map(|v| (self.graph.label(v).to_string(), matrix_to_json(&self.gens[v])))
                .collect(),
        };
        serde_json::to_string(&file).expect("representation serialization")
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generator(&self, v: Vertex) -> &CMatrix {
        &self.gens[v]
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.gens
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    /// `T(x)`: generator powers multiplied in normal-form order.
    pub fn evaluate(&self, x: &Word) -> CMatrix {
        let mut out = linalg::identity(self.dim);
        for s in x.syllables() {
            out *= self.gens[s.vertex].pow(s.exponent);
        }
        out
    }

    /// `T_U`, the ordered product over a clique; the identity for `U = ∅`.
    pub fn evaluate_set(&self, set: &VertexSet) -> CMatrix {
        set.iter().fold(linalg::identity(self.dim), |acc, v| acc * &self.gens[v])
    }

    /// The generator-wise adjoint `T*`.
    pub fn adjoint(&self) -> Result<Representation> {
        let gens = self.gens.iter().map(|t| t.adjoint()).collect();
        Representation::new(self.graph.clone(), gens, self.report.tol)
    }

    /// Every generator multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Representation> {
        let gens = self.gens.iter().map(|t| t * c(s, 0.0)).collect();
        Representation::new(self.graph.clone(), gens, self.report.tol)
    }
}

/// Operator matrix with labelled block rows and columns of size `block`.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub block: usize,
    pub data: CMatrix,
}

impl OperatorMatrix {
    pub fn new(rows: Vec<String>, cols: Vec<String>, block: usize) -> Self {
        let data = linalg::zeros(rows.len() * block, cols.len() * block);
        OperatorMatrix { rows, cols, block, data }
    }

    pub fn get(&self, i: usize, j: usize) -> CMatrix {
        let d = self.block;
        self.data.view((i * d, j * d), (d, d)).into_owned()
    }

    pub fn set(&mut self, i: usize, j: usize, m: &CMatrix) {
        let d = self.block;
        self.data.view_mut((i * d, j * d), (d, d)).copy_from(m);
    }

    /// Block addressed by row and column labels.
    pub fn get_by_label(&self, row: &str, col: &str) -> Option<CMatrix> {
        let i = self.rows.iter().position(|r| r == row)?;
        let j = self.cols.iter().position(|r| r == col)?;
        Some(self.get(i, j))
    }

    /// True when the label lists coincide and `M = M*` within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.rows == self.cols && linalg::hermitian_residual(&self.data) <= tol
    }
}
