//! Adjacency matrix and physical Laplacian on finitely supported functions.
//!
//! Acting at a boundary vertex of a truncation is an error: the value of
//! the infinite-graph operator there depends on neighbours that were cut
//! off, and zero-extension would invent them.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("function is supported on boundary vertices {vertices:?}; the truncation does not determine the operator there")]
    Truncation { vertices: Vec<VertexId> },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A function `V -> C` with finite support; unlisted vertices carry 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FiniteFunction {
    values: BTreeMap<VertexId, Complex64>,
}

impl FiniteFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn indicator(v: VertexId) -> Self {
        Self::constant_on([v], Complex64::new(1.0, 0.0))
    }

    pub fn constant_on(vertices: impl IntoIterator<Item = VertexId>, c: Complex64) -> Self {
        vertices.into_iter().map(|v| (v, c)).collect()
    }

    pub fn get(&self, v: VertexId) -> Complex64 {
        self.values.get(&v).copied().unwrap_or_default()
    }

    pub fn set(&mut self, v: VertexId, c: Complex64) {
        self.values.insert(v, c);
    }

    pub fn add(&mut self, v: VertexId, c: Complex64) {
        *self.values.entry(v).or_default() += c;
    }

    pub fn support(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.values.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, Complex64)> + '_ {
        self.values.iter().map(|(v, c)| (*v, *c))
    }

    /// `<self, other> = sum conj(self(x)) other(x)`.
    pub fn inner(&self, other: &FiniteFunction) -> Complex64 {
        self.values
            .iter()
            .map(|(v, c)| c.conj() * other.get(*v))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.values.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `sup_x |self(x) - other(x)|` over the union of supports.
    pub fn sup_distance(&self, other: &FiniteFunction) -> f64 {
        self.support()
            .chain(other.support())
            .map(|v| (self.get(v) - other.get(v)).norm())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: Complex64) -> FiniteFunction {
        self.iter().map(|(v, c)| (v, c * s)).collect()
    }
}

impl FromIterator<(VertexId, Complex64)> for FiniteFunction {
    fn from_iter<I: IntoIterator<Item = (VertexId, Complex64)>>(iter: I) -> Self {
        FiniteFunction {
            values: iter.into_iter().collect(),
        }
    }
}

fn check_support(g: &Graph, f: &FiniteFunction) -> Result<(), OperatorError> {
    for v in f.support() {
        if !g.contains(v) {
            return Err(GraphError::VertexOutOfRange {
                vertex: v.0,
                vertex_count: g.vertex_count(),
            }
            .into());
        }
    }
    let on_boundary: Vec<_> = f.support().filter(|v| g.is_boundary(*v)).collect();
    if !on_boundary.is_empty() {
        return Err(OperatorError::Truncation {
            vertices: on_boundary,
        });
    }
    Ok(())
}

/// `(Af)(x) = sum_{y ~ x} f(y)`.
pub fn apply_adjacency(g: &Graph, f: &FiniteFunction) -> Result<FiniteFunction, OperatorError> {
    check_support(g, f)?;
    let mut out = FiniteFunction::zero();
    for (x, c) in f.iter() {
        for &y in g.neighbors(x)? {
            out.add(y, c);
        }
    }
    Ok(out)
}

/// `(Lf)(x) = sum_{y ~ x} (f(x) - f(y)) = deg(x) f(x) - (Af)(x)`.
pub fn apply_laplacian(g: &Graph, f: &FiniteFunction) -> Result<FiniteFunction, OperatorError> {
    let mut out = apply_adjacency(g, f)?.scaled(Complex64::new(-1.0, 0.0));
    for (x, c) in f.iter() {
        out.add(x, c * g.degree(x)? as f64);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Adjacency,
    Laplacian,
}

/// Real symmetric matrix stored as its upper triangle, without zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetricMatrix {
    dimension: usize,
    entries: BTreeMap<(usize, usize), f64>,
}

impl SparseSymmetricMatrix {
    pub fn new(dimension: usize) -> Self {
        SparseSymmetricMatrix {
            dimension,
            entries: BTreeMap::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        assert!(row < self.dimension && col < self.dimension);
        let key = (row.min(col), row.max(col));
        if value == 0.0 {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries
            .get(&(row.min(col), row.max(col)))
            .copied()
            .unwrap_or(0.0)
    }

    /// Stored `(row, col, value)` triples with `row <= col`.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries.iter().map(|(&(r, c), &v)| (r, c, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.dimension];
        for (r, c, v) in self.upper_entries() {
            sums[r] += v;
            if r != c {
                sums[c] += v;
            }
        }
        sums
    }

    /// Coordinate text: one `row col value` line per stored entry, 0-based.
    pub fn to_coordinate_text(&self) -> String {
        let mut out = String::new();
        for (r, c, v) in self.upper_entries() {
            writeln!(out, "{r} {c} {v:?}").expect("writing to a String cannot fail");
        }
        out
    }
}

/// Matrix of the operator on the truncation. Rows of boundary vertices use
/// the truncated neighbour lists.
pub fn truncated_matrix(g: &Graph, operator: OperatorKind) -> SparseSymmetricMatrix {
    let mut m = SparseSymmetricMatrix::new(g.vertex_count());
    let sign = match operator {
        OperatorKind::Adjacency => 1.0,
        OperatorKind::Laplacian => -1.0,
    };
    for (u, v) in g.edges() {
        m.set(u.0, v.0, sign);
    }
    if operator == OperatorKind::Laplacian {
        for v in g.vertices() {
            let d = g.degree(v).expect("vertex from the graph itself");
            m.set(v.0, v.0, d as f64);
        }
    }
    m
}
