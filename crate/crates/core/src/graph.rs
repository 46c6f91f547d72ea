//! Sparse undirected graphs with stable edge ids, and edge-indexed weights.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::{Error, Result};
use crate::subdominant::subdominant;

/// Connected undirected simple graph. Edge ids follow insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeWeightedGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    // CSR adjacency: neighbors of v are adjacency[offsets[v]..offsets[v + 1]]
    offsets: Vec<usize>,
    adjacency: Vec<(usize, usize)>,
}

impl EdgeWeightedGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Endpoints of edge `id`, in the order they were given.
    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `(neighbor, edge id)` pairs incident to `v`.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.edges.len() {
            return Err(Error::LengthMismatch { expected: self.edges.len(), found: len });
        }
        Ok(())
    }
}

/// Builds a graph from `edge_pairs`; edge `i` gets id `i`.
///
/// Self-loops, duplicate unordered pairs, out-of-range vertices and
/// disconnected inputs are rejected.
pub fn build_graph(vertex_count: usize, edge_pairs: &[(usize, usize)]) -> Result<EdgeWeightedGraph> {
    if vertex_count == 0 {
        return Err(Error::EmptyGraph);
    }
    for (edge, &(x, y)) in edge_pairs.iter().enumerate() {
        for v in [x, y] {
            if v >= vertex_count {
                return Err(Error::VertexOutOfRange { vertex: v, vertex_count });
            }
        }
        if x == y {
            return Err(Error::SelfLoop { edge, vertex: x });
        }
    }

    let mut keyed: Vec<(usize, usize, usize)> = edge_pairs
        .iter()
        .enumerate()
        .map(|(id, &(x, y))| (x.min(y), x.max(y), id))
        .collect();
    keyed.sort_unstable();
    for pair in keyed.windows(2) {
        if pair[0].0 == pair[1].0 && pair[0].1 == pair[1].1 {
            return Err(Error::DuplicateEdge {
                edge: pair[1].2,
                first: pair[0].2,
                x: pair[0].0,
                y: pair[0].1,
            });
        }
    }

    let mut offsets = vec![0usize; vertex_count + 1];
    for &(x, y) in edge_pairs {
        offsets[x + 1] += 1;
        offsets[y + 1] += 1;
    }
    for v in 0..vertex_count {
        offsets[v + 1] += offsets[v];
    }
    let mut cursor = offsets.clone();
    let mut adjacency = vec![(0usize, 0usize); 2 * edge_pairs.len()];
    for (id, &(x, y)) in edge_pairs.iter().enumerate() {
        adjacency[cursor[x]] = (y, id);
        cursor[x] += 1;
        adjacency[cursor[y]] = (x, id);
        cursor[y] += 1;
    }

    let graph = EdgeWeightedGraph {
        vertex_count,
        edges: edge_pairs.to_vec(),
        offsets,
        adjacency,
    };

    let mut seen = vec![false; vertex_count];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(nb, _) in graph.neighbors(v) {
            if !seen[nb] {
                seen[nb] = true;
                stack.push(nb);
            }
        }
    }
    if let Some(vertex) = seen.iter().position(|&s| !s) {
        return Err(Error::Disconnected { vertex });
    }
    Ok(graph)
}

/// Real values indexed by edge id. Used for input dissimilarities, the
/// optimization variable and ultrametrics alike.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EdgeWeightVector(Vec<f64>);

impl EdgeWeightVector {
    /// Wraps `values`, rejecting NaN and infinities.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index, value: values[index] });
        }
        Ok(Self(values))
    }

    /// Like [`EdgeWeightVector::new`], also checking the length against `g`.
    pub fn for_graph(g: &EdgeWeightedGraph, values: Vec<f64>) -> Result<Self> {
        g.check_len(values.len())?;
        Self::new(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        Self(values)
    }
}

impl Deref for EdgeWeightVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for EdgeWeightVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

/// True iff `u` is a fixed point of the min-max operator within `tol`, which
/// is equivalent to every cycle edge being no heavier than the heaviest other
/// edge of that cycle.
pub fn is_ultrametric(g: &EdgeWeightedGraph, u: &EdgeWeightVector, tol: f64) -> Result<bool> {
    let res = subdominant(g, u)?;
    Ok(u.iter().zip(res.u.iter()).all(|(a, b)| (a - b).abs() <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_pairs_graph() {
        let g = build_graph(4, &[(0, 1), (1, 2), (2, 3), (1, 3)]).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.edge(3), (1, 3));
        let mut nb: Vec<_> = g.neighbors(1).to_vec();
        nb.sort();
        assert_eq!(nb, vec![(0, 0), (2, 1), (3, 3)]);
    }

    #[test]
    fn smallest_graphs() {
        assert_eq!(build_graph(2, &[(0, 1)]).unwrap().edge_count(), 1);
        assert_eq!(build_graph(3, &[(0, 1), (1, 2), (0, 2)]).unwrap().edge_count(), 3);
        assert_eq!(build_graph(1, &[]).unwrap().edge_count(), 0);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(build_graph(0, &[]), Err(Error::EmptyGraph));
        assert_eq!(
            build_graph(3, &[(0, 1), (1, 1)]),
            Err(Error::SelfLoop { edge: 1, vertex: 1 })
        );
        assert_eq!(
            build_graph(3, &[(0, 1), (1, 2), (1, 0)]),
            Err(Error::DuplicateEdge { edge: 2, first: 0, x: 0, y: 1 })
        );
        assert_eq!(
            build_graph(4, &[(0, 1), (2, 3)]),
            Err(Error::Disconnected { vertex: 2 })
        );
        assert_eq!(
            build_graph(2, &[(0, 5)]),
            Err(Error::VertexOutOfRange { vertex: 5, vertex_count: 2 })
        );
    }

    #[test]
    fn weights_validate() {
        assert!(EdgeWeightVector::new(vec![1.0, f64::NAN]).is_err());
        let g = build_graph(2, &[(0, 1)]).unwrap();
        assert_eq!(
            EdgeWeightVector::for_graph(&g, vec![1.0, 2.0]),
            Err(Error::LengthMismatch { expected: 1, found: 2 })
        );
    }

    #[test]
    fn ultrametric_examples() {
        let g = build_graph(4, &[(0, 1), (1, 2), (2, 3), (1, 3)]).unwrap();
        let u = EdgeWeightVector::new(vec![1.0, 3.0, 2.0, 3.0]).unwrap();
        assert!(is_ultrametric(&g, &u, 0.0).unwrap());

        let tri = build_graph(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let bad = EdgeWeightVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(!is_ultrametric(&tri, &bad, 1e-9).unwrap());
        let good = EdgeWeightVector::new(vec![1.0, 2.0, 2.0]).unwrap();
        assert!(is_ultrametric(&tri, &good, 0.0).unwrap());

        let path = build_graph(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let any = EdgeWeightVector::new(vec![7.0, 0.5, 3.0]).unwrap();
        assert!(is_ultrametric(&path, &any, 0.0).unwrap());

        let short = EdgeWeightVector::new(vec![1.0]).unwrap();
        assert!(matches!(
            is_ultrametric(&tri, &short, 0.0),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
