//! The min-max operator and its sub-gradient.
//!
//! For every edge `{x, y}` the subdominant ultrametric takes the weight of the
//! pass edge between `x` and `y`: the heaviest edge of a minimax path. That
//! edge is the canonical edge of `lca(x, y)` in the single-linkage
//! dendrogram, so one Kruskal pass plus one constant-time query per edge
//! evaluates the operator. Its Jacobian has a single 1 per column, at the
//! pass edge.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{EdgeWeightVector, EdgeWeightedGraph};
use crate::hierarchy::{single_linkage, Dendrogram};
use crate::lca::{build_lca, LcaIndex};

/// Output of the forward pass, kept around for cost evaluation and the
/// backward pass.
#[derive(Debug, Clone)]
pub struct SubdominantResult {
    /// The subdominant ultrametric `Φ(w̃)`.
    pub u: EdgeWeightVector,
    /// `pass_edge[i]` is the id of the pass edge between the endpoints of edge `i`.
    pub pass_edge: Vec<usize>,
    /// `pass_node[i]` is the dendrogram node `lca(x, y)` for edge `i = {x, y}`.
    pub pass_node: Vec<usize>,
    pub dendrogram: Dendrogram,
    pub lca: LcaIndex,
}

impl SubdominantResult {
    pub fn edge_count(&self) -> usize {
        self.pass_edge.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.dendrogram.leaf_count()
    }

    /// Pass edge and ultrametric distance between two vertices; `None` for
    /// the edge when `x == y`, at distance 0.
    pub fn pass(&self, x: usize, y: usize) -> Result<(Option<usize>, f64)> {
        let n = self.vertex_count();
        for v in [x, y] {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, vertex_count: n });
            }
        }
        let node = self.lca.lca_unchecked(x, y);
        Ok(match self.dendrogram.canonical_edge(node) {
            Some(e) => (Some(e), self.dendrogram.altitude(node)),
            None => (None, 0.0),
        })
    }
}

/// Forward pass: subdominant ultrametric of `w̃` with pass edges.
pub fn subdominant(g: &EdgeWeightedGraph, w_tilde: &EdgeWeightVector) -> Result<SubdominantResult> {
    let dendrogram = single_linkage(g, w_tilde)?;
    let lca = build_lca(&dendrogram);
    let canonical = dendrogram
        .canonical_edges()
        .expect("single linkage records canonical edges");
    let leaf_count = g.vertex_count();
    let m = g.edge_count();
    let mut u = Vec::with_capacity(m);
    let mut pass_edge = Vec::with_capacity(m);
    let mut pass_node = Vec::with_capacity(m);
    for &(x, y) in g.edges() {
        let node = lca.lca_unchecked(x, y);
        let e = canonical[node - leaf_count];
        pass_node.push(node);
        pass_edge.push(e);
        u.push(w_tilde[e]);
    }
    Ok(SubdominantResult {
        u: EdgeWeightVector::from_vec_unchecked(u),
        pass_edge,
        pass_node,
        dendrogram,
        lca,
    })
}

/// Backward pass: scatters `upstream = ∂J/∂u` onto pass edges, giving
/// `∂J/∂w̃` with the tree held fixed.
pub fn subdominant_vjp(res: &SubdominantResult, upstream: &[f64]) -> Result<Vec<f64>> {
    if upstream.len() != res.edge_count() {
        return Err(Error::LengthMismatch { expected: res.edge_count(), found: upstream.len() });
    }
    let mut grad = vec![0.0; upstream.len()];
    for (&p, &g) in res.pass_edge.iter().zip(upstream) {
        grad[p] += g;
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    fn triangle() -> (EdgeWeightedGraph, EdgeWeightVector) {
        let g = build_graph(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        (g, EdgeWeightVector::new(vec![1.0, 2.0, 3.0]).unwrap())
    }

    #[test]
    fn two_pairs_is_fixed_point() {
        let g = build_graph(4, &[(0, 1), (1, 2), (2, 3), (1, 3)]).unwrap();
        let w = EdgeWeightVector::new(vec![1.0, 3.0, 2.0, 3.0]).unwrap();
        let res = subdominant(&g, &w).unwrap();
        assert_eq!(res.u, w);
        assert_eq!(res.pass(0, 2).unwrap(), (Some(1), 3.0));
        assert_eq!(res.pass(1, 1).unwrap(), (None, 0.0));
        assert!(res.pass(0, 4).is_err());
    }

    #[test]
    fn triangle_forward_backward() {
        let (g, w) = triangle();
        let res = subdominant(&g, &w).unwrap();
        assert_eq!(res.u.as_slice(), &[1.0, 2.0, 2.0]);
        assert_eq!(res.pass_edge, vec![0, 1, 1]);
        let (a, b, c) = (0.3, -1.25, 4.0);
        assert_eq!(subdominant_vjp(&res, &[a, b, c]).unwrap(), vec![a, b + c, 0.0]);
        assert!(subdominant_vjp(&res, &[1.0]).is_err());
    }

    #[test]
    fn tree_graph_is_identity() {
        let g = build_graph(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let w = EdgeWeightVector::new(vec![4.0, 1.0, 3.0, 2.0]).unwrap();
        let res = subdominant(&g, &w).unwrap();
        assert_eq!(res.u, w);
        assert_eq!(res.pass_edge, vec![0, 1, 2, 3]);
        let up = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(subdominant_vjp(&res, &up).unwrap(), up.to_vec());
    }

    // Five vertices, edges e13 e12 e23 e35 e25 e24 e45 (1-based names).
    #[test]
    fn pass_edges_on_five_vertices() {
        let g = build_graph(5, &[(0, 2), (0, 1), (1, 2), (2, 4), (1, 4), (1, 3), (3, 4)]).unwrap();
        // e12, e23, e24, e45 form the MST,
        // e13 passes through e12, e35 and e25 pass through e24
        let w = EdgeWeightVector::new(vec![3.0, 2.0, 1.0, 6.0, 5.0, 4.0, 0.5]).unwrap();
        let res = subdominant(&g, &w).unwrap();
        assert_eq!(res.pass_edge, vec![1, 1, 2, 5, 5, 5, 6]);
        assert_eq!(res.pass_edge[3], 5);
    }
}
