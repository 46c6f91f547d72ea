//! Binary merge trees (dendrograms), single-linkage construction and
//! horizontal cuts.
//!
//! Nodes `0..N` are the leaves, one per graph vertex. Internal nodes
//! `N..2N-1` are numbered in merge order, so a parent always has a larger
//! index than its children.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::graph::{EdgeWeightVector, EdgeWeightedGraph};

const NO_PARENT: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    leaf_count: usize,
    children: Vec<[usize; 2]>,
    altitude: Vec<f64>,
    canonical_edge: Option<Vec<usize>>,
    parent: Vec<usize>,
    size: Vec<usize>,
    rank: Vec<usize>,
}

impl Dendrogram {
    /// Assembles a dendrogram from merges `(child1, child2, altitude)` given in
    /// node order: merge `k` creates node `leaf_count + k`.
    ///
    /// Every child must be an earlier node and be merged exactly once, and the
    /// merges must end in a single root. Altitudes are not required to be
    /// monotone. `canonical_edge`, when present, holds one edge id per merge.
    pub fn from_merges(
        leaf_count: usize,
        merges: &[(usize, usize, f64)],
        canonical_edge: Option<Vec<usize>>,
    ) -> Result<Self> {
        if leaf_count == 0 {
            return Err(Error::EmptyGraph);
        }
        if merges.len() + 1 != leaf_count {
            return Err(Error::LengthMismatch { expected: leaf_count - 1, found: merges.len() });
        }
        if let Some(c) = &canonical_edge {
            if c.len() != merges.len() {
                return Err(Error::LengthMismatch { expected: merges.len(), found: c.len() });
            }
        }
        let node_count = 2 * leaf_count - 1;
        let mut parent = vec![NO_PARENT; node_count];
        let mut size = vec![1usize; node_count];
        let mut children = Vec::with_capacity(merges.len());
        let mut altitude = Vec::with_capacity(merges.len());
        for (k, &(a, b, alt)) in merges.iter().enumerate() {
            let node = leaf_count + k;
            if a >= node || b >= node {
                return Err(Error::InvalidMerge { merge: k, reason: "child is not an earlier node" });
            }
            if a == b {
                return Err(Error::InvalidMerge { merge: k, reason: "both children are the same node" });
            }
            if parent[a] != NO_PARENT || parent[b] != NO_PARENT {
                return Err(Error::InvalidMerge { merge: k, reason: "child already merged" });
            }
            if !alt.is_finite() {
                return Err(Error::NonFinite { index: k, value: alt });
            }
            parent[a] = node;
            parent[b] = node;
            size[node] = size[a] + size[b];
            children.push([a, b]);
            altitude.push(alt);
        }
        // a tree with n - 1 valid binary merges over n leaves has one root
        let mut order: Vec<usize> = (0..merges.len()).collect();
        order.sort_by(|&i, &j| {
            altitude[j]
                .partial_cmp(&altitude[i])
                .unwrap_or(Ordering::Equal)
                .then(j.cmp(&i))
        });
        let mut rank = vec![0usize; merges.len()];
        for (r, &k) in order.iter().enumerate() {
            rank[k] = r + 1;
        }
        Ok(Self { leaf_count, children, altitude, canonical_edge, parent, size, rank })
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    pub fn node_count(&self) -> usize {
        2 * self.leaf_count - 1
    }

    pub fn root(&self) -> usize {
        self.node_count() - 1
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        node < self.leaf_count
    }

    pub fn children(&self, node: usize) -> Option<[usize; 2]> {
        node.checked_sub(self.leaf_count).map(|k| self.children[k])
    }

    /// Merge altitude; leaves sit at altitude 0.
    pub fn altitude(&self, node: usize) -> f64 {
        node.checked_sub(self.leaf_count).map_or(0.0, |k| self.altitude[k])
    }

    /// Altitudes of the internal nodes, in node order.
    pub fn altitudes(&self) -> &[f64] {
        &self.altitude
    }

    /// Edge whose processing created `node`, for trees built from a graph.
    pub fn canonical_edge(&self, node: usize) -> Option<usize> {
        let k = node.checked_sub(self.leaf_count)?;
        self.canonical_edge.as_ref().map(|c| c[k])
    }

    /// Canonical edges of all internal nodes, in node order.
    pub fn canonical_edges(&self) -> Option<&[usize]> {
        self.canonical_edge.as_deref()
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        match self.parent[node] {
            NO_PARENT => None,
            p => Some(p),
        }
    }

    /// Number of leaves below `node`.
    pub fn size(&self, node: usize) -> usize {
        self.size[node]
    }

    /// 1 for the highest merge, 2 for the next one, and so on. Equal
    /// altitudes rank the later node first.
    pub fn rank(&self, node: usize) -> Option<usize> {
        node.checked_sub(self.leaf_count).map(|k| self.rank[k])
    }

    pub fn sibling(&self, node: usize) -> Option<usize> {
        let [a, b] = self.children(self.parent(node)?)?;
        Some(if a == node { b } else { a })
    }

    /// Strict ancestors of `node`, bottom-up, ending at the root.
    pub fn ancestors(&self, node: usize) -> Ancestors<'_> {
        Ancestors { tree: self, current: node }
    }

    /// `(child1, child2, altitude, size)` for every internal node, in order.
    pub fn merges(&self) -> impl Iterator<Item = (usize, usize, f64, usize)> + '_ {
        self.children
            .iter()
            .zip(&self.altitude)
            .enumerate()
            .map(move |(k, (&[a, b], &alt))| (a, b, alt, self.size[self.leaf_count + k]))
    }
}

pub struct Ancestors<'a> {
    tree: &'a Dendrogram,
    current: usize,
}

impl Iterator for Ancestors<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        let p = self.tree.parent(self.current)?;
        self.current = p;
        Some(p)
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            let grand = self.parent[self.parent[x]];
            self.parent[x] = grand;
            x = grand;
        }
        x
    }

    /// Links two distinct roots and returns the surviving one.
    fn link(&mut self, a: usize, b: usize) -> usize {
        let (big, small) = if self.size[a] >= self.size[b] { (a, b) } else { (b, a) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        big
    }
}

/// Single-linkage dendrogram of `(g, weights)` by Kruskal's algorithm.
///
/// Edges are processed by non-decreasing weight, equal weights by edge id.
/// Each edge joining two clusters becomes the canonical edge of the node it
/// creates, so the canonical edges form a minimum spanning tree.
pub fn single_linkage(g: &EdgeWeightedGraph, weights: &EdgeWeightVector) -> Result<Dendrogram> {
    g.check_len(weights.len())?;
    let n = g.vertex_count();
    let w = weights.as_slice();
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    order.sort_unstable_by(|&a, &b| {
        w[a].partial_cmp(&w[b]).unwrap_or(Ordering::Equal).then(a.cmp(&b))
    });

    let mut uf = UnionFind::new(n);
    // dendrogram node currently representing each union-find root
    let mut cluster_node: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    let mut canonical = Vec::with_capacity(n.saturating_sub(1));
    for e in order {
        if merges.len() + 1 >= n {
            break;
        }
        let (x, y) = g.edge(e);
        let (rx, ry) = (uf.find(x), uf.find(y));
        if rx == ry {
            continue;
        }
        let (a, b) = (cluster_node[rx], cluster_node[ry]);
        let node = n + merges.len();
        merges.push((a.min(b), a.max(b), w[e]));
        canonical.push(e);
        let r = uf.link(rx, ry);
        cluster_node[r] = node;
    }
    debug_assert_eq!(merges.len() + 1, n, "graph is connected by construction");
    Dendrogram::from_merges(n, &merges, Some(canonical))
}

/// Per-node quantities derived from sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeAttributes {
    leaf_count: usize,
    min_child_size: Vec<usize>,
}

impl NodeAttributes {
    /// Size of the smaller child of an internal node.
    pub fn min_child_size(&self, node: usize) -> Option<usize> {
        node.checked_sub(self.leaf_count).map(|k| self.min_child_size[k])
    }

    pub fn min_child_sizes(&self) -> &[usize] {
        &self.min_child_size
    }
}

pub fn node_attributes(t: &Dendrogram) -> NodeAttributes {
    let min_child_size = t
        .children
        .iter()
        .map(|&[a, b]| t.size[a].min(t.size[b]))
        .collect();
    NodeAttributes { leaf_count: t.leaf_count, min_child_size }
}

/// Flat clustering obtained by deleting the `k - 1` highest-ranked merges.
///
/// Labels are `0..k`, numbered in order of each cluster's smallest vertex.
pub fn cut_to_k_clusters(t: &Dendrogram, k: usize) -> Result<Vec<usize>> {
    let n = t.leaf_count;
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, min: 1, max: n });
    }
    const UNSET: usize = usize::MAX;
    let mut cluster = vec![UNSET; t.node_count()];
    let mut next = 0;
    for node in (0..t.node_count()).rev() {
        let removed = t.rank(node).is_some_and(|r| r < k);
        if removed {
            continue;
        }
        cluster[node] = match t.parent(node) {
            Some(p) if cluster[p] != UNSET => cluster[p],
            _ => {
                next += 1;
                next - 1
            }
        };
    }
    let mut relabel = vec![UNSET; next];
    let mut fresh = 0;
    Ok((0..n)
        .map(|v| {
            let c = cluster[v];
            if relabel[c] == UNSET {
                relabel[c] = fresh;
                fresh += 1;
            }
            relabel[c]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    fn two_pairs() -> (EdgeWeightedGraph, EdgeWeightVector) {
        let g = build_graph(4, &[(0, 1), (1, 2), (2, 3), (1, 3)]).unwrap();
        (g, EdgeWeightVector::new(vec![1.0, 3.0, 2.0, 3.0]).unwrap())
    }

    fn triangle() -> (EdgeWeightedGraph, EdgeWeightVector) {
        let g = build_graph(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        (g, EdgeWeightVector::new(vec![1.0, 2.0, 3.0]).unwrap())
    }

    #[test]
    fn two_pairs_dendrogram() {
        let (g, w) = two_pairs();
        let t = single_linkage(&g, &w).unwrap();
        assert_eq!(t.node_count(), 7);
        assert_eq!(t.children(4), Some([0, 1]));
        assert_eq!(t.altitude(4), 1.0);
        assert_eq!(t.children(5), Some([2, 3]));
        assert_eq!(t.altitude(5), 2.0);
        assert_eq!(t.children(6), Some([4, 5]));
        assert_eq!(t.altitude(6), 3.0);
        assert_eq!(t.canonical_edges(), Some(&[0, 2, 1][..]));
        assert_eq!((t.size(4), t.size(5), t.size(6)), (2, 2, 4));
        assert_eq!((t.rank(6), t.rank(5), t.rank(4)), (Some(1), Some(2), Some(3)));
    }

    #[test]
    fn triangle_dendrogram() {
        let (g, w) = triangle();
        let t = single_linkage(&g, &w).unwrap();
        assert_eq!(t.merges().collect::<Vec<_>>(), vec![(0, 1, 1.0, 2), (2, 3, 2.0, 3)]);
        assert_eq!(t.canonical_edges(), Some(&[0, 1][..]));
    }

    #[test]
    fn two_vertices() {
        let g = build_graph(2, &[(0, 1)]).unwrap();
        let t = single_linkage(&g, &EdgeWeightVector::new(vec![5.0]).unwrap()).unwrap();
        assert_eq!(t.node_count(), 3);
        assert_eq!(t.altitude(2), 5.0);
        assert_eq!(t.size(2), 2);
        assert_eq!(t.root(), 2);
    }

    #[test]
    fn negative_weights_are_ordered() {
        let (g, _) = triangle();
        let w = EdgeWeightVector::new(vec![0.5, -1.0, -2.0]).unwrap();
        let t = single_linkage(&g, &w).unwrap();
        assert_eq!(t.altitudes(), &[-2.0, -1.0]);
        assert_eq!(t.canonical_edges(), Some(&[2, 1][..]));
    }

    #[test]
    fn ties_follow_edge_ids() {
        let (g, _) = triangle();
        let w = EdgeWeightVector::new(vec![1.0, 1.0, 1.0]).unwrap();
        let t = single_linkage(&g, &w).unwrap();
        assert_eq!(t.canonical_edges(), Some(&[0, 1][..]));
        assert_eq!((t.rank(4), t.rank(3)), (Some(1), Some(2)));
    }

    #[test]
    fn attributes() {
        let (g, w) = two_pairs();
        let a = node_attributes(&single_linkage(&g, &w).unwrap());
        assert_eq!(a.min_child_sizes(), &[1, 1, 2]);
        let (g, w) = triangle();
        let a = node_attributes(&single_linkage(&g, &w).unwrap());
        assert_eq!(a.min_child_sizes(), &[1, 1]);
        assert_eq!(a.min_child_size(0), None);
    }

    #[test]
    fn ancestors_and_siblings() {
        let (g, w) = two_pairs();
        let t = single_linkage(&g, &w).unwrap();
        assert_eq!(t.ancestors(2).collect::<Vec<_>>(), vec![5, 6]);
        assert_eq!(t.ancestors(6).count(), 0);
        assert_eq!(t.sibling(4), Some(5));
        assert_eq!(t.sibling(3), Some(2));
        assert_eq!(t.sibling(6), None);
    }

    #[test]
    fn cuts() {
        let (g, w) = two_pairs();
        let t = single_linkage(&g, &w).unwrap();
        assert_eq!(cut_to_k_clusters(&t, 1).unwrap(), vec![0, 0, 0, 0]);
        assert_eq!(cut_to_k_clusters(&t, 2).unwrap(), vec![0, 0, 1, 1]);
        assert_eq!(cut_to_k_clusters(&t, 3).unwrap(), vec![0, 0, 1, 2]);
        assert_eq!(cut_to_k_clusters(&t, 4).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(cut_to_k_clusters(&t, 0), Err(Error::KOutOfRange { k: 0, min: 1, max: 4 }));
        assert!(cut_to_k_clusters(&t, 5).is_err());
    }

    #[test]
    fn from_merges_validation() {
        assert!(Dendrogram::from_merges(3, &[(0, 1, 1.0), (1, 2, 2.0)], None).is_err());
        assert!(Dendrogram::from_merges(3, &[(0, 3, 1.0), (1, 2, 2.0)], None).is_err());
        assert!(Dendrogram::from_merges(3, &[(0, 1, 1.0)], None).is_err());
        let t = Dendrogram::from_merges(3, &[(0, 1, 1.0), (2, 3, 0.5)], None).unwrap();
        // inverted altitudes: rank follows altitude, not index
        assert_eq!((t.rank(3), t.rank(4)), (Some(1), Some(2)));
        assert_eq!(t.canonical_edge(3), None);
        let single = Dendrogram::from_merges(1, &[], None).unwrap();
        assert_eq!(single.root(), 0);
        assert_eq!(cut_to_k_clusters(&single, 1).unwrap(), vec![0]);
    }
}
