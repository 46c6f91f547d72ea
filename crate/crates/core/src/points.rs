//! Graph construction from point clouds, and triplet sampling from labels.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::{Triplet, TripletSet};
use crate::error::{Error, Result};
use crate::graph::{build_graph, EdgeWeightVector, EdgeWeightedGraph};

/// Largest point set accepted by [`knn_mst_graph`]; distances are computed
/// for every pair.
pub const MAX_POINTS: usize = 10_000;

/// `N` points in `d` dimensions, stored row-major, with optional per-point
/// class labels (`None` for unlabeled points).
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
    labels: Option<Vec<Option<u32>>>,
}

impl PointSet {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("points need at least one dimension"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidConfig("coordinate count is not a multiple of the dimension"));
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index, value: coords[index] });
        }
        Ok(Self { dim, coords, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<Option<u32>>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), found: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn labels(&self) -> Option<&[Option<u32>]> {
        self.labels.as_deref()
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        let s: f64 = self
            .point(i)
            .iter()
            .zip(self.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        libm::sqrt(s)
    }
}

/// Symmetrized `k`-nearest-neighbor graph plus the edges of a Euclidean
/// minimum spanning tree, weighted by Euclidean distance.
///
/// An edge is kept when either endpoint lists the other among its `k`
/// nearest neighbors (nearest-index first on distance ties). Edges are
/// numbered in lexicographic order of their `(min, max)` endpoints.
pub fn knn_mst_graph(pts: &PointSet, k: usize) -> Result<(EdgeWeightedGraph, EdgeWeightVector)> {
    let n = pts.len();
    if n < 2 {
        return Err(Error::InvalidConfig("need at least two points"));
    }
    if n > MAX_POINTS {
        return Err(Error::TooLarge { size: n, limit: MAX_POINTS });
    }
    if k == 0 || k >= n {
        return Err(Error::KOutOfRange { k, min: 1, max: n - 1 });
    }
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = pts.distance(i, j);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }

    let mut pairs = BTreeSet::new();
    let mut others: Vec<usize> = Vec::with_capacity(n - 1);
    for i in 0..n {
        others.clear();
        others.extend((0..n).filter(|&j| j != i));
        let row = &dist[i * n..(i + 1) * n];
        let by_distance = |a: &usize, b: &usize| row[*a].total_cmp(&row[*b]).then(a.cmp(b));
        if k < others.len() {
            others.select_nth_unstable_by(k - 1, by_distance);
        }
        for &j in &others[..k] {
            pairs.insert((i.min(j), i.max(j)));
        }
    }

    // Prim on the complete graph
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut best_from = vec![0usize; n];
    best[0] = 0.0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]).then(a.cmp(&b)))
            .expect("a vertex remains");
        in_tree[v] = true;
        if v != 0 {
            let u = best_from[v];
            pairs.insert((u.min(v), u.max(v)));
        }
        for j in 0..n {
            if !in_tree[j] && dist[v * n + j] < best[j] {
                best[j] = dist[v * n + j];
                best_from[j] = v;
            }
        }
    }

    let edges: Vec<(usize, usize)> = pairs.into_iter().collect();
    let weights = edges.iter().map(|&(x, y)| dist[x * n + y]).collect();
    let g = build_graph(n, &edges)?;
    Ok((g, EdgeWeightVector::new(weights)?))
}

/// Samples `count` triplets uniformly, with replacement, from all
/// `(ref, pos, neg)` with `ref != pos`, `class(ref) == class(pos)` and
/// `class(neg) != class(ref)`. Unlabeled points are ignored.
pub fn sample_triplets(labels: &[Option<u32>], count: usize, seed: u64) -> Result<TripletSet> {
    if count == 0 {
        return Ok(TripletSet::default());
    }
    let mut classes: Vec<(u32, Vec<usize>)> = Vec::new();
    for (v, label) in labels.iter().enumerate() {
        let Some(c) = *label else { continue };
        match classes.binary_search_by_key(&c, |(k, _)| *k) {
            Ok(i) => classes[i].1.push(v),
            Err(i) => classes.insert(i, (c, vec![v])),
        }
    }
    let labeled: u64 = classes.iter().map(|(_, m)| m.len() as u64).sum();
    // number of valid triples rooted in each class
    let weights: Vec<u64> = classes
        .iter()
        .map(|(_, m)| {
            let s = m.len() as u64;
            s * s.saturating_sub(1) * (labeled - s)
        })
        .collect();
    let total: u64 = weights.iter().sum();
    if classes.len() < 2 || total == 0 {
        return Err(Error::InsufficientClasses);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut pick = rng.gen_range(0..total);
        let ci = weights
            .iter()
            .position(|&w| {
                if pick < w {
                    true
                } else {
                    pick -= w;
                    false
                }
            })
            .expect("pick < total");
        let members = &classes[ci].1;
        let r = rng.gen_range(0..members.len());
        let mut p = rng.gen_range(0..members.len() - 1);
        if p >= r {
            p += 1;
        }
        let mut neg_index = rng.gen_range(0..labeled - members.len() as u64) as usize;
        let negative = classes
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != ci)
            .find_map(|(_, (_, m))| {
                if neg_index < m.len() {
                    Some(m[neg_index])
                } else {
                    neg_index -= m.len();
                    None
                }
            })
            .expect("index within the other classes");
        out.push(Triplet { reference: members[r], positive: members[p], negative });
    }
    TripletSet::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_points() {
        let pts = PointSet::new(1, vec![0.0, 1.0, 3.0]).unwrap();
        let (g, w) = knn_mst_graph(&pts, 1).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(w.as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn mst_bridges_clusters() {
        let pts = PointSet::new(2, vec![0.0, 0.0, 0.1, 0.0, 10.0, 0.0, 10.1, 0.0]).unwrap();
        let (g, w) = knn_mst_graph(&pts, 1).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2), (2, 3)]);
        assert!((w[1] - 9.9).abs() < 1e-12);
    }

    #[test]
    fn full_k_gives_complete_graph() {
        let pts = PointSet::new(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 2.0, 3.0, 3.0, -1.0, 0.5]).unwrap();
        let (g, _) = knn_mst_graph(&pts, 4).unwrap();
        assert_eq!(g.edge_count(), 10);
    }

    #[test]
    fn duplicate_points_give_zero_edges() {
        let pts = PointSet::new(1, vec![2.0, 2.0, 5.0]).unwrap();
        let (g, w) = knn_mst_graph(&pts, 1).unwrap();
        // point 2 is equidistant from 0 and 1; the lower index wins
        assert_eq!(g.edges(), &[(0, 1), (0, 2)]);
        assert_eq!(w.as_slice(), &[0.0, 3.0]);
    }

    #[test]
    fn knn_errors() {
        let pts = PointSet::new(1, vec![0.0, 1.0, 3.0]).unwrap();
        assert!(matches!(knn_mst_graph(&pts, 0), Err(Error::KOutOfRange { .. })));
        assert!(matches!(knn_mst_graph(&pts, 3), Err(Error::KOutOfRange { .. })));
        let one = PointSet::new(2, vec![0.0, 1.0]).unwrap();
        assert!(knn_mst_graph(&one, 1).is_err());
        assert!(PointSet::new(2, vec![0.0, 1.0, 2.0]).is_err());
        assert!(PointSet::new(1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn triplet_sampling() {
        let labels = [Some(0), Some(0), Some(1)];
        let ts = sample_triplets(&labels, 2, 7).unwrap();
        assert_eq!(ts.len(), 2);
        for t in ts.as_slice() {
            let tuple = (t.reference, t.positive, t.negative);
            assert!(tuple == (0, 1, 2) || tuple == (1, 0, 2), "{tuple:?}");
        }
        assert_eq!(
            sample_triplets(&[Some(3), Some(3), None], 4, 0),
            Err(Error::InsufficientClasses)
        );
        assert_eq!(
            sample_triplets(&[Some(0), Some(1), Some(2)], 4, 0),
            Err(Error::InsufficientClasses)
        );
        assert!(sample_triplets(&labels, 0, 0).unwrap().is_empty());
        assert_eq!(sample_triplets(&labels, 50, 3), sample_triplets(&labels, 50, 3));
    }
}
