//! Constant-time lowest common ancestor queries on a dendrogram.
//!
//! The tree is flattened into an Euler tour and a sparse table answers range
//! queries over it. A dendrogram parent always has a larger index than its
//! children, so the shallowest node of a tour range is the one with the
//! largest index and the table can store node ids directly, with no depth
//! array.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hierarchy::Dendrogram;

#[derive(Debug, Clone)]
pub struct LcaIndex {
    node_count: usize,
    tour_len: usize,
    first: Vec<u32>,
    // level j holds the max node id over tour[i..i + 2^j]; level 0 is the tour
    table: Vec<u32>,
}

pub fn build_lca(t: &Dendrogram) -> LcaIndex {
    let node_count = t.node_count();
    assert!(node_count <= u32::MAX as usize, "dendrogram too large for 32-bit node ids");
    let tour_len = 2 * node_count - 1;
    let mut tour: Vec<u32> = Vec::with_capacity(tour_len);
    let mut first = vec![0u32; node_count];

    let mut stack: Vec<(usize, u8)> = vec![(t.root(), 0)];
    first[t.root()] = 0;
    tour.push(t.root() as u32);
    while let Some(top) = stack.last_mut() {
        let (node, next) = *top;
        match t.children(node) {
            Some(ch) if (next as usize) < 2 => {
                top.1 += 1;
                let child = ch[next as usize];
                first[child] = tour.len() as u32;
                tour.push(child as u32);
                stack.push((child, 0));
            }
            _ => {
                stack.pop();
                if let Some(&(parent, _)) = stack.last() {
                    tour.push(parent as u32);
                }
            }
        }
    }
    debug_assert_eq!(tour.len(), tour_len);

    let levels = (usize::BITS - tour_len.leading_zeros()) as usize;
    let mut table = tour;
    table.reserve(tour_len * (levels - 1));
    for j in 1..levels {
        let half = 1usize << (j - 1);
        let prev = (j - 1) * tour_len;
        for i in 0..tour_len {
            let v = if i + half < tour_len {
                table[prev + i].max(table[prev + i + half])
            } else {
                table[prev + i]
            };
            table.push(v);
        }
    }
    LcaIndex { node_count, tour_len, first, table }
}

impl LcaIndex {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Deepest node whose subtree contains both `a` and `b`.
    pub fn lca(&self, a: usize, b: usize) -> Result<usize> {
        for v in [a, b] {
            if v >= self.node_count {
                return Err(Error::NodeOutOfRange { node: v, node_count: self.node_count });
            }
        }
        Ok(self.lca_unchecked(a, b))
    }

    /// [`LcaIndex::lca`] without the range check; panics on invalid nodes.
    #[inline]
    pub fn lca_unchecked(&self, a: usize, b: usize) -> usize {
        let (mut l, mut r) = (self.first[a] as usize, self.first[b] as usize);
        if l > r {
            core::mem::swap(&mut l, &mut r);
        }
        let j = (usize::BITS - 1 - (r - l + 1).leading_zeros()) as usize;
        let base = j * self.tour_len;
        self.table[base + l].max(self.table[base + r + 1 - (1 << j)]) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, EdgeWeightVector};
    use crate::hierarchy::single_linkage;

    fn walk_lca(t: &Dendrogram, a: usize, b: usize) -> usize {
        let mut path_a = vec![a];
        path_a.extend(t.ancestors(a));
        let mut x = b;
        loop {
            if path_a.contains(&x) {
                return x;
            }
            x = t.parent(x).unwrap();
        }
    }

    #[test]
    fn two_pairs_queries() {
        let g = build_graph(4, &[(0, 1), (1, 2), (2, 3), (1, 3)]).unwrap();
        let w = EdgeWeightVector::new(vec![1.0, 3.0, 2.0, 3.0]).unwrap();
        let t = single_linkage(&g, &w).unwrap();
        let idx = build_lca(&t);
        assert_eq!(idx.lca(0, 1).unwrap(), 4);
        assert_eq!(idx.lca(0, 2).unwrap(), 6);
        assert_eq!(idx.lca(2, 3).unwrap(), 5);
        for x in 0..7 {
            assert_eq!(idx.lca(x, x).unwrap(), x);
        }
        assert_eq!(idx.lca(0, 7), Err(Error::NodeOutOfRange { node: 7, node_count: 7 }));
    }

    #[test]
    fn tiny_trees() {
        let single = Dendrogram::from_merges(1, &[], None).unwrap();
        assert_eq!(build_lca(&single).lca(0, 0).unwrap(), 0);
        let pair = Dendrogram::from_merges(2, &[(0, 1, 1.0)], None).unwrap();
        let idx = build_lca(&pair);
        assert_eq!(idx.lca(0, 1).unwrap(), 2);
        assert_eq!(idx.lca(1, 2).unwrap(), 2);
        assert_eq!(idx.lca(1, 1).unwrap(), 1);
    }

    #[test]
    fn caterpillar_and_balanced_match_walk() {
        let n = 40;
        let cat: Vec<_> = (0..n - 1)
            .map(|k| if k == 0 { (0, 1, 0.0) } else { (n + k - 1, k + 1, k as f64) })
            .collect();
        let mut bal = Vec::new();
        let mut frontier: Vec<usize> = (0..32).collect();
        let mut next = 32;
        while frontier.len() > 1 {
            let mut up = Vec::new();
            for pair in frontier.chunks(2) {
                bal.push((pair[0], pair[1], next as f64));
                up.push(next);
                next += 1;
            }
            frontier = up;
        }
        for (leaves, merges) in [(n, cat), (32, bal)] {
            let t = Dendrogram::from_merges(leaves, &merges, None).unwrap();
            let idx = build_lca(&t);
            for a in 0..t.node_count() {
                for b in 0..t.node_count() {
                    assert_eq!(idx.lca(a, b).unwrap(), walk_lca(&t, a, b));
                }
            }
        }
    }
}
