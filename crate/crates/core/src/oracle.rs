//! Slow, direct reference implementations for tests and acceptance runs.
//!
//! Nothing here shares code paths with the fast algorithms it is used to
//! check: min-max distances come from a Floyd-Warshall style closure,
//! ultrametricity from explicit cycle enumeration, and the closest
//! ultrametric from enumerating every binary hierarchy.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{EdgeWeightVector, EdgeWeightedGraph};
use crate::hierarchy::Dendrogram;
use crate::subdominant::SubdominantResult;

pub const MINMAX_LIMIT: usize = 512;
pub const CYCLE_LIMIT: usize = 8;
pub const EXHAUSTIVE_LIMIT: usize = 6;

fn check_size(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::TooLarge { size: n, limit });
    }
    Ok(())
}

/// All-pairs min-max path distance, `d[x][y] = min over paths of the
/// heaviest edge`, with `d[x][x] = 0`.
pub fn minmax_bruteforce(g: &EdgeWeightedGraph, w: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = g.vertex_count();
    check_size(n, MINMAX_LIMIT)?;
    g.check_len(w.len())?;
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for (e, &(x, y)) in g.edges().iter().enumerate() {
        d[x][y] = w[e];
        d[y][x] = w[e];
    }
    for k in 0..n {
        for i in 0..n {
            if i == k {
                continue;
            }
            let dik = d[i][k];
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let through = dik.max(d[k][j]);
                if through < d[i][j] {
                    d[i][j] = through;
                }
            }
        }
    }
    Ok(d)
}

/// Checks every simple cycle `C` and every `e ∈ C` for
/// `u(e) <= max over C \ {e}`.
pub fn ultrametric_cycle_check(g: &EdgeWeightedGraph, u: &[f64]) -> Result<bool> {
    let n = g.vertex_count();
    check_size(n, CYCLE_LIMIT)?;
    g.check_len(u.len())?;

    fn holds(u: &[f64], cycle: &[usize]) -> bool {
        cycle.iter().enumerate().all(|(i, &e)| {
            let others = cycle
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &f)| u[f])
                .fold(f64::NEG_INFINITY, f64::max);
            u[e] <= others
        })
    }

    fn extend(
        g: &EdgeWeightedGraph,
        u: &[f64],
        start: usize,
        v: usize,
        on_path: &mut [bool],
        edges: &mut Vec<usize>,
    ) -> bool {
        for &(nb, e) in g.neighbors(v) {
            if nb == start && edges.len() >= 2 {
                edges.push(e);
                let ok = holds(u, edges);
                edges.pop();
                if !ok {
                    return false;
                }
            } else if nb > start && !on_path[nb] {
                on_path[nb] = true;
                edges.push(e);
                let ok = extend(g, u, start, nb, on_path, edges);
                edges.pop();
                on_path[nb] = false;
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    let mut on_path = vec![false; n];
    let mut edges = Vec::new();
    for start in 0..n {
        on_path[start] = true;
        if !extend(g, u, start, start, &mut on_path, &mut edges) {
            return Ok(false);
        }
        on_path[start] = false;
    }
    Ok(true)
}

enum Shape {
    Leaf(usize),
    Node(Box<Shape>, Box<Shape>),
}

fn clone_shape(s: &Shape) -> Shape {
    match s {
        Shape::Leaf(v) => Shape::Leaf(*v),
        Shape::Node(a, b) => Shape::Node(Box::new(clone_shape(a)), Box::new(clone_shape(b))),
    }
}

// every rooted binary tree with leaf set `members`
fn shapes(members: &[usize]) -> Vec<Shape> {
    if members.len() == 1 {
        return vec![Shape::Leaf(members[0])];
    }
    let rest = &members[1..];
    let mut out = Vec::new();
    // the first member always goes left, so each unordered split appears once
    for mask in 0..(1u32 << rest.len()) - 1 {
        let mut left = vec![members[0]];
        let mut right = Vec::new();
        for (i, &v) in rest.iter().enumerate() {
            if mask & (1 << i) != 0 {
                left.push(v);
            } else {
                right.push(v);
            }
        }
        let ls = shapes(&left);
        let rs = shapes(&right);
        for l in &ls {
            for r in &rs {
                out.push(Shape::Node(Box::new(clone_shape(l)), Box::new(clone_shape(r))));
            }
        }
    }
    out
}

// internal nodes as (leaf mask, parent index)
fn flatten(s: &Shape, parent: Option<usize>, nodes: &mut Vec<(u32, Option<usize>)>) -> u32 {
    match s {
        Shape::Leaf(v) => 1 << v,
        Shape::Node(a, b) => {
            let me = nodes.len();
            nodes.push((0, parent));
            let mask = flatten(a, Some(me), nodes) | flatten(b, Some(me), nodes);
            nodes[me].0 = mask;
            mask
        }
    }
}

/// Optimal monotone altitudes for one hierarchy: minimizes
/// `Σ_n count_n (r_n - mean_n)²` subject to `r_child <= r_parent`.
///
/// Nodes without edges are dropped and their constraints bridged. Every
/// subset of constraints is then tried as the set of tight ones, pooling the
/// connected blocks at their weighted mean; the cheapest feasible candidate
/// is optimal because the optimum has exactly this form.
fn isotonic_altitudes(sum: &[f64], count: &[usize], parent: &[Option<usize>]) -> Vec<f64> {
    let k = sum.len();
    let weighted = |i: usize| count[i] > 0;
    let mut constraints = Vec::new();
    for i in (0..k).filter(|&i| weighted(i)) {
        let mut p = parent[i];
        while let Some(q) = p {
            if weighted(q) {
                constraints.push((i, q));
                break;
            }
            p = parent[q];
        }
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for pooled in 0..(1u32 << constraints.len()) {
        let mut block: Vec<usize> = (0..k).collect();
        fn root(block: &[usize], mut i: usize) -> usize {
            while block[i] != i {
                i = block[i];
            }
            i
        }
        for (c, &(a, b)) in constraints.iter().enumerate() {
            if pooled & (1 << c) != 0 {
                let (ra, rb) = (root(&block, a), root(&block, b));
                block[ra] = rb;
            }
        }
        let mut bsum = vec![0.0; k];
        let mut bcount = vec![0usize; k];
        for i in 0..k {
            let r = root(&block, i);
            bsum[r] += sum[i];
            bcount[r] += count[i];
        }
        let alt: Vec<f64> = (0..k)
            .map(|i| {
                let r = root(&block, i);
                if bcount[r] > 0 { bsum[r] / bcount[r] as f64 } else { 0.0 }
            })
            .collect();
        if constraints.iter().any(|&(a, b)| alt[a] > alt[b] + 1e-12) {
            continue;
        }
        // Σ count (r - mean)² up to a constant independent of r
        let cost: f64 = (0..k)
            .filter(|&i| weighted(i))
            .map(|i| count[i] as f64 * alt[i] * alt[i] - 2.0 * alt[i] * sum[i])
            .sum();
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, alt));
        }
    }
    // nodes without edges keep a placeholder; no edge reads them
    best.expect("pooling every constraint is feasible").1
}

/// Exact minimizer of `Σ_e (u(e) - w(e))²` over ultrametrics on `g`, by
/// enumerating every binary hierarchy over the vertices (945 at `N = 6`)
/// and solving for its optimal monotone altitudes.
pub fn closest_ultrametric_exhaustive(g: &EdgeWeightedGraph, w: &[f64]) -> Result<(EdgeWeightVector, f64)> {
    let n = g.vertex_count();
    check_size(n, EXHAUSTIVE_LIMIT)?;
    g.check_len(w.len())?;
    if n == 1 {
        return Ok((EdgeWeightVector::default(), 0.0));
    }
    let members: Vec<usize> = (0..n).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for shape in shapes(&members) {
        let mut nodes = Vec::new();
        flatten(&shape, None, &mut nodes);
        let lca: Vec<usize> = g
            .edges()
            .iter()
            .map(|&(x, y)| {
                let pair = (1u32 << x) | (1 << y);
                (0..nodes.len())
                    .filter(|&i| nodes[i].0 & pair == pair)
                    .min_by_key(|&i| nodes[i].0.count_ones())
                    .expect("root contains every pair")
            })
            .collect();
        let mut sum = vec![0.0; nodes.len()];
        let mut count = vec![0usize; nodes.len()];
        for (e, &node) in lca.iter().enumerate() {
            sum[node] += w[e];
            count[node] += 1;
        }
        let parent: Vec<Option<usize>> = nodes.iter().map(|&(_, p)| p).collect();
        let alt = isotonic_altitudes(&sum, &count, &parent);
        let u: Vec<f64> = lca.iter().map(|&node| alt[node]).collect();
        let cost: f64 = u.iter().zip(w).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, u));
        }
    }
    let (cost, u) = best.expect("at least one hierarchy");
    Ok((EdgeWeightVector::new(u)?, cost))
}

/// Average-linkage agglomeration restricted to graph edges: the linkage
/// between two clusters is the mean weight of the edges joining them, and
/// only clusters joined by at least one edge may merge. Ties merge the pair
/// with the smallest node ids.
pub fn average_linkage(g: &EdgeWeightedGraph, w: &[f64]) -> Result<Dendrogram> {
    g.check_len(w.len())?;
    let n = g.vertex_count();
    let mut cluster_of: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for step in 0..n.saturating_sub(1) {
        let node_count = n + step;
        let mut sum = vec![vec![0.0; node_count]; node_count];
        let mut count = vec![vec![0usize; node_count]; node_count];
        for (e, &(x, y)) in g.edges().iter().enumerate() {
            let (a, b) = (cluster_of[x], cluster_of[y]);
            if a != b {
                let (a, b) = (a.min(b), a.max(b));
                sum[a][b] += w[e];
                count[a][b] += 1;
            }
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..node_count {
            for b in a + 1..node_count {
                if count[a][b] == 0 {
                    continue;
                }
                let avg = sum[a][b] / count[a][b] as f64;
                if best.is_none_or(|(v, _, _)| avg < v) {
                    best = Some((avg, a, b));
                }
            }
        }
        let (avg, a, b) = best.expect("graph is connected");
        for c in cluster_of.iter_mut() {
            if *c == a || *c == b {
                *c = node_count;
            }
        }
        merges.push((a, b, avg));
    }
    Dendrogram::from_merges(n, &merges, None)
}

/// Central differences `(f(x + h eᵢ) - f(x - h eᵢ)) / 2h`.
pub fn finite_difference_grad(mut f: impl FnMut(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let plus = f(&probe);
            probe[i] = x[i] - h;
            let minus = f(&probe);
            probe[i] = x[i];
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

/// Soft cardinal from its definition: for each endpoint `x` of the canonical
/// edge of `n`, sum `ℓ(alt n - d(x, y))` over every vertex `y`, then average
/// the two endpoints. Distances come from [`minmax_bruteforce`].
pub fn soft_cardinal_direct(g: &EdgeWeightedGraph, res: &SubdominantResult, temperature: f64) -> Result<Vec<f64>> {
    let d = minmax_bruteforce(g, &res.u)?;
    let t = &res.dendrogram;
    let sigmoid = |v: f64| 1.0 / (1.0 + libm::exp(-v / temperature));
    Ok((t.leaf_count()..t.node_count())
        .map(|node| {
            let alt = t.altitude(node);
            let (a, b) = g.edge(t.canonical_edge(node).expect("single-linkage tree"));
            let total: f64 = [a, b]
                .iter()
                .map(|&x| d[x].iter().map(|&dxy| sigmoid(alt - dxy)).sum::<f64>())
                .sum();
            0.5 * total
        })
        .collect())
}

/// Dasgupta's cost with hard node sizes, `Σ_e |lca(e)| / w(e)`.
pub fn dasgupta_hard(res: &SubdominantResult, w: &[f64]) -> f64 {
    res.pass_node
        .iter()
        .zip(w)
        .map(|(&node, &we)| res.dendrogram.size(node) as f64 / we)
        .sum()
}

/// Lowest common ancestor by walking parent pointers.
pub fn lca_by_parent_walk(t: &Dendrogram, a: usize, b: usize) -> usize {
    let mut on_path = vec![false; t.node_count()];
    on_path[a] = true;
    for p in t.ancestors(a) {
        on_path[p] = true;
    }
    let mut x = b;
    while !on_path[x] {
        x = t.parent(x).expect("root is on every path");
    }
    x
}
