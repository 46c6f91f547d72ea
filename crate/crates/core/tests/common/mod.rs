#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use ultrafit_core::{build_graph, EdgeWeightVector, EdgeWeightedGraph};

/// Random connected graph on `n` vertices: a random spanning tree plus each
/// remaining pair with probability `extra`, in shuffled edge order.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, extra: f64) -> EdgeWeightedGraph {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut present = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (a, b) = (perm[i], perm[j]);
        present[a][b] = true;
        present[b][a] = true;
        edges.push((a, b));
    }
    for a in 0..n {
        for b in a + 1..n {
            if !present[a][b] && rng.gen_bool(extra) {
                edges.push((a, b));
            }
        }
    }
    edges.shuffle(rng);
    build_graph(n, &edges).unwrap()
}

pub fn uniform_weights(rng: &mut ChaCha8Rng, m: usize, lo: f64, hi: f64) -> EdgeWeightVector {
    EdgeWeightVector::new((0..m).map(|_| rng.gen_range(lo..hi)).collect()).unwrap()
}

/// Small integer weights, so that ties are frequent.
pub fn tie_heavy_weights(rng: &mut ChaCha8Rng, m: usize, levels: u32) -> EdgeWeightVector {
    EdgeWeightVector::new((0..m).map(|_| rng.gen_range(0..levels) as f64).collect()).unwrap()
}

/// True when every pair of values is at least `gap` apart.
pub fn well_separated(values: &[f64], gap: f64) -> bool {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.windows(2).all(|p| p[1] - p[0] >= gap)
}
