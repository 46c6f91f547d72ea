mod common;

use common::{random_graph, tie_heavy_weights, uniform_weights};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ultrafit_core::oracle::{minmax_bruteforce, ultrametric_cycle_check};
use ultrafit_core::{build_graph, build_lca, is_ultrametric, single_linkage, subdominant, EdgeWeightVector};

fn instance(seed: u64, n: usize, ties: bool) -> (ultrafit_core::EdgeWeightedGraph, EdgeWeightVector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let density = rng.gen_range(0.0..0.8);
    let g = random_graph(&mut rng, n, density);
    let w = if ties {
        tie_heavy_weights(&mut rng, g.edge_count(), 4)
    } else {
        uniform_weights(&mut rng, g.edge_count(), 0.0, 10.0)
    };
    (g, w)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_bruteforce_minmax(seed in any::<u64>(), n in 1usize..=8, ties in any::<bool>()) {
        let (g, w) = instance(seed, n, ties);
        let res = subdominant(&g, &w).unwrap();
        let d = minmax_bruteforce(&g, &w).unwrap();
        for (e, &(x, y)) in g.edges().iter().enumerate() {
            prop_assert_eq!(res.u[e], d[x][y]);
            prop_assert_eq!(res.u[e], w[res.pass_edge[e]]);
            let p = res.pass_edge[e];
            prop_assert_eq!(res.pass_edge[p], p);
        }
    }

    #[test]
    fn idempotent_dominated_ultrametric(seed in any::<u64>(), n in 1usize..=12, ties in any::<bool>()) {
        let (g, w) = instance(seed, n, ties);
        let res = subdominant(&g, &w).unwrap();
        prop_assert!(res.u.iter().zip(w.iter()).all(|(u, w)| u <= w));
        let again = subdominant(&g, &res.u).unwrap();
        prop_assert_eq!(&again.u, &res.u);
        prop_assert!(is_ultrametric(&g, &res.u, 1e-9).unwrap());
        // MST edges keep their weight
        for &e in res.dendrogram.canonical_edges().unwrap() {
            prop_assert_eq!(res.u[e], w[e]);
        }
    }

    #[test]
    fn largest_ultrametric_below(seed in any::<u64>(), n in 2usize..=6) {
        let (g, w) = instance(seed, n, false);
        let res = subdominant(&g, &w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for i in 0..g.edge_count() {
            let slack = w[i] - res.u[i];
            if slack <= 0.0 {
                continue;
            }
            let eps = rng.gen_range(0.0..1.0) * slack;
            if eps <= 0.0 {
                continue;
            }
            let mut raised = res.u.clone().into_vec();
            raised[i] += eps;
            let raised = EdgeWeightVector::new(raised).unwrap();
            prop_assert!(!is_ultrametric(&g, &raised, 0.0).unwrap());
            prop_assert!(!ultrametric_cycle_check(&g, &raised).unwrap());
        }
    }

    #[test]
    fn fixed_point_test_matches_cycle_check(seed in any::<u64>(), n in 1usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let density = rng.gen_range(0.0..0.9);
        let g = random_graph(&mut rng, n, density);
        // mix of ultrametric and non-ultrametric candidates
        let w = tie_heavy_weights(&mut rng, g.edge_count(), 3);
        let candidate = if rng.gen_bool(0.5) { subdominant(&g, &w).unwrap().u } else { w };
        prop_assert_eq!(
            is_ultrametric(&g, &candidate, 0.0).unwrap(),
            ultrametric_cycle_check(&g, &candidate).unwrap()
        );
    }

    #[test]
    fn lca_altitude_is_minmax_distance(seed in any::<u64>(), n in 1usize..=7, ties in any::<bool>()) {
        let (g, w) = instance(seed, n, ties);
        let u = subdominant(&g, &w).unwrap().u;
        let t = single_linkage(&g, &u).unwrap();
        let idx = build_lca(&t);
        let d = minmax_bruteforce(&g, &u).unwrap();
        for x in 0..n {
            for y in 0..n {
                prop_assert_eq!(t.altitude(idx.lca(x, y).unwrap()), d[x][y]);
            }
        }
    }

    #[test]
    fn tie_order_only_moves_canonical_edges(seed in any::<u64>(), n in 2usize..=12) {
        let (g, w) = instance(seed, n, true);
        let mut order: Vec<usize> = (0..g.edge_count()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(!seed);
        rand::seq::SliceRandom::shuffle(&mut order[..], &mut rng);
        let edges: Vec<_> = order.iter().map(|&e| g.edge(e)).collect();
        let weights: Vec<f64> = order.iter().map(|&e| w[e]).collect();
        let g2 = build_graph(n, &edges).unwrap();
        let w2 = EdgeWeightVector::new(weights).unwrap();
        let a = single_linkage(&g, &w).unwrap();
        let b = single_linkage(&g2, &w2).unwrap();
        let mut alt_a = a.altitudes().to_vec();
        let mut alt_b = b.altitudes().to_vec();
        alt_a.sort_by(f64::total_cmp);
        alt_b.sort_by(f64::total_cmp);
        prop_assert_eq!(alt_a, alt_b);
        for alt in a.altitudes() {
            prop_assert!(w.contains(alt));
        }
    }

    #[test]
    fn dendrogram_invariants(seed in any::<u64>(), n in 1usize..=40, ties in any::<bool>()) {
        let (g, w) = instance(seed, n, ties);
        let t = single_linkage(&g, &w).unwrap();
        prop_assert!(t.altitudes().windows(2).all(|p| p[0] <= p[1]));
        prop_assert_eq!(t.size(t.root()), n);
        let mut ranks: Vec<usize> = (n..t.node_count()).map(|v| t.rank(v).unwrap()).collect();
        for v in n..t.node_count() {
            let [a, b] = t.children(v).unwrap();
            prop_assert_eq!(t.size(v), t.size(a) + t.size(b));
        }
        ranks.sort();
        prop_assert_eq!(ranks, (1..n).collect::<Vec<_>>());
        // canonical edges form a spanning tree: n - 1 distinct edges
        let mut canon = t.canonical_edges().unwrap().to_vec();
        canon.sort();
        canon.dedup();
        prop_assert_eq!(canon.len(), n - 1);
    }
}
