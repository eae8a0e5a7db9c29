mod common;

use common::*;
use dbm_core::graph::{generate_dbm, load_graph, save_graph, GraphFormat};
use dbm_core::meanfield::{meanfield_tv, q_matrix, q_power_closed};
use dbm_core::walk::{evolve, stationary, tv_distance, Domain};
use dbm_core::{DbmParams, DegreeTable, ProbVector, SeedTree};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn random_measure(weights: &[f64]) -> ProbVector {
    let total: f64 = weights.iter().sum();
    ProbVector::new(weights.iter().map(|w| w / total).collect(), Domain::Global).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evolution_conserves_mass(seed in any::<u64>(), k in 3usize..40, t in 0usize..30, w in prop::collection::vec(0.01f64..1.0, 40)) {
        let g = random_strongly_connected(k, 0.2, &mut SeedTree::new(seed).rng());
        let mu = random_measure(&w[..k]);
        let out = evolve(&g, &mu, t).unwrap();
        prop_assert!((out.mass() - 1.0).abs() < 1e-12);
        prop_assert!(out.values().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn distance_to_stationarity_never_grows(seed in any::<u64>(), k in 3usize..30, w in prop::collection::vec(0.01f64..1.0, 30)) {
        let g = random_strongly_connected(k, 0.25, &mut SeedTree::new(seed).rng());
        let pi = stationary(&g).unwrap().pi;
        let mut mu = random_measure(&w[..k]);
        let mut last = tv_distance(&mu, &pi).unwrap();
        for _ in 0..25 {
            mu = evolve(&g, &mu, 1).unwrap();
            let d = tv_distance(&mu, &pi).unwrap();
            prop_assert!(d <= last + 1e-12);
            last = d;
        }
    }

    #[test]
    fn chapman_kolmogorov(seed in any::<u64>(), k in 3usize..25, s in 0usize..12, t in 0usize..12) {
        let g = random_strongly_connected(k, 0.3, &mut SeedTree::new(seed).rng());
        let x = (seed % k as u64) as usize;
        let start = ProbVector::point(k, x, Domain::Global);
        let split = evolve(&g, &evolve(&g, &start, s).unwrap(), t).unwrap();
        let whole = evolve(&g, &start, s + t).unwrap();
        prop_assert!(l1(split.values(), whole.values()) < 1e-13);
        let dense = mat_pow(&dense_kernel(&g), s + t);
        let row: Vec<f64> = dense.row(x).iter().copied().collect();
        prop_assert!(l1(whole.values(), &row) < 1e-12);
    }

    #[test]
    fn tv_is_a_metric(a in prop::collection::vec(0.01f64..1.0, 8), b in prop::collection::vec(0.01f64..1.0, 8), c in prop::collection::vec(0.01f64..1.0, 8)) {
        let (a, b, c) = (random_measure(&a), random_measure(&b), random_measure(&c));
        let ab = tv_distance(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((ab - tv_distance(&b, &a).unwrap()).abs() < 1e-15);
        prop_assert!(ab <= tv_distance(&a, &c).unwrap() + tv_distance(&c, &b).unwrap() + 1e-15);
    }

    #[test]
    fn closed_form_matches_matrix_power(m in 2usize..7, alpha in 0.0f64..=1.0, t in 0u64..80) {
        let q = q_matrix(m, alpha).unwrap();
        let dense = DMatrix::from_fn(m, m, |i, j| q[i][j]);
        let pw = mat_pow(&dense, t as usize);
        for i in 0..m {
            for j in 0..m {
                prop_assert!((q_power_closed(m, alpha, t, i, j).unwrap() - pw[(i, j)]).abs() < 1e-12);
            }
        }
        let row: Vec<f64> = pw.row(0).iter().copied().collect();
        let want = 0.5 * row.iter().map(|x| (x - 1.0 / m as f64).abs()).sum::<f64>();
        prop_assert!((meanfield_tv(m, alpha, t).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn generated_graph_invariants(seed in any::<u64>(), n in 5usize..60, m in 2usize..5, alpha in 0.0f64..=1.0) {
        let params = DbmParams::new(n, m, 2.5, alpha, seed).unwrap();
        let (g, table) = generate_dbm(&params).unwrap();
        prop_assert_eq!(&table, &DegreeTable::from_graph(&g));
        for (s, t, rewired) in g.edges() {
            prop_assert!(s != t);
            prop_assert_eq!(rewired, g.community(s) != g.community(t));
        }
        for i in 0..m {
            let sub = g.pre_rewiring_subgraph(i).unwrap();
            let mut in_sum = 0usize;
            for (x, v) in g.community_range(i).enumerate() {
                // undoing the rewiring keeps every out-degree
                prop_assert_eq!(sub.out_degree(x), table.out_total[v] as usize);
                prop_assert_eq!(table.out_total[v], table.out_intra[v] + table.out_rewired[v]);
                in_sum += table.in_intra_pre[v] as usize;
                // rewired edges keep the target label
                for (y, r) in g.out_edges(v) {
                    if r {
                        prop_assert!(sub.out_neighbors(x).contains(&(g.label(y) as u32)));
                    }
                }
            }
            prop_assert_eq!(in_sum, sub.edge_count());
        }
        // same seed, same graph
        prop_assert_eq!(generate_dbm(&params).unwrap().0, g);
    }

    #[test]
    fn graph_files_round_trip(seed in any::<u64>(), n in 2usize..40, alpha in 0.0f64..=1.0, binary in any::<bool>()) {
        let params = DbmParams::new(n, 3, 1.5, alpha, seed).unwrap();
        let (g, _) = generate_dbm(&params).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.dbm");
        let format = if binary { GraphFormat::Binary } else { GraphFormat::Text };
        save_graph(&g, &params, &path, format).unwrap();
        let (p2, g2) = load_graph(&path).unwrap();
        prop_assert_eq!(p2, params);
        prop_assert_eq!(g2, g);
    }
}
