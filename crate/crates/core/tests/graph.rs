mod support;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use rand::Rng as _;
use vbm_core::digraph::{laplacian_quadform, q, WeightedDigraph};
use vbm_core::graph::{
    balanced_vertex_expansion_bruteforce, vertex_boundary, vertex_expansion, DEFAULT_BRUTE_FORCE_CAP,
};
use vbm_core::spectral::{spectral_gap, stationary_distribution};
use vbm_core::Graph;

fn two_triangles() -> Graph {
    Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
}

#[test]
fn boundaries() {
    assert_eq!(vertex_boundary(&Graph::complete(4), &[0, 1]).unwrap(), vec![2, 3]);
    assert_eq!(vertex_boundary(&Graph::path(4), &[0, 1]).unwrap(), vec![2]);
    assert!(vertex_boundary(&Graph::empty(5), &[0]).unwrap().is_empty());
}

#[test]
fn expansion_values() {
    assert_eq!(vertex_expansion(&Graph::complete(4), &[0, 1]).unwrap().phi, Ratio::from_integer(4));
    assert_eq!(vertex_expansion(&Graph::path(4), &[0, 1]).unwrap().phi, Ratio::from_integer(2));
    assert_eq!(vertex_expansion(&two_triangles(), &[0, 1, 2]).unwrap().phi, Ratio::from_integer(0));
}

#[test]
fn balanced_minimum_on_small_graphs() {
    assert_eq!(balanced_vertex_expansion_bruteforce(&Graph::complete(4), 16).unwrap().phi, Ratio::from_integer(4));
    let tri = balanced_vertex_expansion_bruteforce(&two_triangles(), 16).unwrap();
    assert_eq!(tri.phi, Ratio::from_integer(0));
    assert_eq!(tri.set, vec![0, 1, 2]);
}

#[test]
fn cycle_six_matches_oracle() {
    let g = Graph::cycle(6);
    let (phi, set) = support::oracle_balanced(&g);
    let got = balanced_vertex_expansion_bruteforce(&g, DEFAULT_BRUTE_FORCE_CAP).unwrap();
    assert_eq!(got.phi, phi);
    assert_eq!(got.set, set);
    // a contiguous arc of three has two boundary vertices per side
    assert_eq!(phi, Ratio::new(6 * 4, 9));
}

#[test]
fn brute_force_matches_oracle_on_random_graphs() {
    for seed in 0..40 {
        let mut rng = support::rng_for(seed, "oracle");
        let n = 2 * rng.gen_range(1..=6);
        let g = support::random_graph(n, rng.gen_range(0.0..0.9), &mut rng);
        let (phi, set) = support::oracle_balanced(&g);
        let got = balanced_vertex_expansion_bruteforce(&g, DEFAULT_BRUTE_FORCE_CAP).unwrap();
        assert_eq!((got.phi, got.set), (phi, set), "seed {seed}");
    }
}

#[test]
fn brute_force_rejects_odd_and_oversized() {
    assert!(balanced_vertex_expansion_bruteforce(&Graph::path(5), 16).is_err());
    assert!(balanced_vertex_expansion_bruteforce(&Graph::path(18), 16).is_err());
}

#[test]
fn quadform_examples() {
    let mut y = WeightedDigraph::new(2);
    y.set(0, 1, q(1, 1));
    y.set(1, 0, q(1, 1));
    assert_eq!(laplacian_quadform(&y, &[1.0, 0.0]).unwrap(), 2.0);
    let zero = WeightedDigraph::new(4);
    assert_eq!(laplacian_quadform(&zero, &[3.0, -1.0, 2.0, 7.0]).unwrap(), 0.0);
}

#[test]
fn quadform_matches_dense_laplacian() {
    for seed in 0..20 {
        let mut rng = support::rng_for(seed, "quadform");
        let n = 5;
        let mut y = WeightedDigraph::new(n);
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.gen_bool(0.6) {
                    y.set(i, j, q(rng.gen_range(1..20), rng.gen_range(1..9)));
                }
            }
        }
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        // L = D_out + D_in − Y − Yᵀ built entry by entry
        let mut l = vec![vec![0.0; n]; n];
        for (i, j, w) in y.iter() {
            let w = w.to_f64().unwrap();
            l[i][i] += w;
            l[j][j] += w;
            l[i][j] -= w;
            l[j][i] -= w;
        }
        let dense: f64 = (0..n).map(|i| (0..n).map(|j| x[i] * l[i][j] * x[j]).sum::<f64>()).sum();
        let got = laplacian_quadform(&y, &x).unwrap();
        assert!((got - dense).abs() <= 1e-12 * dense.abs().max(1.0), "{got} vs {dense}");
    }
}

#[test]
fn spectral_gap_examples() {
    for n in 4..=8 {
        let gap = spectral_gap(&Graph::complete(n));
        assert!((gap - n as f64 / (n - 1) as f64).abs() < 1e-10, "K{n}: {gap}");
    }
    assert!((spectral_gap(&Graph::cycle(4)) - 1.0).abs() < 1e-10);
    assert!(spectral_gap(&two_triangles()).abs() < 1e-10);
}

#[test]
fn stationary_distributions() {
    let k3 = stationary_distribution(&Graph::complete(3)).unwrap();
    assert!(k3.iter().all(|&p| p == Ratio::new(1, 3)));
    let star = stationary_distribution(&Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap()).unwrap();
    assert_eq!(star, vec![Ratio::new(1, 2), Ratio::new(1, 6), Ratio::new(1, 6), Ratio::new(1, 6)]);
    let mut rng = support::rng_for(5, "stationary");
    let g = support::random_connected_graph(15, 0.2, &mut rng);
    let total: Ratio<u64> = stationary_distribution(&g).unwrap().into_iter().sum();
    assert_eq!(total, Ratio::from_integer(1));
}

#[test]
fn serialization_round_trips() {
    let mut rng = support::rng_for(9, "serde");
    let base = support::random_graph(12, 0.3, &mut rng);
    // two trailing isolated vertices
    let g = Graph::from_edges(14, base.edges().iter().copied()).unwrap();
    let text = serde_json::to_string(&g).unwrap();
    assert_eq!(serde_json::from_str::<Graph>(&text).unwrap(), g);
    let back = Graph::from_edge_list(&g.to_edge_list()).unwrap();
    assert_eq!(back.n(), 14);
    assert_eq!(back.edges(), g.edges());
}
