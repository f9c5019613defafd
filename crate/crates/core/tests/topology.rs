use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use wsbn::topology::{
    canonical_form, diameter, enumerate_diam_deg_graphs, enumerate_extensions, enumerate_graphs, graph_embeds,
    labelled_canonical_form, longest_simple_path_length, moore_bound, multiset_embeds, Graph, LabelledGraph,
    TopologyClass,
};
use wsbn_testkit::{
    brute_canonical, brute_diam_deg, brute_embeds, brute_longest_path, brute_multiset_embeds,
    floyd_warshall_diameter, permutations, random_graph, random_labelled_graph,
};

fn le(a: &u32, b: &u32) -> bool {
    a <= b
}

#[test]
fn embeddings_match_brute_force() {
    let mut rng = StdRng::seed_from_u64(41);
    let mut positives = 0;
    for _ in 0..600 {
        let n1 = rng.gen_range(1..=4);
        let n2 = rng.gen_range(n1..=6);
        let g1 = random_labelled_graph(&mut rng, n1, 0.4, 3);
        let g2 = random_labelled_graph(&mut rng, n2, 0.4, 3);
        let fast = graph_embeds(&g1, &g2, le);
        assert_eq!(fast.is_some(), brute_embeds(&g1, &g2, le), "{g1:?} {g2:?}");
        if let Some(h) = fast {
            positives += 1;
            for u in 0..n1 {
                assert!(g1.labels[u] <= g2.labels[h[u]]);
                for v in 0..n1 {
                    if u != v {
                        assert_eq!(g1.graph.has_edge(u, v), g2.graph.has_edge(h[u], h[v]));
                    }
                }
            }
        }
    }
    assert!(positives > 20);
}

#[test]
fn embedding_into_a_supergraph_with_relabelling() {
    let mut rng = StdRng::seed_from_u64(42);
    for _ in 0..200 {
        let n = rng.gen_range(1..=7);
        let g = random_labelled_graph(&mut rng, n, 0.5, 3);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let mut h = g.permuted(&perm);
        for l in &mut h.labels {
            *l += rng.gen_range(0..2);
        }
        assert!(graph_embeds(&g, &h, le).is_some());
    }
}

#[test]
fn clique_embedding_is_multiset_embedding() {
    let mut rng = StdRng::seed_from_u64(43);
    for _ in 0..300 {
        let m1: Vec<u32> = (0..rng.gen_range(0..5)).map(|_| rng.gen_range(0..4)).collect();
        let m2: Vec<u32> = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..4)).collect();
        let expected = brute_multiset_embeds(&m1, &m2, le);
        assert_eq!(multiset_embeds(&m1, &m2, le), expected);
        let g1 = LabelledGraph::new(Graph::complete(m1.len()), m1.clone());
        let g2 = LabelledGraph::new(Graph::complete(m2.len()), m2.clone());
        assert_eq!(graph_embeds(&g1, &g2, le).is_some(), expected);
    }
}

#[test]
fn longest_path_and_diameter_match_brute_force() {
    let mut rng = StdRng::seed_from_u64(44);
    for _ in 0..400 {
        let n = rng.gen_range(1..=8);
        let density = rng.gen_range(0.1..0.8);
        let g = random_graph(&mut rng, n, density);
        assert_eq!(longest_simple_path_length(&g), brute_longest_path(&g), "{g:?}");
        assert_eq!(diameter(&g), floyd_warshall_diameter(&g), "{g:?}");
    }
}

#[test]
fn named_shapes() {
    assert_eq!(longest_simple_path_length(&Graph::path(5)), 4);
    assert_eq!(longest_simple_path_length(&Graph::star(4)), 2);
    assert_eq!(longest_simple_path_length(&Graph::complete(4)), 3);
    assert_eq!(diameter(&Graph::cycle(6)), Some(3));
    assert_eq!(diameter(&Graph::new(2)), None);
    assert!(TopologyClass::PathBounded(2).contains(&Graph::star(5)));
    assert!(!TopologyClass::PathBounded(2).contains(&Graph::path(4)));
    assert!(TopologyClass::DiamDeg { k: 2, d: 3 }.contains(&Graph::cycle(5)));
    assert!(!TopologyClass::DiamDeg { k: 2, d: 3 }.contains(&Graph::new(2)));
}

#[test]
fn canonical_form_separates_isomorphism_classes() {
    let mut rng = StdRng::seed_from_u64(45);
    let graphs: Vec<Graph> = (0..150)
        .map(|_| {
            let n = rng.gen_range(1..=6);
            random_graph(&mut rng, n, 0.5)
        })
        .collect();
    for a in &graphs {
        for b in &graphs {
            if a.order() == b.order() {
                assert_eq!(canonical_form(a) == canonical_form(b), brute_canonical(a) == brute_canonical(b));
            }
        }
    }
}

#[test]
fn labelled_canonical_form_is_permutation_invariant() {
    let mut rng = StdRng::seed_from_u64(46);
    for _ in 0..100 {
        let n = rng.gen_range(1..=5);
        let g = random_labelled_graph(&mut rng, n, 0.5, 2);
        let form = labelled_canonical_form(&g);
        for perm in permutations(n) {
            assert_eq!(labelled_canonical_form(&g.permuted(&perm)), form);
        }
    }
}

#[test]
fn graph_counts_by_order() {
    let counts: Vec<usize> = (0..=6).map(|n| enumerate_graphs(n).unwrap().len()).collect();
    assert_eq!(counts, vec![1, 1, 2, 4, 11, 34, 156]);
}

#[test]
fn diam_deg_enumeration_matches_brute_force() {
    for (k, d, n_max) in [(1, 1, 4), (1, 3, 5), (2, 2, 5), (2, 3, 5), (3, 2, 5), (2, 4, 5), (3, 3, 5)] {
        let fast = enumerate_diam_deg_graphs(k, d, n_max).unwrap();
        let brute = brute_diam_deg(k, d, n_max);
        assert_eq!(fast.len(), brute.len(), "k={k} d={d} n_max={n_max}");
        let mut a: Vec<Vec<bool>> = fast.iter().map(brute_canonical).collect();
        let mut b: Vec<Vec<bool>> = brute.iter().map(brute_canonical).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        for g in &fast {
            assert!(g.order() as u128 <= moore_bound(k, d));
        }
    }
}

#[test]
fn moore_bound_values() {
    assert_eq!(moore_bound(2, 3), 10);
    assert_eq!(moore_bound(1, 4), 5);
    assert_eq!(moore_bound(3, 2), 7);
    // the Petersen graph meets the bound
    assert_eq!(enumerate_diam_deg_graphs(2, 3, 8).unwrap().iter().map(Graph::order).max(), Some(8));
}

#[test]
fn enumeration_refuses_large_orders() {
    assert!(enumerate_graphs(9).is_err());
    assert!(enumerate_diam_deg_graphs(2, 3, 9).is_err());
}

fn graph_strategy(max: usize) -> impl Strategy<Value = Graph> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut g = Graph::new(n);
            let mut i = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[i] {
                        g.add_edge(u, v);
                    }
                    i += 1;
                }
            }
            g
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn extensions_contain_the_shape(g in graph_strategy(5), k in 1usize..4) {
        let class = TopologyClass::PathBounded(k);
        prop_assume!(class.contains(&g));
        let n = g.order();
        for h in enumerate_extensions(&g, class).unwrap() {
            prop_assert_eq!(h.order(), n + 1);
            prop_assert!(class.contains(&h));
            for u in 0..n {
                for v in 0..n {
                    prop_assert_eq!(g.has_edge(u, v), h.has_edge(u, v));
                }
            }
        }
    }

    #[test]
    fn embedding_is_reflexive_and_transitive(
        a in graph_strategy(4),
        b in graph_strategy(5),
        c in graph_strategy(6),
    ) {
        let wrap = |g: &Graph| LabelledGraph::new(g.clone(), vec![0u32; g.order()]);
        let (a, b, c) = (wrap(&a), wrap(&b), wrap(&c));
        prop_assert!(graph_embeds(&a, &a, le).is_some());
        if graph_embeds(&a, &b, le).is_some() && graph_embeds(&b, &c, le).is_some() {
            prop_assert!(graph_embeds(&a, &c, le).is_some());
        }
    }

    #[test]
    fn path_bounded_class_is_closed_under_induced_subgraphs(g in graph_strategy(7), drop in 0usize..7) {
        let n = g.order();
        prop_assume!(n > 1);
        let drop = drop % n;
        let keep: Vec<usize> = (0..n).filter(|&v| v != drop).collect();
        let mut h = Graph::new(n - 1);
        for (i, &u) in keep.iter().enumerate() {
            for (j, &v) in keep.iter().enumerate() {
                if i < j && g.has_edge(u, v) {
                    h.add_edge(i, j);
                }
            }
        }
        prop_assert!(longest_simple_path_length(&h) <= longest_simple_path_length(&g));
    }
}
