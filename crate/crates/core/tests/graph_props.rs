use dnml_sbm::{block_stats, Graph, Labeling};
use proptest::prelude::*;

fn graph_and_labels() -> impl Strategy<Value = (Graph, Labeling)> {
    (1usize..25, 1usize..6).prop_flat_map(|(n, k)| {
        let pairs = n * (n - 1) / 2;
        (
            proptest::collection::vec(any::<bool>(), pairs),
            proptest::collection::vec(0..k, n),
        )
            .prop_map(move |(mask, labels)| {
                let edges = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .zip(mask)
                    .filter(|(_, keep)| *keep)
                    .map(|(e, _)| e);
                (
                    Graph::from_edges(n, edges).unwrap(),
                    Labeling::new(k, labels).unwrap(),
                )
            })
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn capacities_cover_all_pairs((g, z) in graph_and_labels()) {
        let s = block_stats(&g, &z).unwrap();
        let n = g.node_count() as u64;
        prop_assert_eq!(s.pairs().map(|(m, _)| m).sum::<u64>(), n * (n - 1) / 2);
        prop_assert_eq!(s.pairs().map(|(_, o)| o).sum::<u64>(), g.edge_count() as u64);
        prop_assert_eq!(s.sizes().iter().sum::<u64>(), n);
        for (m, o) in s.pairs() {
            prop_assert!(o <= m);
        }
    }

    #[test]
    fn single_block_counts_every_edge((g, _) in graph_and_labels()) {
        let s = block_stats(&g, &Labeling::single(g.node_count())).unwrap();
        prop_assert_eq!(s.edge_count(0, 0), g.edge_count() as u64);
    }

    #[test]
    fn stats_invariant_under_node_permutation(
        (g, z, perm) in graph_and_labels().prop_flat_map(|(g, z)| {
            let n = g.node_count();
            (Just(g), Just(z), permutation(n))
        })
    ) {
        let s = block_stats(&g, &z).unwrap();
        let t = block_stats(&g.permute_nodes(&perm).unwrap(), &z.permute_nodes(&perm).unwrap()).unwrap();
        prop_assert_eq!(s, t);
    }

    #[test]
    fn relabeling_permutes_blocks(
        (g, z, sigma) in graph_and_labels().prop_flat_map(|(g, z)| {
            let k = z.k();
            (Just(g), Just(z), permutation(k))
        })
    ) {
        let direct = block_stats(&g, &z.relabel(&sigma).unwrap()).unwrap();
        let via_stats = block_stats(&g, &z).unwrap().relabel(&sigma).unwrap();
        prop_assert_eq!(direct, via_stats);
    }

    #[test]
    fn degree_sum_is_twice_edges((g, _) in graph_and_labels()) {
        let total: usize = (0..g.node_count()).map(|v| g.degree(v)).sum();
        prop_assert_eq!(total, 2 * g.edge_count());
        for &(i, j) in g.edges() {
            prop_assert!(g.has_edge(j as usize, i as usize));
        }
    }
}

#[test]
fn rejects_bad_input() {
    assert!(Graph::from_edges(3, [(0, 3)]).is_err());
    assert!(Graph::from_edges(3, [(1, 1)]).is_err());
    assert!(Labeling::new(2, vec![0, 2]).is_err());
    assert!(Labeling::new(0, vec![]).is_err());
    let g = Graph::from_edges(3, [(0, 1)]).unwrap();
    assert!(block_stats(&g, &Labeling::single(4)).is_err());
}

#[test]
fn duplicate_edges_collapse() {
    let g = Graph::from_edges(3, [(0, 1), (1, 0), (0, 1), (1, 2)]).unwrap();
    assert_eq!(g.edge_count(), 2);
}
