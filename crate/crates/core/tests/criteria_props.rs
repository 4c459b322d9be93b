use dnml_sbm::criteria::{
    self, cond_loglik_sup, label_loglik_sup, log_dnml, log_multinomial_complexity, pen_dnml,
    pen_nml, ComplexityCache,
};
use dnml_sbm::special::ln_factorial;
use dnml_sbm::{block_stats, BlockStats, Graph, Labeling, Method, PenaltyConfig};
use proptest::prelude::*;

fn stats() -> impl Strategy<Value = (Graph, Labeling, BlockStats)> {
    (2usize..30, 1usize..6, any::<u64>()).prop_flat_map(|(n, k, salt)| {
        proptest::collection::vec(0..k, n).prop_map(move |labels| {
            let edges = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| {
                    (salt.wrapping_mul(31 * i as u64 + 7 * j as u64 + 1) >> 17) % 3 == 0
                });
            let g = Graph::from_edges(n, edges).unwrap();
            let z = Labeling::new(k, labels).unwrap();
            let s = block_stats(&g, &z).unwrap();
            (g, z, s)
        })
    })
}

proptest! {
    #[test]
    fn complexity_nonnegative_and_increasing(m in 0u64..3000, q in 1u64..12) {
        let c = log_multinomial_complexity(m, q).unwrap();
        prop_assert!(c >= 0.0);
        prop_assert!(log_multinomial_complexity(m, q + 1).unwrap() >= c);
    }

    #[test]
    fn dnml_below_maximized_likelihood((_, _, s) in stats()) {
        let sup = cond_loglik_sup(&s) + label_loglik_sup(&s);
        prop_assert!(log_dnml(&s) <= sup + 1e-9);
        prop_assert!(cond_loglik_sup(&s) <= 1e-12);
        prop_assert!(label_loglik_sup(&s) <= 1e-12);
    }

    #[test]
    fn scores_invariant_under_label_permutation(
        (g, z, _, sigma) in stats().prop_flat_map(|(g, z, s)| {
            let k = z.k();
            (Just(g), Just(z), Just(s), Just((0..k).collect::<Vec<_>>()).prop_shuffle())
        })
    ) {
        let cache = ComplexityCache::new();
        let config = PenaltyConfig::default();
        let a = block_stats(&g, &z).unwrap();
        let b = block_stats(&g, &z.relabel(&sigma).unwrap()).unwrap();
        for m in Method::ALL {
            let x = criteria::score(m, &a, &config, &cache).unwrap().penalized;
            let y = criteria::score(m, &b, &config, &cache).unwrap().penalized;
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{m}: {x} vs {y}");
        }
    }

    #[test]
    fn penalized_is_difference((_, _, s) in stats(), eps in 0.01f64..3.0) {
        let config = PenaltyConfig { epsilon: eps, ..Default::default() };
        let cache = ComplexityCache::new();
        for m in Method::ALL {
            let c = criteria::score(m, &s, &config, &cache).unwrap();
            prop_assert_eq!(c.penalized, c.log_score - c.penalty);
            prop_assert!(c.penalized.is_finite());
        }
    }

    #[test]
    fn dnml_penalty_identity(k in 1usize..=10, n in 2usize..10_000, eps in 0.01f64..3.0) {
        let diff = pen_dnml(k, n, eps) - pen_nml(k, n, eps);
        let expected = n as f64 * ln_factorial(k as u64 - 1);
        prop_assert!((diff - expected).abs() <= 1e-12 * expected.max(1.0));
    }
}

#[test]
fn triangle_single_block() {
    let g = Graph::complete(3).unwrap();
    let s = block_stats(&g, &Labeling::single(3)).unwrap();
    assert!((log_dnml(&s) + (26.0f64 / 9.0).ln()).abs() < 1e-12);
}

#[test]
fn penalties_increase_with_k() {
    for n in [2usize, 10, 1000] {
        for k in 2..12 {
            assert!(pen_dnml(k + 1, n, 0.5) > pen_dnml(k, n, 0.5));
            assert!(pen_nml(k + 1, n, 0.5) > pen_nml(k, n, 0.5));
        }
    }
}
