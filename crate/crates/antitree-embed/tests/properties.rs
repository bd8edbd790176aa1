use antitree_embed::convex::{good_arcs, ConvexDigraph, VertexOrder};
use antitree_embed::freeness::{common_neighborhood, is_k2s_free};
use antitree_embed::gen::{gen_random_dense, gen_random_with_arcs, random_antitree, random_caterpillar};
use antitree_embed::oracle::{brute_force_good_arcs, oracle_embed};
use antitree_embed::subdigraph::prune_pseudo;
use antitree_embed::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// (host, tree, k) with n ≤ 10 and k ≤ 5, dense about half the time.
fn instance() -> impl Strategy<Value = (Digraph, AntiTree, usize)> {
    (2usize..=10, 1usize..=5, any::<u64>(), any::<bool>()).prop_map(|(n, k, seed, dense)| {
        let k = k.min(n - 1);
        let top = n * (n - 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = if dense && (k - 1) * n < top {
            (k - 1) * n + 1 + (seed as usize % (top - (k - 1) * n))
        } else {
            seed as usize % (top + 1)
        };
        (gen_random_with_arcs(n, m, seed).unwrap(), random_antitree(k, &mut rng), k)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn reversal_gives_the_same_map((d, t, k) in instance()) {
        let opts = EmbedOptions { fallback: false, ..EmbedOptions::default() };
        let a = embed_antitree_with(&d, &t, k, &opts);
        let b = embed_antitree_with(&d.reverse(), &t.reverse(), k, &opts);
        prop_assert_eq!(a.is_success(), b.is_success());
        prop_assert_eq!(a.embedding, b.embedding);
    }

    #[test]
    fn successes_validate_and_agree_with_the_oracle((d, t, k) in instance()) {
        let out = embed_antitree(&d, &t, k);
        let truth = oracle_embed(&d, &t, None);
        if let Some(e) = &out.embedding {
            prop_assert!(e.validate(&t, &d).is_ok());
            prop_assert!(truth.embeds());
        }
        // k ≤ 5 trees are caterpillars, so density alone is the hypothesis.
        if d.arc_count() > (k - 1) * d.n() {
            prop_assert!(out.is_success(), "{:?}", out.failure);
        }
    }

    #[test]
    fn oracle_is_reversal_symmetric((d, t, _k) in instance()) {
        prop_assert_eq!(oracle_embed(&d, &t, None).embeds(), oracle_embed(&d.reverse(), &t.reverse(), None).embeds());
    }

    #[test]
    fn caterpillar_criteria_agree(k in 1usize..=9, seed in any::<u64>()) {
        let t = random_antitree(k, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(t.caterpillar_decompose().is_ok(), t.is_caterpillar_by_stripping());
    }

    #[test]
    fn dp_good_arcs_are_good(n in 2usize..=6, k in 1usize..=3, seed in any::<u64>()) {
        let k = k.min(n - 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = seed as usize % (n * (n - 1) + 1);
        let d = gen_random_with_arcs(n, m, seed).unwrap();
        let t = random_caterpillar(k, &mut rng);
        let c = ConvexDigraph::with_order(&d, VertexOrder::Random(seed));
        let table = good_arcs(&c, &t).unwrap();
        let brute = brute_force_good_arcs(&c, &t).unwrap();
        let dp = table.final_good();
        prop_assert!(dp.iter().all(|a| brute.contains(a)));
        prop_assert!(dp.len() as i64 >= d.arc_count() as i64 - (k as i64 - 1) * n as i64);
        for a in dp {
            prop_assert!(table.witness(a).unwrap().validate(&t, &d).is_ok());
        }
    }

    #[test]
    fn pruning_reaches_half_k(n in 3usize..=14, k in 2usize..=8, seed in any::<u64>()) {
        prop_assume!(k < n);
        let d = gen_random_dense(n, k, seed).unwrap();
        let g = prune_pseudo(&d, k).unwrap();
        prop_assert!(g.arc_count() > 0);
        prop_assert!(g.arcs().iter().all(|a| d.has_arc(a.tail, a.head)));
        prop_assert!(2 * g.degree_profile().delta0_bar >= k);
    }

    #[test]
    fn freeness_matches_pairwise_recount(n in 2usize..=8, s in 1usize..=3, seed in any::<u64>()) {
        let m = seed as usize % (n * (n - 1) + 1);
        let d = gen_random_with_arcs(n, m, seed).unwrap();
        let worst = (0..n)
            .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
            .flat_map(|(a, b)| {
                [(Sign::Plus, Sign::Plus), (Sign::Minus, Sign::Minus), (Sign::Plus, Sign::Minus)]
                    .map(|(sa, sb)| common_neighborhood(&d, a, sa, b, sb).len())
            })
            .max()
            .unwrap_or(0);
        match is_k2s_free(&d, s) {
            Ok(()) => prop_assert!(worst < s),
            Err(w) => {
                prop_assert!(worst >= s);
                prop_assert!(w.revalidate(&d, s));
            }
        }
    }

    #[test]
    fn random_dense_is_seeded(n in 2usize..=20, k in 1usize..=6, seed in any::<u64>()) {
        prop_assume!((k - 1) * n < n * (n - 1));
        let a = gen_random_dense(n, k, seed).unwrap();
        prop_assert_eq!(a.arc_count(), (k - 1) * n + 1);
        prop_assert_eq!(a, gen_random_dense(n, k, seed).unwrap());
    }
}
