mod common;

use misinfo::influence::excess_influence_exact;
use misinfo::kernel::{decompose, mean_interaction_by_events};
use misinfo::network::meeting_digraph;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn net_and_perm() -> impl Strategy<Value = (misinfo::Network, Vec<usize>)> {
    (3usize..=10, any::<u64>()).prop_flat_map(|(n, seed)| {
        let net = common::random_disjoint_network(&mut ChaCha8Rng::seed_from_u64(seed), n);
        (Just(net), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_row_sums((net, _) in net_and_perm()) {
        let dec = decompose(&net);
        for s in dec.w_tilde.row_sums() {
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
        for s in dec.d.row_sums() {
            prop_assert!(s.abs() < 1e-12);
        }
        prop_assert!(dec.t.asymmetry() < 1e-14);
        prop_assert!(dec.w_tilde.max_abs_diff(&mean_interaction_by_events(&net)) < 1e-12);
    }

    #[test]
    fn diameter_ignores_labels((net, perm) in net_and_perm()) {
        let d = meeting_digraph(&net).unwrap().diameter;
        prop_assert_eq!(meeting_digraph(&net.permuted(&perm)).unwrap().diameter, d);
    }

    #[test]
    fn excess_follows_relabeling((net, perm) in net_and_perm()) {
        let ex = excess_influence_exact(&net).unwrap();
        let moved = excess_influence_exact(&net.permuted(&perm)).unwrap();
        prop_assert!(ex.sum().abs() < 1e-12);
        for (k, &p) in perm.iter().enumerate() {
            prop_assert!((ex.excess[k] - moved.excess[p]).abs() < 1e-12);
        }
    }
}
