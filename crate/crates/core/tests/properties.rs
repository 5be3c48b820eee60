use modpois::dist::{total_variation, DiscreteDist};
use modpois::limiting::{phi_c_trunc, phi_generic};
use modpois::model::{brute_force_conditioned, brute_force_omega_dprime, paintbox_delta, Coupling, IndexConvention};
use modpois::verify::tiny_model;
use proptest::prelude::*;

fn weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, 1..12)
}

fn probs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, 0..12)
}

fn is_normalised(d: &DiscreteDist) -> bool {
    (d.total_mass() - 1.0).abs() <= 1e-12 && d.pmf().iter().all(|&p| p >= 0.0)
}

proptest! {
    #[test]
    fn tilts_compose(w in weights(), x in 0.05f64..=4.0, y in 0.05f64..=4.0) {
        let d = DiscreteDist::from_weights(w).unwrap();
        let twice = d.tilt(x).unwrap().tilt(y).unwrap();
        let once = d.tilt(x * y).unwrap();
        prop_assert!(is_normalised(&twice));
        prop_assert!(total_variation(&twice, &once) <= 1e-12);
    }

    #[test]
    fn tilt_and_size_bias_commute(w in weights(), x in 0.05f64..=4.0, ell in 0u32..4) {
        let mut w = w;
        w.push(0.5);
        let d = DiscreteDist::from_weights(w).unwrap();
        let a = d.tilt(x).unwrap().size_bias_iter(ell).unwrap();
        let b = d.size_bias_iter(ell).unwrap().tilt(x).unwrap();
        let c = d.penalise(|k| (k as f64).powi(ell as i32) * x.powi(k as i32)).unwrap();
        prop_assert!(is_normalised(&a) && is_normalised(&b));
        prop_assert!(total_variation(&a, &b) <= 1e-12);
        prop_assert!(total_variation(&a, &c) <= 1e-12);
    }

    #[test]
    fn bernoulli_sum_product_form(ps in probs(), x in 0.0f64..3.0) {
        let d = DiscreteDist::bernoulli_sum(&ps).unwrap();
        prop_assert!(is_normalised(&d));
        let prod: f64 = ps.iter().map(|p| 1.0 + p * (x - 1.0)).product();
        prop_assert!((d.pgf(x) - prod).abs() <= 1e-10 * prod.max(1.0));
    }

    #[test]
    fn total_variation_is_a_metric(a in weights(), b in weights(), c in weights()) {
        let (a, b, c) = (
            DiscreteDist::from_weights(a).unwrap(),
            DiscreteDist::from_weights(b).unwrap(),
            DiscreteDist::from_weights(c).unwrap(),
        );
        let ab = total_variation(&a, &b);
        prop_assert!((ab - total_variation(&b, &a)).abs() <= 1e-15);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        prop_assert!(ab <= total_variation(&a, &c) + total_variation(&c, &b) + 1e-12);
        prop_assert_eq!(total_variation(&a, &a), 0.0);
    }

    #[test]
    fn limit_products_in_unit_interval(ps in probs(), k in 1u64..3000, x in 0.0f64..8.0) {
        let g = phi_generic(&ps, x);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&g));
        let c = phi_c_trunc(k, x);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&c));
    }

    #[test]
    fn delta_counts_distinct(indices in prop::collection::vec(0usize..6, 0..10)) {
        let d = paintbox_delta(&indices);
        prop_assert!(d <= indices.len());
        prop_assert!(d <= 6);
        prop_assert_eq!(d == 0, indices.is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn construction_matches_identity(
        mask in 1u8..32,
        k in 1u64..=3,
        v in 0.05f64..2.0,
    ) {
        let all = [2u32, 3, 5, 7, 11];
        let primes: Vec<u32> = all.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
        let model = tiny_model(&primes, k, v, IndexConvention::LemmaWeights).unwrap();
        let identity = model.identity_law().unwrap();
        let pathwise = brute_force_omega_dprime(&model, Coupling::IteratedSizeBias).unwrap();
        let conditioned = brute_force_conditioned(&model, Coupling::IteratedSizeBias).unwrap();
        prop_assert!(total_variation(&pathwise, &identity) <= 1e-12);
        prop_assert!(total_variation(&conditioned, &identity) <= 1e-12);
    }
}
