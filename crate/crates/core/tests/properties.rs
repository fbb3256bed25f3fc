use proptest::prelude::*;

use omas_core::age::AgeDistribution;
use omas_core::bounds::{ping_age_distribution, ping_bound, relaxed_bound};
use omas_core::infection::{
    infection_age_cdf, infection_bound_algebraic, infection_bound_matrix, InfectionChain,
};
use omas_core::params::SystemParams;
use omas_core::rng::RngStream;
use omas_core::sim::SimState;

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.log10()..hi.log10()).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ping_depends_only_on_the_ratio(
        n in 2usize..300,
        ratio in log_uniform(1e-3, 1e3),
        scale in log_uniform(1e-3, 1e3),
        sigma_sq in log_uniform(1e-2, 1e2),
    ) {
        let base = ping_bound(&SystemParams::new(n, 1.0, ratio, 1.0).unwrap()).unwrap().value;
        let scaled = SystemParams::new(n, scale, scale * ratio, sigma_sq).unwrap();
        let v = ping_bound(&scaled).unwrap().value;
        prop_assert!((v - sigma_sq * base).abs() <= 1e-13 * sigma_sq * base);
    }

    #[test]
    fn bounds_are_ordered_and_capped(n in 2usize..120, ratio in log_uniform(1e-3, 1e3)) {
        let p = SystemParams::from_ratio(n, ratio, 1.0, 1.0).unwrap();
        let ping = ping_bound(&p).unwrap().value;
        let relaxed = relaxed_bound(&p).unwrap().value;
        let matrix = infection_bound_matrix(&p).unwrap().value;
        let algebraic = infection_bound_algebraic(&p).unwrap().value;
        let ceiling = p.no_information_mse();
        prop_assert!(ping > 0.0);
        prop_assert!(ping <= relaxed + 1e-12);
        prop_assert!(relaxed <= matrix + 1e-12);
        prop_assert!(matrix <= ceiling + 1e-12);
        prop_assert!((matrix - algebraic).abs() <= 1e-10 * matrix);
    }

    #[test]
    fn bounds_decrease_with_communication(
        n in 2usize..60,
        ratio in log_uniform(1e-3, 1e2),
        factor in 1.01f64..10.0,
    ) {
        let lo = SystemParams::from_ratio(n, ratio, 1.0, 1.0).unwrap();
        let hi = SystemParams::from_ratio(n, ratio * factor, 1.0, 1.0).unwrap();
        prop_assert!(infection_bound_matrix(&hi).unwrap().value
            <= infection_bound_matrix(&lo).unwrap().value + 1e-15);
        prop_assert!(ping_bound(&hi).unwrap().value < ping_bound(&lo).unwrap().value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn infection_age_is_dominated_by_ping(
        n in 2usize..40,
        lambda_c in log_uniform(1e-2, 1e2),
        scaled_s in prop::collection::vec(log_uniform(1e-3, 30.0), 8),
    ) {
        let p = SystemParams::new(n, 1.0, lambda_c, 1.0).unwrap();
        let ping = ping_age_distribution(&p);
        let inf = infection_age_cdf(&InfectionChain::from_params(&p)).unwrap();
        let mut last = 0.0;
        let mut s_sorted: Vec<f64> = scaled_s
            .into_iter()
            .map(|x| x / ((n - 1) as f64 * lambda_c))
            .collect();
        s_sorted.sort_by(f64::total_cmp);
        for s in s_sorted {
            let f = inf.cdf(s);
            prop_assert!(f <= ping.cdf(s) + 1e-12, "s = {s}");
            prop_assert!(f >= last - 1e-12);
            last = f;
        }
    }
}

fn state(n: usize, seed: u64) -> (SystemParams, RngStream, SimState) {
    let params = SystemParams::new(n, 1.0, 1.0, 1.0).unwrap();
    let mut rng = RngStream::new(seed, 0);
    let state = SimState::fresh(&params, &mut rng);
    (params, rng, state)
}

fn pairs(n: usize) -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((0..n, 0..n), 1..60)
        .prop_map(|v| v.into_iter().filter(|(i, j)| i != j).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gossip_preserves_the_sum(seed in any::<u64>(), events in pairs(8)) {
        let (_, _, mut s) = state(8, seed);
        let before: f64 = s.gossip_estimates().iter().sum();
        for (i, j) in events {
            s.apply_communication_gossip(i, j);
        }
        let after: f64 = s.gossip_estimates().iter().sum();
        prop_assert!((before - after).abs() <= 1e-12 * (1.0 + before.abs()));
    }

    #[test]
    fn merge_is_idempotent_and_symmetric(
        seed in any::<u64>(),
        events in pairs(6),
        replaced in prop::collection::vec(0usize..6, 0..6),
        i in 0usize..6,
        j in 0usize..6,
    ) {
        prop_assume!(i != j);
        let (params, mut rng, mut s) = state(6, seed);
        let mut now = 0.0;
        for (step, (a, b)) in events.into_iter().enumerate() {
            now += 0.1;
            s.apply_communication_optimal(a, b, now);
            if let Some(&r) = replaced.get(step) {
                s.apply_replacement(r, &params, &mut rng);
            }
        }
        now += 0.1;
        let mut forward = s.clone();
        forward.apply_communication_optimal(i, j, now);
        let mut backward = s.clone();
        backward.apply_communication_optimal(j, i, now);
        prop_assert_eq!(forward.knowledge(i), backward.knowledge(i));
        prop_assert_eq!(forward.knowledge(j), backward.knowledge(j));
        prop_assert_eq!(forward.knowledge(i), forward.knowledge(j));

        let mut twice = forward.clone();
        twice.apply_communication_optimal(i, j, now);
        prop_assert_eq!(twice.knowledge(i), forward.knowledge(i));

        prop_assert!(forward.known_count(i) >= s.known_count(i));
        prop_assert!(forward.known_count(i) >= s.known_count(j));
        for entry in forward.knowledge(i).iter().flatten() {
            prop_assert!(entry.timestamp <= now);
        }
    }
}
