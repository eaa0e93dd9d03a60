use noma_lf_core::channel::{sample_channel_into, ChannelParams, StreamSeed};
use noma_lf_core::evaluator::{
    achievable_check, adapted_rates, evaluate_two_user, effective_snr_first_strong, snr_decomposition, OutageConfig,
};
use noma_lf_core::power::{
    log2_1p, max_min_rate_two_user, optimal_alpha_two_user, rate_k, solve_max_min_k, strong_rate,
    required_power, weak_rate,
};
use noma_lf_core::quantizer::{
    quantize_outage, quantize_rate, vle_decode, vle_encode, vle_len, vle_rate_bound, Flavor,
    QuantizerConfig,
};
use proptest::prelude::*;

fn rate_cfg(delta: f64, t: u64) -> QuantizerConfig {
    QuantizerConfig::new(delta, t, Flavor::RateAdaptation).unwrap()
}

fn outage_cfg(delta: f64, t: u64) -> QuantizerConfig {
    QuantizerConfig::new(delta, t, Flavor::Outage).unwrap()
}

proptest! {
    #[test]
    fn quantizers_bracket_input(x in 0.0f64..12.0, delta in 0.001f64..0.9, t in 1u64..2000) {
        let top = t as f64 * delta;
        let r = quantize_rate(x, &rate_cfg(delta, t)).unwrap();
        prop_assert!(r.reconstructed <= x);
        prop_assert!(r.level <= t);
        if x <= top {
            prop_assert!(r.reconstructed >= x - delta * (1.0 + 1e-12));
        }
        if x > 0.0 {
            let o = quantize_outage(x, &outage_cfg(delta, t)).unwrap();
            prop_assert!(o.reconstructed >= delta * (1.0 - 1e-12));
            prop_assert!(o.level >= 1 && o.level <= t + 1);
            if x <= top {
                prop_assert!(o.reconstructed >= x);
                prop_assert!(o.reconstructed - x <= delta * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn quantizers_are_monotone(a in 1e-9f64..8.0, b in 1e-9f64..8.0, delta in 0.005f64..0.5) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let rc = rate_cfg(delta, 300);
        let oc = outage_cfg(delta, 300);
        prop_assert!(rc.level(lo) <= rc.level(hi));
        prop_assert!(oc.level(lo) <= oc.level(hi));
    }

    #[test]
    fn reconstruction_points_are_fixed(n in 0u64..=500, delta in 0.001f64..0.9) {
        let t = 500;
        let rc = rate_cfg(delta, t);
        prop_assert_eq!(rc.level(rc.reconstruct(n)), n);
        if n >= 1 {
            let oc = outage_cfg(delta, t);
            prop_assert_eq!(oc.level(oc.reconstruct(n)), n);
        }
    }

    #[test]
    fn vle_round_trip(n in any::<u64>()) {
        let code = vle_encode(n);
        prop_assert_eq!(code.len(), vle_len(n));
        prop_assert_eq!(vle_decode(&code).unwrap(), n);
        prop_assert_eq!(vle_decode(&code.to_string().parse().unwrap()).unwrap(), n);
    }

    #[test]
    fn alpha_limits_and_half_bound(h_weak in 1e-3f64..5.0, ratio in 1.0f64..20.0, p in 1e-3f64..1e6) {
        let h_strong = h_weak * ratio;
        let a = optimal_alpha_two_user(h_strong, h_weak, p).unwrap();
        prop_assert!(a > 0.0 && a <= 0.5 + 1e-15);
        let low = optimal_alpha_two_user(h_strong, h_weak, 1e-12).unwrap();
        prop_assert!((low - h_weak / (h_strong + h_weak)).abs() < 1e-6);
        let high = optimal_alpha_two_user(h_strong, h_weak, 1e15).unwrap();
        prop_assert!(high < 1e-5);
        let r1 = strong_rate(a, h_strong, p);
        let r2 = weak_rate(a, h_weak, p);
        prop_assert!((r1 - r2).abs() < 1e-9);
    }

    #[test]
    fn required_power_strictly_increasing(
        gains in prop::collection::vec(0.01f64..5.0, 1..6),
        p in 0.1f64..1000.0,
        r in 0.0f64..4.0,
        dr in 1e-6f64..1.0,
    ) {
        let mut g = gains;
        g.sort_by(|a, b| b.partial_cmp(a).unwrap());
        prop_assert!(required_power(r + dr, &g, p).unwrap() > required_power(r, &g, p).unwrap());
    }

    #[test]
    fn max_min_rate_monotone(h1 in 0.01f64..5.0, h2 in 0.01f64..5.0, p in 0.1f64..1000.0, s in 1.0f64..3.0) {
        let base = max_min_rate_two_user(h1, h2, p).unwrap();
        prop_assert!(max_min_rate_two_user(h1 * s, h2, p).unwrap() >= base - 1e-12);
        prop_assert!(max_min_rate_two_user(h1, h2 * s, p).unwrap() >= base - 1e-12);
        prop_assert!(max_min_rate_two_user(h1, h2, p * s).unwrap() >= base - 1e-12);
    }

    #[test]
    fn k_user_rate_monotone(
        gains in prop::collection::vec(0.01f64..5.0, 2..6),
        p in 0.1f64..1000.0,
        idx in 0usize..6,
        s in 1.0f64..3.0,
    ) {
        let base = solve_max_min_k(&gains, p, 1e-10).unwrap().r_max;
        let mut boosted = gains.clone();
        let i = idx % gains.len();
        boosted[i] *= s;
        prop_assert!(solve_max_min_k(&boosted, p, 1e-10).unwrap().r_max >= base - 2e-10);
        prop_assert!(solve_max_min_k(&gains, p * s, 1e-10).unwrap().r_max >= base - 2e-10);
    }

    #[test]
    fn solver_rates_equal_within_tolerance(
        gains in prop::collection::vec(0.01f64..5.0, 1..8),
        p_db in -10.0f64..40.0,
        eps_exp in 3i32..10,
    ) {
        let p = 10f64.powf(p_db / 10.0);
        let eps = 10f64.powi(-eps_exp);
        let res = solve_max_min_k(&gains, p, eps).unwrap();
        let alphas = res.allocation.alphas_in_order();
        prop_assert!((alphas.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(alphas.iter().all(|a| (0.0..=1.0).contains(a)));
        let sorted: Vec<f64> = res.allocation.order.iter().map(|&i| gains[i]).collect();
        let rates: Vec<f64> =
            (0..gains.len()).map(|k| rate_k(&alphas, &sorted, p, k).unwrap()).collect();
        let hi = rates.iter().cloned().fold(f64::MIN, f64::max);
        let lo = rates.iter().cloned().fold(f64::MAX, f64::min);
        if gains.len() > 1 {
            prop_assert!(hi - lo <= 10.0 * eps, "spread {} eps {}", hi - lo, eps);
        }
        prop_assert!(lo >= res.r_max - 1e-12);
    }

    #[test]
    fn first_strong_snr_below_min(x in 1e-4f64..10.0, y in 1e-4f64..10.0, p in 1e-3f64..1e5) {
        prop_assert!(effective_snr_first_strong(x, y, p) <= x.min(y) * (1.0 + 1e-12));
    }
}

#[test]
fn snr_decomposition_matches_max_min_rate() {
    let params = ChannelParams::two_user(1.0, 0.5).unwrap();
    let mut g = [0.0; 2];
    for trial in 0..10_000u64 {
        sample_channel_into(&params, StreamSeed::new(21, trial), &mut g);
        let p = 10f64.powf((trial % 50) as f64 / 10.0 - 1.0);
        let d = snr_decomposition(g[0], g[1], p);
        let r = max_min_rate_two_user(g[0], g[1], p).unwrap();
        assert!((log2_1p(p * d.snr_max) - r).abs() < 1e-10, "trial {trial}");
    }
}

#[test]
fn pipeline_invariants_over_random_trials() {
    let params = ChannelParams::two_user(1.0, 0.5).unwrap();
    let outage = OutageConfig::new(1.0).unwrap();
    let mut g = [0.0; 2];
    for &delta in &[0.01, 0.05, 0.2] {
        let qr = QuantizerConfig::with_default_t(delta, 1.0, Flavor::RateAdaptation).unwrap();
        let qo = QuantizerConfig::with_default_t(delta, 1.0, Flavor::Outage).unwrap();
        for trial in 0..200_000u64 {
            sample_channel_into(&params, StreamSeed::new(5, trial), &mut g);
            let p = 10f64.powf((trial % 41) as f64 / 10.0 - 1.0);
            let r = evaluate_two_user(g, p, &qr, Some(&outage));
            assert!(r.rate_loss >= -1e-12, "negative loss {r:?}");
            assert!(r.r_q_actual >= r.r_adapted_min - 1e-12);
            assert!(r.r_q_actual <= r.r_max_full + 1e-12);
            let o = evaluate_two_user(g, p, &qo, Some(&outage));
            assert!(!o.outage_full || o.outage_q, "dominance violated {o:?}");
            if r.alpha_q > 0.0 {
                let (q1, q2) = (qr.reconstruct(r.levels[0]), qr.reconstruct(r.levels[1]));
                let (r1, r2) = adapted_rates(q1.max(q2), q1.min(q2), p).unwrap();
                assert!((r1 - r2).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn quantized_allocation_is_achievable() {
    let params = ChannelParams::two_user(1.0, 0.5).unwrap();
    let mut g = [0.0; 2];
    let p = 10.0;
    for &delta in &[0.01, 0.05, 0.2] {
        let q = QuantizerConfig::with_default_t(delta, 1.0, Flavor::RateAdaptation).unwrap();
        for trial in 0..100_000u64 {
            sample_channel_into(&params, StreamSeed::new(9, trial), &mut g);
            let (q1, q2) = (q.reconstruct(q.level(g[0])), q.reconstruct(q.level(g[1])));
            let (hs, hw, qs, qw) =
                if q1 >= q2 { (g[0], g[1], q1, q2) } else { (g[1], g[0], q2, q1) };
            assert!(achievable_check(hs, hw, qs, qw, p), "trial {trial} gains {g:?}");
        }
    }
}

#[test]
fn measured_vle_rate_below_bound() {
    let mut g = [0.0; 2];
    for &lambda in &[0.25, 0.5, 1.0, 2.0] {
        let params = ChannelParams::new(vec![lambda, lambda]).unwrap();
        for &delta in &[0.005, 0.01, 0.05, 0.1, 0.2, 0.5] {
            let q = QuantizerConfig::with_default_t(delta, lambda, Flavor::RateAdaptation).unwrap();
            let n = 1_000_000u64;
            let mut bits = 0u64;
            for trial in 0..n {
                sample_channel_into(&params, StreamSeed::new(2, trial), &mut g);
                bits += vle_len(q.level(g[0])) as u64;
            }
            let mean = bits as f64 / n as f64;
            assert!(mean <= vle_rate_bound(delta, lambda), "lambda {lambda} delta {delta}: {mean}");
        }
    }
}
