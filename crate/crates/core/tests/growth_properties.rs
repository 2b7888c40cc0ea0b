use phyto_core::growth::GrowthParams;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = GrowthParams> {
    (0.01f64..0.2, 20.0f64..200.0, 0.005f64..0.45).prop_map(|(r, k, frac)| GrowthParams::new(r, k, frac * k).unwrap())
}

/// Bisection on `length_at` for the L0 that hits `target` at `t`.
fn l0_by_bisection(r: f64, k: f64, t: f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (1e-9, k - 1e-9);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let l = GrowthParams::new(r, k, mid).unwrap().length_at(t).unwrap();
        if l < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn default_initial_lengths_follow_forty_hour_anchors() {
    let dark = l0_by_bisection(0.0792, 105.0, 40.0, 46.4);
    let light = l0_by_bisection(0.05, 65.1, 40.0, 16.3);
    assert!((dark - GrowthParams::DARK.l0()).abs() < 5e-4, "{dark}");
    assert!((light - GrowthParams::LIGHT.l0()).abs() < 1e-4, "{light}");
}

#[test]
fn rate_is_maximal_at_peak_on_dense_grid() {
    for p in [GrowthParams::DARK, GrowthParams::LIGHT] {
        let peak = p.peak_rate();
        let best = (0..20_000).map(|i| i as f64 * 0.01).map(|t| p.rate_at(t).unwrap()).fold(0.0, f64::max);
        assert!(best <= peak.rate * (1.0 + 1e-12));
        assert!(best >= peak.rate * (1.0 - 1e-6));
    }
}

proptest! {
    #[test]
    fn inversion_round_trip(p in params(), u in 0.001f64..0.999) {
        let target = p.l0() + u * (p.k() - p.l0());
        let t = p.time_to_length(target).unwrap();
        let back = p.length_at(t).unwrap();
        prop_assert!(((back - target) / target).abs() < 1e-9);
    }

    #[test]
    fn monotone_and_bounded(p in params(), t1 in 0.0f64..100.0, gap in 1e-3f64..50.0) {
        let a = p.length_at(t1).unwrap();
        let b = p.length_at(t1 + gap).unwrap();
        prop_assert!(b > a);
        prop_assert!(a >= p.l0());
        prop_assert!(b < p.k());
    }

    #[test]
    fn rate_matches_central_difference(p in params(), t in 0.01f64..100.0) {
        let h = 1e-4;
        let fd = (p.length_at(t + h).unwrap() - p.length_at(t - h).unwrap()) / (2.0 * h);
        let rate = p.rate_at(t).unwrap();
        prop_assert!(rate > 0.0);
        // Past saturation the difference quotient is pure rounding noise.
        prop_assume!(rate > 1e-3);
        prop_assert!(((rate - fd) / rate).abs() < 1e-5, "rate {} fd {}", rate, fd);
    }

    #[test]
    fn peak_rate_is_attained(p in params()) {
        let peak = p.peak_rate();
        prop_assert!((peak.length_at_peak - p.k() / 2.0).abs() < 1e-12);
        prop_assert!((peak.rate - p.r() * p.k() / 4.0).abs() < 1e-12 * peak.rate);
        if peak.time_at_peak >= 0.0 {
            let at = p.rate_at(peak.time_at_peak).unwrap();
            prop_assert!(((at - peak.rate) / peak.rate).abs() < 1e-9);
        }
    }
}
