use multigrowth::analytics::{
    async_rate, async_rate_limit, geometric_rate, kelly_rate, shared_rate, shared_rate_limit,
};
use multigrowth::{GameParams, KellyParams};
use proptest::prelude::*;

/// Direct summation with linear-space binomial weights; exact enough while
/// `C(N, k)` and `p^k` stay far from the f64 range limits.
fn naive_shared_rate(a: f64, b: f64, p: f64, n: usize) -> f64 {
    let q = 1.0 - p;
    let mut choose = 1.0f64;
    let mut total = 0.0;
    for k in 0..=n {
        if k > 0 {
            choose = choose * (n - k + 1) as f64 / k as f64;
        }
        let weight = choose * p.powi(k as i32) * q.powi((n - k) as i32);
        let factor = (a * k as f64 + b * (n - k) as f64) / n as f64;
        total += weight * factor.ln();
    }
    total
}

fn game() -> impl Strategy<Value = GameParams> {
    (0.05f64..0.95, 0.01f64..0.99, 1.01f64..6.0)
        .prop_map(|(p, b, a)| GameParams::new(a, b, p).unwrap())
}

proptest! {
    #[test]
    fn log_space_sum_matches_naive_sum(g in game(), n in 1usize..=60) {
        let fast = shared_rate(&g, n).unwrap();
        let naive = naive_shared_rate(g.a(), g.b(), g.p(), n);
        prop_assert!((fast - naive).abs() <= 1e-12, "N = {n}: {fast} vs {naive}");
    }

    #[test]
    fn sharing_chain_is_monotone(g in game(), n in 1usize..200) {
        let r_n = shared_rate(&g, n).unwrap();
        let r_next = shared_rate(&g, n + 1).unwrap();
        let slack = 1e-13;
        prop_assert!(geometric_rate(&g).unwrap() <= r_n + slack);
        prop_assert!(r_n <= r_next + slack);
        prop_assert!(r_next <= shared_rate_limit(&g) + slack);
    }

    #[test]
    fn arithmetic_beats_geometric(g in game()) {
        prop_assert!(shared_rate_limit(&g) >= geometric_rate(&g).unwrap());
    }

    #[test]
    fn async_increases_towards_limit(g in game(), n in 1usize..500) {
        let r = async_rate(&g, n).unwrap();
        prop_assert!(r <= async_rate(&g, n + 1).unwrap() + 1e-13);
        prop_assert!(r <= async_rate_limit(&g) + 1e-13);
        prop_assert!(async_rate_limit(&g) >= shared_rate_limit(&g));
    }

    #[test]
    fn kelly_rate_is_shared_rate_of_converted_game(
        p in 0.05f64..0.95, d in 0.1f64..4.0, f in 0.01f64..0.95, n in 1usize..40,
    ) {
        let kp = KellyParams::new(p, d, f).unwrap();
        let direct = kelly_rate(&kp, n).unwrap();
        let via_game = shared_rate(&kp.to_game(), n).unwrap();
        prop_assert!((direct - via_game).abs() <= 1e-13);
    }
}

#[test]
fn equality_in_am_gm_only_for_constant_game() {
    let flat = GameParams::new(1.3, 1.3, 0.4).unwrap();
    assert!((shared_rate_limit(&flat) - geometric_rate(&flat).unwrap()).abs() < 1e-15);
    let tilted = GameParams::new(1.3, 1.2, 0.4).unwrap();
    assert!(shared_rate_limit(&tilted) > geometric_rate(&tilted).unwrap());
}

#[test]
fn huge_groups_stay_finite() {
    let g = GameParams::new(2.0, 1.0 / 3.0, 0.5).unwrap();
    let r = shared_rate(&g, 1_000_000).unwrap();
    let deficit = shared_rate_limit(&g) - r;
    // ln M_a - r_N ~ D / (2N) with D ~ 0.51
    assert!((deficit * 2e6 - 0.510).abs() < 0.01, "deficit {deficit}");
}
