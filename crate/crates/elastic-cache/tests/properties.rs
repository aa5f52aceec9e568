//! Property tests for the invariants the cost model is built on: the
//! clairvoyant lower bound really is a lower bound, the exact policy
//! equivalences hold request-for-request, cost accounting balances, trace
//! I/O round-trips, and everything seeded is reproducible.

use std::io::Cursor;

use proptest::prelude::*;

use elastic_cache::analytic::{self, CurvePolicy};
use elastic_cache::closed_form::closed_form_cost;
use elastic_cache::policy::{
    competitive_ratio, offline_optimal_cost, simulate, simulate_per_object, static_oracle_cost,
};
use elastic_cache::trace_io::{generate_trace, read_trace, write_trace};
use elastic_cache::{
    CostParams, InterRequestDistribution, PolicySpec, RequestTrace, SimOptions,
};

const NAMES: [&str; 4] = ["alpha", "beta", "gamma", "delta"];

/// Multi-object traces with mixed sizes and arbitrary interleavings.
/// Strictly positive global gaps keep per-object timestamps strictly
/// increasing, which is all the trace contract demands.
fn arb_trace() -> impl Strategy<Value = RequestTrace> {
    let sizes = prop::collection::vec(0.1f64..8.0, NAMES.len());
    let steps = prop::collection::vec((0..NAMES.len(), 1e-3f64..4.0), 1..120);
    (sizes, steps).prop_map(|(sizes, steps)| {
        let mut t = 0.0;
        let rows: Vec<(f64, usize)> = steps
            .into_iter()
            .map(|(obj, gap)| {
                t += gap;
                (t, obj)
            })
            .collect();
        RequestTrace::from_rows(rows.iter().map(|&(t, o)| (t, NAMES[o], sizes[o])))
            .expect("rows are strictly increasing")
    })
}

fn arb_ttl() -> impl Strategy<Value = f64> {
    0.05f64..5.0
}

fn arb_policy() -> impl Strategy<Value = PolicySpec> {
    prop_oneof![
        (1u32..=5, arb_ttl()).prop_map(|(m, ttl)| {
            PolicySpec::always_on_mth(m, ttl).expect("valid policy")
        }),
        (1u32..=5, arb_ttl()).prop_map(|(m, ttl)| {
            PolicySpec::single_window_mth(m, ttl).expect("valid policy")
        }),
        (arb_ttl(), 0.0f64..=1.0).prop_map(|(ttl, frac)| {
            PolicySpec::dual_window_2nd(frac * ttl, ttl).expect("window <= ttl")
        }),
        Just(PolicySpec::StaticAlwaysLocal),
        Just(PolicySpec::StaticAlwaysRemote),
    ]
}

fn arb_dist() -> impl Strategy<Value = InterRequestDistribution> {
    let rate = (-2.0f64..3.0).prop_map(|e| 10f64.powf(e));
    prop_oneof![
        rate.clone().prop_map(|r| InterRequestDistribution::exponential(r).expect("positive")),
        (1u32..=8, rate.clone()).prop_map(|(k, r)| {
            InterRequestDistribution::erlang(k, r).expect("valid shape")
        }),
        rate.clone().prop_map(|g| InterRequestDistribution::deterministic(g).expect("positive")),
        (1.05f64..4.0, rate).prop_map(|(a, s)| {
            InterRequestDistribution::pareto(a, s).expect("valid tail")
        }),
    ]
}

proptest! {
    /// No insertion policy, online or static, undercuts the clairvoyant
    /// per-object floor — under either tail convention.
    #[test]
    fn no_policy_beats_the_offline_floor(
        trace in arb_trace(),
        policy in arb_policy(),
        remote in 0.1f64..10.0,
    ) {
        let costs = CostParams::new(remote).expect("positive remote cost");
        let floor = offline_optimal_cost(&trace, &costs).total();
        for truncate in [false, true] {
            let opts = SimOptions { horizon: None, truncate_at_horizon: truncate };
            let report = simulate(&trace, &policy, &costs, &opts).expect("valid simulation");
            prop_assert!(
                report.total() >= floor * (1.0 - 1e-9),
                "{} scored {} below the offline floor {floor} (truncate: {truncate})",
                policy.label(),
                report.total(),
            );
        }
        let ratio = competitive_ratio(&trace, &policy, &costs).expect("non-empty trace");
        prop_assert!(ratio >= 1.0 - 1e-9, "competitive ratio {ratio} below 1");
    }

    /// The static oracle picks the better of its two arms, so it can never
    /// beat the offline floor either, and never loses to always-remote.
    #[test]
    fn static_oracle_sits_between_floor_and_remote(
        trace in arb_trace(),
        remote in 0.1f64..10.0,
        slack in 0.0f64..5.0,
    ) {
        let costs = CostParams::new(remote).expect("positive remote cost");
        let horizon = trace.last_timestamp().expect("non-empty trace") + slack;
        let oracle = static_oracle_cost(&trace, &costs, horizon).expect("valid horizon").total();
        let floor = offline_optimal_cost(&trace, &costs).total();
        let opts = SimOptions { horizon: Some(horizon), truncate_at_horizon: true };
        let all_remote =
            simulate(&trace, &PolicySpec::StaticAlwaysRemote, &costs, &opts)
                .expect("valid simulation")
                .total();
        prop_assert!(oracle >= floor * (1.0 - 1e-9));
        prop_assert!(oracle <= all_remote * (1.0 + 1e-9));
    }

    /// With M = 1 the qualifying window never comes into play: cache-on-first
    /// is the same policy under both run definitions, decision for decision.
    #[test]
    fn m1_policies_are_the_same_policy(trace in arb_trace(), ttl in arb_ttl()) {
        let costs = CostParams::new(1.0).expect("unit remote cost");
        let opts = SimOptions::default();
        let always = simulate(
            &trace,
            &PolicySpec::always_on_mth(1, ttl).expect("valid policy"),
            &costs,
            &opts,
        )
        .expect("valid simulation");
        let windowed = simulate(
            &trace,
            &PolicySpec::single_window_mth(1, ttl).expect("valid policy"),
            &costs,
            &opts,
        )
        .expect("valid simulation");
        prop_assert_eq!(always, windowed);
    }

    /// With W = T the dual-window policy degenerates to the single-window
    /// pair rule: a qualifying second request is exactly one within the TTL.
    #[test]
    fn full_width_dual_window_is_single_window_pairing(
        trace in arb_trace(),
        ttl in arb_ttl(),
        remote in 0.1f64..10.0,
    ) {
        let costs = CostParams::new(remote).expect("positive remote cost");
        let opts = SimOptions::default();
        let dual = simulate(
            &trace,
            &PolicySpec::dual_window_2nd(ttl, ttl).expect("valid policy"),
            &costs,
            &opts,
        )
        .expect("valid simulation");
        let windowed = simulate(
            &trace,
            &PolicySpec::single_window_mth(2, ttl).expect("valid policy"),
            &costs,
            &opts,
        )
        .expect("valid simulation");
        prop_assert_eq!(dual, windowed);
    }

    /// Cost accounting balances: every request is a hit or a miss, the
    /// per-object reports absorb into the aggregate exactly, and bandwidth
    /// is the remote cost times the sizes actually fetched.
    #[test]
    fn reports_account_for_every_request(
        trace in arb_trace(),
        policy in arb_policy(),
        remote in 0.1f64..10.0,
    ) {
        let costs = CostParams::new(remote).expect("positive remote cost");
        let opts = SimOptions::default();
        let total = simulate(&trace, &policy, &costs, &opts).expect("valid simulation");
        prop_assert_eq!(total.request_count(), trace.request_count() as u64);

        let per_object = simulate_per_object(&trace, &policy, &costs, &opts)
            .expect("valid simulation");
        let mut folded = elastic_cache::CostReport::default();
        let mut fetched = 0.0;
        for (obj, report) in trace.objects().iter().zip(&per_object) {
            folded.absorb(report);
            fetched += report.miss_count as f64 * obj.size;
        }
        prop_assert_eq!(folded, total);
        prop_assert!(
            (total.bandwidth_cost - remote * fetched).abs()
                <= 1e-9 * total.bandwidth_cost.max(1.0)
        );
    }

    /// The CSV writer emits shortest round-trip floats, so a write/read
    /// cycle reproduces the trace exactly, including request order and the
    /// unit-size column elision.
    #[test]
    fn trace_io_round_trips(trace in arb_trace()) {
        let mut buf = Vec::new();
        write_trace(&mut buf, &trace).expect("write to memory");
        let reread = read_trace(Cursor::new(buf)).expect("written traces parse");
        prop_assert_eq!(reread, trace);
    }

    /// Seeded generation is reproducible and respects the trace contract.
    #[test]
    fn generation_is_deterministic(
        d in arb_dist(),
        n in 1usize..200,
        seed in any::<u64>(),
    ) {
        let a = generate_trace(d, n, seed).expect("valid trace");
        let b = generate_trace(d, n, seed).expect("valid trace");
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.request_count(), n);
    }

    /// The steady-state curves obey the same dominance as the simulator:
    /// no policy's expected cost rate sits below the clairvoyant rate, and
    /// the per-family closed forms agree with the generic integral route
    /// at arbitrary (not just unit) parameters.
    #[test]
    fn analytic_curves_dominate_and_agree(
        d in arb_dist(),
        remote in 0.1f64..10.0,
        ttl in arb_ttl(),
        frac in 0.01f64..=1.0,
        m in 1u32..=5,
    ) {
        let window = frac * ttl;
        let floor = analytic::offline_cost(d, remote).per_time_unit;
        for policy in [
            CurvePolicy::StaticBaseline,
            CurvePolicy::AlwaysOnMth { m },
            CurvePolicy::SingleWindowMth { m },
            CurvePolicy::DualWindow2nd,
        ] {
            let generic = analytic::curve_cost(d, remote, ttl, window, policy)
                .expect("valid parameters")
                .per_time_unit;
            prop_assert!(
                generic >= floor * (1.0 - 1e-9),
                "{policy:?} rate {generic} below offline rate {floor}"
            );
            let closed = closed_form_cost(d, remote, ttl, window, policy)
                .expect("valid parameters");
            prop_assert!(
                (closed - generic).abs() <= 1e-9 * generic.abs().max(f64::MIN_POSITIVE),
                "{policy:?}: closed form {closed} vs generic {generic}"
            );
        }
    }
}
