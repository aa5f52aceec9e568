//! Acceptance gate: one test per numbered criterion, each printing a single
//! `criterion N: PASS/FAIL (...)` line. The criteria pin the library's
//! headline numbers — worst-case tightness, peak cost ratios, closed-form
//! identities, and simulation/analysis cross-validation — at fixed
//! tolerances and wall-clock budgets.

use std::time::Instant;

use elastic_cache::adversary::{self, AdversaryConfig};
use elastic_cache::analytic::{self, sweep_peak, CurvePolicy, SweepGrid};
use elastic_cache::closed_form::closed_form_cost;
use elastic_cache::multifile::multifile_peak;
use elastic_cache::policy::{self, competitive_ratio, offline_optimal_cost, simulate};
use elastic_cache::trace_io::generate_trace;
use elastic_cache::{
    CostParams, DistFamily, InterRequestDistribution, PolicySpec, SimOptions, ZipfCatalog,
};

/// Prints the criterion's verdict line; failing criteria panic with it.
fn criterion(n: u32, ok: bool, detail: String) {
    if ok {
        println!("criterion {n}: PASS ({detail})");
    } else {
        panic!("criterion {n}: FAIL ({detail})");
    }
}

fn costs() -> CostParams {
    CostParams::new(1.0).expect("unit remote cost")
}

#[test]
fn criterion_01_even_spacing_tightness() {
    let start = Instant::now();
    let trace = adversary::even_trace(1.0 + 1e-6, 10_000).expect("valid spacing");
    let policy = PolicySpec::always_on_mth(1, 1.0).expect("valid policy");
    let ratio = competitive_ratio(&trace, &policy, &costs()).expect("non-empty trace");
    let elapsed = start.elapsed().as_secs_f64();
    criterion(
        1,
        (ratio - 2.0).abs() <= 2.0 * 0.005 && elapsed < 1.0,
        format!("even spacing R+1e-6, n=1e4: ratio {ratio} vs 2.0 +/- 0.5%, {elapsed:.2}s < 1s"),
    );
}

#[test]
fn criterion_02_batch_tightness_of_mth_policies() {
    let mut ok = true;
    let mut details = Vec::new();
    for m in [2u32, 3, 4] {
        let start = Instant::now();
        let cfg = AdversaryConfig::new(m, 1000, 1.0, 1.0).expect("valid batch config");
        let trace = adversary::batch_trace(&cfg);
        let bound = f64::from(m) + 1.0;
        for policy in [
            PolicySpec::always_on_mth(m, 1.0).expect("valid policy"),
            PolicySpec::single_window_mth(m, 1.0).expect("valid policy"),
        ] {
            let ratio = adversary::trace_ratios(&trace, &policy, &costs())
                .expect("non-empty trace")
                .with_trailing_ttl;
            ok &= (ratio - bound).abs() <= 0.01 * bound;
            details.push(format!("{}: {ratio:.4}", policy.label()));
        }
        let elapsed = start.elapsed().as_secs_f64();
        ok &= elapsed < 1.0;
        details.push(format!("M={m} in {elapsed:.2}s"));
    }
    criterion(
        2,
        ok,
        format!("batch eps=1e-4, 1e3 batches, ratios vs M+1 +/- 1%: {}", details.join("; ")),
    );
}

#[test]
fn criterion_03_dual_window_tightness_and_safety() {
    let policy = PolicySpec::dual_window_2nd(1.0, 1.0).expect("valid policy");
    let cfg = AdversaryConfig::new(2, 1000, 1.0, 1.0).expect("valid batch config");
    let batch_ratio = adversary::trace_ratios(&adversary::batch_trace(&cfg), &policy, &costs())
        .expect("non-empty trace")
        .with_trailing_ttl;
    let search = adversary::random_adversary_search(&policy, &costs(), 10_000, 42)
        .expect("search runs");
    let worst = search.worst.with_trailing_ttl;
    criterion(
        3,
        (batch_ratio - 3.0).abs() <= 0.03 && worst <= 3.0 + 1e-9,
        format!(
            "pair batch ratio {batch_ratio:.4} vs 3 +/- 1%; worst of 1e4 random trials \
             (seed 42) {worst:.6} <= 3 + 1e-9"
        ),
    );
}

#[test]
fn criterion_04_exponential_baseline_peak() {
    let peak = sweep_peak(
        DistFamily::Exponential,
        1.0,
        1.0,
        1.0,
        CurvePolicy::StaticBaseline,
        &SweepGrid::default(),
    )
    .expect("valid sweep");
    criterion(
        4,
        (peak.value - 1.581977).abs() <= 1e-5 && (peak.rate - 1.0).abs() <= 1e-3,
        format!(
            "baseline/offline peak {:.7} vs 1.581977 +/- 1e-5 at rate {:.5} vs 1 +/- 1e-3",
            peak.value, peak.rate
        ),
    );
}

#[test]
fn criterion_05_exponential_window2_peak() {
    let peak = sweep_peak(
        DistFamily::Exponential,
        1.0,
        1.0,
        1.0,
        CurvePolicy::SingleWindowMth { m: 2 },
        &SweepGrid::default(),
    )
    .expect("valid sweep");
    criterion(
        5,
        (peak.value - 1.588).abs() <= 0.002 && (peak.rate - 1.05236).abs() <= 1e-3,
        format!(
            "window-2 peak ratio {:.7} vs pinned 1.588 +/- 0.002 at rate {:.7} vs \
             1.05236 +/- 1e-3; the curve's true maximum, by both the analytic sweep \
             and direct refinement of (rate*(1-F^2)+F^2)/F with F = 1-exp(-rate), \
             is 1.5827283 — the pinned value seems to be a misrounding of it",
            peak.value, peak.rate
        ),
    );
}

#[test]
fn criterion_06_low_rate_asymptotes() {
    let d = DistFamily::Exponential.at_normalized_rate(1e-6, 1.0).expect("valid rate");
    let offline = analytic::offline_cost(d, 1.0).per_time_unit;
    let mut ok = true;
    let mut details = Vec::new();
    for m in [1u32, 2, 4] {
        let ratio = analytic::always_mth_cost(d, 1.0, 1.0, m).expect("valid m").per_time_unit
            / offline;
        let limit = (f64::from(m) + 1.0) / f64::from(m);
        ok &= (ratio - limit).abs() <= 1e-4;
        details.push(format!("always-{m}: {ratio:.6} vs {limit:.4}"));
    }
    for m in [2u32, 4] {
        let ratio =
            analytic::single_window_mth_cost(d, 1.0, 1.0, m).expect("valid m").per_time_unit
                / offline;
        ok &= (ratio - 1.0).abs() <= 1e-4;
        details.push(format!("window-{m}: {ratio:.6} vs 1"));
    }
    criterion(6, ok, format!("rate 1e-6 asymptotes +/- 1e-4: {}", details.join("; ")));
}

#[test]
fn criterion_07_erlang_baseline_ratio() {
    let mut ok = true;
    let mut details = Vec::new();
    for k in [1u32, 2, 4, 8] {
        // Stage rate k gives mean gap R = 1.
        let d = InterRequestDistribution::erlang(k, f64::from(k)).expect("valid shape");
        let ratio = analytic::static_baseline_cost(d, 1.0).per_time_unit
            / analytic::offline_cost(d, 1.0).per_time_unit;
        // k^k / k! built as a running product to stay in range.
        let kk_over_fact: f64 = (1..=k).map(|i| f64::from(k) / f64::from(i)).product();
        let expected = 1.0 / (1.0 - (-f64::from(k)).exp() * kk_over_fact);
        ok &= (ratio - expected).abs() <= 1e-8;
        details.push(format!("k={k}: {ratio:.9} vs {expected:.9}"));
        if k == 1 {
            ok &= (expected - 1.0 / (1.0 - (-1.0f64).exp())).abs() < 1e-15;
        }
    }
    criterion(7, ok, format!("baseline/offline at mean gap R +/- 1e-8: {}", details.join("; ")));
}

#[test]
fn criterion_08_deterministic_baseline_is_offline_optimal() {
    let mut ok = true;
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let gaps = SweepGrid::new(1e-2, 1e2, 10).expect("valid grid").rates();
    for &gap in &gaps {
        for remote in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let d = InterRequestDistribution::deterministic(gap).expect("positive gap");
            let baseline = closed_form_cost(d, remote, remote, remote, CurvePolicy::StaticBaseline)
                .expect("valid parameters");
            let offline = closed_form_cost(d, remote, remote, remote, CurvePolicy::Offline)
                .expect("valid parameters");
            if baseline != offline {
                ok = false;
                worst = (gap, remote, baseline / offline);
            }
        }
    }
    criterion(
        8,
        ok,
        if ok {
            "baseline == offline bit-exactly over the 50-point (gap, R) grid".to_string()
        } else {
            format!("ratio {} != 1 at gap {}, R {}", worst.2, worst.0, worst.1)
        },
    );
}

#[test]
fn criterion_09_pareto_baseline_diverges() {
    let mut ratios = Vec::new();
    for exponent in 1..=4 {
        let q = 10f64.powi(-exponent); // t_m / R
        let alpha = 1.0 / (1.0 - q);
        let d = InterRequestDistribution::pareto(alpha, q).expect("valid tail");
        ratios.push(
            analytic::static_baseline_cost(d, 1.0).per_time_unit
                / analytic::offline_cost(d, 1.0).per_time_unit,
        );
    }
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    criterion(
        9,
        increasing && ratios[3] > 5.0,
        format!(
            "t_m/R in {{1e-1..1e-4}}, alpha = 1/(1 - t_m/R): ratios {:?} strictly \
             increasing and final > 5",
            ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>()
        ),
    );
}

/// Simulation estimate of a policy's steady-state cost per unit time:
/// `runs` independent seeded traces of `gaps` inter-request gaps each,
/// trailing storage clipped at the final request. Returns the run mean, the
/// standard error across runs, and a startup/tail bias allowance of two
/// renewal cycles' worth of cost per run.
fn simulated_per_time(
    d: InterRequestDistribution,
    policy: &PolicySpec,
    runs: usize,
    gaps: usize,
    seed0: u64,
) -> (f64, f64, f64) {
    let opts = SimOptions { horizon: None, truncate_at_horizon: true };
    let mut estimates = Vec::with_capacity(runs);
    let mut inv_durations = 0.0;
    for run in 0..runs {
        let trace = generate_trace(d, gaps + 1, seed0 + run as u64).expect("valid trace");
        let report = simulate(&trace, policy, &costs(), &opts).expect("valid simulation");
        let duration = trace.last_timestamp().expect("non-empty trace");
        estimates.push(report.total() / duration);
        inv_durations += 1.0 / duration;
    }
    let mean = estimates.iter().sum::<f64>() / runs as f64;
    let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (runs - 1) as f64;
    let se = (var / runs as f64).sqrt();
    let m = match *policy {
        PolicySpec::AlwaysOnMth { m, .. } | PolicySpec::SingleWindowMth { m, .. } => f64::from(m),
        _ => 2.0,
    };
    let cycle_cost = m * 1.0 + 1.0 + 1.0; // worst renewal: M fetches + TTL + one more fetch
    let bias = 2.0 * cycle_cost * inv_durations / runs as f64;
    (mean, se, bias)
}

#[test]
fn criterion_10_simulation_matches_closed_forms() {
    let start = Instant::now();
    let families = [
        DistFamily::Exponential,
        DistFamily::Erlang { shape: 4 },
        DistFamily::Deterministic,
        DistFamily::Pareto { shape: 2.0 },
    ];
    let rates = SweepGrid::new(1e-2, 1e3, 5).expect("valid grid").rates();
    let policies = [
        (PolicySpec::always_on_mth(1, 1.0).expect("valid"), CurvePolicy::AlwaysOnMth { m: 1 }),
        (PolicySpec::always_on_mth(2, 1.0).expect("valid"), CurvePolicy::AlwaysOnMth { m: 2 }),
        (
            PolicySpec::single_window_mth(2, 1.0).expect("valid"),
            CurvePolicy::SingleWindowMth { m: 2 },
        ),
        (
            PolicySpec::single_window_mth(4, 1.0).expect("valid"),
            CurvePolicy::SingleWindowMth { m: 4 },
        ),
        (PolicySpec::dual_window_2nd(1.0, 1.0).expect("valid"), CurvePolicy::DualWindow2nd),
    ];
    // 16 runs x 62,500 gaps = 1e6 simulated gaps per (family, rate, policy).
    let (runs, gaps) = (16, 62_500);
    let combos: Vec<(usize, usize)> = (0..families.len())
        .flat_map(|f| (0..rates.len()).map(move |r| (f, r)))
        .collect();
    let results = elastic_cache::parallel::map_range(combos.len(), |c| {
        let (f, r) = combos[c];
        let d = families[f].at_normalized_rate(rates[r], 1.0).expect("valid rate");
        let mut failures = Vec::new();
        for (i, (policy, curve)) in policies.iter().enumerate() {
            let reference = closed_form_cost(d, 1.0, 1.0, 1.0, *curve).expect("valid parameters");
            let (mean, se, bias) =
                simulated_per_time(d, policy, runs, gaps, (c * 64 + i * 8) as u64);
            let gap = (mean - reference).abs();
            if gap > 3.0 * se + bias {
                failures.push(format!(
                    "{} {} rate {:.3}: sim {mean:.6} vs closed form {reference:.6} \
                     (|diff| {gap:.2e} > 3se {:.2e} + bias {:.2e})",
                    d, policy.label(), rates[r], 3.0 * se, bias
                ));
            }
        }
        failures
    });
    let failures: Vec<String> = results.into_iter().flatten().collect();
    let elapsed = start.elapsed().as_secs_f64();
    criterion(
        10,
        failures.is_empty() && elapsed < 120.0,
        if failures.is_empty() {
            format!(
                "4 families x 5 rates x 5 policies, 1e6 gaps each, all within \
                 3 standard errors of the closed forms; {elapsed:.0}s < 120s"
            )
        } else {
            format!("{} mismatches ({elapsed:.0}s): {}", failures.len(), failures.join(" | "))
        },
    );
}

#[test]
fn criterion_11_closed_forms_match_generic_route() {
    let dists = [
        DistFamily::Exponential,
        DistFamily::Erlang { shape: 3 },
        DistFamily::Deterministic,
        DistFamily::Pareto { shape: 1.5 },
    ];
    let policies = [
        CurvePolicy::Offline,
        CurvePolicy::StaticBaseline,
        CurvePolicy::AlwaysOnMth { m: 1 },
        CurvePolicy::AlwaysOnMth { m: 2 },
        CurvePolicy::AlwaysOnMth { m: 5 },
        CurvePolicy::SingleWindowMth { m: 2 },
        CurvePolicy::SingleWindowMth { m: 4 },
        CurvePolicy::DualWindow2nd,
    ];
    let rates = SweepGrid::new(1e-2, 1e3, 100).expect("valid grid").rates();
    let mut worst: (f64, String) = (0.0, String::new());
    for family in dists {
        for &rate in &rates {
            let d = family.at_normalized_rate(rate, 1.0).expect("valid rate");
            for policy in policies {
                let generic = analytic::curve_cost(d, 1.0, 1.0, 1.0, policy)
                    .expect("valid parameters")
                    .per_time_unit;
                let closed = closed_form_cost(d, 1.0, 1.0, 1.0, policy).expect("valid parameters");
                let rel = (closed - generic).abs() / generic.abs().max(f64::MIN_POSITIVE);
                if rel > worst.0 {
                    worst = (rel, format!("{d} {} rate {rate:.3}", policy.label()));
                }
            }
        }
    }
    criterion(
        11,
        worst.0 <= 1e-10,
        format!(
            "4 families x 100 rates x 8 policies: worst relative gap {:.2e} ({}) vs 1e-10",
            worst.0, worst.1
        ),
    );
}

#[test]
fn criterion_12_zipf_catalog_window2_peak() {
    let start = Instant::now();
    let catalog = ZipfCatalog::new(1_000_000, 1.0, 1.0, DistFamily::Exponential)
        .expect("valid catalog");
    let peak = multifile_peak(
        &catalog,
        1.0,
        1.0,
        1.0,
        CurvePolicy::SingleWindowMth { m: 2 },
        &SweepGrid::default(),
    )
    .expect("valid sweep");
    let elapsed = start.elapsed().as_secs_f64();
    criterion(
        12,
        (peak.value - 1.4).abs() <= 0.05 && elapsed < 300.0,
        format!(
            "1e6-file zipf(1) aggregate window-2 peak {:.5} vs 1.4 +/- 0.05 \
             (at per-file rate {:.3}); {elapsed:.0}s < 300s",
            peak.value, peak.rate
        ),
    );
}

#[test]
fn criterion_13_dominance_equivalences_accounting_determinism() {
    let families = [
        DistFamily::Exponential,
        DistFamily::Erlang { shape: 2 },
        DistFamily::Deterministic,
        DistFamily::Pareto { shape: 1.8 },
    ];
    let opts = SimOptions::default();
    let mut ok = true;
    let mut detail = String::new();
    'outer: for (f, family) in families.iter().enumerate() {
        for i in 0..1000u64 {
            // Spread rates log-uniformly over the sweep range.
            let rate = 10f64.powf(-2.0 + 5.0 * (i as f64 / 999.0));
            let d = family.at_normalized_rate(rate, 1.0).expect("valid rate");
            let n = 20 + (i as usize % 181);
            let seed = f as u64 * 10_000 + i;
            let trace = generate_trace(d, n, seed).expect("valid trace");
            let offline = offline_optimal_cost(&trace, &costs());
            let a1 = simulate(
                &trace,
                &PolicySpec::always_on_mth(1, 1.0).expect("valid"),
                &costs(),
                &opts,
            )
            .expect("valid simulation");
            let w1 = simulate(
                &trace,
                &PolicySpec::single_window_mth(1, 1.0).expect("valid"),
                &costs(),
                &opts,
            )
            .expect("valid simulation");
            let w2 = simulate(
                &trace,
                &PolicySpec::single_window_mth(2, 1.0).expect("valid"),
                &costs(),
                &opts,
            )
            .expect("valid simulation");
            let dual = simulate(
                &trace,
                &PolicySpec::dual_window_2nd(1.0, 1.0).expect("valid"),
                &costs(),
                &opts,
            )
            .expect("valid simulation");
            let w4 = simulate(
                &trace,
                &PolicySpec::single_window_mth(4, 1.0).expect("valid"),
                &costs(),
                &opts,
            )
            .expect("valid simulation");

            // Dominance: no policy beats the clairvoyant floor.
            for report in [&a1, &w1, &w2, &dual, &w4] {
                if report.total() < offline.total() * (1.0 - 1e-9) {
                    ok = false;
                    detail = format!(
                        "{d} seed {seed}: policy total {} below offline {}",
                        report.total(),
                        offline.total()
                    );
                    break 'outer;
                }
            }
            // Exact policy equivalences.
            if a1 != w1 || w2 != dual {
                ok = false;
                detail = format!("{d} seed {seed}: equivalence identities broken");
                break 'outer;
            }
            // Accounting: bandwidth is misses times R, every request lands
            // in exactly one bucket.
            for report in [&a1, &w2, &w4] {
                if report.bandwidth_cost != report.miss_count as f64
                    || report.request_count() != n as u64
                {
                    ok = false;
                    detail = format!("{d} seed {seed}: accounting identity broken");
                    break 'outer;
                }
            }
            // Determinism: regenerating and re-simulating reproduces
            // identical reports.
            if i % 100 == 0 {
                let again = generate_trace(d, n, seed).expect("valid trace");
                let a1_again = simulate(
                    &again,
                    &PolicySpec::always_on_mth(1, 1.0).expect("valid"),
                    &costs(),
                    &opts,
                )
                .expect("valid simulation");
                if again != trace || a1_again != a1 {
                    ok = false;
                    detail = format!("{d} seed {seed}: rerun differs");
                    break 'outer;
                }
            }
        }
    }
    // Static baselines never undercut the offline floor either.
    let d = DistFamily::Exponential.at_normalized_rate(2.0, 1.0).expect("valid rate");
    let trace = generate_trace(d, 400, 7).expect("valid trace");
    let offline = offline_optimal_cost(&trace, &costs());
    let horizon = trace.last_timestamp().expect("non-empty trace");
    let oracle = policy::static_oracle_cost(&trace, &costs(), horizon).expect("valid horizon");
    ok &= oracle.total() >= offline.total() * (1.0 - 1e-9);
    criterion(
        13,
        ok,
        if detail.is_empty() {
            "dominance, exact equivalences, accounting, and determinism hold on \
             1000 random traces per family"
                .to_string()
        } else {
            detail
        },
    );
}
