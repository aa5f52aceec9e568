//! Insertion-policy state machines, the event-driven cost simulator, and the
//! offline-optimal and static-oracle baselines.
//!
//! All TTL policies share one eviction rule: an object leaves the cache once
//! a TTL `T` elapses with no request for it. They differ only in when a
//! missed object is inserted. Boundary ties are inclusive on the
//! caching-friendly side: a gap of exactly `T` keeps the object cached, and
//! a gap of exactly `W` counts as within the dual window.

use crate::cost::{CostParams, CostReport};
use crate::error::ModelError;
use crate::parallel;
use crate::trace::{RequestTrace, TraceObject};

/// An insertion policy with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicySpec {
    /// Insert on the M-th miss since the last eviction, however spread out.
    AlwaysOnMth {
        /// Miss count required for insertion (M >= 1; M = 1 inserts on first request).
        m: u32,
        /// Eviction TTL.
        ttl: f64,
    },
    /// Insert on the M-th request of a run of requests each within `ttl` of
    /// the previous one; a larger gap restarts the run.
    SingleWindowMth {
        /// Run length required for insertion (M >= 1).
        m: u32,
        /// Both the qualifying window and the eviction TTL.
        ttl: f64,
    },
    /// Insert on a miss that falls within `window` of the previous
    /// post-eviction request; otherwise remember the miss.
    DualWindow2nd {
        /// Qualifying window for the second request (W <= T).
        window: f64,
        /// Eviction TTL.
        ttl: f64,
    },
    /// Fetch once on the first request, then stay cached to the horizon.
    StaticAlwaysLocal,
    /// Never cache; every request pays the remote cost.
    StaticAlwaysRemote,
}

fn check_ttl(ttl: f64) -> Result<(), ModelError> {
    if !ttl.is_finite() || ttl < 0.0 {
        return Err(ModelError::Parameter(format!(
            "ttl must be non-negative and finite, got {ttl}"
        )));
    }
    Ok(())
}

impl PolicySpec {
    /// Cache-on-M-th-request over all misses since the last eviction.
    pub fn always_on_mth(m: u32, ttl: f64) -> Result<Self, ModelError> {
        if m < 1 {
            return Err(ModelError::Parameter("m must be >= 1".into()));
        }
        check_ttl(ttl)?;
        Ok(Self::AlwaysOnMth { m, ttl })
    }

    /// Cache-on-M-th-request within a single window of `ttl`.
    pub fn single_window_mth(m: u32, ttl: f64) -> Result<Self, ModelError> {
        if m < 1 {
            return Err(ModelError::Parameter("m must be >= 1".into()));
        }
        check_ttl(ttl)?;
        Ok(Self::SingleWindowMth { m, ttl })
    }

    /// Cache-on-2nd-request with a tighter qualifying window `window <= ttl`.
    pub fn dual_window_2nd(window: f64, ttl: f64) -> Result<Self, ModelError> {
        check_ttl(ttl)?;
        if !window.is_finite() || window < 0.0 {
            return Err(ModelError::Parameter(format!(
                "window must be non-negative and finite, got {window}"
            )));
        }
        if window > ttl {
            return Err(ModelError::Parameter(format!(
                "dual window requires window <= ttl, got window {window} > ttl {ttl}"
            )));
        }
        Ok(Self::DualWindow2nd { window, ttl })
    }

    /// Short CLI-style label, e.g. `always:2` or `dual:2`.
    pub fn label(&self) -> String {
        match *self {
            Self::AlwaysOnMth { m, .. } => format!("always:{m}"),
            Self::SingleWindowMth { m, .. } => format!("window:{m}"),
            Self::DualWindow2nd { .. } => "dual:2".to_string(),
            Self::StaticAlwaysLocal => "local".to_string(),
            Self::StaticAlwaysRemote => "remote".to_string(),
        }
    }

    /// The policy's TTL, for the variants that evict on one.
    pub fn ttl(&self) -> Option<f64> {
        match *self {
            Self::AlwaysOnMth { ttl, .. }
            | Self::SingleWindowMth { ttl, .. }
            | Self::DualWindow2nd { ttl, .. } => Some(ttl),
            Self::StaticAlwaysLocal | Self::StaticAlwaysRemote => None,
        }
    }
}

/// Horizon handling for trace simulation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimOptions {
    /// End of the accounting window; defaults to the last trace timestamp.
    pub horizon: Option<f64>,
    /// Clip cached intervals at the horizon instead of letting the final
    /// TTL interval run past it.
    pub truncate_at_horizon: bool,
}

/// Simulates one policy over a trace and returns the decomposed cost.
///
/// Each miss pays `size * R`; a cached object accrues storage at rate `size`
/// from insertion until eviction at `last request + ttl`. The trailing TTL
/// interval after an object's final request is included unless
/// `truncate_at_horizon` is set.
pub fn simulate(
    trace: &RequestTrace,
    policy: &PolicySpec,
    costs: &CostParams,
    opts: &SimOptions,
) -> Result<CostReport, ModelError> {
    Ok(fold_reports(simulate_per_object(trace, policy, costs, opts)?))
}

/// Per-object simulation reports, in `trace.objects()` order.
///
/// Objects are independent, so they are evaluated via the parallel map;
/// results are merged in object order, keeping the aggregate bit-identical
/// across thread counts.
pub fn simulate_per_object(
    trace: &RequestTrace,
    policy: &PolicySpec,
    costs: &CostParams,
    opts: &SimOptions,
) -> Result<Vec<CostReport>, ModelError> {
    let horizon = resolve_horizon(trace, opts)?;
    let objects = trace.objects();
    Ok(parallel::map_range(objects.len(), |i| {
        simulate_object(&objects[i], policy, costs, horizon, opts.truncate_at_horizon)
    }))
}

fn fold_reports(reports: Vec<CostReport>) -> CostReport {
    let mut total = CostReport::default();
    for r in &reports {
        total.absorb(r);
    }
    total
}

fn resolve_horizon(trace: &RequestTrace, opts: &SimOptions) -> Result<f64, ModelError> {
    let last = trace.last_timestamp().unwrap_or(0.0);
    match opts.horizon {
        Some(h) => {
            if !h.is_finite() || h < last {
                return Err(ModelError::Parameter(format!(
                    "horizon {h} must be finite and >= the last request timestamp {last}"
                )));
            }
            Ok(h)
        }
        None => Ok(last),
    }
}

/// Cost of one object under one policy. `horizon` must be at or beyond the
/// object's final request.
fn simulate_object(
    obj: &TraceObject,
    policy: &PolicySpec,
    costs: &CostParams,
    horizon: f64,
    truncate: bool,
) -> CostReport {
    let size = obj.size;
    let remote = costs.remote_cost;
    let mut report = CostReport::default();

    match *policy {
        PolicySpec::StaticAlwaysRemote => {
            report.miss_count = obj.timestamps.len() as u64;
            report.bandwidth_cost = size * remote * obj.timestamps.len() as f64;
        }
        PolicySpec::StaticAlwaysLocal => {
            // One fetch at the first request, then storage to the horizon.
            report.miss_count = 1;
            report.hit_count = obj.timestamps.len() as u64 - 1;
            report.bandwidth_cost = size * remote;
            report.storage_cost = size * (horizon - obj.timestamps[0]);
        }
        PolicySpec::AlwaysOnMth { ttl, .. }
        | PolicySpec::SingleWindowMth { ttl, .. }
        | PolicySpec::DualWindow2nd { ttl, .. } => {
            let mut cached = false;
            let mut counter: u32 = 0;
            let mut last: Option<f64> = None;
            // Dual-window: most recent uncached request since the last eviction.
            let mut anchor: Option<f64> = None;
            let mut storage_time = 0.0;

            for &t in &obj.timestamps {
                if cached {
                    let prev = last.expect("cached implies a previous request");
                    if t - prev > ttl {
                        // Lazy eviction at prev + ttl.
                        storage_time += ttl;
                        cached = false;
                        counter = 0;
                        anchor = None;
                    }
                }
                if cached {
                    storage_time += t - last.expect("cached implies a previous request");
                    report.hit_count += 1;
                } else {
                    report.miss_count += 1;
                    match *policy {
                        PolicySpec::AlwaysOnMth { m, .. } => {
                            counter += 1;
                            if counter >= m {
                                cached = true;
                                counter = 0;
                            }
                        }
                        PolicySpec::SingleWindowMth { m, .. } => {
                            counter = match last {
                                Some(prev) if t - prev <= ttl => counter + 1,
                                _ => 1,
                            };
                            if counter >= m {
                                cached = true;
                                counter = 0;
                            }
                        }
                        PolicySpec::DualWindow2nd { window, .. } => match anchor {
                            Some(a) if t - a <= window => {
                                cached = true;
                                anchor = None;
                            }
                            _ => anchor = Some(t),
                        },
                        _ => unreachable!("static policies handled above"),
                    }
                }
                last = Some(t);
            }
            if cached {
                // Trailing TTL after the final request.
                let tail = if truncate {
                    (horizon - last.expect("cached implies a request")).min(ttl)
                } else {
                    ttl
                };
                storage_time += tail;
            }
            report.bandwidth_cost = size * remote * report.miss_count as f64;
            report.storage_cost = size * storage_time;
        }
    }
    report
}

/// Clairvoyant per-gap optimum: the first request pays `R`; each later
/// request pays `min(gap, R)`, booked as storage when `gap <= R` (a hit) and
/// as another remote fetch otherwise.
pub fn offline_optimal_cost(trace: &RequestTrace, costs: &CostParams) -> CostReport {
    fold_reports(offline_optimal_per_object(trace, costs))
}

/// Per-object clairvoyant optima, in `trace.objects()` order.
pub fn offline_optimal_per_object(trace: &RequestTrace, costs: &CostParams) -> Vec<CostReport> {
    let objects = trace.objects();
    parallel::map_range(objects.len(), |i| {
        offline_optimal_object(&objects[i], costs.remote_cost)
    })
}

fn offline_optimal_object(obj: &TraceObject, remote: f64) -> CostReport {
    let mut report = CostReport {
        miss_count: 1,
        ..CostReport::default()
    };
    let mut bw_fetches = 1.0;
    let mut storage_time = 0.0;
    for w in obj.timestamps.windows(2) {
        let gap = w[1] - w[0];
        if gap <= remote {
            storage_time += gap;
            report.hit_count += 1;
        } else {
            bw_fetches += 1.0;
            report.miss_count += 1;
        }
    }
    report.bandwidth_cost = obj.size * remote * bw_fetches;
    report.storage_cost = obj.size * storage_time;
    report
}

/// Per-object best of always-remote and always-local (fetch once, store to
/// the horizon), summed over objects. Ties go to the local arm.
pub fn static_oracle_cost(
    trace: &RequestTrace,
    costs: &CostParams,
    horizon: f64,
) -> Result<CostReport, ModelError> {
    Ok(fold_reports(static_oracle_per_object(trace, costs, horizon)?))
}

/// Per-object static-oracle choices, in `trace.objects()` order.
pub fn static_oracle_per_object(
    trace: &RequestTrace,
    costs: &CostParams,
    horizon: f64,
) -> Result<Vec<CostReport>, ModelError> {
    let last = trace.last_timestamp().unwrap_or(0.0);
    if !horizon.is_finite() || horizon < last {
        return Err(ModelError::Parameter(format!(
            "horizon {horizon} must be finite and >= the last request timestamp {last}"
        )));
    }
    let objects = trace.objects();
    Ok(parallel::map_range(objects.len(), |i| {
        static_oracle_object(&objects[i], costs.remote_cost, horizon)
    }))
}

fn static_oracle_object(obj: &TraceObject, remote: f64, horizon: f64) -> CostReport {
    let mut report = CostReport::default();
    let n = obj.timestamps.len() as f64;
    let remote_total = obj.size * remote * n;
    let local_storage = obj.size * (horizon - obj.timestamps[0]);
    let local_total = obj.size * remote + local_storage;
    if remote_total < local_total {
        report.bandwidth_cost = remote_total;
        report.miss_count = obj.timestamps.len() as u64;
    } else {
        report.bandwidth_cost = obj.size * remote;
        report.storage_cost = local_storage;
        report.miss_count = 1;
        report.hit_count = obj.timestamps.len() as u64 - 1;
    }
    report
}

/// Simulated policy cost divided by the offline-optimal cost, with the
/// default horizon handling (trailing TTL included).
pub fn competitive_ratio(
    trace: &RequestTrace,
    policy: &PolicySpec,
    costs: &CostParams,
) -> Result<f64, ModelError> {
    competitive_ratio_with(trace, policy, costs, &SimOptions::default())
}

/// Simulated policy cost divided by the offline-optimal cost.
pub fn competitive_ratio_with(
    trace: &RequestTrace,
    policy: &PolicySpec,
    costs: &CostParams,
    opts: &SimOptions,
) -> Result<f64, ModelError> {
    if trace.is_empty() {
        return Err(ModelError::Parameter(
            "competitive ratio of an empty trace is undefined".into(),
        ));
    }
    let online = simulate(trace, policy, costs, opts)?;
    let offline = offline_optimal_cost(trace, costs);
    Ok(online.total() / offline.total())
}
