//! Steady-state per-time-unit costs under IID inter-request times, for every
//! policy and baseline, evaluated through the distribution primitives
//! (`cdf`, `cdf_integral`, `mean`).
//!
//! Each cost is derived from one renewal period: the expected cost spent in
//! the period divided by its expected length. `AnalyticCost` keeps both the
//! per-period pieces and the normalized rates.

use crate::dist::{DistFamily, InterRequestDistribution};
use crate::error::ModelError;

/// A steady-state cost with its components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticCost {
    /// Total cost per unit time (bandwidth rate + storage rate).
    pub per_time_unit: f64,
    /// Bandwidth (miss) spend per unit time.
    pub miss_rate_term: f64,
    /// Storage spend per unit time.
    pub storage_term: f64,
    /// Raw cost of one renewal period, before dividing by its length.
    pub per_renewal: f64,
}

impl AnalyticCost {
    /// Builds the cost from per-renewal terms and the expected period length.
    fn from_renewal(miss: f64, storage: f64, period: f64) -> Self {
        let miss_rate_term = miss / period;
        let storage_term = storage / period;
        Self {
            per_time_unit: miss_rate_term + storage_term,
            miss_rate_term,
            storage_term,
            per_renewal: miss + storage,
        }
    }
}

/// Offline-optimal cost rate: pay `min(gap, R)` per request plus the initial
/// fetch, which averages to `(R - integral_0^R F) / mean`.
pub fn offline_cost(d: InterRequestDistribution, remote: f64) -> AnalyticCost {
    let f_at_r = d.cdf(remote);
    let miss = remote * (1.0 - f_at_r);
    let storage = remote * f_at_r - d.cdf_integral(remote);
    AnalyticCost::from_renewal(miss, storage, d.mean())
}

/// Static per-object baseline: the better of never-cache (`R/mean`) and
/// always-cache (storage rate 1). Ties go to the storage arm.
pub fn static_baseline_cost(d: InterRequestDistribution, remote: f64) -> AnalyticCost {
    let never = remote / d.mean();
    if never < 1.0 {
        AnalyticCost::from_renewal(remote, 0.0, d.mean())
    } else {
        AnalyticCost::from_renewal(0.0, d.mean(), d.mean())
    }
}

/// Always-on-1st: every gap beyond `ttl` costs a miss; storage accrues for
/// `min(gap, ttl)` per renewal.
pub fn always_1st_cost(d: InterRequestDistribution, remote: f64, ttl: f64) -> AnalyticCost {
    let miss = (1.0 - d.cdf(ttl)) * remote;
    let storage = ttl - d.cdf_integral(ttl);
    AnalyticCost::from_renewal(miss, storage, d.mean())
}

/// Always-on-M-th: a renewal spends M misses, one cached stretch, and covers
/// an expected `(M - (M-1) F(ttl))` gaps.
pub fn always_mth_cost(
    d: InterRequestDistribution,
    remote: f64,
    ttl: f64,
    m: u32,
) -> Result<AnalyticCost, ModelError> {
    if m < 1 {
        return Err(ModelError::Parameter("m must be >= 1".into()));
    }
    let f = d.cdf(ttl);
    let miss = (1.0 - f) * f64::from(m) * remote;
    let storage = ttl - d.cdf_integral(ttl);
    let period = d.mean() * (f64::from(m) - f64::from(m - 1) * f);
    Ok(AnalyticCost::from_renewal(miss, storage, period))
}

/// Single-window-on-M-th: insertion needs M consecutive gaps within `ttl`,
/// which happens with probability `F(ttl)^(M-1)` per uncached run.
pub fn single_window_mth_cost(
    d: InterRequestDistribution,
    remote: f64,
    ttl: f64,
    m: u32,
) -> Result<AnalyticCost, ModelError> {
    if m < 1 {
        return Err(ModelError::Parameter("m must be >= 1".into()));
    }
    let f = d.cdf(ttl);
    if m > 1 && f <= 0.0 {
        // The counter can never reach M: pure never-cache.
        return Ok(AnalyticCost::from_renewal(remote, 0.0, d.mean()));
    }
    // Stable form with numerator and denominator both scaled by F^(M-1).
    let mut geometric = 0.0;
    let mut f_pow = 1.0;
    for _ in 0..m {
        geometric += f_pow;
        f_pow *= f;
    }
    let f_pow_m1 = f.powi(m as i32 - 1);
    let miss = (1.0 - f) * geometric * remote;
    let storage = (ttl - d.cdf_integral(ttl)) * f_pow_m1;
    Ok(AnalyticCost::from_renewal(miss, storage, d.mean()))
}

/// Dual-window-on-2nd: qualifying second requests must land within `window`
/// (<= `ttl`) of the remembered one.
pub fn dual_window_2nd_cost(
    d: InterRequestDistribution,
    remote: f64,
    ttl: f64,
    window: f64,
) -> Result<AnalyticCost, ModelError> {
    if window > ttl {
        return Err(ModelError::Parameter(format!(
            "dual window requires window <= ttl, got window {window} > ttl {ttl}"
        )));
    }
    let f_t = d.cdf(ttl);
    let f_w = d.cdf(window);
    if f_w <= 0.0 {
        // No two requests ever fall within the window: never-cache.
        return Ok(AnalyticCost::from_renewal(remote, 0.0, d.mean()));
    }
    let miss = (1.0 - f_t) * (2.0 + (1.0 - f_w) / f_w) * remote;
    let storage = ttl - d.cdf_integral(ttl);
    let period = d.mean() * (1.0 + (1.0 - f_t) / f_w);
    Ok(AnalyticCost::from_renewal(miss, storage, period))
}

/// Cost rate of the online threshold policy that caches each object for
/// `t_star` after every request (`t_star = inf` means always cached).
pub fn online_threshold_cost(
    d: InterRequestDistribution,
    remote: f64,
    t_star: f64,
) -> Result<AnalyticCost, ModelError> {
    if t_star.is_nan() || t_star < 0.0 {
        return Err(ModelError::Parameter(format!(
            "t_star must be >= 0 (inf allowed), got {t_star}"
        )));
    }
    if t_star.is_infinite() {
        return Ok(AnalyticCost::from_renewal(0.0, d.mean(), d.mean()));
    }
    let miss = remote * (1.0 - d.cdf(t_star));
    let storage = t_star - d.cdf_integral(t_star);
    Ok(AnalyticCost::from_renewal(miss, storage, d.mean()))
}

/// Cost-minimizing threshold for `online_threshold_cost`.
///
/// For exponential, Erlang, and deterministic gaps the minimum sits at an
/// endpoint, so this returns 0 or infinity, whichever is cheaper (ties pick
/// 0). For Pareto gaps the interior stationary point `R * shape` is optimal
/// whenever it lies in the support; otherwise the better endpoint wins.
pub fn optimal_online_threshold(d: InterRequestDistribution, remote: f64) -> f64 {
    let endpoint = |d: InterRequestDistribution, remote: f64| {
        if remote / d.mean() <= 1.0 {
            0.0
        } else {
            f64::INFINITY
        }
    };
    match d {
        InterRequestDistribution::Pareto { shape, scale } => {
            let t_star = remote * shape;
            if t_star >= scale {
                t_star
            } else {
                endpoint(d, remote)
            }
        }
        _ => endpoint(d, remote),
    }
}

/// A policy with a closed-form steady-state cost, for sweep curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurvePolicy {
    /// Offline-optimal floor.
    Offline,
    /// Static always-local / always-remote baseline.
    StaticBaseline,
    /// Cache on the M-th miss.
    AlwaysOnMth {
        /// Miss count required for insertion.
        m: u32,
    },
    /// Cache on the M-th request of a close-spaced run.
    SingleWindowMth {
        /// Run length required for insertion.
        m: u32,
    },
    /// Cache on the 2nd request within the dual window.
    DualWindow2nd,
}

impl CurvePolicy {
    /// Column label used in sweep output, e.g. `always2`.
    pub fn label(&self) -> String {
        match *self {
            CurvePolicy::Offline => "offline".into(),
            CurvePolicy::StaticBaseline => "baseline".into(),
            CurvePolicy::AlwaysOnMth { m } => format!("always{m}"),
            CurvePolicy::SingleWindowMth { m } => format!("window{m}"),
            CurvePolicy::DualWindow2nd => "dual2".into(),
        }
    }
}

/// Steady-state cost of a curve policy at fixed TTL `ttl` and dual window
/// `dual_window`.
pub fn curve_cost(
    d: InterRequestDistribution,
    remote: f64,
    ttl: f64,
    dual_window: f64,
    policy: CurvePolicy,
) -> Result<AnalyticCost, ModelError> {
    match policy {
        CurvePolicy::Offline => Ok(offline_cost(d, remote)),
        CurvePolicy::StaticBaseline => Ok(static_baseline_cost(d, remote)),
        CurvePolicy::AlwaysOnMth { m } => always_mth_cost(d, remote, ttl, m),
        CurvePolicy::SingleWindowMth { m } => single_window_mth_cost(d, remote, ttl, m),
        CurvePolicy::DualWindow2nd => dual_window_2nd_cost(d, remote, ttl, dual_window),
    }
}

/// Log-spaced grid of normalized request rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGrid {
    /// Smallest rate.
    pub min: f64,
    /// Largest rate.
    pub max: f64,
    /// Number of grid points (>= 2 unless min == max).
    pub points: usize,
}

impl SweepGrid {
    /// Creates a validated grid.
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self, ModelError> {
        if !(min.is_finite() && max.is_finite()) || min <= 0.0 || max < min {
            return Err(ModelError::Parameter(format!(
                "grid must satisfy 0 < min <= max, got {min}..{max}"
            )));
        }
        if points == 0 || (points == 1 && max > min) {
            return Err(ModelError::Parameter(
                "grid needs at least 2 points (or 1 with min == max)".into(),
            ));
        }
        Ok(Self { min, max, points })
    }

    /// The grid's rates, log-spaced from min to max inclusive.
    pub fn rates(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let (lo, hi) = (self.min.ln(), self.max.ln());
        (0..self.points)
            .map(|i| {
                let frac = i as f64 / (self.points - 1) as f64;
                f64::exp(lo + frac * (hi - lo))
            })
            .collect()
    }
}

/// Default sweep range: 10^-2 .. 10^3, 121 points.
impl Default for SweepGrid {
    fn default() -> Self {
        Self { min: 1e-2, max: 1e3, points: 121 }
    }
}

/// One sweep row: the normalized rate and each policy's cost ratio vs the
/// offline optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Normalized request rate (requests per window of `ttl`).
    pub rate: f64,
    /// Cost ratios in the order the policies were given.
    pub ratios: Vec<f64>,
}

/// Cost-ratio curves over a rate grid: for each grid point the family is
/// instantiated at that normalized rate (window = `ttl`) and every policy's
/// cost is divided by the offline-optimal cost at the same point.
pub fn ratio_sweep(
    family: DistFamily,
    remote: f64,
    ttl: f64,
    dual_window: f64,
    policies: &[CurvePolicy],
    grid: &SweepGrid,
) -> Result<Vec<SweepRow>, ModelError> {
    let mut rows = Vec::with_capacity(grid.points);
    for rate in grid.rates() {
        let d = family.at_normalized_rate(rate, ttl)?;
        let offline = offline_cost(d, remote).per_time_unit;
        let mut ratios = Vec::with_capacity(policies.len());
        for &p in policies {
            let cost = curve_cost(d, remote, ttl, dual_window, p)?.per_time_unit;
            ratios.push(cost / offline);
        }
        rows.push(SweepRow { rate, ratios });
    }
    Ok(rows)
}

/// A refined curve maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Rate at which the maximum is attained.
    pub rate: f64,
    /// The maximum value.
    pub value: f64,
}

/// Finds the maximum of `f` over the grid, then refines it by golden-section
/// search between the bracketing grid neighbors until the bracket is
/// narrower than `tol`.
pub fn find_peak<F: Fn(f64) -> f64>(f: F, grid: &[f64], tol: f64) -> Peak {
    assert!(!grid.is_empty(), "peak search needs a non-empty grid");
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, &x) in grid.iter().enumerate() {
        let v = f(x);
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    let mut lo = grid[best.saturating_sub(1)];
    let mut hi = grid[(best + 1).min(grid.len() - 1)];
    // Golden-section search for the maximum on [lo, hi].
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    let mut peak = Peak { rate: grid[best], value: best_val };
    for (x, v) in [(x1, f1), (x2, f2), (mid, f(mid))] {
        if v > peak.value {
            peak = Peak { rate: x, value: v };
        }
    }
    peak
}

/// Grid-then-golden-section maximum of a policy's cost ratio over rates.
pub fn sweep_peak(
    family: DistFamily,
    remote: f64,
    ttl: f64,
    dual_window: f64,
    policy: CurvePolicy,
    grid: &SweepGrid,
) -> Result<Peak, ModelError> {
    // Surface parameter errors once, then the closure can unwrap.
    let probe = family.at_normalized_rate(grid.min, ttl)?;
    curve_cost(probe, remote, ttl, dual_window, policy)?;
    let ratio = |rate: f64| {
        let d = family
            .at_normalized_rate(rate, ttl)
            .expect("rate grid is positive");
        let c = curve_cost(d, remote, ttl, dual_window, policy)
            .expect("parameters validated above");
        c.per_time_unit / offline_cost(d, remote).per_time_unit
    };
    Ok(find_peak(ratio, &grid.rates(), 1e-6))
}
