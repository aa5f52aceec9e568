//! Per-family closed-form steady-state costs, one expression per
//! (distribution, policy) cell.
//!
//! These duplicate what [`crate::analytic`] computes through the generic
//! `cdf` / `cdf_integral` primitives — deliberately. Two independently
//! written routes to the same numbers let the test suite cross-check the
//! algebra; do not refactor one in terms of the other.

use crate::analytic::CurvePolicy;
use crate::dist::InterRequestDistribution;
use crate::error::ModelError;

/// Closed-form steady-state cost per unit time for `policy` at TTL `ttl` and
/// dual window `dual_window`, specialized to the distribution family.
pub fn closed_form_cost(
    d: InterRequestDistribution,
    remote: f64,
    ttl: f64,
    dual_window: f64,
    policy: CurvePolicy,
) -> Result<f64, ModelError> {
    validate(ttl, dual_window, policy)?;
    Ok(match d {
        InterRequestDistribution::Exponential { rate } => {
            exponential(rate, remote, ttl, dual_window, policy)
        }
        InterRequestDistribution::Erlang { shape, rate } => {
            erlang(shape, rate, remote, ttl, dual_window, policy)
        }
        InterRequestDistribution::Deterministic { gap } => {
            deterministic(gap, remote, ttl, dual_window, policy)
        }
        InterRequestDistribution::Pareto { shape, scale } => {
            pareto(shape, scale, remote, ttl, dual_window, policy)
        }
    })
}

fn validate(ttl: f64, dual_window: f64, policy: CurvePolicy) -> Result<(), ModelError> {
    match policy {
        CurvePolicy::AlwaysOnMth { m } | CurvePolicy::SingleWindowMth { m } if m < 1 => {
            Err(ModelError::Parameter("m must be >= 1".into()))
        }
        CurvePolicy::DualWindow2nd if dual_window > ttl => Err(ModelError::Parameter(format!(
            "dual window requires window <= ttl, got window {dual_window} > ttl {ttl}"
        ))),
        _ => Ok(()),
    }
}

/// Sum of the first `m` powers of `x`: 1 + x + ... + x^(m-1).
fn geometric(x: f64, m: u32) -> f64 {
    let mut sum = 0.0;
    let mut pow = 1.0;
    for _ in 0..m {
        sum += pow;
        pow *= x;
    }
    sum
}

fn exponential(rate: f64, remote: f64, ttl: f64, dual_window: f64, policy: CurvePolicy) -> f64 {
    let u_t = (-rate * ttl).exp();
    let f_t = -(-rate * ttl).exp_m1();
    match policy {
        CurvePolicy::Offline => -(-rate * remote).exp_m1(),
        CurvePolicy::StaticBaseline => (rate * remote).min(1.0),
        CurvePolicy::AlwaysOnMth { m } => {
            (f64::from(m) * rate * remote * u_t + f_t) / (1.0 + f64::from(m - 1) * u_t)
        }
        CurvePolicy::SingleWindowMth { m } => {
            let f_pow_m = f_t.powi(m as i32);
            rate * remote * (1.0 - f_pow_m) + f_pow_m
        }
        CurvePolicy::DualWindow2nd => {
            let f_w = -(-rate * dual_window).exp_m1();
            if f_w <= 0.0 {
                return rate * remote;
            }
            let u_w = (-rate * dual_window).exp();
            (rate * remote * u_t * (2.0 - u_w) + f_t * f_w) / (f_w + u_t)
        }
    }
}

/// Survival function of an Erlang(k, rate) at `t`.
fn erlang_survival(shape: u32, rate: f64, t: f64) -> f64 {
    let x = rate * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..shape {
        term *= x / f64::from(n);
        sum += term;
    }
    (-x).exp() * sum
}

/// Expected cached time per renewal for an Erlang(k, rate) at TTL `t`:
/// E[min(gap, t)] = t - ∫₀ᵗ F(u)du = (k - e^{-x} Σ_{n<k} (k-n) xⁿ/n!) / rate
/// with x = rate·t.
fn erlang_cached_time(shape: u32, rate: f64, t: f64) -> f64 {
    let x = rate * t;
    let mut term = 1.0;
    let mut sum = f64::from(shape);
    for n in 1..shape {
        term *= x / f64::from(n);
        sum += term * f64::from(shape - n);
    }
    (f64::from(shape) - (-x).exp() * sum) / rate
}

fn erlang(shape: u32, rate: f64, remote: f64, ttl: f64, dual_window: f64, policy: CurvePolicy) -> f64 {
    let k = f64::from(shape);
    let mean = k / rate;
    let sf_t = erlang_survival(shape, rate, ttl);
    let cached = erlang_cached_time(shape, rate, ttl);
    match policy {
        CurvePolicy::Offline => erlang_cached_time(shape, rate, remote) / mean,
        CurvePolicy::StaticBaseline => (remote / mean).min(1.0),
        CurvePolicy::AlwaysOnMth { m } => {
            (f64::from(m) * remote * sf_t + cached) / (mean * (1.0 + f64::from(m - 1) * sf_t))
        }
        CurvePolicy::SingleWindowMth { m } => {
            let f_t = 1.0 - sf_t;
            if m > 1 && f_t <= 0.0 {
                return remote / mean;
            }
            (sf_t * geometric(f_t, m) * remote + cached * f_t.powi(m as i32 - 1)) / mean
        }
        CurvePolicy::DualWindow2nd => {
            let sf_w = erlang_survival(shape, rate, dual_window);
            let f_w = 1.0 - sf_w;
            if f_w <= 0.0 {
                return remote / mean;
            }
            (sf_t * (2.0 - sf_w) * remote + cached * f_w) / (mean * (f_w + sf_t))
        }
    }
}

fn deterministic(gap: f64, remote: f64, ttl: f64, dual_window: f64, policy: CurvePolicy) -> f64 {
    match policy {
        CurvePolicy::Offline | CurvePolicy::StaticBaseline => (remote / gap).min(1.0),
        CurvePolicy::AlwaysOnMth { m } => {
            if ttl < gap {
                (f64::from(m) * remote + ttl) / (f64::from(m) * gap)
            } else {
                1.0
            }
        }
        CurvePolicy::SingleWindowMth { m } => {
            if ttl >= gap {
                1.0
            } else if m == 1 {
                (remote + ttl) / gap
            } else {
                remote / gap
            }
        }
        CurvePolicy::DualWindow2nd => {
            if dual_window >= gap {
                1.0
            } else {
                remote / gap
            }
        }
    }
}

fn pareto(shape: f64, scale: f64, remote: f64, ttl: f64, dual_window: f64, policy: CurvePolicy) -> f64 {
    let alpha = shape;
    let t_m = scale;
    let never_cache = remote * (alpha - 1.0) / (alpha * t_m);
    // Tail mass above t: (t_m/t)^alpha, valid for t >= t_m.
    let tail = |t: f64| (t_m / t).powf(alpha);
    match policy {
        CurvePolicy::Offline => {
            if t_m <= remote {
                1.0 - (t_m / remote).powf(alpha - 1.0) / alpha
            } else {
                never_cache
            }
        }
        CurvePolicy::StaticBaseline => never_cache.min(1.0),
        CurvePolicy::AlwaysOnMth { m } => {
            let m = f64::from(m);
            if t_m <= ttl {
                let p_t = tail(ttl);
                ((alpha - 1.0) * p_t * m * remote + t_m * alpha - ttl * p_t)
                    / (alpha * t_m * (1.0 + (m - 1.0) * p_t))
            } else {
                (m * remote + ttl) * (alpha - 1.0) / (m * alpha * t_m)
            }
        }
        CurvePolicy::SingleWindowMth { m } => {
            if t_m <= ttl {
                let p_t = tail(ttl);
                (alpha - 1.0) / alpha * p_t * geometric(1.0 - p_t, m) * (remote / t_m)
                    + (1.0 - (t_m / ttl).powf(alpha - 1.0) / alpha)
                        * (1.0 - p_t).powi(m as i32 - 1)
            } else if m == 1 {
                (remote + ttl) * (alpha - 1.0) / (alpha * t_m)
            } else {
                never_cache
            }
        }
        CurvePolicy::DualWindow2nd => {
            if t_m <= dual_window {
                let p_t = tail(ttl);
                let p_w = tail(dual_window);
                ((alpha - 1.0) * p_t * (2.0 - p_w) * remote
                    + (1.0 - p_w) * (t_m * alpha - ttl * p_t))
                    / (alpha * t_m * (1.0 - p_w + p_t))
            } else {
                never_cache
            }
        }
    }
}
