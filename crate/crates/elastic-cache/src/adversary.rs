//! Worst-case request patterns for the competitive-ratio tightness
//! arguments, plus a randomized adversarial search that tries to beat the
//! proven bounds (it must never succeed).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::cost::CostParams;
use crate::dist::InterRequestDistribution;
use crate::error::ModelError;
use crate::parallel;
use crate::policy::{self, PolicySpec, SimOptions};
use crate::trace::{RequestTrace, TraceBuilder};
use crate::trace_io::advance;

/// Parameters of the batched worst-case pattern: `batches` batches of `m`
/// requests, `batch_epsilon` apart within a batch, batch starts
/// `inter_batch_gap` apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversaryConfig {
    /// Requests per batch.
    pub m: u32,
    /// Spacing of requests within a batch.
    pub batch_epsilon: f64,
    /// Spacing of batch starts.
    pub inter_batch_gap: f64,
    /// Number of batches.
    pub batches: u32,
}

impl AdversaryConfig {
    /// Worst-case defaults against a policy with TTL `ttl` and remote cost
    /// `remote`: requests within a batch are `1e-4 * remote` apart and
    /// batches start `1.01 * max(ttl, remote)` apart.
    pub fn new(m: u32, batches: u32, ttl: f64, remote: f64) -> Result<Self, ModelError> {
        Self::custom(m, 1e-4 * remote, 1.01 * ttl.max(remote), batches, ttl, remote)
    }

    /// Fully specified configuration, validated against `ttl` and `remote`:
    /// batches must start farther apart than both (so every batch begins
    /// uncached) and whole batches must stay tiny next to the gap
    /// (`m * batch_epsilon <= 1e-3 * inter_batch_gap`).
    pub fn custom(
        m: u32,
        batch_epsilon: f64,
        inter_batch_gap: f64,
        batches: u32,
        ttl: f64,
        remote: f64,
    ) -> Result<Self, ModelError> {
        if m < 1 || batches < 1 {
            return Err(ModelError::Parameter(
                "need at least one request per batch and one batch".into(),
            ));
        }
        if !(batch_epsilon.is_finite() && batch_epsilon > 0.0) {
            return Err(ModelError::Parameter(format!(
                "batch epsilon must be positive, got {batch_epsilon}"
            )));
        }
        if !(inter_batch_gap.is_finite() && inter_batch_gap > ttl.max(remote)) {
            return Err(ModelError::Parameter(format!(
                "batch gap {inter_batch_gap} must exceed max(ttl, remote) = {}",
                ttl.max(remote)
            )));
        }
        if f64::from(m) * batch_epsilon > 1e-3 * inter_batch_gap {
            return Err(ModelError::Parameter(format!(
                "batches must be tiny next to the gap: m * epsilon = {} > 1e-3 * {inter_batch_gap}",
                f64::from(m) * batch_epsilon
            )));
        }
        Ok(Self { m, batch_epsilon, inter_batch_gap, batches })
    }
}

/// The batched single-object pattern: batch `b` starts at
/// `b * inter_batch_gap`, request `j` of a batch lands `j * batch_epsilon`
/// after the start.
pub fn batch_trace(cfg: &AdversaryConfig) -> RequestTrace {
    let mut builder = TraceBuilder::new();
    for b in 0..cfg.batches {
        let start = f64::from(b) * cfg.inter_batch_gap;
        for j in 0..cfg.m {
            builder
                .push(start + f64::from(j) * cfg.batch_epsilon, "f1", 1.0)
                .expect("batch construction is ordered");
        }
    }
    builder.finish()
}

/// `n` single-object requests evenly spaced `spacing` apart, starting at 0.
pub fn even_trace(spacing: f64, n: u32) -> Result<RequestTrace, ModelError> {
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(ModelError::Parameter(format!(
            "spacing must be positive, got {spacing}"
        )));
    }
    if n < 1 {
        return Err(ModelError::Parameter("need at least one request".into()));
    }
    let mut builder = TraceBuilder::new();
    for i in 0..n {
        builder
            .push(f64::from(i) * spacing, "f1", 1.0)
            .expect("even construction is ordered");
    }
    Ok(builder.finish())
}

/// A competitive ratio under both tail conventions.
///
/// The trailing TTL after a trace's final request inflates short traces; the
/// truncated variant clips each object's storage at the last trace
/// timestamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioPair {
    /// Ratio including the trailing TTL interval.
    pub with_trailing_ttl: f64,
    /// Ratio with storage clipped at the final trace timestamp.
    pub without_trailing_ttl: f64,
}

/// Competitive ratios of a policy on a trace under both tail conventions.
pub fn trace_ratios(
    trace: &RequestTrace,
    policy: &PolicySpec,
    costs: &CostParams,
) -> Result<RatioPair, ModelError> {
    let with_tail = policy::competitive_ratio(trace, policy, costs)?;
    let truncated = SimOptions { horizon: None, truncate_at_horizon: true };
    let without_tail = policy::competitive_ratio_with(trace, policy, costs, &truncated)?;
    Ok(RatioPair { with_trailing_ttl: with_tail, without_trailing_ttl: without_tail })
}

/// Proven worst-case competitive ratio of a policy at `T = W = R`:
/// `M + 1` for the M-th-request policies, 3 for the dual-window policy.
/// Static policies have no such bound.
pub fn theorem_bound(policy: &PolicySpec) -> Option<f64> {
    match *policy {
        PolicySpec::AlwaysOnMth { m, .. } | PolicySpec::SingleWindowMth { m, .. } => {
            Some(f64::from(m) + 1.0)
        }
        PolicySpec::DualWindow2nd { .. } => Some(3.0),
        PolicySpec::StaticAlwaysLocal | PolicySpec::StaticAlwaysRemote => None,
    }
}

/// Worst trace found by [`random_adversary_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    /// Largest competitive ratio observed (by the trailing-TTL convention).
    pub worst: RatioPair,
    /// Trial index that produced it (its seed is `seed + trial`).
    pub trial: usize,
    /// The offending trace.
    pub trace: RequestTrace,
}

/// Randomized adversarial search: `trials` independent traces drawn from a
/// mixture of batch patterns, even spacings, and heavy-tailed IID gaps, each
/// scaled to the policy's TTL and the remote cost. Returns the trace with
/// the largest competitive ratio. Trials use derived seeds `seed + trial`,
/// so results are reproducible and independent of thread count.
pub fn random_adversary_search(
    policy: &PolicySpec,
    costs: &CostParams,
    trials: usize,
    seed: u64,
) -> Result<SearchOutcome, ModelError> {
    let Some(ttl) = policy.ttl() else {
        return Err(ModelError::Parameter(
            "adversarial search needs a TTL policy".into(),
        ));
    };
    if trials < 1 {
        return Err(ModelError::Parameter("need at least one trial".into()));
    }
    let remote = costs.remote_cost;
    let ratios = parallel::map_range(trials, |trial| {
        let trace = random_trace(ttl, remote, seed.wrapping_add(trial as u64));
        policy::competitive_ratio(&trace, policy, costs)
            .expect("generated traces are non-empty")
    });
    let mut best = 0;
    for (i, &r) in ratios.iter().enumerate() {
        if r > ratios[best] {
            best = i;
        }
    }
    let trace = random_trace(ttl, remote, seed.wrapping_add(best as u64));
    Ok(SearchOutcome {
        worst: trace_ratios(&trace, policy, costs)?,
        trial: best,
        trace,
    })
}

/// One random adversarial trace: a batch pattern, an even spacing, or IID
/// Pareto gaps, with scales spread log-uniformly around `ttl` and `remote`.
fn random_trace(ttl: f64, remote: f64, seed: u64) -> RequestTrace {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let log_uniform = |rng: &mut ChaCha12Rng, lo: f64, hi: f64| {
        10f64.powf(rng.gen_range(lo..hi))
    };
    match rng.gen_range(0..3u32) {
        0 => {
            let m = rng.gen_range(1..=6);
            let epsilon = remote * log_uniform(&mut rng, -6.0, -3.0);
            let gap = ttl.max(remote) * (1.0 + log_uniform(&mut rng, -3.0, 1.0));
            let batches = rng.gen_range(5..=100);
            let cfg = AdversaryConfig { m, batch_epsilon: epsilon, inter_batch_gap: gap, batches };
            batch_trace(&cfg)
        }
        1 => {
            let spacing = remote * log_uniform(&mut rng, -2.0, 1.0);
            let n = rng.gen_range(10..=500);
            even_trace(spacing, n).expect("positive spacing")
        }
        _ => {
            let shape = rng.gen_range(1.05..3.0);
            let scale = remote * log_uniform(&mut rng, -2.0, 0.5);
            let d = InterRequestDistribution::pareto(shape, scale)
                .expect("valid Pareto parameters");
            let n = rng.gen_range(10..=500);
            let mut builder = TraceBuilder::new();
            let mut t = 0.0;
            builder.push(t, "f1", 1.0).expect("first request");
            for _ in 1..n {
                t = advance(&d, &mut rng, t);
                builder.push(t, "f1", 1.0).expect("strictly increasing");
            }
            builder.finish()
        }
    }
}
