//! Zipf-weighted multi-file aggregation: analytic cost-ratio curves over a
//! file catalog, and multi-object trace simulation with popularity-band cost
//! breakdowns.
//!
//! Costs are per-object additive, so every aggregate here is a sum of
//! independent per-file terms; files are evaluated through the parallel map
//! and reduced in file order.

use crate::analytic::{self, CurvePolicy, Peak, SweepGrid, SweepRow};
use crate::cost::{CostParams, CostReport};
use crate::dist::{DistFamily, InterRequestDistribution};
use crate::error::ModelError;
use crate::parallel;
use crate::policy::{self, PolicySpec, SimOptions};
use crate::trace::RequestTrace;

/// A catalog of `n_files` files whose request rates follow a Zipf law:
/// file `i` (1-based) receives a fraction `i^-gamma / H` of `total_rate`,
/// where `H` normalizes the fractions to 1. Per-file inter-request times
/// come from `family` with the shape fixed and the rate parameter set from
/// the file's rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZipfCatalog {
    n_files: usize,
    gamma: f64,
    total_rate: f64,
    family: DistFamily,
    /// Normalizer H = sum over i of i^-gamma, accumulated smallest-first.
    harmonic: f64,
}

impl ZipfCatalog {
    /// Creates a validated catalog.
    pub fn new(
        n_files: usize,
        gamma: f64,
        total_rate: f64,
        family: DistFamily,
    ) -> Result<Self, ModelError> {
        if n_files < 1 {
            return Err(ModelError::Parameter("catalog needs at least one file".into()));
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(ModelError::Parameter(format!(
                "zipf exponent must be finite and >= 0, got {gamma}"
            )));
        }
        if !total_rate.is_finite() || total_rate <= 0.0 {
            return Err(ModelError::Parameter(format!(
                "total request rate must be positive and finite, got {total_rate}"
            )));
        }
        let mut harmonic = 0.0;
        for i in (1..=n_files).rev() {
            harmonic += (i as f64).powf(-gamma);
        }
        Ok(Self { n_files, gamma, total_rate, family, harmonic })
    }

    /// Number of files.
    pub fn n_files(&self) -> usize {
        self.n_files
    }

    /// Zipf exponent.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Aggregate request rate over all files.
    pub fn total_rate(&self) -> f64 {
        self.total_rate
    }

    /// Distribution family shared by all files.
    pub fn family(&self) -> DistFamily {
        self.family
    }

    /// The same catalog at a different aggregate rate.
    pub fn with_total_rate(&self, total_rate: f64) -> Result<Self, ModelError> {
        if !total_rate.is_finite() || total_rate <= 0.0 {
            return Err(ModelError::Parameter(format!(
                "total request rate must be positive and finite, got {total_rate}"
            )));
        }
        Ok(Self { total_rate, ..*self })
    }

    fn check_index(&self, file: usize) -> Result<(), ModelError> {
        if file < 1 || file > self.n_files {
            return Err(ModelError::Parameter(format!(
                "file index {file} out of range 1..={}",
                self.n_files
            )));
        }
        Ok(())
    }

    /// Request-probability share of file `file` (1-based).
    pub fn popularity(&self, file: usize) -> Result<f64, ModelError> {
        self.check_index(file)?;
        Ok((file as f64).powf(-self.gamma) / self.harmonic)
    }

    /// Request rate of file `file` (1-based).
    pub fn per_file_rate(&self, file: usize) -> Result<f64, ModelError> {
        Ok(self.total_rate * self.popularity(file)?)
    }

    /// Inter-request distribution of file `file` (1-based): the family
    /// instantiated so the file's mean inter-request time is the reciprocal
    /// of its rate.
    pub fn per_file_distribution(
        &self,
        file: usize,
    ) -> Result<InterRequestDistribution, ModelError> {
        self.family.at_normalized_rate(self.per_file_rate(file)?, 1.0)
    }
}

/// Catalog-aggregate cost ratio: the policy's summed per-file steady-state
/// cost divided by the summed offline-optimal cost.
pub fn analytic_multifile_ratio(
    catalog: &ZipfCatalog,
    remote: f64,
    ttl: f64,
    dual_window: f64,
    policy: CurvePolicy,
) -> Result<f64, ModelError> {
    // Parameter problems are uniform across files; surface them once.
    let probe = catalog.per_file_distribution(1)?;
    analytic::curve_cost(probe, remote, ttl, dual_window, policy)?;
    let per_file = parallel::map_range(catalog.n_files(), |i| {
        let d = catalog
            .per_file_distribution(i + 1)
            .expect("file index in range");
        let cost = analytic::curve_cost(d, remote, ttl, dual_window, policy)
            .expect("parameters validated above");
        (cost.per_time_unit, analytic::offline_cost(d, remote).per_time_unit)
    });
    let mut policy_total = 0.0;
    let mut offline_total = 0.0;
    for (cost, offline) in per_file {
        policy_total += cost;
        offline_total += offline;
    }
    Ok(policy_total / offline_total)
}

/// Catalog-aggregate ratio curves over a grid of per-file average normalized
/// rates: grid point `x` means the average file sees `x` requests per TTL
/// window, i.e. an aggregate rate of `x * n_files / ttl`.
pub fn multifile_sweep(
    catalog: &ZipfCatalog,
    remote: f64,
    ttl: f64,
    dual_window: f64,
    policies: &[CurvePolicy],
    grid: &SweepGrid,
) -> Result<Vec<SweepRow>, ModelError> {
    let mut rows = Vec::with_capacity(grid.points);
    for rate in grid.rates() {
        let cat = catalog.with_total_rate(rate * catalog.n_files() as f64 / ttl)?;
        let mut ratios = Vec::with_capacity(policies.len());
        for &p in policies {
            ratios.push(analytic_multifile_ratio(&cat, remote, ttl, dual_window, p)?);
        }
        rows.push(SweepRow { rate, ratios });
    }
    Ok(rows)
}

/// Grid-then-golden-section maximum of the catalog-aggregate ratio over
/// per-file average normalized rates.
pub fn multifile_peak(
    catalog: &ZipfCatalog,
    remote: f64,
    ttl: f64,
    dual_window: f64,
    policy: CurvePolicy,
    grid: &SweepGrid,
) -> Result<Peak, ModelError> {
    let probe = catalog.with_total_rate(grid.min * catalog.n_files() as f64 / ttl)?;
    analytic_multifile_ratio(&probe, remote, ttl, dual_window, policy)?;
    let ratio = |rate: f64| {
        let cat = catalog
            .with_total_rate(rate * catalog.n_files() as f64 / ttl)
            .expect("rate grid is positive");
        analytic_multifile_ratio(&cat, remote, ttl, dual_window, policy)
            .expect("parameters validated above")
    };
    Ok(analytic::find_peak(ratio, &grid.rates(), 1e-6))
}

/// Popularity bands over per-object request counts: `1..=low`,
/// `low+1..=high`, and `> high`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandSpec {
    /// Upper request count of the rare band (inclusive).
    pub low: u64,
    /// Upper request count of the middle band (inclusive).
    pub high: u64,
}

impl Default for BandSpec {
    fn default() -> Self {
        Self { low: 3, high: 20 }
    }
}

impl BandSpec {
    /// Creates a validated band split.
    pub fn new(low: u64, high: u64) -> Result<Self, ModelError> {
        if low < 1 || high <= low {
            return Err(ModelError::Parameter(format!(
                "bands need 1 <= low < high, got {low},{high}"
            )));
        }
        Ok(Self { low, high })
    }

    /// Labels for the three bands, e.g. `1-3`, `4-20`, `>20`.
    pub fn labels(&self) -> [String; 3] {
        [
            format!("1-{}", self.low),
            format!("{}-{}", self.low + 1, self.high),
            format!(">{}", self.high),
        ]
    }

    /// Band index (0, 1, or 2) for an object with `request_count` requests.
    pub fn band_of(&self, request_count: u64) -> usize {
        if request_count <= self.low {
            0
        } else if request_count <= self.high {
            1
        } else {
            2
        }
    }
}

/// A way to cost a trace: the offline optimum, the per-object static oracle,
/// or an online policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceCostModel {
    /// Clairvoyant per-gap optimum.
    OfflineOptimal,
    /// Per-object best of always-remote and always-local.
    StaticOracle,
    /// An online insertion policy.
    Policy(PolicySpec),
}

impl TraceCostModel {
    /// Short label for report tables.
    pub fn label(&self) -> String {
        match self {
            TraceCostModel::OfflineOptimal => "offline".into(),
            TraceCostModel::StaticOracle => "baseline".into(),
            TraceCostModel::Policy(p) => p.label(),
        }
    }
}

/// One model's aggregate outcome on a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct MultifileRow {
    /// Model label.
    pub label: String,
    /// Field-wise aggregate of the per-object reports.
    pub report: CostReport,
    /// Sum of per-object totals, in object order. Ratio and band shares are
    /// derived from this scalar.
    pub total_cost: f64,
    /// `total_cost` divided by the offline-optimal total.
    pub ratio_vs_offline: f64,
    /// Cost contributed by each band.
    pub band_costs: [f64; 3],
    /// Per-band cost divided by the offline-optimal total.
    pub band_shares: [f64; 3],
}

/// Aggregate and band-level outcomes for a set of models on one trace.
#[derive(Debug, Clone, PartialEq)]
pub struct MultifileReport {
    /// Band split used for the breakdown.
    pub bands: BandSpec,
    /// Offline-optimal total cost (the normalizer).
    pub offline_total: f64,
    /// One row per requested model.
    pub rows: Vec<MultifileRow>,
}

/// Costs a trace under several models, normalizing everything by the
/// offline-optimal total and splitting costs by popularity band.
pub fn simulate_multifile(
    trace: &RequestTrace,
    models: &[TraceCostModel],
    costs: &CostParams,
    opts: &SimOptions,
    bands: &BandSpec,
) -> Result<MultifileReport, ModelError> {
    if trace.is_empty() {
        return Err(ModelError::Parameter(
            "multifile breakdown needs a non-empty trace".into(),
        ));
    }
    let horizon = opts.horizon.unwrap_or_else(|| {
        trace.last_timestamp().expect("non-empty trace has a last request")
    });
    let offline_reports = policy::offline_optimal_per_object(trace, costs);
    let offline_total: f64 = offline_reports.iter().map(CostReport::total).sum();

    let band_of = |i: usize| bands.band_of(trace.objects()[i].timestamps.len() as u64);
    let mut rows = Vec::with_capacity(models.len());
    for model in models {
        let reports = match model {
            TraceCostModel::OfflineOptimal => offline_reports.clone(),
            TraceCostModel::StaticOracle => {
                policy::static_oracle_per_object(trace, costs, horizon)?
            }
            TraceCostModel::Policy(p) => policy::simulate_per_object(trace, p, costs, opts)?,
        };
        let mut report = CostReport::default();
        let mut total_cost = 0.0;
        let mut band_costs = [0.0f64; 3];
        for (i, r) in reports.iter().enumerate() {
            report.absorb(r);
            total_cost += r.total();
            band_costs[band_of(i)] += r.total();
        }
        rows.push(MultifileRow {
            label: model.label(),
            report,
            total_cost,
            ratio_vs_offline: total_cost / offline_total,
            band_costs,
            band_shares: band_costs.map(|c| c / offline_total),
        });
    }
    Ok(MultifileReport { bands: *bands, offline_total, rows })
}
