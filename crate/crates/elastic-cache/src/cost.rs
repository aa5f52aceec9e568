//! Cost parameters and decomposed cost reports.
//!
//! Storage is charged at a fixed rate of 1 per size unit per time unit, so
//! every other price is expressed in those units. The only free parameter is
//! the remote bandwidth cost `R` paid per size unit on each cache miss.

use crate::error::ModelError;

/// Pricing parameters for the elastic cost model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    /// Bandwidth cost `R` of one miss, per size unit, in storage-cost units.
    pub remote_cost: f64,
}

impl CostParams {
    /// Creates cost parameters. `remote_cost` must be positive and finite.
    pub fn new(remote_cost: f64) -> Result<Self, ModelError> {
        if !remote_cost.is_finite() || remote_cost <= 0.0 {
            return Err(ModelError::Parameter(format!(
                "remote_cost must be positive and finite, got {remote_cost}"
            )));
        }
        Ok(Self { remote_cost })
    }
}

/// Cost of serving a trace (or one object of it), split into its parts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostReport {
    /// Bandwidth spend: sum of `size * R` over misses.
    pub bandwidth_cost: f64,
    /// Storage spend: sum of `size * cached-time` over cached intervals.
    pub storage_cost: f64,
    /// Requests served from the origin.
    pub miss_count: u64,
    /// Requests served from the cache.
    pub hit_count: u64,
}

impl CostReport {
    /// Total cost: bandwidth plus storage.
    pub fn total(&self) -> f64 {
        self.bandwidth_cost + self.storage_cost
    }

    /// Number of requests this report accounts for.
    pub fn request_count(&self) -> u64 {
        self.miss_count + self.hit_count
    }

    /// Adds another report into this one, field by field.
    pub fn absorb(&mut self, other: &CostReport) {
        self.bandwidth_cost += other.bandwidth_cost;
        self.storage_cost += other.storage_cost;
        self.miss_count += other.miss_count;
        self.hit_count += other.hit_count;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remote_cost_must_be_positive_and_finite() {
        assert!(CostParams::new(1.0).is_ok());
        assert!(CostParams::new(0.0).is_err());
        assert!(CostParams::new(-2.0).is_err());
        assert!(CostParams::new(f64::NAN).is_err());
        assert!(CostParams::new(f64::INFINITY).is_err());
    }

    #[test]
    fn totals_and_counts_add_up() {
        let mut a = CostReport {
            bandwidth_cost: 2.0,
            storage_cost: 0.5,
            miss_count: 2,
            hit_count: 3,
        };
        assert_eq!(a.total(), 2.5);
        assert_eq!(a.request_count(), 5);
        let b = CostReport {
            bandwidth_cost: 1.0,
            storage_cost: 0.25,
            miss_count: 1,
            hit_count: 0,
        };
        a.absorb(&b);
        assert_eq!(a.total(), 3.75);
        assert_eq!(a.miss_count, 3);
        assert_eq!(a.hit_count, 3);
    }
}
