//! Cost modeling of TTL caches that insert an object only on its M-th
//! request, under elastic pricing: storage is paid per unit of object-time
//! (at rate 1 per unit size) and every cache miss pays a remote-delivery
//! cost `R` per unit size.
//!
//! The crate offers three independent routes to the same quantities, built
//! to cross-check each other:
//!
//! - an event-driven trace simulator with offline-optimal and static-oracle
//!   baselines ([`policy`]),
//! - a generic steady-state engine for IID inter-request times, driven by
//!   distribution primitives ([`analytic`]),
//! - hand-derived per-distribution closed forms ([`closed_form`]).
//!
//! On top of those sit worst-case trace generators with a randomized
//! adversarial search ([`adversary`]), Zipf-weighted multi-file aggregation
//! ([`multifile`]), and trace file I/O plus synthetic generators
//! ([`trace_io`]).
//!
//! Everything is deterministic: simulations and generators take explicit
//! seeds, and parallel evaluation (the default `parallel` feature) reduces
//! results in input order, so outputs are bit-identical across thread
//! counts and with the sequential fallback.

#![warn(missing_docs)]

pub mod adversary;
pub mod analytic;
pub mod closed_form;
pub mod cost;
pub mod dist;
pub mod error;
pub mod multifile;
pub mod parallel;
pub mod policy;
pub mod trace;
pub mod trace_io;

pub use analytic::{AnalyticCost, CurvePolicy, Peak, SweepGrid, SweepRow};
pub use cost::{CostParams, CostReport};
pub use dist::{DistFamily, DistSpec, InterRequestDistribution};
pub use error::ModelError;
pub use multifile::{BandSpec, MultifileReport, MultifileRow, TraceCostModel, ZipfCatalog};
pub use policy::{PolicySpec, SimOptions};
pub use trace::{RequestTrace, TraceBuilder, TraceObject};
pub use trace_io::TraceIoError;
