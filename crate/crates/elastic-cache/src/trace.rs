//! Request traces: per-object ordered request timestamps with sizes.

use std::collections::HashMap;

use crate::error::ModelError;

/// One object's request history within a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceObject {
    /// Object identifier as it appeared in the input.
    pub name: String,
    /// Object size; scales both the per-miss cost and the storage rate.
    pub size: f64,
    /// Strictly increasing request timestamps.
    pub timestamps: Vec<f64>,
}

impl TraceObject {
    /// Consecutive inter-request gaps (empty for a single request).
    pub fn gaps(&self) -> Vec<f64> {
        self.timestamps.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// A validated multi-object request trace.
///
/// Timestamps are non-negative and globally non-decreasing; per object they
/// are strictly increasing (simultaneous requests to the same object must be
/// separated by a caller-chosen epsilon), and an object's size is constant
/// across its requests.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RequestTrace {
    objects: Vec<TraceObject>,
    index: HashMap<String, usize>,
    /// Requests in input order as (timestamp, object index).
    order: Vec<(f64, u32)>,
}

impl RequestTrace {
    /// Builds a single-object trace named `f1` with unit size.
    pub fn single_object(timestamps: &[f64]) -> Result<Self, ModelError> {
        let mut b = TraceBuilder::new();
        for &t in timestamps {
            b.push(t, "f1", 1.0)?;
        }
        Ok(b.finish())
    }

    /// Builds a trace from `(timestamp, object id, size)` rows in input order.
    pub fn from_rows<'a, I>(rows: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (f64, &'a str, f64)>,
    {
        let mut b = TraceBuilder::new();
        for (t, name, size) in rows {
            b.push(t, name, size)?;
        }
        Ok(b.finish())
    }

    /// Objects in order of first appearance.
    pub fn objects(&self) -> &[TraceObject] {
        &self.objects
    }

    /// Number of distinct objects.
    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    /// Total number of requests.
    pub fn request_count(&self) -> usize {
        self.order.len()
    }

    /// True when the trace holds no requests.
    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Timestamp of the final request, if any.
    pub fn last_timestamp(&self) -> Option<f64> {
        self.order.last().map(|&(t, _)| t)
    }

    /// Index of the object with the given id.
    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Requests in input order as (timestamp, object index).
    pub fn requests(&self) -> impl Iterator<Item = (f64, &TraceObject)> + '_ {
        self.order.iter().map(move |&(t, i)| (t, &self.objects[i as usize]))
    }
}

/// Consecutive inter-request gaps for one object of a trace.
///
/// Returns the n-1 differences for an object with n requests.
pub fn inter_request_gaps(trace: &RequestTrace, object_id: &str) -> Result<Vec<f64>, ModelError> {
    let idx = trace
        .object_index(object_id)
        .ok_or_else(|| ModelError::UnknownObject(object_id.to_string()))?;
    Ok(trace.objects()[idx].gaps())
}

/// Incremental trace constructor that validates every pushed request.
#[derive(Debug, Default)]
pub struct TraceBuilder {
    objects: Vec<TraceObject>,
    index: HashMap<String, usize>,
    order: Vec<(f64, u32)>,
    last_global: Option<f64>,
}

impl TraceBuilder {
    /// Creates an empty builder.
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends one request, enforcing the trace invariants.
    pub fn push(&mut self, timestamp: f64, object_id: &str, size: f64) -> Result<(), ModelError> {
        if !timestamp.is_finite() || timestamp < 0.0 {
            return Err(ModelError::InvalidTrace(format!(
                "timestamp must be finite and non-negative, got {timestamp}"
            )));
        }
        if let Some(last) = self.last_global {
            if timestamp < last {
                return Err(ModelError::InvalidTrace(format!(
                    "timestamps must be non-decreasing: {timestamp} after {last}"
                )));
            }
        }
        if !size.is_finite() || size <= 0.0 {
            return Err(ModelError::InvalidTrace(format!(
                "size must be positive and finite, got {size}"
            )));
        }
        if object_id.is_empty() {
            return Err(ModelError::InvalidTrace("empty object id".into()));
        }
        let idx = match self.index.get(object_id) {
            Some(&i) => {
                let obj = &self.objects[i];
                let prev = *obj.timestamps.last().expect("indexed object has requests");
                if timestamp <= prev {
                    return Err(ModelError::InvalidTrace(format!(
                        "object {object_id}: timestamps must be strictly increasing \
                         ({timestamp} after {prev})"
                    )));
                }
                if obj.size != size {
                    return Err(ModelError::InvalidTrace(format!(
                        "object {object_id}: size changed from {} to {size}",
                        obj.size
                    )));
                }
                i
            }
            None => {
                let i = self.objects.len();
                self.objects.push(TraceObject {
                    name: object_id.to_string(),
                    size,
                    timestamps: Vec::new(),
                });
                self.index.insert(object_id.to_string(), i);
                i
            }
        };
        self.objects[idx].timestamps.push(timestamp);
        self.order.push((timestamp, idx as u32));
        self.last_global = Some(timestamp);
        Ok(())
    }

    /// Finalizes the trace.
    pub fn finish(self) -> RequestTrace {
        RequestTrace {
            objects: self.objects,
            index: self.index,
            order: self.order,
        }
    }
}
