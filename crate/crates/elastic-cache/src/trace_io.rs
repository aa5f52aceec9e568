//! Trace file I/O and synthetic trace generation.
//!
//! The persistent format is CSV with lines `timestamp,object_id[,size]`,
//! where `size` defaults to 1. Lines starting with `#` and blank lines are
//! ignored. Timestamps are decimal text and non-decreasing file-wide.

use std::collections::BinaryHeap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::dist::InterRequestDistribution;
use crate::error::ModelError;
use crate::multifile::ZipfCatalog;
use crate::trace::{RequestTrace, TraceBuilder};

/// Errors from reading or writing trace files.
#[derive(Debug, thiserror::Error)]
pub enum TraceIoError {
    /// Underlying I/O failure.
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    /// Malformed or invalid content, with the 1-based line number.
    #[error("line {line}: {message}")]
    Parse {
        /// 1-based line number of the offending line.
        line: usize,
        /// What was wrong with it.
        message: String,
    },
}

fn model_message(e: ModelError) -> String {
    match e {
        ModelError::Parameter(m) | ModelError::InvalidTrace(m) | ModelError::UnknownObject(m) => m,
    }
}

/// Parses a trace from a reader.
pub fn read_trace<R: BufRead>(reader: R) -> Result<RequestTrace, TraceIoError> {
    let mut builder = TraceBuilder::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let row = line.trim();
        if row.is_empty() || row.starts_with('#') {
            continue;
        }
        let parse = |msg: String| TraceIoError::Parse { line: line_no, message: msg };
        let mut fields = row.split(',');
        let ts_field = fields.next().expect("split yields at least one field");
        let timestamp: f64 = ts_field
            .trim()
            .parse()
            .map_err(|_| parse(format!("bad timestamp {:?}", ts_field.trim())))?;
        let object_id = fields
            .next()
            .map(str::trim)
            .filter(|id| !id.is_empty())
            .ok_or_else(|| parse("missing object id".into()))?;
        let size = match fields.next() {
            None => 1.0,
            Some(f) => f
                .trim()
                .parse()
                .map_err(|_| parse(format!("bad size {:?}", f.trim())))?,
        };
        if fields.next().is_some() {
            return Err(parse("expected 2 or 3 comma-separated fields".into()));
        }
        builder
            .push(timestamp, object_id, size)
            .map_err(|e| parse(model_message(e)))?;
    }
    Ok(builder.finish())
}

/// Loads a trace from a file.
pub fn load_trace(path: impl AsRef<Path>) -> Result<RequestTrace, TraceIoError> {
    read_trace(BufReader::new(File::open(path)?))
}

/// Writes a trace in the CSV format, one request per line in trace order.
/// The size column is omitted for unit-size objects, and floats use the
/// shortest representation that round-trips, so re-reading reproduces the
/// trace exactly.
pub fn write_trace<W: Write>(mut writer: W, trace: &RequestTrace) -> io::Result<()> {
    for (t, obj) in trace.requests() {
        if obj.size == 1.0 {
            writeln!(writer, "{t},{}", obj.name)?;
        } else {
            writeln!(writer, "{t},{},{}", obj.name, obj.size)?;
        }
    }
    Ok(())
}

/// Saves a trace to a file.
pub fn save_trace(path: impl AsRef<Path>, trace: &RequestTrace) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_trace(&mut w, trace)?;
    w.flush()
}

/// Advances a request clock by one sampled gap, resampling until the
/// timestamp strictly increases (guards against zero gaps and against gaps
/// below one ulp of a large clock).
pub(crate) fn advance<R: Rng + ?Sized>(d: &InterRequestDistribution, rng: &mut R, t: f64) -> f64 {
    loop {
        let next = t + d.sample(rng);
        if next > t {
            return next;
        }
    }
}

/// Generates a single-object trace (`f1`, unit size) with `n_requests`
/// requests: the first at t=0, then IID gaps from `d`. Deterministic for a
/// fixed seed.
pub fn generate_trace(
    d: InterRequestDistribution,
    n_requests: usize,
    seed: u64,
) -> Result<RequestTrace, ModelError> {
    if n_requests < 1 {
        return Err(ModelError::Parameter("need at least one request".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut builder = TraceBuilder::new();
    let mut t = 0.0;
    builder.push(t, "f1", 1.0)?;
    for _ in 1..n_requests {
        t = advance(&d, &mut rng, t);
        builder.push(t, "f1", 1.0)?;
    }
    Ok(builder.finish())
}

/// Generates a multi-object trace from a Zipf catalog: file `i` is named
/// `f<i>`, starts at t=0, and follows its own IID gap process (seeded
/// `seed + i - 1`) until `horizon`. Streams are merged lazily through a
/// min-heap, so memory stays O(files); ties are broken by file index.
///
/// A one-file catalog reproduces `generate_trace` truncated at the horizon.
pub fn generate_zipf_trace(
    catalog: &ZipfCatalog,
    horizon: f64,
    seed: u64,
) -> Result<RequestTrace, ModelError> {
    if !horizon.is_finite() || horizon <= 0.0 {
        return Err(ModelError::Parameter(format!(
            "horizon must be positive and finite, got {horizon}"
        )));
    }
    let n = catalog.n_files();
    struct Stream {
        dist: InterRequestDistribution,
        rng: ChaCha12Rng,
    }
    let mut streams = Vec::with_capacity(n);
    let mut names = Vec::with_capacity(n);
    for i in 0..n {
        streams.push(Stream {
            dist: catalog.per_file_distribution(i + 1)?,
            rng: ChaCha12Rng::seed_from_u64(seed.wrapping_add(i as u64)),
        });
        names.push(format!("f{}", i + 1));
    }

    // Min-heap keyed by (timestamp, file index).
    #[derive(PartialEq)]
    struct Pending(f64, usize);
    impl Eq for Pending {}
    impl Ord for Pending {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            // Reversed: BinaryHeap is a max-heap and we want the minimum.
            other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
        }
    }
    impl PartialOrd for Pending {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }

    let mut heap: BinaryHeap<Pending> = (0..n).map(|i| Pending(0.0, i)).collect();
    let mut builder = TraceBuilder::new();
    while let Some(Pending(t, i)) = heap.pop() {
        builder.push(t, &names[i], 1.0)?;
        let s = &mut streams[i];
        let next = advance(&s.dist, &mut s.rng, t);
        if next <= horizon {
            heap.push(Pending(next, i));
        }
    }
    Ok(builder.finish())
}
