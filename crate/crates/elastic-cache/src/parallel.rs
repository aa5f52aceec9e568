//! Thread configuration and an order-preserving parallel map.
//!
//! With the `parallel` feature (the default) work runs on the rayon global
//! pool; without it the same entry points run sequentially. Results are
//! always collected in input order, so outputs are bit-identical across both
//! modes and any thread count.

use crate::error::ModelError;

/// Caps the number of worker threads. `None` keeps the default (one per
/// core). Must be called before any parallel work; later calls may fail
/// because the pool is already running.
///
/// Without the `parallel` feature this only validates the argument.
pub fn configure_threads(threads: Option<usize>) -> Result<(), ModelError> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(ModelError::Parameter("thread count must be >= 1".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ModelError::Parameter(format!("thread pool already initialized: {e}")))?;
    Ok(())
}

/// Maps `f` over `0..n`, collecting results in index order.
#[cfg(feature = "parallel")]
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Maps `f` over `0..n`, collecting results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).map(f).collect()
}
