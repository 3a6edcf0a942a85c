//! Worker-pool sizing for the parallel parts of training and evaluation.

use crate::error::{invalid, Result};

/// Runs `f` on a dedicated pool of `threads` workers (`threads <= 1` runs
/// it on a single worker). Results never depend on the pool size.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
