//! Data-parallel map helpers with a sequential fallback.
//!
//! All hot loops in the crate (quadrature nodes, grid nodes, fuzz batches)
//! funnel through [`map_range`]. The parallel path is compiled in behind the
//! `parallel` feature and can be switched off at runtime with
//! [`set_mode`]; either way the output vector is in index order and any
//! reduction the caller performs over it is a fixed-order sequential fold,
//! so results are bitwise identical regardless of thread count.

use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

const MODE_SEQUENTIAL: u8 = 0;
const MODE_PARALLEL: u8 = 1;

#[cfg(feature = "parallel")]
static MODE: AtomicU8 = AtomicU8::new(MODE_PARALLEL);
#[cfg(not(feature = "parallel"))]
static MODE: AtomicU8 = AtomicU8::new(MODE_SEQUENTIAL);

/// Current execution mode. Without the `parallel` feature this is always
/// [`ExecMode::Sequential`].
pub fn mode() -> ExecMode {
    match MODE.load(Ordering::Relaxed) {
        MODE_PARALLEL => ExecMode::Parallel,
        _ => ExecMode::Sequential,
    }
}

/// Select the execution mode for subsequent calls. Requesting
/// [`ExecMode::Parallel`] without the `parallel` feature is a no-op.
pub fn set_mode(m: ExecMode) {
    let v = match m {
        ExecMode::Sequential => MODE_SEQUENTIAL,
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => MODE_PARALLEL,
        #[cfg(not(feature = "parallel"))]
        ExecMode::Parallel => MODE_SEQUENTIAL,
    };
    MODE.store(v, Ordering::Relaxed);
}

/// Map `f` over `0..n`, returning results in index order.
pub fn map_range<O, F>(n: usize, f: F) -> Vec<O>
where
    O: Send,
    F: Fn(usize) -> O + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode() == ExecMode::Parallel {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}

/// Fallible variant of [`map_range`]. On failure the error reported is the
/// one at the smallest index, independent of scheduling.
pub fn try_map_range<O, E, F>(n: usize, f: F) -> Result<Vec<O>, E>
where
    O: Send,
    E: Send,
    F: Fn(usize) -> Result<O, E> + Sync + Send,
{
    let results = map_range(n, f);
    let mut out = Vec::with_capacity(n);
    for r in results {
        out.push(r?);
    }
    Ok(out)
}
