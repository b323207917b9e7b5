use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How bulk loops are executed.
///
/// Without the `parallel` feature, `Parallel` silently runs sequentially.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Splits `0..total` into fixed chunks of `chunk` indices, maps each one and
/// returns the results in chunk order. The partition only depends on `total`
/// and `chunk`, so the caller's ordered merge is deterministic.
pub(crate) fn map_chunks<T, F>(exec: Execution, total: u64, chunk: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let count = total.div_ceil(chunk);
    let range_of = |c: u64| c * chunk..((c + 1) * chunk).min(total);

    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..count).into_par_iter().map(|c| f(range_of(c))).collect();
    }
    let _ = exec;
    (0..count).map(|c| f(range_of(c))).collect()
}
