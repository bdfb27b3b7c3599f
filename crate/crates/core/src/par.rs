//! Execution policy for the data-parallel kernels.
//!
//! Every kernel splits its domain into fixed-size chunks whose boundaries do
//! not depend on the worker count, and merges per-chunk results in chunk
//! order. Results are therefore bit-identical between [`Exec::Sequential`],
//! [`Exec::Parallel`] and any rayon pool size.

use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise runs
    /// sequentially.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

fn chunks(total: u64, chunk: u64) -> impl Iterator<Item = Range<u64>> + Clone {
    let chunk = chunk.max(1);
    let n = total.div_ceil(chunk);
    (0..n).map(move |i| i * chunk..((i + 1) * chunk).min(total))
}

/// Applies `f` to consecutive chunks of `0..total`; the output is in chunk order.
pub fn map_chunks<R, F>(exec: Exec, total: u64, chunk: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(Range<u64>) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            let ranges: Vec<_> = chunks(total, chunk).collect();
            ranges.into_par_iter().map(f).collect()
        }
        _ => chunks(total, chunk).map(f).collect(),
    }
}

/// Maps every item of a slice; output order matches input order.
pub fn map_slice<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Smallest index in `0..total` whose predicate holds.
pub fn find_first<F>(exec: Exec, total: u64, pred: F) -> Option<u64>
where
    F: Fn(u64) -> bool + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..total).into_par_iter().find_first(|&i| pred(i))
        }
        _ => (0..total).find(|&i| pred(i)),
    }
}
