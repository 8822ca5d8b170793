//! Data-parallel helpers for the verification sweeps.
//!
//! With the `parallel` feature (on by default) the sweeps fan out over rayon's
//! global pool. Without it, or with [`Execution::Sequential`], they run on the
//! calling thread. Every reduction here is order independent, so both paths
//! produce identical results.

use serde::{Deserialize, Serialize};

/// How a sweep should be executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run in parallel.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maximum of `f` over `items`, together with the index attaining it.
///
/// NaN values dominate so that a broken evaluation can never hide behind a
/// finite maximum. Ties resolve to the smallest index. Returns `None` for an
/// empty slice.
pub fn max_by<T, F>(items: &[T], exec: Execution, f: F) -> Option<(usize, f64)>
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    if items.is_empty() {
        return None;
    }
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items
            .par_iter()
            .enumerate()
            .map(|(i, x)| (i, f(x)))
            .reduce_with(pick_max);
    }
    let _ = exec;
    items.iter().map(&f).enumerate().reduce(pick_max)
}

fn pick_max(a: (usize, f64), b: (usize, f64)) -> (usize, f64) {
    match (a.1.is_nan(), b.1.is_nan()) {
        (true, true) => if a.0 <= b.0 { a } else { b },
        (true, false) => a,
        (false, true) => b,
        _ => {
            if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                b
            } else {
                a
            }
        }
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, U, F>(items: &[T], exec: Execution, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}
