//! Mean/variance summaries with a deterministic merge order.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Count, mean and sum of squared deviations (`M2`) of a sample.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Summary {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Summary {
    pub fn single(x: f64) -> Self {
        Summary { count: 1, mean: x, m2: 0.0 }
    }

    /// Chan et al. pairwise combination.
    pub fn merge(self, other: Summary) -> Summary {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let (na, nb, nf) = (self.count as f64, other.count as f64, n as f64);
        Summary {
            count: n,
            mean: self.mean + delta * nb / nf,
            m2: self.m2 + other.m2 + delta * delta * na * nb / nf,
        }
    }

    /// Unbiased sample variance (0 for fewer than two points).
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Reduces in a fixed binary tree over the slice order, so the result only
/// depends on the values and their order.
pub fn reduce_pairwise(items: &[Summary]) -> Summary {
    match items.len() {
        0 => Summary::default(),
        1 => items[0],
        n => {
            let (a, b) = items.split_at(n / 2);
            reduce_pairwise(a).merge(reduce_pairwise(b))
        }
    }
}

pub fn summarize(values: &[f64]) -> Summary {
    let singles: Vec<Summary> = values.iter().copied().map(Summary::single).collect();
    reduce_pairwise(&singles)
}

/// Evaluates `f(0..n)` in parallel and returns results in replica order.
/// The first failing replica (lowest index) is reported.
pub fn over_replicas<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let results: Vec<Result<T>> = (0..n).into_par_iter().map(&f).collect();
    results
        .into_iter()
        .enumerate()
        .map(|(replica, r)| r.map_err(|e| Error::Replica { replica, source: Box::new(e) }))
        .collect()
}
