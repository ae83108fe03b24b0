//! Partitioned Monte Carlo over three-factor Gaussian draws.
//!
//! Paths are split into a fixed number of partitions, partition `k` reading
//! substream `k` of the seed. Partition statistics are merged in index order,
//! so results do not depend on how many worker threads run them.

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::numerics::GaussianStream;

pub const DEFAULT_PARTITIONS: usize = 64;

/// Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_paths: usize,
    pub seed: u64,
    pub partitions: usize,
    pub antithetic: bool,
}

impl McConfig {
    pub fn new(n_paths: usize, seed: u64) -> Self {
        McConfig {
            n_paths,
            seed,
            partitions: DEFAULT_PARTITIONS,
            antithetic: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return invalid("path count must be at least 1");
        }
        if self.partitions == 0 {
            return invalid("partition count must be at least 1");
        }
        if self.antithetic && !self.n_paths.is_multiple_of(2) {
            return invalid("antithetic sampling needs an even path count");
        }
        Ok(())
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_paths: usize,
}

/// Running mean and centred second moment (Welford), mergeable with Chan's
/// pairwise update.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if o.n == 0.0 {
            return self;
        }
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * (o.n / n),
            m2: self.m2 + o.m2 + d * d * (self.n * o.n / n),
        }
    }
}

/// Sizes of the partitions of `n` items into `k` nearly equal blocks.
pub(crate) fn partition_sizes(n: usize, k: usize) -> impl Iterator<Item = (usize, usize)> {
    let (base, extra) = (n / k, n % k);
    (0..k).map(move |i| (i, base + usize::from(i < extra)))
}

/// Estimates `E[f(Z)]` for `Z` a standard normal 3-vector.
///
/// With antithetic sampling each pair `(z, −z)` contributes one averaged
/// sample and `n_paths` counts individual draws.
pub fn estimate<F>(cfg: &McConfig, f: F) -> Result<McEstimate>
where
    F: Fn(&[f64; 3]) -> f64 + Sync,
{
    cfg.validate()?;
    let units = if cfg.antithetic {
        cfg.n_paths / 2
    } else {
        cfg.n_paths
    };
    let parts: Vec<Moments> = partition_sizes(units, cfg.partitions)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(k, len)| {
            let mut cur = GaussianStream::new(cfg.seed, k as u64).cursor();
            let mut m = Moments::default();
            for _ in 0..len {
                let z = [cur.next_normal(), cur.next_normal(), cur.next_normal()];
                let x = if cfg.antithetic {
                    0.5 * (f(&z) + f(&[-z[0], -z[1], -z[2]]))
                } else {
                    f(&z)
                };
                m.push(x);
            }
            m
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    let var = if total.n > 1.0 {
        (total.m2 / (total.n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        value: total.mean,
        std_error: (var / total.n).sqrt(),
        n_paths: cfg.n_paths,
    })
}

/// Applies `f` to every draw of every partition and folds the per-partition
/// results in index order with `merge`.
pub fn fold_partitions<T, F, M>(cfg: &McConfig, init: T, f: F, merge: M) -> Result<T>
where
    T: Clone + Send + Sync,
    F: Fn(&mut T, &[f64; 3]) + Sync,
    M: Fn(T, T) -> T,
{
    cfg.validate()?;
    let parts: Vec<T> = partition_sizes(cfg.n_paths, cfg.partitions)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(k, len)| {
            let mut cur = GaussianStream::new(cfg.seed, k as u64).cursor();
            let mut acc = init.clone();
            for _ in 0..len {
                let z = [cur.next_normal(), cur.next_normal(), cur.next_normal()];
                f(&mut acc, &z);
            }
            acc
        })
        .collect();
    Ok(parts.into_iter().fold(init, merge))
}
