//! Estimate types and the deterministic parallel Monte Carlo driver.
//!
//! Work is partitioned into fixed-size chunks; chunk `c` draws from the
//! substream `c` of the estimator's stream and partial sums are combined in
//! chunk order. The result is therefore a pure function of `(seed, stream)`
//! and identical for any number of worker threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::sampling::{Rng64, RngStream};

/// Draws per chunk of the parallel driver. Fixed so that results do not
/// depend on the thread count.
pub const MC_CHUNK: u64 = 8192;

/// Estimator backend selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    MonteCarlo,
}

/// A Monte Carlo estimate. No bare point estimates cross an interface: the
/// standard error, sample count, and stream coordinates always travel along.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub stream: u64,
}

impl MCEstimate {
    /// Lower end of the `k`-sigma interval.
    pub fn lower(&self, k: f64) -> f64 {
        self.mean - k * self.std_error
    }

    /// Standard error of the difference of two independent estimates.
    pub fn combined_se(&self, other: &MCEstimate) -> f64 {
        self.std_error.hypot(other.std_error)
    }

    /// Whether `target` lies within `k` standard errors of the mean.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }
}

/// A deterministic quadrature result with an error bound. `converged` is
/// false when the evaluation budget ran out before the tolerance was met;
/// the value is then a flagged partial result.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuadEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub evaluations: u64,
    pub converged: bool,
}

/// An estimate produced by either backend.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum GainEstimate {
    MonteCarlo(MCEstimate),
    Quadrature(QuadEstimate),
}

impl GainEstimate {
    pub fn value(&self) -> f64 {
        match self {
            GainEstimate::MonteCarlo(e) => e.mean,
            GainEstimate::Quadrature(e) => e.value,
        }
    }

    /// Standard error (Monte Carlo) or error bound (quadrature).
    pub fn uncertainty(&self) -> f64 {
        match self {
            GainEstimate::MonteCarlo(e) => e.std_error,
            GainEstimate::Quadrature(e) => e.error_bound,
        }
    }

    /// Lower confidence bound: mean minus 3 standard errors for Monte Carlo,
    /// value minus the error bound for quadrature.
    pub fn lower_confidence(&self) -> f64 {
        match self {
            GainEstimate::MonteCarlo(e) => e.lower(3.0),
            GainEstimate::Quadrature(e) => e.value - e.error_bound,
        }
    }

    pub fn converged(&self) -> bool {
        match self {
            GainEstimate::MonteCarlo(_) => true,
            GainEstimate::Quadrature(e) => e.converged,
        }
    }
}

fn finish(sum: f64, sum_sq: f64, n: u64, stream: RngStream) -> MCEstimate {
    let nf = n as f64;
    let mean = sum / nf;
    let var = if n > 1 {
        ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    MCEstimate {
        mean,
        std_error: (var / nf).sqrt(),
        n_samples: n,
        seed: stream.seed,
        stream: stream.stream,
    }
}

/// Mean of `f` over `n` draws, chunk-parallel and thread-count independent.
pub fn mc_mean<F>(stream: RngStream, n: u64, f: F) -> MCEstimate
where
    F: Fn(&mut Rng64) -> f64 + Sync,
{
    assert!(n > 0, "mc_mean needs at least one draw");
    let n_chunks = n.div_ceil(MC_CHUNK);
    let partials: Vec<(f64, f64, u64)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream.substream(c).rng();
            let count = MC_CHUNK.min(n - c * MC_CHUNK);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..count {
                let v = f(&mut rng);
                sum += v;
                sum_sq += v * v;
            }
            (sum, sum_sq, count)
        })
        .collect();
    let (mut sum, mut sum_sq, mut count) = (0.0, 0.0, 0u64);
    for (s, ss, c) in partials {
        sum += s;
        sum_sq += ss;
        count += c;
    }
    finish(sum, sum_sq, count, stream)
}

/// Means of `dim` statistics computed from shared draws. `fill` writes one
/// value per statistic for each draw.
pub fn mc_mean_multi<F>(stream: RngStream, n: u64, dim: usize, fill: F) -> Vec<MCEstimate>
where
    F: Fn(&mut Rng64, &mut [f64]) + Sync,
{
    assert!(n > 0 && dim > 0);
    let n_chunks = n.div_ceil(MC_CHUNK);
    let partials: Vec<(Vec<f64>, Vec<f64>, u64)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream.substream(c).rng();
            let count = MC_CHUNK.min(n - c * MC_CHUNK);
            let mut sums = vec![0.0; dim];
            let mut sq = vec![0.0; dim];
            let mut buf = vec![0.0; dim];
            for _ in 0..count {
                fill(&mut rng, &mut buf);
                for (k, &v) in buf.iter().enumerate() {
                    sums[k] += v;
                    sq[k] += v * v;
                }
            }
            (sums, sq, count)
        })
        .collect();
    let mut sums = vec![0.0; dim];
    let mut sq = vec![0.0; dim];
    let mut count = 0u64;
    for (s, ss, c) in partials {
        for k in 0..dim {
            sums[k] += s[k];
            sq[k] += ss[k];
        }
        count += c;
    }
    (0..dim).map(|k| finish(sums[k], sq[k], count, stream)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn mean_of_standard_normal_is_near_zero() {
        let est = mc_mean(RngStream::new(7, 0), 200_000, |rng| {
            let v: f64 = StandardNormal.sample(rng);
            v
        });
        assert!(est.mean.abs() <= 4.0 * est.std_error, "{est:?}");
        assert!((est.std_error - (1.0 / (200_000f64).sqrt())).abs() < 2e-4);
    }

    #[test]
    fn identical_streams_reproduce_bit_exactly() {
        let f = |rng: &mut Rng64| {
            let v: f64 = StandardNormal.sample(rng);
            v * v
        };
        let a = mc_mean(RngStream::new(42, 3), 50_000, f);
        let b = mc_mean(RngStream::new(42, 3), 50_000, f);
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let f = |rng: &mut Rng64| {
            let v: f64 = StandardNormal.sample(rng);
            v.tanh()
        };
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = pool1.install(|| mc_mean(RngStream::new(9, 1), 100_000, f));
        let b = pool4.install(|| mc_mean(RngStream::new(9, 1), 100_000, f));
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }

    #[test]
    fn multi_shares_draws_consistently() {
        // Statistic 0 duplicated as statistic 1 must agree bitwise.
        let ests = mc_mean_multi(RngStream::new(1, 0), 30_000, 2, |rng, out| {
            let v: f64 = StandardNormal.sample(rng);
            out[0] = v.abs();
            out[1] = v.abs();
        });
        assert_eq!(ests[0].mean.to_bits(), ests[1].mean.to_bits());
    }

    #[test]
    fn doubling_rounds_shrinks_std_error() {
        let f = |rng: &mut Rng64| {
            let v: f64 = StandardNormal.sample(rng);
            (v > 0.5) as u8 as f64
        };
        let a = mc_mean(RngStream::new(5, 0), 100_000, f);
        let b = mc_mean(RngStream::new(5, 1), 200_000, f);
        let ratio = b.std_error / a.std_error;
        assert!((ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.05, "ratio {ratio}");
    }
}
