//! The predictive-kernel abstraction: every invariant predictive handled by
//! this crate has the form `q_k(z|x) = |L|^{-1} k(L^{-1} z)` with `L L' = x x'`
//! and is determined by a single density `k` on `R^p`.
//!
//! Built-in kernels:
//!
//! - `naive`: `k = N_p(0, n^{-1} I)`, so `Q(.|x) = N_p(0, n^{-1} s)`,
//! - `jeffreys`: `k = k_0`, the formal-Bayes predictive under the
//!   Jeffreys-type prior,
//! - `haar`: `k = k_1`, the right-Haar predictive,
//! - `beta(b)`: the family `k = C_{n-2b,p} (1 + w'w)^{-(n+1-2b)/2}`.
//!
//! Total-variation distance between two kernels is available by quadrature
//! (dimension 1 and 2) and by mixture importance sampling: drawing from
//! `(k_a + k_b)/2` makes the integrand `|k_a - k_b| / (k_a + k_b)` bounded by
//! one, so the estimator has finite variance for any kernel pair.

use std::f64::consts::PI;

use crate::densities::{log_k0, log_k1, log_k_beta, ObservationMatrix};
use crate::estimate::{mc_mean, GainEstimate, MCEstimate, Method, QuadEstimate};
use crate::quad::{integrate_line, integrate_plane_polar};
use crate::sampling::{
    sample_k0, sample_k0_real, sample_k1_pivot, sample_normal_vec, Rng64, RngStream,
};
use crate::{Error, Result};

/// Which kernel family a predictive belongs to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelFamily {
    Naive,
    Jeffreys,
    Haar,
    Beta(f64),
}

/// An invariant predictive in kernel form, with its log density and an exact
/// sampler.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictiveKernel {
    family: KernelFamily,
    n: usize,
    p: usize,
}

/// Builds a kernel, validating `n >= p >= 1` and the beta range.
pub fn make_kernel(family: KernelFamily, n: usize, p: usize) -> Result<PredictiveKernel> {
    PredictiveKernel::new(family, n, p)
}

impl PredictiveKernel {
    pub fn new(family: KernelFamily, n: usize, p: usize) -> Result<Self> {
        if p == 0 || n < p {
            return Err(Error::InvalidSampleSize { n, p });
        }
        if let KernelFamily::Beta(beta) = family {
            let limit = 0.5 * ((n - p + 1) as f64);
            if !beta.is_finite() || beta >= limit {
                return Err(Error::BetaOutOfRange { beta, limit });
            }
        }
        Ok(Self { family, n, p })
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn name(&self) -> String {
        match self.family {
            KernelFamily::Naive => "naive".into(),
            KernelFamily::Jeffreys => "jeffreys".into(),
            KernelFamily::Haar => "haar".into(),
            KernelFamily::Beta(b) => format!("beta({b})"),
        }
    }

    /// Log kernel density at `w`.
    pub fn log_k(&self, w: &[f64]) -> f64 {
        assert_eq!(w.len(), self.p, "kernel dimension mismatch");
        match self.family {
            KernelFamily::Naive => {
                let n = self.n as f64;
                let ww: f64 = w.iter().map(|v| v * v).sum();
                0.5 * self.p as f64 * (n / (2.0 * PI)).ln() - 0.5 * n * ww
            }
            KernelFamily::Jeffreys => log_k0(w, self.n).expect("validated at construction"),
            KernelFamily::Haar => log_k1(w, self.n).expect("validated at construction"),
            KernelFamily::Beta(b) => log_k_beta(w, self.n, b).expect("validated at construction"),
        }
    }

    /// Exact draw from `k`.
    pub fn sample_w(&self, rng: &mut Rng64) -> Vec<f64> {
        match self.family {
            KernelFamily::Naive => {
                let scale = 1.0 / (self.n as f64).sqrt();
                let mut u = sample_normal_vec(rng, self.p);
                for v in &mut u {
                    *v *= scale;
                }
                u
            }
            KernelFamily::Jeffreys => {
                sample_k0(rng, self.n, self.p).expect("validated at construction")
            }
            KernelFamily::Haar => {
                sample_k1_pivot(rng, self.n, self.p).expect("validated at construction")
            }
            KernelFamily::Beta(b) => sample_k0_real(rng, self.n as f64 - 2.0 * b, self.p),
        }
    }

    /// `log q_k(z|x) = -log|L| + log k(L^{-1} z)`.
    pub fn log_predictive(&self, z: &[f64], x: &ObservationMatrix) -> Result<f64> {
        if x.p() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: x.p(),
            });
        }
        let l = x.chol_factor()?;
        let w = l.solve(z)?;
        Ok(-l.log_det() + self.log_k(&w))
    }

    /// Draw from `Q(.|x)`: `z = L w` with `w ~ k`.
    pub fn sample_predictive(&self, rng: &mut Rng64, x: &ObservationMatrix) -> Result<Vec<f64>> {
        let l = x.chol_factor()?;
        let w = self.sample_w(rng);
        l.matvec(&w)
    }

    /// Checks that `exp(log_k)` integrates to one: quadrature for `p <= 2`,
    /// importance sampling against a product-Cauchy proposal otherwise (that
    /// proposal dominates the axis directions where `k_1` decays slowest, so
    /// the weights have finite variance).
    pub fn normalization(&self, method: Method, budget: u64, stream: RngStream) -> GainEstimate {
        match (method, self.p) {
            (Method::Quadrature, 1) => {
                GainEstimate::Quadrature(integrate_line(|w| self.log_k(&[w]).exp(), 1e-9, budget))
            }
            (Method::Quadrature, 2) => GainEstimate::Quadrature(integrate_plane_polar(
                |a, b| self.log_k(&[a, b]).exp(),
                1e-8,
                budget,
            )),
            _ => GainEstimate::MonteCarlo(mc_mean(stream, budget, |rng| {
                let (w, log_h) = sample_product_cauchy(rng, self.p);
                (self.log_k(&w) - log_h).exp()
            })),
        }
    }
}

/// Draws from the product-Cauchy proposal and returns `(w, log density)`.
fn sample_product_cauchy(rng: &mut Rng64, p: usize) -> (Vec<f64>, f64) {
    let mut w = Vec::with_capacity(p);
    let mut log_h = -(p as f64) * PI.ln();
    for _ in 0..p {
        let u: f64 = rand::Rng::random(rng);
        let x = (PI * (u - 0.5)).tan();
        log_h -= x.mul_add(x, 1.0).ln();
        w.push(x);
    }
    (w, log_h)
}

/// Total-variation distance `(1/2) integral |k_a - k_b|` between two kernels
/// on the same `(n, p)`. Independent of `x` for the induced predictives.
///
/// Quadrature is available for `p <= 2`; for larger `p`, or when
/// `Method::MonteCarlo` is requested, mixture importance sampling is used
/// with `budget` draws.
pub fn variation_distance(
    a: &PredictiveKernel,
    b: &PredictiveKernel,
    method: Method,
    budget: u64,
    stream: RngStream,
) -> Result<GainEstimate> {
    check_same_shape(a, b)?;
    let p = a.p;
    match (method, p) {
        (Method::Quadrature, 1) => {
            let q = integrate_line(
                |w| {
                    let la = a.log_k(&[w]);
                    let lb = b.log_k(&[w]);
                    0.5 * abs_exp_diff(la, lb)
                },
                1e-9,
                budget,
            );
            Ok(GainEstimate::Quadrature(q))
        }
        (Method::Quadrature, 2) => {
            let q = integrate_plane_polar(
                |u, v| {
                    let w = [u, v];
                    0.5 * abs_exp_diff(a.log_k(&w), b.log_k(&w))
                },
                1e-8,
                budget,
            );
            Ok(GainEstimate::Quadrature(q))
        }
        _ => Ok(GainEstimate::MonteCarlo(mixture_is(
            a,
            b,
            stream,
            budget,
            |la, lb| {
                // |k_a - k_b| / (k_a + k_b), bounded by 1.
                let m = la.max(lb);
                let ea = (la - m).exp();
                let eb = (lb - m).exp();
                (ea - eb).abs() / (ea + eb)
            },
        ))),
    }
}

/// `|exp(la) - exp(lb)|` without overflow concerns (densities are bounded).
fn abs_exp_diff(la: f64, lb: f64) -> f64 {
    (la.exp() - lb.exp()).abs()
}

/// Importance sampling with the equal mixture of the two kernels as
/// proposal. `g(la, lb)` must be the integrand divided by the mixture
/// density, expressed through the two log densities.
pub(crate) fn mixture_is<G>(
    a: &PredictiveKernel,
    b: &PredictiveKernel,
    stream: RngStream,
    budget: u64,
    g: G,
) -> MCEstimate
where
    G: Fn(f64, f64) -> f64 + Sync,
{
    mc_mean(stream, budget, |rng| {
        let from_a: bool = rand::Rng::random(rng);
        let w = if from_a { a.sample_w(rng) } else { b.sample_w(rng) };
        g(a.log_k(&w), b.log_k(&w))
    })
}

pub(crate) fn check_same_shape(a: &PredictiveKernel, b: &PredictiveKernel) -> Result<()> {
    if a.n != b.n || a.p != b.p {
        return Err(Error::KernelMismatch {
            n_a: a.n,
            p_a: a.p,
            n_b: b.n,
            p_b: b.p,
        });
    }
    Ok(())
}

/// Convenience: the Haar kernel matching another kernel's `(n, p)`.
pub(crate) fn haar_twin(q: &PredictiveKernel) -> PredictiveKernel {
    PredictiveKernel::new(KernelFamily::Haar, q.n, q.p).expect("shape already validated")
}

#[allow(dead_code)]
pub(crate) fn quad_estimate_exact_zero() -> QuadEstimate {
    QuadEstimate {
        value: 0.0,
        error_bound: 0.0,
        evaluations: 0,
        converged: true,
    }
}
