//! Verification library for Dutch-book arguments against invariant
//! predictive distributions in zero-mean multivariate normal prediction.
//!
//! The statistical setup: columns of a `p x n` data matrix `X` are iid
//! `N_p(0, Sigma)` with `Sigma` unknown, and a future observation
//! `Z ~ N_p(0, Sigma)` is to be predicted from `X = x`. Writing
//! `Sigma = theta theta'` with `theta` in the group of lower-triangular
//! matrices with positive diagonal, the right Haar measure on that group is
//! an improper prior whose formal posterior yields a distinguished
//! predictive density `q_H(z|x) = |L|^{-1} k_1(L^{-1} z)`, `L L' = x x'`.
//!
//! Any competing invariant predictive of the kernel form
//! `q_k(z|x) = |L|^{-1} k(L^{-1} z)` whose kernel `k` differs from `k_1` on a
//! set of positive measure admits a Dutch book: a bounded payoff that is fair
//! under `q_k` for every `x` but has expected gain `eps_0 > 0` for the
//! gambler under every model parameter, where
//! `eps_0 = integral of (k_1 - k)^+ = (1/2) L1-distance(k, k_1)`.
//!
//! This crate makes those statements executable: exact triangular-group
//! arithmetic, all densities in log space, seeded samplers for the kernels
//! involved, quadrature and Monte Carlo estimators for the gambler's gain,
//! and goodness-of-fit utilities for validating the samplers against the
//! closed forms.
//!
//! Every stochastic quantity is returned as an [`MCEstimate`] carrying its
//! standard error, sample count, and stream coordinates; estimators are
//! deterministic functions of `(seed, stream)` regardless of thread count.

pub mod densities;
pub mod dutchbook;
pub mod estimate;
pub mod ltgroup;
pub mod predictive;
pub mod quad;
pub mod sampling;
pub mod stats;

pub use densities::{ModelParams, ObservationMatrix};
pub use dutchbook::{
    dutch_book, epsilon0, haar_identity_check, model_expectation, si_verdict, simulate_betting,
    DutchBook, GainReport, PayoffScheme, TestFunction, Verdict,
};
pub use estimate::{GainEstimate, MCEstimate, Method, QuadEstimate};
pub use ltgroup::{tau, SpdMatrix, TriMatrix};
pub use predictive::{make_kernel, variation_distance, KernelFamily, PredictiveKernel};
pub use sampling::RngStream;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A symmetric matrix failed the triangular factorization: the pivot of
    /// the named leading minor was not strictly positive.
    #[error("not positive definite: leading {minor}x{minor} minor has a non-positive pivot")]
    NotPositiveDefinite { minor: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix entries ({i},{j}) and ({j},{i}) differ beyond tolerance; not symmetric")]
    NotSymmetric { i: usize, j: usize },

    #[error("invalid arguments: require n >= p >= 1, got n={n}, p={p}")]
    InvalidSampleSize { n: usize, p: usize },

    /// The beta family only yields a proper posterior for beta < (n-p+1)/2.
    #[error("improper posterior: require beta < (n-p+1)/2 = {limit}, got beta={beta}")]
    BetaOutOfRange { beta: f64, limit: f64 },

    #[error("rejection envelope unavailable for n={n}, p={p} (requires n >= 2p-1); use the pivot sampler")]
    EnvelopeUnavailable { n: usize, p: usize },

    #[error("kernels disagree on (n, p): ({n_a}, {p_a}) vs ({n_b}, {p_b})")]
    KernelMismatch {
        n_a: usize,
        p_a: usize,
        n_b: usize,
        p_b: usize,
    },

    #[error("need at least one round, got 0")]
    EmptyBudget,
}

pub type Result<T> = std::result::Result<T, Error>;
