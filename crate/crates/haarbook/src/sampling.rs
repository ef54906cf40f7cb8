//! Seeded random generation for every distribution the harness needs.
//!
//! The Haar kernel `k_1` gets two independent samplers:
//!
//! - a pivot sampler that draws the formal posterior of `theta` through a
//!   Bartlett-type triangular factor and pushes a normal vector through it,
//! - an accept/reject sampler under the envelope
//!   `k_1(w) <= k_0(w) (1 + w'w)^{(p-1)/2}`, whose right side is proportional
//!   to another kernel of the same family and is therefore exactly samplable.
//!
//! Agreement of the two is one of the main sampler checks in the test suite.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::Serialize;

use crate::densities::ObservationMatrix;
use crate::ltgroup::{log_psi_p, TriMatrix};
use crate::{Error, Result};

/// The base generator: ChaCha with 12 rounds, keyed per stream.
pub type Rng64 = ChaCha12Rng;

#[inline]
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A lightweight handle on a reproducible random stream.
///
/// Identical `(seed, stream)` pairs reproduce identical draw sequences;
/// distinct stream ids key statistically independent generators. Estimators
/// partition work by substream so results are independent of thread count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn root(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    /// Derives a child stream. Derivation is deterministic and collision
    /// probability across distinct paths is that of a 64-bit hash.
    pub fn substream(self, id: u64) -> Self {
        Self {
            seed: self.seed,
            stream: splitmix64(self.stream.rotate_left(17) ^ splitmix64(id)),
        }
    }

    /// Instantiates the generator: the full 256-bit key encodes seed and
    /// stream injectively.
    pub fn rng(self) -> Rng64 {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.stream.to_le_bytes());
        key[16..24].copy_from_slice(&0x9E37_79B9_7F4A_7C15u64.to_le_bytes());
        key[24..32].copy_from_slice(&0xD1B5_4A32_D192_ED03u64.to_le_bytes());
        ChaCha12Rng::from_seed(key)
    }
}

/// `p` iid standard normals.
pub fn sample_normal_vec(rng: &mut Rng64, p: usize) -> Vec<f64> {
    (0..p).map(|_| StandardNormal.sample(rng)).collect()
}

fn sample_chi_square(rng: &mut Rng64, df: f64) -> f64 {
    debug_assert!(df > 0.0);
    ChiSquared::new(df).expect("positive degrees of freedom").sample(rng)
}

/// Draws a `p x n` data matrix whose columns are iid `N_p(0, theta theta')`,
/// as `x_j = theta u_j` with `u_j` standard normal.
pub fn sample_data(rng: &mut Rng64, theta: &TriMatrix, n: usize) -> Result<ObservationMatrix> {
    let p = theta.dim();
    if n < p {
        return Err(Error::InvalidSampleSize { n, p });
    }
    let mut data = Vec::with_capacity(p * n);
    for _ in 0..n {
        let u = sample_normal_vec(rng, p);
        let col = theta.matvec(&u)?;
        data.extend_from_slice(&col);
    }
    ObservationMatrix::from_flat(p, n, data)
}

/// Draws from the kernel `k_0`: `u / sqrt(g)` with `u ~ N_p(0, I)` and
/// `g ~ chi^2_{n+1-p}`, so the density is proportional to
/// `(1 + w'w)^{-(n+1)/2}`.
pub fn sample_k0(rng: &mut Rng64, n: usize, p: usize) -> Result<Vec<f64>> {
    if p == 0 || n < p {
        return Err(Error::InvalidSampleSize { n, p });
    }
    Ok(sample_k0_real(rng, n as f64, p))
}

/// Generalized `k_0` draw with a real tail parameter `m > p - 1`; density
/// proportional to `(1 + w'w)^{-(m+1)/2}`. Used by the beta family and by
/// the rejection envelope.
pub(crate) fn sample_k0_real(rng: &mut Rng64, m: f64, p: usize) -> Vec<f64> {
    let nu = m + 1.0 - p as f64;
    debug_assert!(nu > 0.0);
    let g = sample_chi_square(rng, nu);
    let scale = 1.0 / g.sqrt();
    let mut w = sample_normal_vec(rng, p);
    for v in &mut w {
        *v *= scale;
    }
    w
}

/// The degree schedule of the Bartlett pivot: row `i` (1-based) gets
/// `n - i + 1` chi-square degrees of freedom. Validated empirically against
/// the closed-form `k_1` density by the goodness-of-fit suite.
pub fn bartlett_degrees(n: usize, p: usize) -> Result<Vec<f64>> {
    if p == 0 || n < p {
        return Err(Error::InvalidSampleSize { n, p });
    }
    Ok((1..=p).map(|i| (n - i + 1) as f64).collect())
}

/// A random triangular factor with `V_ii = sqrt(chi^2_{d_i})` on the
/// diagonal and standard normals below it. Lies in the group almost surely.
#[derive(Clone, Debug)]
pub struct BartlettSample {
    pub factor: TriMatrix,
    pub degrees: Vec<f64>,
}

pub fn sample_bartlett(rng: &mut Rng64, degrees: &[f64]) -> BartlettSample {
    let p = degrees.len();
    let mut entries = Vec::with_capacity(p * (p + 1) / 2);
    for (i, &d) in degrees.iter().enumerate() {
        for _ in 0..i {
            entries.push(StandardNormal.sample(rng));
        }
        entries.push(sample_chi_square(rng, d).sqrt());
    }
    BartlettSample {
        factor: TriMatrix::from_lower(p, entries).expect("positive chi diagonal"),
        degrees: degrees.to_vec(),
    }
}

/// Exact draw from `k_1` through the posterior pivot: draw the Bartlett
/// factor `V`, set `theta = V^{-1}` (the formal posterior of `theta` at
/// `L = I`), and return `theta u` with `u ~ N_p(0, I)`.
pub fn sample_k1_pivot(rng: &mut Rng64, n: usize, p: usize) -> Result<Vec<f64>> {
    let degrees = bartlett_degrees(n, p)?;
    let v = sample_bartlett(rng, &degrees);
    let u = sample_normal_vec(rng, p);
    // theta u = V^{-1} u, via forward substitution.
    v.factor.solve(&u)
}

/// Accept/reject sampler for `k_1` with an exactly-samplable envelope.
///
/// The bound `1/psi_p(w) <= (1 + w'w)^{(p-1)/2}` gives
/// `k_1(w) <= M h(w)` with `h` the generalized `k_0` kernel of tail
/// parameter `n - p + 1`, and the acceptance probability reduces to
/// `exp(-((p-1)/2) log(1 + w'w) - log psi_p(w))`. Requires `n >= 2p - 1` so
/// the envelope is integrable. Tracks its empirical acceptance rate.
#[derive(Clone, Debug)]
pub struct RejectionK1 {
    n: usize,
    p: usize,
    proposed: u64,
    accepted: u64,
}

impl RejectionK1 {
    pub fn new(n: usize, p: usize) -> Result<Self> {
        if p == 0 || n < p {
            return Err(Error::InvalidSampleSize { n, p });
        }
        if n + 1 < 2 * p {
            return Err(Error::EnvelopeUnavailable { n, p });
        }
        Ok(Self {
            n,
            p,
            proposed: 0,
            accepted: 0,
        })
    }

    pub fn sample(&mut self, rng: &mut Rng64) -> Vec<f64> {
        let m = (self.n - self.p + 1) as f64;
        loop {
            self.proposed += 1;
            let w = sample_k0_real(rng, m, self.p);
            let ww: f64 = w.iter().map(|v| v * v).sum();
            let log_accept = -0.5 * ((self.p - 1) as f64) * ww.ln_1p() - log_psi_p(&w);
            debug_assert!(log_accept <= 1e-12);
            let u: f64 = rand::Rng::random(rng);
            if u.ln() < log_accept {
                self.accepted += 1;
                return w;
            }
        }
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            f64::NAN
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    pub fn proposed(&self) -> u64 {
        self.proposed
    }
}

/// One-shot rejection draw from `k_1`.
pub fn sample_k1_rejection(rng: &mut Rng64, n: usize, p: usize) -> Result<Vec<f64>> {
    let mut sampler = RejectionK1::new(n, p)?;
    Ok(sampler.sample(rng))
}
