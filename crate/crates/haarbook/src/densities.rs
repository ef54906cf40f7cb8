//! Closed-form densities of the model and of the predictive kernels, all in
//! log space.
//!
//! Notation used throughout the crate:
//!
//! - `f_1(x|theta)`: density of the `p x n` data matrix with iid
//!   `N_p(0, theta theta')` columns,
//! - `f_2(z|theta)`: density of the future observation,
//! - `C_{n,p} = Gamma((n+1)/2) / (pi^{p/2} Gamma((n-p+1)/2))`,
//! - `k_0(w) = C_{n,p} (1 + w'w)^{-(n+1)/2}`: the kernel of the formal-Bayes
//!   predictive under the Jeffreys-type prior (a multivariate Student shape),
//! - `k_1(w) = k_0(w) / psi_p(w)`: the kernel of the right-Haar predictive,
//! - `q_H(z|x) = |L|^{-1} k_1(L^{-1} z)` with `L L' = x x'`,
//! - the beta family `k_beta(w) = C_{n-2beta,p} (1 + w'w)^{-(n+1-2beta)/2}`,
//!   proper exactly when `beta < (n - p + 1)/2`.
//!
//! Exponentiation happens only at the reporting boundary; the quadratic forms
//! `tr (theta theta')^{-1} s` are evaluated through triangular solves rather
//! than explicit inverses.

use statrs::function::gamma::ln_gamma;

use crate::ltgroup::{log_psi_p, tau, SpdMatrix, TriMatrix};
use crate::{Error, Result};

use std::f64::consts::PI;

const LN_2PI: f64 = 1.837877066409345483560659472811; // ln(2 pi)

/// A full-rank `p x n` observation matrix, columns `x_1, ..., x_n`.
///
/// Rank (equivalently, positive definiteness of `x x'`) is testable through
/// [`chol_factor`](ObservationMatrix::chol_factor) succeeding.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationMatrix {
    p: usize,
    n: usize,
    data: Vec<f64>, // column-major, p * n
}

impl ObservationMatrix {
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let n = cols.len();
        let p = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != p) {
            return Err(Error::DimensionMismatch { expected: p, got: n });
        }
        Self::from_flat(p, n, cols.concat())
    }

    /// Column-major flat storage: entry `(i, j)` lives at `j * p + i`.
    pub fn from_flat(p: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        if p == 0 || n < p {
            return Err(Error::InvalidSampleSize { n, p });
        }
        if data.len() != p * n {
            return Err(Error::DimensionMismatch {
                expected: p * n,
                got: data.len(),
            });
        }
        Ok(Self { p, n, data })
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.p..(j + 1) * self.p]
    }

    pub fn flat(&self) -> &[f64] {
        &self.data
    }

    /// `S = X X'`.
    pub fn xxt(&self) -> SpdMatrix {
        let p = self.p;
        let mut rows = vec![vec![0.0; p]; p];
        for j in 0..self.n {
            let c = self.col(j);
            for i in 0..p {
                for k in 0..=i {
                    rows[i][k] += c[i] * c[k];
                }
            }
        }
        for i in 0..p {
            for k in (i + 1)..p {
                rows[i][k] = rows[k][i];
            }
        }
        SpdMatrix::from_rows(&rows).expect("xxt is symmetric by construction")
    }

    /// `L = tau(X X')`; fails for rank-deficient data.
    pub fn chol_factor(&self) -> Result<TriMatrix> {
        tau(&self.xxt())
    }

    /// Column-wise group action `x -> g x`.
    pub fn transform(&self, g: &TriMatrix) -> Result<Self> {
        if g.dim() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: g.dim(),
            });
        }
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.n {
            data.extend_from_slice(&g.matvec(self.col(j))?);
        }
        Ok(Self {
            p: self.p,
            n: self.n,
            data,
        })
    }

    /// Studentized columns `v_j = L^{-1} x_j`, the data part of the maximal
    /// invariant.
    pub fn studentized(&self, l: &TriMatrix) -> Result<Vec<Vec<f64>>> {
        (0..self.n).map(|j| l.solve(self.col(j))).collect()
    }

    /// FNV-1a digest of the dimensions and entry bytes; used to tag rows in
    /// trajectory exports.
    pub fn digest(&self) -> u64 {
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        let mut absorb = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01B3);
            }
        };
        absorb(&(self.p as u64).to_le_bytes());
        absorb(&(self.n as u64).to_le_bytes());
        for v in &self.data {
            absorb(&v.to_le_bytes());
        }
        h
    }
}

/// Model parameters: dimension, sample size, and the triangular `theta` with
/// `Sigma = theta theta'`.
#[derive(Clone, Debug)]
pub struct ModelParams {
    pub p: usize,
    pub n: usize,
    pub theta: TriMatrix,
}

impl ModelParams {
    pub fn new(theta: TriMatrix, n: usize) -> Result<Self> {
        let p = theta.dim();
        if n < p {
            return Err(Error::InvalidSampleSize { n, p });
        }
        Ok(Self { p, n, theta })
    }

    /// `Sigma = theta theta'`.
    pub fn sigma(&self) -> SpdMatrix {
        let p = self.p;
        let mut rows = vec![vec![0.0; p]; p];
        for i in 0..p {
            for j in 0..p {
                rows[i][j] = (0..p).map(|k| self.theta.get(i, k) * self.theta.get(j, k)).sum();
            }
        }
        SpdMatrix::from_rows(&rows).expect("theta theta' is symmetric")
    }
}

/// Log density of the data matrix:
/// `-n log|theta| - (np/2) log 2pi - (1/2) tr (theta theta')^{-1} s`,
/// with the trace evaluated as `sum_j |theta^{-1} x_j|^2`.
pub fn log_f1(x: &ObservationMatrix, theta: &TriMatrix) -> Result<f64> {
    let p = theta.dim();
    if x.p() != p {
        return Err(Error::DimensionMismatch { expected: p, got: x.p() });
    }
    let n = x.n();
    let mut quad = 0.0;
    for j in 0..n {
        let w = theta.solve(x.col(j))?;
        quad += w.iter().map(|v| v * v).sum::<f64>();
    }
    Ok(-(n as f64) * theta.log_det() - 0.5 * (n * p) as f64 * LN_2PI - 0.5 * quad)
}

/// Log density of the future observation; the `n = 1` case of [`log_f1`].
pub fn log_f2(z: &[f64], theta: &TriMatrix) -> Result<f64> {
    let p = theta.dim();
    if z.len() != p {
        return Err(Error::DimensionMismatch { expected: p, got: z.len() });
    }
    let w = theta.solve(z)?;
    let quad = w.iter().map(|v| v * v).sum::<f64>();
    Ok(-theta.log_det() - 0.5 * p as f64 * LN_2PI - 0.5 * quad)
}

/// `log C_{nu,p}` for a real tail parameter `nu > p - 1`.
pub(crate) fn log_c_real(nu: f64, p: usize) -> f64 {
    debug_assert!(nu > p as f64 - 1.0);
    ln_gamma(0.5 * (nu + 1.0)) - 0.5 * p as f64 * PI.ln() - ln_gamma(0.5 * (nu - p as f64 + 1.0))
}

/// `log C_{n,p}` with `C_{n,p} = Gamma((n+1)/2) / (pi^{p/2} Gamma((n-p+1)/2))`.
pub fn log_c_np(n: usize, p: usize) -> Result<f64> {
    if p == 0 || n < p {
        return Err(Error::InvalidSampleSize { n, p });
    }
    Ok(log_c_real(n as f64, p))
}

/// `log k_0(w) = log C_{n,p} - ((n+1)/2) log(1 + w'w)`.
pub fn log_k0(w: &[f64], n: usize) -> Result<f64> {
    let p = w.len();
    let c = log_c_np(n, p)?;
    let ww: f64 = w.iter().map(|v| v * v).sum();
    Ok(c - 0.5 * (n as f64 + 1.0) * ww.ln_1p())
}

/// `log k_1(w) = log k_0(w) - log psi_p(w)`.
pub fn log_k1(w: &[f64], n: usize) -> Result<f64> {
    Ok(log_k0(w, n)? - log_psi_p(w))
}

/// `log q_H(z|x) = -log|L| + log k_1(L^{-1} z)` with `L = tau(x x')`.
pub fn log_q_haar(z: &[f64], x: &ObservationMatrix) -> Result<f64> {
    let l = x.chol_factor()?;
    let w = l.solve(z)?;
    Ok(-l.log_det() + log_k1(&w, x.n())?)
}

/// Log kernel of the beta family:
/// `log C_{n-2beta,p} - ((n+1-2beta)/2) log(1 + w'w)`; `beta = 0` reproduces
/// `k_0` exactly. Errors when the posterior would be improper.
pub fn log_k_beta(w: &[f64], n: usize, beta: f64) -> Result<f64> {
    let p = w.len();
    if p == 0 || n < p {
        return Err(Error::InvalidSampleSize { n, p });
    }
    let limit = 0.5 * ((n - p + 1) as f64);
    if !beta.is_finite() || beta >= limit {
        return Err(Error::BetaOutOfRange { beta, limit });
    }
    let nu = n as f64 - 2.0 * beta;
    let ww: f64 = w.iter().map(|v| v * v).sum();
    Ok(log_c_real(nu, p) - 0.5 * (nu + 1.0) * ww.ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltgroup;
    use crate::quad::integrate_line;
    use approx::assert_relative_eq;
    use rand_distr::{Distribution, StandardNormal};

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    fn random_tri(rng: &mut impl rand::Rng, p: usize) -> TriMatrix {
        let mut entries = Vec::new();
        for i in 0..p {
            for _ in 0..i {
                let v: f64 = StandardNormal.sample(rng);
                entries.push(v);
            }
            let d: f64 = StandardNormal.sample(rng);
            entries.push((0.4 * d).exp() + 0.2);
        }
        TriMatrix::from_lower(p, entries).unwrap()
    }

    #[test]
    fn f1_scalar_case() {
        // p = 1, n = 1, theta = 1, x = 1: log[(2 pi)^{-1/2} e^{-1/2}].
        let x = ObservationMatrix::from_columns(&[vec![1.0]]).unwrap();
        let theta = TriMatrix::identity(1);
        let expect = -0.5 * (2.0 * PI).ln() - 0.5;
        assert_relative_eq!(log_f1(&x, &theta).unwrap(), expect, max_relative = 1e-14);
    }

    #[test]
    fn f1_identity_columns() {
        // X = I_2, theta = I: tr(s) = 2, |theta| = 1.
        let x = ObservationMatrix::from_columns(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let theta = TriMatrix::identity(2);
        let expect = -2.0 * (2.0 * PI).ln() - 1.0;
        assert_relative_eq!(log_f1(&x, &theta).unwrap(), expect, max_relative = 1e-14);
    }

    #[test]
    fn f1_matches_dense_mvn_oracle() {
        // Generic multivariate-normal log density evaluated with an explicit
        // 2x2 covariance inverse.
        let mut rng = crate::sampling::RngStream::new(5, 0).rng();
        let theta = random_tri(&mut rng, 2);
        let cols = vec![vec![0.3, -1.2], vec![2.0, 0.4]];
        let x = ObservationMatrix::from_columns(&cols).unwrap();

        let s00 = theta.get(0, 0) * theta.get(0, 0);
        let s10 = theta.get(1, 0) * theta.get(0, 0);
        let s11 = theta.get(1, 0) * theta.get(1, 0) + theta.get(1, 1) * theta.get(1, 1);
        let det = s00 * s11 - s10 * s10;
        let inv = [[s11 / det, -s10 / det], [-s10 / det, s00 / det]];
        let mut oracle = 0.0;
        for c in &cols {
            let quad = inv[0][0] * c[0] * c[0] + 2.0 * inv[0][1] * c[0] * c[1] + inv[1][1] * c[1] * c[1];
            oracle += -0.5 * det.ln() - (2.0 * PI).ln() - 0.5 * quad;
        }
        assert_relative_eq!(log_f1(&x, &theta).unwrap(), oracle, max_relative = 1e-12);
    }

    #[test]
    fn f1_group_invariance() {
        let mut rng = crate::sampling::RngStream::new(6, 0).rng();
        for _ in 0..50 {
            let p = 3;
            let theta = random_tri(&mut rng, p);
            let g = random_tri(&mut rng, p);
            let x = crate::sampling::sample_data(&mut rng, &theta, 4).unwrap();
            let lhs = log_f1(&x.transform(&g).unwrap(), &ltgroup::group_mul(&g, &theta).unwrap()).unwrap();
            let rhs = log_f1(&x, &theta).unwrap() - 4.0 * g.log_det();
            assert!(rel_close(lhs, rhs, 1e-11), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn f2_cases() {
        let theta = TriMatrix::identity(3);
        let expect = -1.5 * (2.0 * PI).ln();
        assert_relative_eq!(log_f2(&[0.0, 0.0, 0.0], &theta).unwrap(), expect);

        // p = 1, theta = 2, z = 2: log[(1/2)(2 pi)^{-1/2} e^{-1/2}].
        let theta1 = TriMatrix::from_diag(&[2.0]).unwrap();
        let expect1 = 0.5f64.ln() - 0.5 * (2.0 * PI).ln() - 0.5;
        assert_relative_eq!(log_f2(&[2.0], &theta1).unwrap(), expect1, max_relative = 1e-14);
    }

    #[test]
    fn f2_group_invariance() {
        let mut rng = crate::sampling::RngStream::new(7, 0).rng();
        for _ in 0..50 {
            let theta = random_tri(&mut rng, 2);
            let g = random_tri(&mut rng, 2);
            let z = vec![StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)];
            let gz = g.matvec(&z).unwrap();
            let lhs = log_f2(&gz, &ltgroup::group_mul(&g, &theta).unwrap()).unwrap();
            let rhs = log_f2(&z, &theta).unwrap() - g.log_det();
            assert!(rel_close(lhs, rhs, 1e-11), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn joint_model_invariance() {
        // log f_1 + log f_2 shifts by exactly -(n+1) log|g|.
        let mut rng = crate::sampling::RngStream::new(8, 0).rng();
        let theta = random_tri(&mut rng, 2);
        let g = random_tri(&mut rng, 2);
        let n = 3;
        let x = crate::sampling::sample_data(&mut rng, &theta, n).unwrap();
        let z = vec![0.4, -0.9];
        let gtheta = ltgroup::group_mul(&g, &theta).unwrap();
        let lhs = log_f1(&x.transform(&g).unwrap(), &gtheta).unwrap()
            + log_f2(&g.matvec(&z).unwrap(), &gtheta).unwrap();
        let rhs = log_f1(&x, &theta).unwrap() + log_f2(&z, &theta).unwrap()
            - (n as f64 + 1.0) * g.log_det();
        assert!(rel_close(lhs, rhs, 1e-11), "{lhs} vs {rhs}");
    }

    #[test]
    fn c_np_closed_forms() {
        // Gamma(2)/(pi Gamma(1)) = 1/pi and Gamma(1)/(sqrt(pi) Gamma(1/2)) = 1/pi.
        assert_relative_eq!(log_c_np(3, 2).unwrap(), (1.0 / PI).ln(), max_relative = 1e-14);
        assert_relative_eq!(log_c_np(1, 1).unwrap(), (1.0 / PI).ln(), max_relative = 1e-14);
        assert!(matches!(log_c_np(1, 2), Err(Error::InvalidSampleSize { .. })));
    }

    #[test]
    fn k0_normalizes_p1() {
        // Adaptive quadrature oracle for p = 1, n = 3.
        let q = integrate_line(|w| log_k0(&[w], 3).unwrap().exp(), 1e-10, 2_000_000);
        assert!(q.converged);
        assert!((q.value - 1.0).abs() < 1e-8, "integral {}", q.value);
    }

    #[test]
    fn k0_at_origin_and_monotone() {
        let n = 4;
        assert_relative_eq!(log_k0(&[0.0, 0.0], n).unwrap(), log_c_np(n, 2).unwrap());
        let a = log_k0(&[0.5, 0.0], n).unwrap();
        let b = log_k0(&[0.9, 0.0], n).unwrap();
        let c = log_k0(&[2.0, 1.0], n).unwrap();
        assert!(a > b && b > c);
    }

    #[test]
    fn k1_reduces_to_k0_when_p1() {
        for n in 1..=5 {
            for w in [-3.0, -0.4, 0.0, 1.7, 25.0] {
                assert_eq!(log_k1(&[w], n).unwrap(), log_k0(&[w], n).unwrap());
            }
        }
        assert_relative_eq!(log_k1(&[0.0, 0.0], 3).unwrap(), log_c_np(3, 2).unwrap());
    }

    #[test]
    fn k1_envelope_bound() {
        // k_1 <= k_0 (1 + w'w)^{(p-1)/2} pointwise.
        let mut rng = crate::sampling::RngStream::new(9, 0).rng();
        for p in 1..=4usize {
            let n = p + 2;
            for _ in 0..25_000 {
                let w: Vec<f64> = (0..p).map(|_| {
                    let v: f64 = StandardNormal.sample(&mut rng);
                    3.0 * v
                }).collect();
                let ww: f64 = w.iter().map(|v| v * v).sum();
                let lhs = log_k1(&w, n).unwrap();
                let rhs = log_k0(&w, n).unwrap() + 0.5 * ((p - 1) as f64) * ww.ln_1p();
                assert!(lhs <= rhs + 1e-12, "violated at {w:?}");
            }
        }
    }

    #[test]
    fn log_densities_finite_far_out() {
        let w = vec![1e6, -1e6, 5e5];
        assert!(log_k0(&w, 5).unwrap().is_finite());
        assert!(log_k1(&w, 5).unwrap().is_finite());
        assert!(log_k_beta(&w, 5, 0.7).unwrap().is_finite());
        assert!(log_psi_p(&w).is_finite());
    }

    #[test]
    fn q_haar_reduces_to_k1_at_identity_scatter() {
        // X = I_2 has X X' = I.
        let x = ObservationMatrix::from_columns(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let z = vec![0.7, -0.2];
        assert_relative_eq!(
            log_q_haar(&z, &x).unwrap(),
            log_k1(&z, 2).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn q_haar_scalar_value_and_formal_bayes_oracle() {
        // p = 1, s = 4, n = 3, z = 2: q_H = (1/2) k_0(1).
        let x = ObservationMatrix::from_columns(&[vec![2.0], vec![0.0], vec![0.0]]).unwrap();
        let val = log_q_haar(&[2.0], &x).unwrap();
        let expect = 0.5f64.ln() + log_k0(&[1.0], 3).unwrap();
        assert_relative_eq!(val, expect, max_relative = 1e-13);

        // Independent route: numerator and denominator of the formal Bayes
        // ratio m(x,z)/m_1(x) integrated over theta in (0, inf) against the
        // right Haar measure d theta / theta.
        let s = 4.0;
        let z = 2.0;
        let n = 3.0;
        let m_joint = integrate_line(
            |t: f64| {
                if t <= 0.0 {
                    return 0.0;
                }
                let log_f1 = -n * t.ln() - 0.5 * n * (2.0 * PI).ln() - 0.5 * s / (t * t);
                let log_f2 = -t.ln() - 0.5 * (2.0 * PI).ln() - 0.5 * z * z / (t * t);
                (log_f1 + log_f2 - t.ln()).exp()
            },
            1e-12,
            4_000_000,
        );
        let m_marginal = integrate_line(
            |t: f64| {
                if t <= 0.0 {
                    return 0.0;
                }
                let log_f1 = -n * t.ln() - 0.5 * n * (2.0 * PI).ln() - 0.5 * s / (t * t);
                (log_f1 - t.ln()).exp()
            },
            1e-12,
            4_000_000,
        );
        assert!(m_joint.converged && m_marginal.converged);
        let oracle = (m_joint.value / m_marginal.value).ln();
        assert_relative_eq!(val, oracle, max_relative = 1e-8);
    }

    #[test]
    fn q_haar_group_invariance() {
        let mut rng = crate::sampling::RngStream::new(10, 0).rng();
        for _ in 0..25 {
            let theta = random_tri(&mut rng, 2);
            let g = random_tri(&mut rng, 2);
            let x = crate::sampling::sample_data(&mut rng, &theta, 3).unwrap();
            let z = vec![StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)];
            let lhs = log_q_haar(&g.matvec(&z).unwrap(), &x.transform(&g).unwrap()).unwrap();
            let rhs = log_q_haar(&z, &x).unwrap() - g.log_det();
            assert!(rel_close(lhs, rhs, 1e-10), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn q_haar_rejects_rank_deficient() {
        let x = ObservationMatrix::from_columns(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            log_q_haar(&[0.0, 0.0], &x),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn beta_kernel_reduces_to_k0_at_zero() {
        for n in 2..=5 {
            for w in [vec![0.0, 0.0], vec![1.3, -0.4]] {
                assert_eq!(log_k_beta(&w, n, 0.0).unwrap(), log_k0(&w, n).unwrap());
            }
        }
    }

    #[test]
    fn beta_kernel_origin_value() {
        // w = 0, beta = 1/2, n = 3, p = 1: log C_{2,1} = log(1/2).
        assert_relative_eq!(
            log_k_beta(&[0.0], 3, 0.5).unwrap(),
            0.5f64.ln(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn beta_kernel_range_check() {
        // p = 2, n = 4: requires beta < 3/2.
        assert!(log_k_beta(&[0.0, 0.0], 4, 1.49).is_ok());
        match log_k_beta(&[0.0, 0.0], 4, 1.5) {
            Err(Error::BetaOutOfRange { limit, .. }) => assert_eq!(limit, 1.5),
            other => panic!("expected beta error, got {other:?}"),
        }
    }

    #[test]
    fn ln_gamma_closed_forms() {
        // The log-gamma backend must be accurate to 1e-13 relative against
        // integer and half-integer closed forms across [0.5, 200].
        let mut fact = 1.0f64; // (k-1)! running product in log space
        let mut log_fact = 0.0f64;
        for k in 1..=170usize {
            if k > 1 {
                fact = (k - 1) as f64;
                log_fact += fact.ln();
            }
            let got = ln_gamma(k as f64);
            assert!(
                (got - log_fact).abs() <= 1e-13 * log_fact.abs().max(1.0),
                "ln_gamma({k}) = {got}, want {log_fact}"
            );
        }
        // Gamma(k + 1/2) = (2k)! sqrt(pi) / (4^k k!)
        let mut log_half = 0.5 * PI.ln(); // log Gamma(1/2)
        for k in 0..=150usize {
            let got = ln_gamma(k as f64 + 0.5);
            assert!(
                (got - log_half).abs() <= 1e-13 * log_half.abs().max(1.0),
                "ln_gamma({k}.5) = {got}, want {log_half}"
            );
            log_half += (k as f64 + 0.5).ln(); // Gamma(x+1) = x Gamma(x)
        }
    }

    #[test]
    fn observation_digest_is_stable() {
        let x = ObservationMatrix::from_columns(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let y = ObservationMatrix::from_columns(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(x.digest(), y.digest());
        let z = ObservationMatrix::from_columns(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        assert_ne!(x.digest(), z.digest());
    }

    #[test]
    fn model_params_validation() {
        let theta = TriMatrix::identity(3);
        assert!(ModelParams::new(theta.clone(), 2).is_err());
        let m = ModelParams::new(theta, 5).unwrap();
        assert_eq!(m.sigma().get(1, 1), 1.0);
    }
}
