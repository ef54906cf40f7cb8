//! Arithmetic on the group of `p x p` lower-triangular matrices with
//! strictly positive diagonal entries.
//!
//! The group carries the model parameter `theta` (through `Sigma =
//! theta theta'`) and the data statistic `L = tau(x x')`. Besides the group
//! operations themselves, this module provides the measure-theoretic
//! quantities attached to the group:
//!
//! - the modular function `Delta(g) = prod_i g_ii^(p - 2i + 1)`,
//! - the log densities of the right and left invariant measures with respect
//!   to Lebesgue measure on the triangle, `-sum_i (p-i+1) log g_ii` and
//!   `-sum_i i log g_ii`,
//! - the function `psi_p(w) = (1 + w'w)^{-(p-1)/2} prod_{i<p} (1 + w_1^2 +
//!   ... + w_i^2)`, which coincides with `Delta(tau(I + ww'))`.
//!
//! All densities and Jacobians are computed in log space; exponentiation
//! happens only at the reporting boundary.

use crate::{Error, Result};

/// Relative tolerance for entrywise matrix comparisons.
pub const REL_TOL: f64 = 1e-12;

/// Pivot threshold for the triangular factorization, relative to the largest
/// diagonal entry of the input.
const PIVOT_REL_FLOOR: f64 = 1e-13;

/// A `p x p` lower-triangular matrix with strictly positive diagonal.
///
/// Only the lower triangle is stored (row-major, `p(p+1)/2` entries); the
/// strict upper triangle is identically zero by construction. Values are
/// immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct TriMatrix {
    dim: usize,
    entries: Vec<f64>,
}

#[inline]
fn tri_len(p: usize) -> usize {
    p * (p + 1) / 2
}

#[inline]
fn tri_idx(i: usize, j: usize) -> usize {
    debug_assert!(j <= i);
    i * (i + 1) / 2 + j
}

impl TriMatrix {
    /// Builds a matrix from the packed lower triangle, row-major:
    /// `[g00, g10, g11, g20, g21, g22, ...]`.
    pub fn from_lower(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 || entries.len() != tri_len(dim) {
            return Err(Error::DimensionMismatch {
                expected: tri_len(dim.max(1)),
                got: entries.len(),
            });
        }
        for i in 0..dim {
            let d = entries[tri_idx(i, i)];
            if !d.is_finite() || d <= 0.0 {
                return Err(Error::NotPositiveDefinite { minor: i + 1 });
            }
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::NotPositiveDefinite { minor: dim });
        }
        Ok(Self { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0.0; tri_len(dim)];
        for i in 0..dim {
            entries[tri_idx(i, i)] = 1.0;
        }
        Self { dim, entries }
    }

    pub fn from_diag(diag: &[f64]) -> Result<Self> {
        let mut m = Self::identity(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            if !d.is_finite() || d <= 0.0 {
                return Err(Error::NotPositiveDefinite { minor: i + 1 });
            }
            m.entries[tri_idx(i, i)] = d;
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(i, j)`; zero above the diagonal.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.entries[tri_idx(i, j)]
        }
    }

    #[inline]
    pub fn diag(&self, i: usize) -> f64 {
        self.entries[tri_idx(i, i)]
    }

    /// Packed lower triangle, row-major.
    pub fn packed(&self) -> &[f64] {
        &self.entries
    }

    /// Determinant: the product of the diagonal entries.
    pub fn det(&self) -> f64 {
        (0..self.dim).map(|i| self.diag(i)).product()
    }

    /// `log det`, computed as a sum of logs.
    pub fn log_det(&self) -> f64 {
        (0..self.dim).map(|i| self.diag(i).ln()).sum()
    }

    /// Group product `self * other`.
    pub fn mul(&self, other: &TriMatrix) -> Result<TriMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let p = self.dim;
        let mut entries = vec![0.0; tri_len(p)];
        for i in 0..p {
            for j in 0..=i {
                // (gh)_ij = sum_{k=j}^{i} g_ik h_kj
                let mut s = 0.0;
                for k in j..=i {
                    s += self.entries[tri_idx(i, k)] * other.entries[tri_idx(k, j)];
                }
                entries[tri_idx(i, j)] = s;
            }
        }
        Ok(TriMatrix { dim: p, entries })
    }

    /// Group inverse; stays in the group since the diagonal is positive.
    pub fn inverse(&self) -> TriMatrix {
        let p = self.dim;
        let mut inv = vec![0.0; tri_len(p)];
        for i in 0..p {
            inv[tri_idx(i, i)] = 1.0 / self.diag(i);
        }
        // Column by column forward substitution on g * inv = I.
        for j in 0..p {
            for i in (j + 1)..p {
                let mut s = 0.0;
                for k in j..i {
                    s += self.entries[tri_idx(i, k)] * inv[tri_idx(k, j)];
                }
                inv[tri_idx(i, j)] = -s / self.diag(i);
            }
        }
        TriMatrix { dim: p, entries: inv }
    }

    /// Solves `self * y = z` by forward substitution, without forming the
    /// inverse.
    pub fn solve(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: z.len(),
            });
        }
        let mut y = vec![0.0; self.dim];
        for i in 0..self.dim {
            let mut s = z[i];
            for k in 0..i {
                s -= self.entries[tri_idx(i, k)] * y[k];
            }
            y[i] = s / self.diag(i);
        }
        Ok(y)
    }

    /// Matrix-vector product `self * v`.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        let mut out = vec![0.0; self.dim];
        for i in 0..self.dim {
            let mut s = 0.0;
            for k in 0..=i {
                s += self.entries[tri_idx(i, k)] * v[k];
            }
            out[i] = s;
        }
        Ok(out)
    }

    /// Entrywise comparison with relative tolerance `rel` (absolute floor
    /// `rel` near zero).
    pub fn approx_eq(&self, other: &TriMatrix, rel: f64) -> bool {
        if self.dim != other.dim {
            return false;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .all(|(a, b)| (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0))
    }
}

/// A symmetric positive definite `p x p` matrix (dense storage).
///
/// Symmetry is enforced at construction; positive definiteness is testable
/// via [`tau`] succeeding.
#[derive(Clone, Debug, PartialEq)]
pub struct SpdMatrix {
    dim: usize,
    entries: Vec<f64>, // row-major, p*p
}

impl SpdMatrix {
    /// Builds from dense rows, checking symmetry to `1e-12` relative.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.len();
        if p == 0 || rows.iter().any(|r| r.len() != p) {
            return Err(Error::DimensionMismatch {
                expected: p.max(1),
                got: rows.first().map_or(0, |r| r.len()),
            });
        }
        for i in 0..p {
            for j in (i + 1)..p {
                let a = rows[i][j];
                let b = rows[j][i];
                if (a - b).abs() > REL_TOL * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
        }
        let mut entries = Vec::with_capacity(p * p);
        for i in 0..p {
            for j in 0..p {
                // Store the symmetrized value so downstream arithmetic sees
                // an exactly symmetric matrix.
                entries.push(0.5 * (rows[i][j] + rows[j][i]));
            }
        }
        Ok(Self { dim: p, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        Self { dim, entries }
    }

    /// `I_p + w w'`.
    pub fn identity_plus_outer(w: &[f64]) -> Self {
        let p = w.len();
        let mut m = Self::identity(p);
        for i in 0..p {
            for j in 0..p {
                m.entries[i * p + j] += w[i] * w[j];
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    /// Congruence transform `g * self * g'` for `g` in the group.
    pub fn congruence(&self, g: &TriMatrix) -> Result<SpdMatrix> {
        if g.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: g.dim(),
            });
        }
        let p = self.dim;
        // tmp = g * self
        let mut tmp = vec![0.0; p * p];
        for i in 0..p {
            for j in 0..p {
                let mut s = 0.0;
                for k in 0..=i {
                    s += g.get(i, k) * self.get(k, j);
                }
                tmp[i * p + j] = s;
            }
        }
        // out = tmp * g'
        let mut out = vec![0.0; p * p];
        for i in 0..p {
            for j in 0..p {
                let mut s = 0.0;
                for k in 0..=j {
                    s += tmp[i * p + k] * g.get(j, k);
                }
                out[i * p + j] = s;
            }
        }
        Ok(SpdMatrix { dim: p, entries: out })
    }
}

/// The unique group element `T` with `T T' = e` (lower Cholesky factor with
/// positive pivots).
///
/// Fails with the index of the offending leading minor when a pivot falls
/// below `1e-13` times the largest diagonal entry of the input.
pub fn tau(e: &SpdMatrix) -> Result<TriMatrix> {
    let p = e.dim();
    let max_diag = (0..p).map(|i| e.get(i, i)).fold(0.0f64, f64::max);
    let floor = PIVOT_REL_FLOOR * max_diag;
    let mut entries = vec![0.0; tri_len(p)];
    for i in 0..p {
        for j in 0..=i {
            let mut s = e.get(i, j);
            for k in 0..j {
                s -= entries[tri_idx(i, k)] * entries[tri_idx(j, k)];
            }
            if i == j {
                if !s.is_finite() || s <= floor {
                    return Err(Error::NotPositiveDefinite { minor: i + 1 });
                }
                entries[tri_idx(i, i)] = s.sqrt();
            } else {
                entries[tri_idx(i, j)] = s / entries[tri_idx(j, j)];
            }
        }
    }
    Ok(TriMatrix { dim: p, entries })
}

/// Group product. Closed in the group: the result is lower triangular with
/// positive diagonal, and determinants multiply.
pub fn group_mul(g: &TriMatrix, h: &TriMatrix) -> Result<TriMatrix> {
    g.mul(h)
}

/// Group inverse.
pub fn inverse(g: &TriMatrix) -> TriMatrix {
    g.inverse()
}

/// `g^{-1} z` via forward substitution.
pub fn solve_lower(g: &TriMatrix, z: &[f64]) -> Result<Vec<f64>> {
    g.solve(z)
}

/// Log of the modular function: `sum_i (p - 2i + 1) log g_ii` (1-based `i`).
pub fn log_modular_delta(g: &TriMatrix) -> f64 {
    let p = g.dim();
    (0..p)
        .map(|i| {
            let e = (p as f64) - 2.0 * ((i + 1) as f64) + 1.0;
            e * g.diag(i).ln()
        })
        .sum()
}

/// The modular function `Delta(g) = prod_i g_ii^(p - 2i + 1)`. Strictly
/// positive and multiplicative: `Delta(gh) = Delta(g) Delta(h)`.
pub fn modular_delta(g: &TriMatrix) -> f64 {
    log_modular_delta(g).exp()
}

/// Log density of the right invariant (Haar) measure with respect to
/// Lebesgue measure on the triangle: `-sum_i (p - i + 1) log g_ii`.
pub fn log_haar_right_density(g: &TriMatrix) -> f64 {
    let p = g.dim();
    -(0..p)
        .map(|i| ((p - i) as f64) * g.diag(i).ln())
        .sum::<f64>()
}

/// Log density of the left invariant measure: `-sum_i i log g_ii`. Differs
/// from the right density by exactly `log Delta(g)`.
pub fn log_haar_left_density(g: &TriMatrix) -> f64 {
    -(0..g.dim())
        .map(|i| ((i + 1) as f64) * g.diag(i).ln())
        .sum::<f64>()
}

/// `log psi_p(w)`, evaluated from the product form directly:
/// `psi_p(w) = (1 + w'w)^{-(p-1)/2} prod_{i=1}^{p-1} (1 + w_1^2 + ... + w_i^2)`
/// and `psi_1 = 1`.
pub fn log_psi_p(w: &[f64]) -> f64 {
    let p = w.len();
    assert!(p >= 1, "psi_p requires a nonempty vector");
    if p == 1 {
        return 0.0;
    }
    let mut partial = 0.0;
    let mut log_prod = 0.0;
    for &wi in &w[..p - 1] {
        partial += wi * wi;
        log_prod += partial.ln_1p();
    }
    let total = partial + w[p - 1] * w[p - 1];
    log_prod - 0.5 * ((p - 1) as f64) * total.ln_1p()
}

/// `psi_p(w)`; equals `Delta(tau(I + ww'))`, though it is never computed
/// that way (the identity stays an independent check).
pub fn psi_p(w: &[f64]) -> f64 {
    log_psi_p(w).exp()
}
