//! Goodness-of-fit utilities used to validate the samplers against the
//! closed-form densities: one- and two-sample Kolmogorov-Smirnov tests and a
//! chi-square test against fully specified cell probabilities.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Result of a Kolmogorov-Smirnov test.
#[derive(Clone, Copy, Debug)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Result of a chi-square goodness-of-fit test.
#[derive(Clone, Copy, Debug)]
pub struct Chi2Result {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Asymptotic Kolmogorov survival function `Q(lambda) = 2 sum (-1)^{j-1}
/// exp(-2 j^2 lambda^2)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let sqrt_n = n_eff.sqrt();
    kolmogorov_q((sqrt_n + 0.12 + 0.11 / sqrt_n) * d)
}

/// One-sample KS test of `samples` against the continuous CDF `cdf`.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> KsResult {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("no NaN samples"));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        let hi = (i as f64 + 1.0) / n - f;
        let lo = f - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    KsResult {
        statistic: d,
        p_value: ks_p_value(d, n),
    }
}

/// Two-sample KS test.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> KsResult {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|u, v| u.partial_cmp(v).expect("no NaN samples"));
    ys.sort_by(|u, v| u.partial_cmp(v).expect("no NaN samples"));
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let mut i = 0;
    let mut j = 0;
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        if xs[i] <= ys[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let n_eff = na * nb / (na + nb);
    KsResult {
        statistic: d,
        p_value: ks_p_value(d, n_eff),
    }
}

/// Chi-square test of observed counts against fully specified cell
/// probabilities (no fitted parameters: `dof = cells - 1`). Probabilities
/// must sum to 1 up to rounding; cells with tiny expectations should be
/// merged by the caller beforehand.
pub fn chi2_gof(observed: &[u64], probs: &[f64]) -> Chi2Result {
    assert_eq!(observed.len(), probs.len());
    assert!(observed.len() >= 2, "need at least two cells");
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    for (&o, &p) in observed.iter().zip(probs) {
        let e = p * total as f64;
        assert!(e > 0.0, "non-positive expected count");
        let diff = o as f64 - e;
        stat += diff * diff / e;
    }
    let dof = observed.len() - 1;
    let dist = ChiSquared::new(dof as f64).expect("positive dof");
    Chi2Result {
        statistic: stat,
        dof,
        p_value: dist.sf(stat),
    }
}

/// Bins samples into `edges.len() + 1` cells: `(-inf, e_0), [e_0, e_1), ...,
/// [e_last, inf)`. Edges must be sorted.
pub fn bin_by_edges(samples: &[f64], edges: &[f64]) -> Vec<u64> {
    let mut counts = vec![0u64; edges.len() + 1];
    for &x in samples {
        let idx = edges.partition_point(|&e| e <= x);
        counts[idx] += 1;
    }
    counts
}

/// Merges trailing small-expectation cells into their neighbors so every
/// cell has expected count at least `min_expected`. Returns the merged
/// (counts, probs) pair, preserving order.
pub fn merge_small_cells(
    counts: &[u64],
    probs: &[f64],
    total: u64,
    min_expected: f64,
) -> (Vec<u64>, Vec<f64>) {
    let mut out_c: Vec<u64> = Vec::new();
    let mut out_p: Vec<f64> = Vec::new();
    for (&c, &p) in counts.iter().zip(probs) {
        if !out_p.is_empty() && p * total as f64 >= min_expected {
            out_c.push(c);
            out_p.push(p);
        } else if out_p.is_empty() {
            out_c.push(c);
            out_p.push(p);
        } else {
            let last = out_p.len() - 1;
            out_c[last] += c;
            out_p[last] += p;
        }
    }
    // Sweep once more from the front in case the head stayed small.
    while out_p.len() > 1 && out_p[0] * (total as f64) < min_expected {
        out_c[0] += out_c.remove(1);
        out_p[0] += out_p.remove(1);
    }
    (out_c, out_p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};
    use statrs::distribution::Normal;

    #[test]
    fn kolmogorov_limits() {
        assert_eq!(kolmogorov_q(0.0), 1.0);
        assert!(kolmogorov_q(0.3) > 0.99);
        assert!(kolmogorov_q(2.0) < 1e-3);
    }

    #[test]
    fn ks_accepts_matching_normal() {
        let mut rng = crate::sampling::RngStream::new(77, 0).rng();
        let xs: Vec<f64> = (0..50_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = Normal::new(0.0, 1.0).unwrap();
        let res = ks_test(&xs, |x| norm.cdf(x));
        assert!(res.p_value > 1e-3, "p = {}", res.p_value);
    }

    #[test]
    fn ks_rejects_shifted_normal() {
        let mut rng = crate::sampling::RngStream::new(78, 0).rng();
        let xs: Vec<f64> = (0..50_000)
            .map(|_| {
                let v: f64 = StandardNormal.sample(&mut rng);
                v + 0.05
            })
            .collect();
        let norm = Normal::new(0.0, 1.0).unwrap();
        let res = ks_test(&xs, |x| norm.cdf(x));
        assert!(res.p_value < 1e-3, "p = {}", res.p_value);
    }

    #[test]
    fn two_sample_ks_same_distribution() {
        let mut rng = crate::sampling::RngStream::new(79, 0).rng();
        let xs: Vec<f64> = (0..30_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let ys: Vec<f64> = (0..30_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let res = two_sample_ks(&xs, &ys);
        assert!(res.p_value > 1e-3, "p = {}", res.p_value);
        let zs: Vec<f64> = ys.iter().map(|v| v * 1.1).collect();
        assert!(two_sample_ks(&xs, &zs).p_value < 1e-3);
    }

    #[test]
    fn chi2_uniform_cells() {
        let mut rng = crate::sampling::RngStream::new(80, 0).rng();
        let mut counts = vec![0u64; 10];
        for _ in 0..100_000 {
            let u: f64 = rand::Rng::random(&mut rng);
            counts[(u * 10.0) as usize % 10] += 1;
        }
        let probs = vec![0.1; 10];
        let res = chi2_gof(&counts, &probs);
        assert_eq!(res.dof, 9);
        assert!(res.p_value > 1e-3, "p = {}", res.p_value);
    }

    #[test]
    fn binning_and_merging() {
        let counts = bin_by_edges(&[-2.0, -0.5, 0.1, 0.2, 3.0], &[-1.0, 0.0, 1.0]);
        assert_eq!(counts, vec![1, 1, 2, 1]);
        let (mc, mp) = merge_small_cells(&[1, 50, 1, 48], &[0.01, 0.5, 0.01, 0.48], 100, 5.0);
        assert_eq!(mc.iter().sum::<u64>(), 100);
        assert!((mp.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(mp.iter().all(|&p| p * 100.0 >= 5.0));
    }
}
