//! Shared helpers for the integration suites: histogram goodness-of-fit
//! against closed-form densities, with cell probabilities obtained by
//! quadrature (an independent route from the samplers under test).

use haarbook::quad::integrate_interval;
use haarbook::stats::{bin_by_edges, chi2_gof, merge_small_cells, Chi2Result};

/// Expected bin probabilities for a 1-d density on `(lo, hi)` with the given
/// interior edges; the first and last bins absorb the tails via wide
/// integration limits.
pub fn probs_1d<F: Fn(f64) -> f64>(pdf: F, edges: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut cuts = Vec::with_capacity(edges.len() + 2);
    cuts.push(lo);
    cuts.extend_from_slice(edges);
    cuts.push(hi);
    cuts.windows(2)
        .map(|w| integrate_interval(&pdf, w[0], w[1], 1e-11, 200_000).value)
        .collect()
}

/// Chi-square GOF of scalar samples against a density via quadrature cell
/// probabilities. `edges` are interior bin edges; tails integrate to
/// `(lo, hi)`, which must carry all but a negligible sliver of mass.
pub fn chi2_1d<F: Fn(f64) -> f64>(
    samples: &[f64],
    pdf: F,
    edges: &[f64],
    lo: f64,
    hi: f64,
) -> Chi2Result {
    let counts = bin_by_edges(samples, edges);
    let probs = probs_1d(pdf, edges, lo, hi);
    let total: u64 = counts.iter().sum();
    let (counts, mut probs) = merge_small_cells(&counts, &probs, total, 10.0);
    // Absorb quadrature truncation into the cells proportionally.
    let mass: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= mass;
    }
    chi2_gof(&counts, &probs)
}

fn rect_prob<F: Fn(f64, f64) -> f64>(pdf: &F, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    integrate_interval(
        |x| integrate_interval(|y| pdf(x, y), y0, y1, 1e-12, 20_000).value,
        x0,
        x1,
        1e-10,
        40_000,
    )
    .value
}

/// Chi-square GOF of 2-d samples against a density: a `grid x grid` lattice
/// of cells on `[-half, half]^2` plus one cell for everything outside. Cell
/// probabilities come from nested quadrature of the density.
pub fn chi2_2d<F: Fn(f64, f64) -> f64>(
    samples: &[Vec<f64>],
    pdf: F,
    half: f64,
    grid: usize,
) -> Chi2Result {
    let step = 2.0 * half / grid as f64;
    let edge = |k: usize| -half + k as f64 * step;

    let mut probs = Vec::with_capacity(grid * grid + 1);
    let mut counts = vec![0u64; grid * grid + 1];
    let mut inside_mass = 0.0;
    for i in 0..grid {
        for j in 0..grid {
            let p = rect_prob(&pdf, edge(i), edge(i + 1), edge(j), edge(j + 1));
            probs.push(p);
            inside_mass += p;
        }
    }
    probs.push((1.0 - inside_mass).max(1e-12));

    for s in samples {
        let (x, y) = (s[0], s[1]);
        if x < -half || x >= half || y < -half || y >= half {
            counts[grid * grid] += 1;
        } else {
            let i = ((x + half) / step) as usize;
            let j = ((y + half) / step) as usize;
            counts[i.min(grid - 1) * grid + j.min(grid - 1)] += 1;
        }
    }

    let total: u64 = counts.iter().sum();
    let (counts, mut probs) = merge_small_cells(&counts, &probs, total, 10.0);
    let mass: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= mass;
    }
    chi2_gof(&counts, &probs)
}

/// Surface area of the unit sphere in `R^p`: `2 pi^{p/2} / Gamma(p/2)`.
pub fn sphere_area(p: usize) -> f64 {
    let half_p = 0.5 * p as f64;
    2.0 * std::f64::consts::PI.powf(half_p) / statrs::function::gamma::gamma(half_p)
}
