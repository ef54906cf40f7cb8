//! Deterministic quadrature backends for the low-dimensional integrals.
//!
//! Everything is built on budgeted adaptive Simpson panels. Integrals over
//! the whole line use the substitution `x = tan(u)`, which compactifies the
//! domain and handles the polynomial tails of the kernels; integrals over the
//! plane use polar coordinates with the same substitution in the radius.

use crate::estimate::QuadEstimate;

const MAX_DEPTH: u32 = 48;

struct Budget {
    evals: u64,
    max_evals: u64,
    exhausted: bool,
}

impl Budget {
    fn new(max_evals: u64) -> Self {
        Self {
            evals: 0,
            max_evals,
            exhausted: false,
        }
    }

    fn take(&mut self, k: u64) -> bool {
        if self.evals + k > self.max_evals {
            self.exhausted = true;
            false
        } else {
            self.evals += k;
            true
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut Budget,
) -> (f64, f64) {
    if !budget.take(2) {
        return (whole, tol);
    }
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return (left + right + delta / 15.0, delta.abs() / 15.0);
    }
    let (v1, e1) = adapt(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1, budget);
    let (v2, e2) = adapt(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1, budget);
    (v1 + v2, e1 + e2)
}

fn integrate_with<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    panels: usize,
    budget: &mut Budget,
) -> (f64, f64) {
    let mut value = 0.0;
    let mut err = 0.0;
    let h = (b - a) / panels as f64;
    let panel_tol = tol / panels as f64;
    for k in 0..panels {
        let pa = a + k as f64 * h;
        let pb = pa + h;
        let pm = 0.5 * (pa + pb);
        if !budget.take(3) {
            return (value, f64::INFINITY);
        }
        let fa = f(pa);
        let fm = f(pm);
        let fb = f(pb);
        let whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        let (v, e) = adapt(f, pa, fa, pm, fm, pb, fb, whole, panel_tol, MAX_DEPTH, budget);
        value += v;
        err += e;
    }
    (value, err)
}

/// Adaptive integral of `f` over `[a, b]` to absolute tolerance `tol`, with
/// at most `max_evals` integrand evaluations.
pub fn integrate_interval<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_evals: u64,
) -> QuadEstimate {
    let mut budget = Budget::new(max_evals);
    let (value, err) = integrate_with(&f, a, b, tol, 16, &mut budget);
    QuadEstimate {
        value,
        error_bound: err,
        evaluations: budget.evals,
        converged: !budget.exhausted && err.is_finite() && err <= 10.0 * tol,
    }
}

/// Integral of `f` over the whole line via `x = tan(u)`.
///
/// The integrand must decay at least like `|x|^{-2}` so that
/// `f(x) (1 + x^2)` stays bounded; every kernel handled by this crate does.
pub fn integrate_line<F: Fn(f64) -> f64>(f: F, tol: f64, max_evals: u64) -> QuadEstimate {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let g = move |u: f64| {
        let x = u.tan();
        f(x) * (1.0 + x * x)
    };
    let mut budget = Budget::new(max_evals);
    let (value, err) = integrate_with(&g, -half_pi, half_pi, tol, 16, &mut budget);
    QuadEstimate {
        value,
        error_bound: err,
        evaluations: budget.evals,
        converged: !budget.exhausted && err.is_finite() && err <= 10.0 * tol,
    }
}

/// Integral of `f` over the plane in polar coordinates: an adaptive angular
/// integral of adaptive radial integrals, with `r = tan(u)` in the radius.
pub fn integrate_plane_polar<F: Fn(f64, f64) -> f64>(
    f: F,
    tol: f64,
    max_evals: u64,
) -> QuadEstimate {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let two_pi = std::f64::consts::TAU;
    let inner_tol = tol / (4.0 * two_pi);
    let budget = std::cell::RefCell::new(Budget::new(max_evals));
    let inner_err_seen = std::cell::Cell::new(0.0f64);

    let radial = |phi: f64| {
        let (sin_phi, cos_phi) = phi.sin_cos();
        let g = |u: f64| {
            let r = u.tan();
            f(r * cos_phi, r * sin_phi) * r * (1.0 + r * r)
        };
        let mut b = budget.borrow_mut();
        let (value, err) = integrate_with(&g, 0.0, half_pi, inner_tol, 8, &mut b);
        inner_err_seen.set(inner_err_seen.get().max(err));
        value
    };

    // Outer adaptive pass over the angle. The budget is shared with the
    // radial integrals through the RefCell.
    let mut outer_budget = Budget::new(u64::MAX);
    let (value, outer_err) = integrate_with(&radial, 0.0, two_pi, 0.5 * tol, 16, &mut outer_budget);

    let b = budget.into_inner();
    let err = outer_err + two_pi * inner_err_seen.get().max(inner_tol);
    QuadEstimate {
        value,
        error_bound: err,
        evaluations: b.evals,
        converged: !b.exhausted && err.is_finite() && err <= 10.0 * tol,
    }
}

/// Iterated Cartesian integral over the plane; independent route used to
/// cross-check the polar backend.
pub fn integrate_plane_cartesian<F: Fn(f64, f64) -> f64 + Copy>(
    f: F,
    tol: f64,
    max_evals: u64,
) -> QuadEstimate {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let inner_tol = tol / 16.0;
    let budget = std::cell::RefCell::new(Budget::new(max_evals));

    let row = |x: f64| {
        let g = |v: f64| {
            let y = v.tan();
            f(x, y) * (1.0 + y * y)
        };
        let mut b = budget.borrow_mut();
        let (value, _) = integrate_with(&g, -half_pi, half_pi, inner_tol, 8, &mut b);
        value
    };
    let outer = |u: f64| {
        let x = u.tan();
        row(x) * (1.0 + x * x)
    };

    let mut outer_budget = Budget::new(u64::MAX);
    let (value, outer_err) =
        integrate_with(&outer, -half_pi, half_pi, 0.5 * tol, 16, &mut outer_budget);

    let b = budget.into_inner();
    let err = outer_err + 8.0 * inner_tol;
    QuadEstimate {
        value,
        error_bound: err,
        evaluations: b.evals,
        converged: !b.exhausted && err.is_finite(),
    }
}
