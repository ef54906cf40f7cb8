//! The Dutch-book constructions: disagreement region, ticket price, the
//! payoff `phi`, the gambler's guaranteed gain `eps_0`, general payoff
//! schemes, the two-sided Haar-model identity check, strong-inconsistency
//! verdicts, and the repeated-betting simulator.
//!
//! For a kernel predictive `q` with kernel `k`, the disagreement region is
//! `C = {(x, z) : q(z|x) < q_H(z|x)}`; by invariance its `x`-section is
//! `L . {w : k(w) < k_1(w)}`, so both the region and the ticket price
//! `gamma = Q(C_x|x)` can be handled in `w`-space, free of `x`. The one-ticket
//! payoff
//!
//! `phi(x, z) = 1{w in C} - gamma`,  `w = L^{-1} z`
//!
//! is fair under `q` for every `x`, yet its expectation under the true model
//! equals
//!
//! `eps_0 = integral over {k < k_1} of (k_1 - k) = (1/2) L1(k, k_1)`
//!
//! for every parameter value. All three routes to that number (quadrature of
//! the positive part, variation distance, and direct model-side Monte Carlo)
//! are implemented and compared by the test suites.

use std::sync::Arc;

use serde::Serialize;

use crate::densities::ObservationMatrix;
use crate::estimate::{mc_mean, mc_mean_multi, GainEstimate, MCEstimate, Method, QuadEstimate};
use crate::ltgroup::TriMatrix;
use crate::predictive::{haar_twin, mixture_is, PredictiveKernel};
use crate::quad::{integrate_line, integrate_plane_polar};
use crate::sampling::{sample_data, sample_k1_pivot, sample_normal_vec, Rng64, RngStream};
use crate::{Error, Result};

/// The set `{w : k(w) < k_1(w)}` determining the `x`-sections of the
/// disagreement set between a kernel predictive and the Haar predictive.
///
/// Membership uses strict inequality; the tie set is Lebesgue-null for the
/// built-in kernels. When `q` is itself the Haar kernel both log densities
/// evaluate through the same code path, so the predicate is exactly never
/// true.
#[derive(Clone, Debug)]
pub struct DisagreementRegion {
    q: PredictiveKernel,
    haar: PredictiveKernel,
}

impl DisagreementRegion {
    pub fn new(q: &PredictiveKernel) -> DisagreementRegion {
        DisagreementRegion {
            q: q.clone(),
            haar: haar_twin(q),
        }
    }

    /// Membership of the maximal invariant `w = L^{-1} z`.
    pub fn contains_w(&self, w: &[f64]) -> bool {
        self.q.log_k(w) < self.haar.log_k(w)
    }

    /// Membership of a raw pair `(x, z)`.
    pub fn contains(&self, x: &ObservationMatrix, z: &[f64]) -> Result<bool> {
        let l = x.chol_factor()?;
        Ok(self.contains_w(&l.solve(z)?))
    }

    pub fn kernel(&self) -> &PredictiveKernel {
        &self.q
    }

    pub fn haar(&self) -> &PredictiveKernel {
        &self.haar
    }
}

/// Builds the disagreement region for `q` against the Haar predictive of the
/// same `(n, p)`.
pub fn disagreement_region(q: &PredictiveKernel) -> DisagreementRegion {
    DisagreementRegion::new(q)
}

/// The ticket price `gamma = Q(C_x|x) = integral over {k < k_1} of k(w) dw`,
/// which the invariance reduction makes independent of `x`.
pub fn ticket_price(
    q: &PredictiveKernel,
    method: Method,
    budget: u64,
    stream: RngStream,
) -> GainEstimate {
    let region = DisagreementRegion::new(q);
    match (method, q.p()) {
        (Method::Quadrature, 1) => GainEstimate::Quadrature(integrate_line(
            |w| {
                let w = [w];
                if region.contains_w(&w) {
                    region.q.log_k(&w).exp()
                } else {
                    0.0
                }
            },
            1e-9,
            budget,
        )),
        (Method::Quadrature, 2) => GainEstimate::Quadrature(integrate_plane_polar(
            |a, b| {
                let w = [a, b];
                if region.contains_w(&w) {
                    region.q.log_k(&w).exp()
                } else {
                    0.0
                }
            },
            1e-8,
            budget,
        )),
        _ => GainEstimate::MonteCarlo(mc_mean(stream, budget, |rng| {
            let w = region.q.sample_w(rng);
            region.contains_w(&w) as u8 as f64
        })),
    }
}

/// The one-ticket Dutch book against `q`: the disagreement region plus its
/// (x-free) price.
#[derive(Clone, Debug)]
pub struct DutchBook {
    pub region: DisagreementRegion,
    pub price: f64,
    pub price_estimate: GainEstimate,
}

/// Assembles the Dutch book, pricing the ticket with the given backend.
pub fn dutch_book(
    q: &PredictiveKernel,
    method: Method,
    budget: u64,
    stream: RngStream,
) -> DutchBook {
    let price_estimate = ticket_price(q, method, budget, stream);
    DutchBook {
        region: DisagreementRegion::new(q),
        price: price_estimate.value(),
        price_estimate,
    }
}

impl DutchBook {
    /// Payoff as a function of the maximal invariant: `1{w in C} - gamma`,
    /// with values in `{-gamma, 1 - gamma}`.
    pub fn payoff_w(&self, w: &[f64]) -> f64 {
        self.region.contains_w(w) as u8 as f64 - self.price
    }

    /// The payoff `phi(x, z)`; zero identically when `q` is the Haar kernel.
    pub fn payoff(&self, x: &ObservationMatrix, z: &[f64]) -> Result<f64> {
        let l = x.chol_factor()?;
        Ok(self.payoff_w(&l.solve(z)?))
    }

    /// The payoff as a one-ticket scheme (coefficient 1, bound 1).
    pub fn scheme(&self) -> PayoffScheme {
        let book = self.clone();
        PayoffScheme {
            tickets: vec![Ticket {
                label: format!("dutch-book vs {}", book.region.q.name()),
                region: Arc::new(move |_x, w| book.region.contains_w(w)),
                in_w_space: true,
                coeff: Arc::new(|_x| 1.0),
                coeff_bound: 1.0,
                pricing: TicketPricing::Constant(self.price),
            }],
        }
    }
}

/// The payoff `phi(x, z)` of the assembled book.
pub fn payoff_phi(book: &DutchBook, x: &ObservationMatrix, z: &[f64]) -> Result<f64> {
    book.payoff(x, z)
}

/// The gambler's guaranteed expected gain
/// `eps_0 = integral over {k < k_1} of (k_1 - k) dw`, estimated either by
/// quadrature of the positive part (p <= 2) or by mixture importance
/// sampling. Nonnegative by construction; equals the variation distance to
/// the Haar kernel.
pub fn epsilon0(
    q: &PredictiveKernel,
    method: Method,
    budget: u64,
    stream: RngStream,
) -> GainEstimate {
    let haar = haar_twin(q);
    let pos_part = |w: &[f64]| {
        let lq = q.log_k(w);
        let lh = haar.log_k(w);
        (lh.exp() - lq.exp()).max(0.0)
    };
    match (method, q.p()) {
        (Method::Quadrature, 1) => {
            GainEstimate::Quadrature(integrate_line(|w| pos_part(&[w]), 1e-9, budget))
        }
        (Method::Quadrature, 2) => {
            GainEstimate::Quadrature(integrate_plane_polar(|a, b| pos_part(&[a, b]), 1e-8, budget))
        }
        _ => GainEstimate::MonteCarlo(mixture_is(q, &haar, stream, budget, |lq, lh| {
            // (k_1 - k)^+ / ((k + k_1)/2), bounded by 2.
            let m = lq.max(lh);
            let eq = (lq - m).exp();
            let eh = (lh - m).exp();
            2.0 * (eh - eq).max(0.0) / (eq + eh)
        })),
    }
}

type RegionFn = dyn Fn(&ObservationMatrix, &[f64]) -> bool + Send + Sync;
type CoeffFn = dyn Fn(&ObservationMatrix) -> f64 + Send + Sync;

/// How a ticket's price `Q(C_{i,x}|x)` is obtained during evaluation.
#[derive(Clone, Copy, Debug)]
pub enum TicketPricing {
    /// The region is invariant, so the price is a known constant free of `x`.
    Constant(f64),
    /// Estimated per `x` by sampling the predictive with this many draws.
    PerX(u64),
}

/// One conditional bet: a region, a bounded coefficient function of `x`, and
/// a pricing rule.
#[derive(Clone)]
pub struct Ticket {
    pub label: String,
    region: Arc<RegionFn>,
    /// When true, the region predicate receives `w = L^{-1} z` instead of `z`.
    in_w_space: bool,
    coeff: Arc<CoeffFn>,
    pub coeff_bound: f64,
    pub pricing: TicketPricing,
}

impl Ticket {
    /// A ticket whose region is a predicate on the maximal invariant `w`,
    /// priced by a known constant.
    pub fn invariant<R>(label: impl Into<String>, region: R, price: f64) -> Self
    where
        R: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        Ticket {
            label: label.into(),
            region: Arc::new(move |_x, w| region(w)),
            in_w_space: true,
            coeff: Arc::new(|_| 1.0),
            coeff_bound: 1.0,
            pricing: TicketPricing::Constant(price),
        }
    }

    /// A ticket with a raw region on `(x, z)` and a bounded coefficient,
    /// priced per `x` by Monte Carlo.
    pub fn general<R, C>(
        label: impl Into<String>,
        region: R,
        coeff: C,
        coeff_bound: f64,
        price_budget: u64,
    ) -> Self
    where
        R: Fn(&ObservationMatrix, &[f64]) -> bool + Send + Sync + 'static,
        C: Fn(&ObservationMatrix) -> f64 + Send + Sync + 'static,
    {
        Ticket {
            label: label.into(),
            region: Arc::new(region),
            in_w_space: false,
            coeff: Arc::new(coeff),
            coeff_bound,
            pricing: TicketPricing::PerX(price_budget),
        }
    }

    fn member(&self, x: &ObservationMatrix, z: &[f64], w: &[f64]) -> bool {
        if self.in_w_space {
            (self.region)(x, w)
        } else {
            (self.region)(x, z)
        }
    }
}

/// A betting scheme `Psi(x, z) = sum_i c_i(x) [1{(x,z) in C_i} -
/// Q(C_{i,x}|x)]`; fair under `Q(.|x)` for every `x` by construction.
#[derive(Clone)]
pub struct PayoffScheme {
    pub tickets: Vec<Ticket>,
}

impl PayoffScheme {
    /// Prices of all tickets at this `x`. Constant-priced tickets consume no
    /// randomness.
    pub fn prices(
        &self,
        q: &PredictiveKernel,
        x: &ObservationMatrix,
        rng: &mut Rng64,
    ) -> Result<Vec<f64>> {
        let l = x.chol_factor()?;
        self.tickets
            .iter()
            .map(|t| match t.pricing {
                TicketPricing::Constant(c) => Ok(c),
                TicketPricing::PerX(budget) => {
                    let mut hits = 0u64;
                    for _ in 0..budget {
                        let w = q.sample_w(rng);
                        let z = l.matvec(&w)?;
                        if t.member(x, &z, &w) {
                            hits += 1;
                        }
                    }
                    Ok(hits as f64 / budget as f64)
                }
            })
            .collect()
    }

    /// Evaluates the net payoff given precomputed prices.
    pub fn evaluate_priced(
        &self,
        x: &ObservationMatrix,
        z: &[f64],
        w: &[f64],
        prices: &[f64],
    ) -> f64 {
        self.tickets
            .iter()
            .zip(prices)
            .map(|(t, &price)| {
                let c = (t.coeff)(x);
                debug_assert!(c.abs() <= t.coeff_bound + 1e-12);
                c * (t.member(x, z, w) as u8 as f64 - price)
            })
            .sum()
    }

    /// Prices and evaluates in one call.
    pub fn evaluate(
        &self,
        q: &PredictiveKernel,
        x: &ObservationMatrix,
        z: &[f64],
        rng: &mut Rng64,
    ) -> Result<f64> {
        let l = x.chol_factor()?;
        let w = l.solve(z)?;
        let prices = self.prices(q, x, rng)?;
        Ok(self.evaluate_priced(x, z, &w, &prices))
    }

    /// `sum_i |c_i|` bound on the payoff magnitude.
    pub fn payoff_bound(&self) -> f64 {
        self.tickets.iter().map(|t| t.coeff_bound).sum()
    }
}

/// Monte Carlo estimate of `E_theta Psi(X, Z)` under the true model: each
/// round draws `X` with iid `N_p(0, theta theta')` columns and an independent
/// `Z = theta u`.
pub fn model_expectation(
    scheme: &PayoffScheme,
    q: &PredictiveKernel,
    theta: &TriMatrix,
    stream: RngStream,
    rounds: u64,
) -> Result<MCEstimate> {
    if theta.dim() != q.p() {
        return Err(Error::DimensionMismatch {
            expected: q.p(),
            got: theta.dim(),
        });
    }
    if rounds == 0 {
        return Err(Error::EmptyBudget);
    }
    let n = q.n();
    let p = q.p();
    Ok(mc_mean(stream, rounds, |rng| {
        let x = sample_data(rng, theta, n).expect("n >= p by construction");
        let u = sample_normal_vec(rng, p);
        let z = theta.matvec(&u).expect("dimensions agree");
        scheme
            .evaluate(q, &x, &z, rng)
            .expect("full-rank data almost surely")
    }))
}

/// Everything derived from one model draw that test functions may look at:
/// the data `x`, its factor `l`, the future observation `z`, the maximal
/// invariant `w = l^{-1} z`, and the studentized columns `v_j = l^{-1} x_j`.
pub struct Round {
    pub x: ObservationMatrix,
    pub l: TriMatrix,
    pub z: Vec<f64>,
    pub w: Vec<f64>,
    pub v: Vec<Vec<f64>>,
}

/// A bounded test function of a [`Round`], tagged with whether it is
/// invariant (factors through `(w, v)`).
#[derive(Clone)]
pub struct TestFunction {
    pub name: String,
    pub invariant: bool,
    f: Arc<dyn Fn(&Round) -> f64 + Send + Sync>,
}

impl TestFunction {
    /// An invariant test function of the maximal invariant `w` and the
    /// studentized data `v`. The closure must take values in `[-1, 1]`.
    pub fn invariant<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[f64], &[Vec<f64>]) -> f64 + Send + Sync + 'static,
    {
        TestFunction {
            name: name.into(),
            invariant: true,
            f: Arc::new(move |r: &Round| f(&r.w, &r.v)),
        }
    }

    /// An arbitrary bounded function of the raw observables; used for
    /// non-invariant controls.
    pub fn raw<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Round) -> f64 + Send + Sync + 'static,
    {
        TestFunction {
            name: name.into(),
            invariant: false,
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, round: &Round) -> f64 {
        let v = (self.f)(round);
        debug_assert!(v.abs() <= 1.0 + 1e-12, "{} out of [-1,1]: {v}", self.name);
        v
    }
}

/// The invariant test functions shipped with the crate, all tanh-bounded.
pub fn builtin_test_functions(p: usize) -> Vec<TestFunction> {
    vec![
        TestFunction::invariant("radial_gap", move |w, _| {
            let ww: f64 = w.iter().map(|v| v * v).sum();
            (ww - p as f64).tanh()
        }),
        TestFunction::invariant("first_coordinate_square", |w, _| (w[0] * w[0] - 1.0).tanh()),
        TestFunction::invariant("data_coupling", |w, v| {
            let n = v.len() as f64;
            let dot: f64 = w
                .iter()
                .enumerate()
                .map(|(i, wi)| wi * v.iter().map(|col| col[i]).sum::<f64>() / n)
                .sum();
            (dot * dot - 1.0).tanh()
        }),
    ]
}

/// The non-invariant control: a function of the raw future observation. Its
/// two-sided estimates are expected to differ, documenting that the identity
/// is specific to invariant functions.
pub fn noninvariant_control() -> TestFunction {
    TestFunction::raw("raw_first_coordinate_square", |r| {
        (r.z[0] * r.z[0] - 1.0).tanh()
    })
}

/// Two-sided estimates of `E f` for one test function.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub invariant: bool,
    /// Expectation under the true model `P(dx, dz|theta)`.
    pub model_side: MCEstimate,
    /// Expectation under the Haar model `Q_H(dz|x) P_1(dx|theta)`.
    pub haar_side: MCEstimate,
}

impl IdentityCheck {
    pub fn gap(&self) -> f64 {
        self.model_side.mean - self.haar_side.mean
    }

    pub fn combined_se(&self) -> f64 {
        self.model_side.combined_se(&self.haar_side)
    }

    /// Whether the two sides agree within `k` combined standard errors.
    pub fn agrees(&self, k: f64) -> bool {
        self.gap().abs() <= k * self.combined_se()
    }
}

fn make_round_model(rng: &mut Rng64, theta: &TriMatrix, n: usize) -> Round {
    let p = theta.dim();
    let x = sample_data(rng, theta, n).expect("n >= p");
    let u = sample_normal_vec(rng, p);
    let z = theta.matvec(&u).expect("dims agree");
    let l = x.chol_factor().expect("full rank almost surely");
    let w = l.solve(&z).expect("dims agree");
    let v = x.studentized(&l).expect("dims agree");
    Round { x, l, z, w, v }
}

fn make_round_haar(rng: &mut Rng64, theta: &TriMatrix, n: usize) -> Round {
    let p = theta.dim();
    let x = sample_data(rng, theta, n).expect("n >= p");
    let l = x.chol_factor().expect("full rank almost surely");
    let w = sample_k1_pivot(rng, n, p).expect("n >= p");
    let z = l.matvec(&w).expect("dims agree");
    let v = x.studentized(&l).expect("dims agree");
    Round { x, l, z, w, v }
}

/// Compares `E f` under the true model against the Haar model
/// `Q_H(dz|x) P_1(dx|theta)` for every supplied test function, sharing the
/// model draws across functions. Substream 0 drives the model side,
/// substream 1 the Haar side.
pub fn haar_identity_check_all(
    fs: &[TestFunction],
    theta: &TriMatrix,
    n: usize,
    stream: RngStream,
    rounds: u64,
) -> Result<Vec<IdentityCheck>> {
    if fs.is_empty() || rounds == 0 {
        return Err(Error::EmptyBudget);
    }
    if n < theta.dim() {
        return Err(Error::InvalidSampleSize { n, p: theta.dim() });
    }
    let dim = fs.len();
    let model = mc_mean_multi(stream.substream(0), rounds, dim, |rng, out| {
        let round = make_round_model(rng, theta, n);
        for (k, f) in fs.iter().enumerate() {
            out[k] = f.eval(&round);
        }
    });
    let haar = mc_mean_multi(stream.substream(1), rounds, dim, |rng, out| {
        let round = make_round_haar(rng, theta, n);
        for (k, f) in fs.iter().enumerate() {
            out[k] = f.eval(&round);
        }
    });
    Ok(fs
        .iter()
        .zip(model.into_iter().zip(haar))
        .map(|(f, (m, h))| IdentityCheck {
            name: f.name.clone(),
            invariant: f.invariant,
            model_side: m,
            haar_side: h,
        })
        .collect())
}

/// Single-function form of [`haar_identity_check_all`]: returns the pair
/// (model-side estimate, Haar-side estimate).
pub fn haar_identity_check(
    f: &TestFunction,
    theta: &TriMatrix,
    n: usize,
    stream: RngStream,
    rounds: u64,
) -> Result<(MCEstimate, MCEstimate)> {
    let checks = haar_identity_check_all(std::slice::from_ref(f), theta, n, stream, rounds)?;
    let c = &checks[0];
    Ok((c.model_side, c.haar_side))
}

/// Verdict of the strong-inconsistency test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Every model-side lower confidence bound exceeds the gambler side.
    SiHolds,
    /// Positivity unresolved at this budget. Never read as "coherent".
    Inconclusive,
}

/// Model-side expectation at one parameter fixture.
#[derive(Clone, Debug, Serialize)]
pub struct ThetaExpectation {
    pub theta: String,
    pub estimate: MCEstimate,
}

/// The assembled evidence for a strong-inconsistency verdict.
#[derive(Clone, Debug, Serialize)]
pub struct GainReport {
    pub kernel: String,
    pub n: usize,
    pub p: usize,
    /// The gambler's guaranteed gain (positive-part integral).
    pub epsilon0: GainEstimate,
    /// `sup_x` of the payoff's expectation under the predictive; identically
    /// zero for the fair one-ticket book.
    pub gambler_side: f64,
    pub ticket_price: GainEstimate,
    pub model_side: Vec<ThetaExpectation>,
    pub verdict: Verdict,
}

fn describe_theta(theta: &TriMatrix) -> String {
    let p = theta.dim();
    let mut parts = Vec::new();
    for i in 0..p {
        let row: Vec<String> = (0..=i).map(|j| format!("{:.4}", theta.get(i, j))).collect();
        parts.push(row.join(","));
    }
    format!("[{}]", parts.join(";"))
}

/// Default parameter fixtures: identity, mild and ill-conditioned diagonals
/// (condition number up to 1e4 in `Sigma`), and two dense lower-triangular
/// matrices with fixed entries.
pub fn theta_fixtures(p: usize) -> Vec<TriMatrix> {
    let mut out = Vec::new();
    out.push(TriMatrix::identity(p));
    let mild: Vec<f64> = (0..p).map(|i| 1.0 + i as f64).collect();
    out.push(TriMatrix::from_diag(&mild).expect("positive"));
    // Geometric ramp from 1 to 100 (cond 1e4 in Sigma); [10] when p = 1.
    let harsh: Vec<f64> = if p == 1 {
        vec![10.0]
    } else {
        (0..p)
            .map(|i| 100f64.powf(i as f64 / (p as f64 - 1.0)))
            .collect()
    };
    out.push(TriMatrix::from_diag(&harsh).expect("positive"));
    let dense_a = {
        let mut entries = Vec::new();
        for i in 0..p {
            for j in 0..i {
                entries.push(if (i + j) % 2 == 0 { 0.5 } else { -0.3 });
            }
            entries.push(1.0 + 0.5 * i as f64);
        }
        TriMatrix::from_lower(p, entries).expect("positive diagonal")
    };
    out.push(dense_a);
    let dense_b = {
        let mut entries = Vec::new();
        for i in 0..p {
            for j in 0..i {
                entries.push(0.8 * ((i * 3 + j) % 3) as f64 - 0.8);
            }
            entries.push(0.5 + (i % 2) as f64 * 1.5);
        }
        TriMatrix::from_lower(p, entries).expect("positive diagonal")
    };
    out.push(dense_b);
    out
}

/// Runs the full strong-inconsistency test: the gambler side is identically
/// zero, `eps_0` is estimated (quadrature when `p <= 2`, otherwise Monte
/// Carlo), and the model side is estimated at every supplied `theta`. The
/// verdict is `SiHolds` exactly when every model-side lower 3-sigma bound is
/// positive.
pub fn si_verdict(
    q: &PredictiveKernel,
    thetas: &[TriMatrix],
    budget: u64,
    stream: RngStream,
) -> Result<GainReport> {
    if thetas.is_empty() || budget == 0 {
        return Err(Error::EmptyBudget);
    }
    let method = if q.p() <= 2 {
        Method::Quadrature
    } else {
        Method::MonteCarlo
    };
    let quad_budget = 4_000_000u64.max(budget);
    let price = match method {
        Method::Quadrature => ticket_price(q, method, quad_budget, stream.substream(1)),
        Method::MonteCarlo => ticket_price(q, method, budget, stream.substream(1)),
    };
    let eps = match method {
        Method::Quadrature => epsilon0(q, method, quad_budget, stream.substream(2)),
        Method::MonteCarlo => epsilon0(q, method, budget, stream.substream(2)),
    };
    let book = DutchBook {
        region: DisagreementRegion::new(q),
        price: price.value(),
        price_estimate: price,
    };
    let scheme = book.scheme();
    let mut model_side = Vec::new();
    for (i, theta) in thetas.iter().enumerate() {
        let est = model_expectation(&scheme, q, theta, stream.substream(10 + i as u64), budget)?;
        model_side.push(ThetaExpectation {
            theta: describe_theta(theta),
            estimate: est,
        });
    }
    let verdict = if model_side.iter().all(|t| t.estimate.lower(3.0) > 0.0) {
        Verdict::SiHolds
    } else {
        Verdict::Inconclusive
    };
    Ok(GainReport {
        kernel: q.name(),
        n: q.n(),
        p: q.p(),
        epsilon0: eps,
        gambler_side: 0.0,
        ticket_price: book.price_estimate,
        model_side,
        verdict,
    })
}

/// One round of the repeated betting game.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BettingRound {
    pub round: u64,
    pub x_digest: u64,
    pub in_region: bool,
    pub price: f64,
    pub payoff: f64,
    pub cumulative: f64,
}

/// A full betting trajectory plus its summary statistics.
#[derive(Clone, Debug, Serialize)]
pub struct BettingTrajectory {
    pub price: f64,
    pub rounds: Vec<BettingRound>,
    pub summary: MCEstimate,
}

/// Plays `rounds` rounds of the one-ticket game at parameter `theta`: each
/// round draws fresh data, the gambler buys the ticket on the disagreement
/// section, and the cumulative wealth accrues. Rounds are generated from
/// per-chunk substreams, so trajectories are bit-reproducible for any thread
/// count.
pub fn simulate_betting(
    q: &PredictiveKernel,
    theta: &TriMatrix,
    rounds: u64,
    stream: RngStream,
) -> Result<BettingTrajectory> {
    use rayon::prelude::*;

    if rounds == 0 {
        return Err(Error::EmptyBudget);
    }
    if theta.dim() != q.p() {
        return Err(Error::DimensionMismatch {
            expected: q.p(),
            got: theta.dim(),
        });
    }
    let method = if q.p() <= 2 {
        Method::Quadrature
    } else {
        Method::MonteCarlo
    };
    let price_est = ticket_price(q, method, 2_000_000, stream.substream(0));
    let price = price_est.value();
    let region = DisagreementRegion::new(q);
    let n = q.n();

    const CHUNK: u64 = 4096;
    let n_chunks = rounds.div_ceil(CHUNK);
    let work_stream = stream.substream(1);
    let chunks: Vec<Vec<(u64, bool)>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = work_stream.substream(c).rng();
            let count = CHUNK.min(rounds - c * CHUNK);
            let mut out = Vec::with_capacity(count as usize);
            for _ in 0..count {
                let round = make_round_model(&mut rng, theta, n);
                out.push((round.x.digest(), region.contains_w(&round.w)));
            }
            out
        })
        .collect();

    let mut records = Vec::with_capacity(rounds as usize);
    let mut cumulative = 0.0;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut idx = 0u64;
    for chunk in chunks {
        for (digest, in_region) in chunk {
            let payoff = in_region as u8 as f64 - price;
            cumulative += payoff;
            sum += payoff;
            sum_sq += payoff * payoff;
            records.push(BettingRound {
                round: idx,
                x_digest: digest,
                in_region,
                price,
                payoff,
                cumulative,
            });
            idx += 1;
        }
    }
    let nf = rounds as f64;
    let mean = sum / nf;
    let var = if rounds > 1 {
        ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(BettingTrajectory {
        price,
        rounds: records,
        summary: MCEstimate {
            mean,
            std_error: (var / nf).sqrt(),
            n_samples: rounds,
            seed: stream.seed,
            stream: stream.stream,
        },
    })
}

#[allow(dead_code)]
fn quad_zero() -> QuadEstimate {
    QuadEstimate {
        value: 0.0,
        error_bound: 0.0,
        evaluations: 0,
        converged: true,
    }
}
