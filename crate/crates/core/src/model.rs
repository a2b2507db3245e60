//! Time-indexed control problems and the one-sector growth model.
//!
//! A [`ProblemSpec`] carries the period gain `U_t(c, k)`, the transition
//! `k(t+1) = f_{t+1}(c, k)`, the decision interval `K_t(k)` and the state
//! domain `D_t` as time-indexed closures, so non-stationary problems can be
//! expressed. [`make_growth_model`] builds the log-utility, Cobb-Douglas
//! instance `U_t = beta^t ln c`, `k(t+1) = k^alpha - c`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Residual below which the root finder accepts a consumption level.
pub const ROOT_TOL: f64 = 1e-13;

type PointFn = Arc<dyn Fn(usize, f64, f64) -> f64 + Send + Sync>;
type IntervalFn = Arc<dyn Fn(usize, f64) -> (f64, f64) + Send + Sync>;
type DomainFn = Arc<dyn Fn(usize) -> CapitalBounds + Send + Sync>;
type EatUpFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

/// Which branch of the overtaking definition applies: all gains are of one sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UtilitySign {
    Nonnegative,
    Nonpositive,
}

impl UtilitySign {
    pub fn admits(self, value: f64) -> bool {
        match self {
            UtilitySign::Nonnegative => value >= 0.0,
            UtilitySign::Nonpositive => value <= 0.0,
        }
    }
}

/// Open interval `(lower, upper)` of admissible capital at one date.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapitalBounds {
    pub lower: f64,
    pub upper: f64,
}

impl CapitalBounds {
    pub fn contains(&self, k: f64) -> bool {
        k > self.lower && k < self.upper
    }
}

/// A deterministic, discrete-time control problem starting from a fixed capital stock.
#[derive(Clone)]
pub struct ProblemSpec {
    initial_capital: f64,
    utility_sign: UtilitySign,
    gain: PointFn,
    transition: PointFn,
    decision_set: IntervalFn,
    state_domain: DomainFn,
    eat_up: Option<EatUpFn>,
    inverse: Option<PointFn>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("initial_capital", &self.initial_capital)
            .field("utility_sign", &self.utility_sign)
            .field("closed_form_eat_up", &self.eat_up.is_some())
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    /// `gain` and `transition` take `(t, c, k)`; `decision_set` maps `(t, k)` to the
    /// closed consumption interval `K_t(k)`; `state_domain` maps `t` to `D_t`.
    pub fn new<G, F, K, D>(
        initial_capital: f64,
        utility_sign: UtilitySign,
        gain: G,
        transition: F,
        decision_set: K,
        state_domain: D,
    ) -> Self
    where
        G: Fn(usize, f64, f64) -> f64 + Send + Sync + 'static,
        F: Fn(usize, f64, f64) -> f64 + Send + Sync + 'static,
        K: Fn(usize, f64) -> (f64, f64) + Send + Sync + 'static,
        D: Fn(usize) -> CapitalBounds + Send + Sync + 'static,
    {
        Self {
            initial_capital,
            utility_sign,
            gain: Arc::new(gain),
            transition: Arc::new(transition),
            decision_set: Arc::new(decision_set),
            state_domain: Arc::new(state_domain),
            eat_up: None,
            inverse: None,
        }
    }

    /// Replaces the root-finding eat-up solver with a closed form.
    pub fn with_eat_up<E>(mut self, eat_up: E) -> Self
    where
        E: Fn(usize, f64) -> f64 + Send + Sync + 'static,
    {
        self.eat_up = Some(Arc::new(eat_up));
        self
    }

    /// Replaces root finding in [`ProblemSpec::consumption_for_next`] with a closed
    /// form `(t, k, k_next) -> c`.
    pub fn with_inverse<I>(mut self, inverse: I) -> Self
    where
        I: Fn(usize, f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.inverse = Some(Arc::new(inverse));
        self
    }

    pub fn initial_capital(&self) -> f64 {
        self.initial_capital
    }

    pub fn utility_sign(&self) -> UtilitySign {
        self.utility_sign
    }

    pub fn gain(&self, t: usize, c: f64, k: f64) -> f64 {
        (self.gain)(t, c, k)
    }

    pub fn transition(&self, t: usize, c: f64, k: f64) -> f64 {
        (self.transition)(t, c, k)
    }

    pub fn decision_set(&self, t: usize, k: f64) -> (f64, f64) {
        (self.decision_set)(t, k)
    }

    pub fn state_domain(&self, t: usize) -> CapitalBounds {
        (self.state_domain)(t)
    }

    pub fn feasible(&self, t: usize, c: f64, k: f64) -> bool {
        let (lo, hi) = self.decision_set(t, k);
        c >= lo && c <= hi
    }

    /// Consumption at `t` that leaves zero capital for `t + 1`.
    pub fn eat_up(&self, t: usize, k: f64) -> Result<f64> {
        match &self.eat_up {
            Some(f) => Ok(f(t, k)),
            None => self.solve_consumption(t, k, 0.0),
        }
    }

    /// Consumption at `t` that moves capital from `k` to `k_next`.
    pub fn consumption_for_next(&self, t: usize, k: f64, k_next: f64) -> Result<f64> {
        match &self.inverse {
            Some(f) => Ok(f(t, k, k_next)),
            None => self.solve_consumption(t, k, k_next),
        }
    }

    /// Bisection on `c -> transition(t, c, k) - target` over the decision interval.
    fn solve_consumption(&self, t: usize, k: f64, target: f64) -> Result<f64> {
        let no_root = || Error::NoRoot { t, k, target };
        let (mut lo, mut hi) = self.decision_set(t, k);
        let residual = |c: f64| self.transition(t, c, k) - target;
        let mut r_lo = residual(lo);
        let r_hi = residual(hi);
        if !(r_lo.is_finite() && r_hi.is_finite()) {
            return Err(no_root());
        }
        if r_lo.abs() <= ROOT_TOL {
            return Ok(lo);
        }
        if r_hi.abs() <= ROOT_TOL {
            return Ok(hi);
        }
        if r_lo.signum() == r_hi.signum() {
            return Err(no_root());
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let r_mid = residual(mid);
            if r_mid.abs() <= ROOT_TOL || mid == lo || mid == hi {
                return Ok(mid);
            }
            if r_mid.signum() == r_lo.signum() {
                lo = mid;
                r_lo = r_mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Samples the state domain and decision intervals for `t <= t_max` and returns
    /// every sampled gain that contradicts the declared sign. Only a warning: the
    /// declared sign is authoritative.
    pub fn sign_warnings(&self, t_max: usize, samples: usize) -> Vec<SignWarning> {
        let samples = samples.max(2);
        let mut out = Vec::new();
        for t in 0..=t_max {
            let dom = self.state_domain(t);
            for i in 1..samples {
                let k = dom.lower + (dom.upper - dom.lower) * i as f64 / samples as f64;
                let (lo, hi) = self.decision_set(t, k);
                for j in 1..=samples {
                    let c = lo + (hi - lo) * j as f64 / samples as f64;
                    let value = self.gain(t, c, k);
                    if value.is_finite() && !self.utility_sign.admits(value) {
                        out.push(SignWarning { t, c, k, value });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignWarning {
    pub t: usize,
    pub c: f64,
    pub k: f64,
    pub value: f64,
}

/// Parameters of the growth model: output `k^alpha`, discount factor `beta`,
/// initial capital `k0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthParams {
    alpha: f64,
    beta: f64,
    k0: f64,
}

impl GrowthParams {
    pub fn new(alpha: f64, beta: f64, k0: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        if !(beta > 0.0 && alpha * beta < 1.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "beta must lie in (0, 1/alpha), got {beta} with alpha = {alpha}"
            )));
        }
        if !(k0 > 0.0 && k0 < 1.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "k0 must lie in (0, 1), got {k0}"
            )));
        }
        Ok(Self { alpha, beta, k0 })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    /// `alpha * beta`, always in (0, 1).
    pub fn ab(&self) -> f64 {
        self.alpha * self.beta
    }

    /// Same parameters with a different initial capital.
    pub fn with_k0(&self, k0: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, k0)
    }

    /// Steady-state capital `(alpha beta)^(1/(1-alpha))`.
    pub fn steady_capital(&self) -> f64 {
        self.ab().powf(1.0 / (1.0 - self.alpha))
    }

    /// `ln(k0 / k_inf)`, the log distance from the steady state.
    pub fn log_gap(&self) -> f64 {
        self.k0.ln() - self.ab().ln() / (1.0 - self.alpha)
    }

    /// `beta^t`.
    pub fn discount(&self, t: usize) -> f64 {
        discount(self.beta, t)
    }
}

pub(crate) fn discount(beta: f64, t: usize) -> f64 {
    if beta == 1.0 {
        1.0
    } else {
        (t as f64 * beta.ln()).exp()
    }
}

/// `beta^t ln c`, `k' = k^alpha - c`, `K_t(k) = [0, k^alpha]`, `D_t = (0, 1)`.
pub fn make_growth_model(params: &GrowthParams) -> ProblemSpec {
    let GrowthParams { alpha, beta, k0 } = *params;
    ProblemSpec::new(
        k0,
        UtilitySign::Nonpositive,
        move |t, c, _k| discount(beta, t) * c.ln(),
        move |_t, c, k| k.powf(alpha) - c,
        move |_t, k| (0.0, k.powf(alpha)),
        |_t| CapitalBounds {
            lower: 0.0,
            upper: 1.0,
        },
    )
    .with_eat_up(move |_t, k| k.powf(alpha))
    .with_inverse(move |_t, k, k_next| k.powf(alpha) - k_next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathOrigin {
    FiniteSolution,
    Limit,
    Challenger,
    Converted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathPoint {
    pub t: usize,
    pub k: f64,
    pub c: f64,
}

/// Capital and consumption at `t = 0, 1, ..., horizon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    points: Vec<PathPoint>,
    origin: PathOrigin,
}

impl Path {
    pub fn new(origin: PathOrigin, points: Vec<PathPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidPath("path has no points".into()));
        }
        if let Some((i, p)) = points.iter().enumerate().find(|(i, p)| p.t != *i) {
            return Err(Error::InvalidPath(format!(
                "point {i} has t = {}; times must run 0, 1, 2, ...",
                p.t
            )));
        }
        Ok(Self { points, origin })
    }

    /// Builds a path from equal-length capital and consumption columns.
    pub fn from_columns(origin: PathOrigin, k: &[f64], c: &[f64]) -> Result<Self> {
        if k.len() != c.len() {
            return Err(Error::InvalidPath(format!(
                "{} capital values but {} consumption values",
                k.len(),
                c.len()
            )));
        }
        let points = k
            .iter()
            .zip(c)
            .enumerate()
            .map(|(t, (&k, &c))| PathPoint { t, k, c })
            .collect();
        Self::new(origin, points)
    }

    pub fn origin(&self) -> PathOrigin {
        self.origin
    }

    pub fn points(&self) -> &[PathPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Last date on the path.
    pub fn horizon(&self) -> usize {
        self.points.len() - 1
    }

    pub fn capital(&self, t: usize) -> Option<f64> {
        self.points.get(t).map(|p| p.k)
    }

    pub fn consumption(&self, t: usize) -> Option<f64> {
        self.points.get(t).map(|p| p.c)
    }

    pub fn capitals(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.k)
    }

    pub fn consumptions(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.c)
    }

    pub(crate) fn require(&self, horizon: usize) -> Result<()> {
        if self.horizon() < horizon {
            Err(Error::PathTooShort {
                needed: horizon,
                available: self.horizon(),
            })
        } else {
            Ok(())
        }
    }

    /// The first `horizon + 1` points.
    pub fn truncated(&self, horizon: usize) -> Result<Path> {
        self.require(horizon)?;
        Ok(Path {
            points: self.points[..=horizon].to_vec(),
            origin: self.origin,
        })
    }

    pub(crate) fn with_origin(mut self, origin: PathOrigin) -> Self {
        self.origin = origin;
        self
    }

    pub(crate) fn points_mut(&mut self) -> &mut [PathPoint] {
        &mut self.points
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathValidation {
    /// `|k(t+1) - transition(t, c(t), k(t))|` for each consecutive pair.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Dates whose consumption lies outside `K_t(k(t))`.
    pub feasibility_violations: Vec<usize>,
    /// Dates whose capital lies outside `D_t`.
    pub domain_violations: Vec<usize>,
    pub tolerance: f64,
    pub pass: bool,
}

impl PathValidation {
    /// First step whose residual exceeds the tolerance.
    pub fn first_failure(&self) -> Option<usize> {
        self.residuals.iter().position(|r| !(*r <= self.tolerance))
    }
}

/// Re-applies the transition along the path. Passes iff every residual is within `tol`.
pub fn validate_path(spec: &ProblemSpec, path: &Path, tol: f64) -> PathValidation {
    let pts = path.points();
    let residuals: Vec<f64> = pts
        .windows(2)
        .map(|w| (w[1].k - spec.transition(w[0].t, w[0].c, w[0].k)).abs())
        .collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let feasibility_violations = pts
        .iter()
        .filter(|p| !spec.feasible(p.t, p.c, p.k))
        .map(|p| p.t)
        .collect();
    let domain_violations = pts
        .iter()
        .filter(|p| !spec.state_domain(p.t).contains(p.k))
        .map(|p| p.t)
        .collect();
    let pass = residuals.iter().all(|r| *r <= tol);
    PathValidation {
        residuals,
        max_residual,
        feasibility_violations,
        domain_violations,
        tolerance: tol,
        pass,
    }
}
