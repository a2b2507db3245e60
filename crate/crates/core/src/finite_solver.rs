//! Horizon-`T` optimal paths with the terminal condition `k(T+1) = 0`.
//!
//! Three independent routes: the closed-form saving-rate recursion, the
//! closed-form product formulas (evaluated in log space), and a grid-based
//! backward-induction oracle that only uses the [`ProblemSpec`] closures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{make_growth_model, GrowthParams, Path, PathOrigin, ProblemSpec};

/// Relative disagreement between the recursion and the product formulas that
/// is reported as a diagnostic.
pub const METHOD_DISAGREEMENT_FLAG: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    Recursion,
    ClosedForm,
    DpOracle,
}

/// Optimal path for one horizon. The path covers `t = 0..=horizon`; the final
/// consumption eats up all output, so `k(horizon + 1) = 0` is implied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteSolution {
    pub horizon: usize,
    pub path: Path,
    pub objective: f64,
    pub method: SolveMethod,
}

impl FiniteSolution {
    fn from_path(spec: &ProblemSpec, path: Path, method: SolveMethod) -> Self {
        let objective = path.points().iter().map(|p| spec.gain(p.t, p.c, p.k)).sum();
        Self {
            horizon: path.horizon(),
            path,
            objective,
            method,
        }
    }
}

/// Anything that can produce the horizon-`T` optimum.
pub trait FiniteSolver {
    fn solve(&self, horizon: usize) -> Result<FiniteSolution>;
}

impl<F> FiniteSolver for F
where
    F: Fn(usize) -> Result<FiniteSolution>,
{
    fn solve(&self, horizon: usize) -> Result<FiniteSolution> {
        self(horizon)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PolicyRecursion(pub GrowthParams);

impl FiniteSolver for PolicyRecursion {
    fn solve(&self, horizon: usize) -> Result<FiniteSolution> {
        Ok(solve_policy_recursion(&self.0, horizon))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ClosedForm(pub GrowthParams);

impl FiniteSolver for ClosedForm {
    fn solve(&self, horizon: usize) -> Result<FiniteSolution> {
        solve_closed_form(&self.0, horizon)
    }
}

#[derive(Debug, Clone)]
pub struct DpOracle {
    pub spec: ProblemSpec,
    pub grid_size: usize,
}

impl FiniteSolver for DpOracle {
    fn solve(&self, horizon: usize) -> Result<FiniteSolution> {
        solve_dp_oracle(&self.spec, horizon, self.grid_size)
    }
}

/// `1 - x^m` for `x` in (0, 1), without cancellation for small `x^m`.
fn one_minus_pow(x: f64, m: usize) -> f64 {
    -(m as f64 * x.ln()).exp_m1()
}

/// Forward iteration of `k(t+1) = ab (1 - ab^(T-t)) / (1 - ab^(T-t+1)) k(t)^alpha`.
pub fn solve_policy_recursion(params: &GrowthParams, horizon: usize) -> FiniteSolution {
    let alpha = params.alpha();
    let ab = params.ab();
    let mut ks = Vec::with_capacity(horizon + 1);
    let mut cs = Vec::with_capacity(horizon + 1);
    let mut k = params.k0();
    for t in 0..=horizon {
        let remaining = horizon - t;
        let output = k.powf(alpha);
        let denom = one_minus_pow(ab, remaining + 1);
        let k_next = ab * one_minus_pow(ab, remaining) / denom * output;
        let c = if remaining == 0 {
            output
        } else {
            output * (1.0 - ab) / denom
        };
        ks.push(k);
        cs.push(c);
        k = k_next;
    }
    let path = Path::from_columns(PathOrigin::FiniteSolution, &ks, &cs)
        .expect("columns have equal, nonzero length");
    FiniteSolution::from_path(&make_growth_model(params), path, SolveMethod::Recursion)
}

/// `ln(1 - ab^m)`; a domain error if the factor is not positive.
pub(crate) fn log_factor(ab: f64, m: usize) -> Result<f64> {
    let x = (m as f64 * ab.ln()).exp();
    if x >= 1.0 || !x.is_finite() {
        return Err(Error::Domain(format!(
            "factor 1 - (alpha beta)^{m} = {} is not positive",
            1.0 - x
        )));
    }
    Ok((-x).ln_1p())
}

/// `(k_T(t), c_T(t))` from the displayed product formulas, with every product
/// taken as an exponent-weighted sum of logs.
pub fn eval_closed_form(params: &GrowthParams, horizon: usize, t: usize) -> Result<(f64, f64)> {
    if t > horizon {
        return Err(Error::Domain(format!(
            "t = {t} lies beyond the horizon {horizon}"
        )));
    }
    let alpha = params.alpha();
    let ab = params.ab();
    let ln_ab = ab.ln();
    let ln_k0 = params.k0().ln();
    let a_pow = |n: usize| alpha.powi(n as i32);
    let geom = (1.0 - a_pow(t)) / (1.0 - alpha);
    let first = horizon - t + 1;

    // Weighted denominator factors (1 - ab^(T-t+1+i)), i = 0..t-1, shared by both formulas.
    let mut weighted = Vec::with_capacity(t);
    for i in 0..t {
        weighted.push(log_factor(ab, first + i)?);
    }
    let last = log_factor(ab, horizon + 1)?;

    let ln_c = (1.0 - ab).ln() + alpha * geom * ln_ab + a_pow(t + 1) * ln_k0
        - weighted
            .iter()
            .enumerate()
            .map(|(i, l)| a_pow(i) * (1.0 - alpha) * l)
            .sum::<f64>()
        - a_pow(t) * last;

    let ln_k = if t == 0 {
        ln_k0
    } else {
        weighted[0] + geom * ln_ab + a_pow(t) * ln_k0
            - weighted[1..]
                .iter()
                .enumerate()
                .map(|(j, l)| a_pow(j) * (1.0 - alpha) * l)
                .sum::<f64>()
            - a_pow(t - 1) * last
    };
    Ok((ln_k.exp(), ln_c.exp()))
}

pub fn solve_closed_form(params: &GrowthParams, horizon: usize) -> Result<FiniteSolution> {
    let mut ks = Vec::with_capacity(horizon + 1);
    let mut cs = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        let (k, c) = eval_closed_form(params, horizon, t)?;
        ks.push(k);
        cs.push(c);
    }
    let path = Path::from_columns(PathOrigin::FiniteSolution, &ks, &cs)?;
    Ok(FiniteSolution::from_path(
        &make_growth_model(params),
        path,
        SolveMethod::ClosedForm,
    ))
}

/// Largest relative gaps between the recursion and the product formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodAgreement {
    pub horizon: usize,
    pub max_rel_capital: f64,
    pub max_rel_consumption: f64,
    /// Set when either gap reaches [`METHOD_DISAGREEMENT_FLAG`]; the recursion is
    /// taken as ground truth.
    pub flagged: bool,
}

pub fn compare_methods(params: &GrowthParams, horizon: usize) -> Result<MethodAgreement> {
    let rec = solve_policy_recursion(params, horizon);
    let closed = solve_closed_form(params, horizon)?;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    let mut max_k: f64 = 0.0;
    let mut max_c: f64 = 0.0;
    for (r, c) in rec.path.points().iter().zip(closed.path.points()) {
        max_k = max_k.max(rel(r.k, c.k));
        max_c = max_c.max(rel(r.c, c.c));
    }
    Ok(MethodAgreement {
        horizon,
        max_rel_capital: max_k,
        max_rel_consumption: max_c,
        flagged: max_k >= METHOD_DISAGREEMENT_FLAG || max_c >= METHOD_DISAGREEMENT_FLAG,
    })
}

/// Uniform interior grid on an open capital interval.
struct Grid {
    start: f64,
    step: f64,
    len: usize,
}

impl Grid {
    fn new(spec: &ProblemSpec, t: usize, len: usize) -> Self {
        let dom = spec.state_domain(t);
        let step = (dom.upper - dom.lower) / (len + 1) as f64;
        Self {
            start: dom.lower + step,
            step,
            len,
        }
    }

    fn node(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    /// Linear interpolation; `-inf` outside the grid.
    fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let pos = (x - self.start) / self.step;
        if !(pos >= 0.0 && pos <= (self.len - 1) as f64) {
            return f64::NEG_INFINITY;
        }
        let i = pos.floor() as usize;
        let w = pos - i as f64;
        if i + 1 >= self.len || w == 0.0 {
            return values[i];
        }
        let (lo, hi) = (values[i], values[i + 1]);
        if lo == f64::NEG_INFINITY || hi == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        lo + w * (hi - lo)
    }
}

const COARSE_SCAN: usize = 64;
const GOLDEN_ITERS: usize = 60;

/// Maximizes `objective` over `[lo, hi]`: coarse scan, then golden section
/// around the best scanned point.
fn maximize(lo: f64, hi: f64, objective: impl Fn(f64) -> f64) -> (f64, f64) {
    let h = (hi - lo) / COARSE_SCAN as f64;
    let mut best = (lo, objective(lo));
    let mut best_j = 0;
    for j in 1..=COARSE_SCAN {
        let c = lo + h * j as f64;
        let v = objective(c);
        if v > best.1 {
            best = (c, v);
            best_j = j;
        }
    }
    if best.1 == f64::NEG_INFINITY || h <= 0.0 {
        return best;
    }
    let mut a = lo + h * best_j.saturating_sub(1) as f64;
    let mut b = (lo + h * (best_j + 1) as f64).min(hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    for _ in 0..GOLDEN_ITERS {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(x1);
        }
    }
    for (x, f) in [(x1, f1), (x2, f2)] {
        if f > best.1 {
            best = (x, f);
        }
    }
    best
}

/// Backward induction on a uniform capital grid with linear interpolation of the
/// continuation value, then forward extraction from the true initial capital.
///
/// The extracted path is exactly attainable, so its objective never exceeds the
/// true optimum.
pub fn solve_dp_oracle(
    spec: &ProblemSpec,
    horizon: usize,
    grid_size: usize,
) -> Result<FiniteSolution> {
    if grid_size < 2 {
        return Err(Error::Domain(format!(
            "grid_size must be at least 2, got {grid_size}"
        )));
    }
    let grids: Vec<Grid> = (0..=horizon)
        .map(|t| Grid::new(spec, t, grid_size))
        .collect();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); horizon + 1];

    let terminal = &grids[horizon];
    let mut last = Vec::with_capacity(grid_size);
    for i in 0..grid_size {
        let k = terminal.node(i);
        last.push(spec.gain(horizon, spec.eat_up(horizon, k)?, k));
    }
    values[horizon] = last;

    for t in (0..horizon).rev() {
        let (next_grid, next_values) = (&grids[t + 1], &values[t + 1]);
        let grid = &grids[t];
        let mut current = Vec::with_capacity(grid_size);
        for i in 0..grid_size {
            let k = grid.node(i);
            let (lo, hi) = spec.decision_set(t, k);
            let (_, v) = maximize(lo, hi, |c| {
                spec.gain(t, c, k) + next_grid.interpolate(next_values, spec.transition(t, c, k))
            });
            if v == f64::NEG_INFINITY || v.is_nan() {
                return Err(Error::InfeasibleGrid { t, node: i, k });
            }
            current.push(v);
        }
        values[t] = current;
    }

    let mut ks = Vec::with_capacity(horizon + 1);
    let mut cs = Vec::with_capacity(horizon + 1);
    let mut k = spec.initial_capital();
    for t in 0..horizon {
        let (next_grid, next_values) = (&grids[t + 1], &values[t + 1]);
        let (lo, hi) = spec.decision_set(t, k);
        let (c, v) = maximize(lo, hi, |c| {
            spec.gain(t, c, k) + next_grid.interpolate(next_values, spec.transition(t, c, k))
        });
        if v == f64::NEG_INFINITY || v.is_nan() {
            return Err(Error::InfeasibleGrid { t, node: 0, k });
        }
        ks.push(k);
        cs.push(c);
        k = spec.transition(t, c, k);
    }
    ks.push(k);
    cs.push(spec.eat_up(horizon, k)?);
    let path = Path::from_columns(PathOrigin::FiniteSolution, &ks, &cs)?;
    Ok(FiniteSolution::from_path(spec, path, SolveMethod::DpOracle))
}

/// `sum_{t<T} U_t(c(t), k(t)) + U_T(eat_up(T, k(T)), k(T))`.
pub fn objective_value(spec: &ProblemSpec, path: &Path, horizon: usize) -> Result<f64> {
    path.require(horizon)?;
    let pts = path.points();
    let running: f64 = pts[..horizon]
        .iter()
        .map(|p| spec.gain(p.t, p.c, p.k))
        .sum();
    let k_end = pts[horizon].k;
    Ok(running + spec.gain(horizon, spec.eat_up(horizon, k_end)?, k_end))
}
