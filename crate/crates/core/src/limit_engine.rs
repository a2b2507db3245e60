//! The limit `(k°, c°, λ°)` of finite-horizon optima as the horizon grows.
//!
//! [`limit_closed_form`] evaluates the growth model's limit formulas in log
//! space. [`limit_numeric`] works for any [`FiniteSolver`]: it lengthens the
//! horizon until the leading part of the capital path stops moving.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_solver::FiniteSolver;
use crate::model::{validate_path, GrowthParams, Path, PathOrigin, ProblemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    Numeric,
}

/// Closed-form limit path of the growth model.
///
/// With `k_inf = (ab)^(1/(1-alpha))` and `g = ln(k0 / k_inf)`:
/// `ln k°(t) = ln k_inf + alpha^t g`,
/// `ln c°(t) = ln(1 - ab) + alpha/(1-alpha) ln ab + alpha^(t+1) g`,
/// `ln λ°(t) = -ln(1 - ab) - alpha/(1-alpha) ln ab - alpha^(t+1) g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormLimit {
    params: GrowthParams,
}

impl ClosedFormLimit {
    pub fn new(params: GrowthParams) -> Self {
        Self { params }
    }

    pub fn params(&self) -> &GrowthParams {
        &self.params
    }

    fn ln_level(&self) -> f64 {
        let p = &self.params;
        (1.0 - p.ab()).ln() + p.alpha() / (1.0 - p.alpha()) * p.ab().ln()
    }

    fn alpha_pow(&self, n: usize) -> f64 {
        self.params.alpha().powi(n.min(i32::MAX as usize) as i32)
    }

    pub fn ln_capital(&self, t: usize) -> f64 {
        let p = &self.params;
        p.ab().ln() / (1.0 - p.alpha()) + self.alpha_pow(t) * p.log_gap()
    }

    pub fn ln_consumption(&self, t: usize) -> f64 {
        self.ln_level() + self.alpha_pow(t + 1) * self.params.log_gap()
    }

    pub fn capital(&self, t: usize) -> f64 {
        self.ln_capital(t).exp()
    }

    pub fn consumption(&self, t: usize) -> f64 {
        self.ln_consumption(t).exp()
    }

    pub fn shadow_price(&self, t: usize) -> f64 {
        (-self.ln_level() - self.alpha_pow(t + 1) * self.params.log_gap()).exp()
    }
}

/// Leading segment `t <= t_max` of a numerically extracted limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericLimit {
    pub capital: Vec<f64>,
    pub consumption: Vec<f64>,
    /// Horizon of the last finite solution used.
    pub horizon: usize,
    /// `sup_{t <= t_max} |k_T(t) - k_{T-1}(t)|` at the stopping horizon.
    pub cauchy_gap: f64,
    /// Largest budget residual along the extracted segment.
    pub budget_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LimitPath {
    ClosedForm(ClosedFormLimit),
    Numeric(NumericLimit),
}

impl LimitPath {
    pub fn provenance(&self) -> Provenance {
        match self {
            LimitPath::ClosedForm(_) => Provenance::ClosedForm,
            LimitPath::Numeric(_) => Provenance::Numeric,
        }
    }

    pub fn params(&self) -> Option<&GrowthParams> {
        match self {
            LimitPath::ClosedForm(l) => Some(l.params()),
            LimitPath::Numeric(_) => None,
        }
    }

    /// `k°(t)`; `None` beyond the computed segment of a numeric limit.
    pub fn capital(&self, t: usize) -> Option<f64> {
        match self {
            LimitPath::ClosedForm(l) => Some(l.capital(t)),
            LimitPath::Numeric(n) => n.capital.get(t).copied(),
        }
    }

    pub fn consumption(&self, t: usize) -> Option<f64> {
        match self {
            LimitPath::ClosedForm(l) => Some(l.consumption(t)),
            LimitPath::Numeric(n) => n.consumption.get(t).copied(),
        }
    }

    /// Largest date the path can be evaluated at.
    pub fn max_time(&self) -> Option<usize> {
        match self {
            LimitPath::ClosedForm(_) => None,
            LimitPath::Numeric(n) => Some(n.capital.len() - 1),
        }
    }

    /// The limit truncated at `horizon`, consumption `c°(t)` at every date.
    pub fn to_path(&self, horizon: usize) -> Result<Path> {
        if let Some(max) = self.max_time() {
            if horizon > max {
                return Err(Error::PathTooShort {
                    needed: horizon,
                    available: max,
                });
            }
        }
        let k: Vec<f64> = (0..=horizon).filter_map(|t| self.capital(t)).collect();
        let c: Vec<f64> = (0..=horizon).filter_map(|t| self.consumption(t)).collect();
        Path::from_columns(PathOrigin::Limit, &k, &c)
    }
}

pub fn limit_closed_form(params: &GrowthParams) -> LimitPath {
    LimitPath::ClosedForm(ClosedFormLimit::new(*params))
}

/// `λ°(t)`, the marginal utility `1 / c°(t)` of current consumption.
pub fn shadow_price(limit: &LimitPath, t: usize) -> Option<f64> {
    match limit {
        LimitPath::ClosedForm(l) => Some(l.shadow_price(t)),
        LimitPath::Numeric(n) => n.consumption.get(t).map(|c| 1.0 / c),
    }
}

pub fn default_horizon_cap(t_max: usize) -> usize {
    10 * t_max + 500
}

/// [`limit_numeric_capped`] with the default cap `10 t_max + 500`.
pub fn limit_numeric(
    spec: &ProblemSpec,
    solver: &impl FiniteSolver,
    t_max: usize,
    tol: f64,
) -> Result<LimitPath> {
    limit_numeric_capped(spec, solver, t_max, tol, default_horizon_cap(t_max))
}

/// Solves horizons `t_max, t_max + 1, ...` and stops once
/// `sup_{t <= t_max} |k_T(t) - k_{T-1}(t)| < tol`.
pub fn limit_numeric_capped(
    spec: &ProblemSpec,
    solver: &impl FiniteSolver,
    t_max: usize,
    tol: f64,
    cap: usize,
) -> Result<LimitPath> {
    let mut prev = solver.solve(t_max)?;
    let mut gap = f64::INFINITY;
    for horizon in (t_max + 1)..=cap.max(t_max + 1) {
        let cur = solver.solve(horizon)?;
        gap = prev
            .path
            .capitals()
            .zip(cur.path.capitals())
            .take(t_max + 1)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if gap < tol {
            let segment = cur.path.truncated(t_max)?;
            let budget_residual = validate_path(spec, &segment, f64::INFINITY).max_residual;
            return Ok(LimitPath::Numeric(NumericLimit {
                capital: segment.capitals().collect(),
                consumption: segment.consumptions().collect(),
                horizon,
                cauchy_gap: gap,
                budget_residual,
            }));
        }
        prev = cur;
    }
    Err(Error::NoConvergence { gap, tol, cap })
}
