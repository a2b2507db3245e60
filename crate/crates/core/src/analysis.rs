//! Steady states, saving ratio, monotonicity, growth rates, discounting and
//! parameter sweeps for the growth model.

use serde::{Deserialize, Serialize};

use crate::criteria::{CriterionReport, PartialSumSeries, SeriesKind};
use crate::error::{Error, Result};
use crate::limit_engine::{ClosedFormLimit, LimitPath};
use crate::model::{discount, GrowthParams};

/// Distance from the steady capital below which a start counts as steady.
pub const STEADY_THRESHOLD: f64 = 1e-12;

/// Positivity floor for the limiting shadow price.
pub const SHADOW_PRICE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub k_inf: f64,
    pub c_inf: f64,
    pub lambda_inf: f64,
}

/// `k_inf = ab^(1/(1-alpha))`, `c_inf = (1-ab) ab^(alpha/(1-alpha))`, `lambda_inf = 1/c_inf`.
pub fn steady_state(params: &GrowthParams) -> SteadyState {
    formula_steady_state(params.alpha(), params.beta())
}

fn formula_steady_state(alpha: f64, beta: f64) -> SteadyState {
    let ab = alpha * beta;
    let k_inf = ab.powf(1.0 / (1.0 - alpha));
    let c_inf = (1.0 - ab) * ab.powf(alpha / (1.0 - alpha));
    SteadyState {
        k_inf,
        c_inf,
        lambda_inf: 1.0 / c_inf,
    }
}

/// `k°(t+1) / k°(t)^alpha`.
pub fn saving_ratio(limit: &LimitPath, t: usize) -> Result<f64> {
    let too_short = || Error::PathTooShort {
        needed: t + 1,
        available: limit.max_time().unwrap_or(0),
    };
    let alpha = match limit {
        LimitPath::ClosedForm(l) => l.params().alpha(),
        LimitPath::Numeric(_) => {
            return Err(Error::Domain(
                "saving ratio needs the output elasticity of a closed-form limit".into(),
            ))
        }
    };
    let k = limit.capital(t).ok_or_else(too_short)?;
    let k_next = limit.capital(t + 1).ok_or_else(too_short)?;
    Ok(k_next / k.powf(alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Steady,
}

pub fn monotonicity_class(params: &GrowthParams) -> Monotonicity {
    let gap = params.k0() - params.steady_capital();
    if gap.abs() <= STEADY_THRESHOLD {
        Monotonicity::Steady
    } else if gap > 0.0 {
        Monotonicity::Decreasing
    } else {
        Monotonicity::Increasing
    }
}

/// Direction of the limit capital read off `k°(t+1) - k°(t)` for `t < t_max`.
///
/// Steps where the deviation `alpha^t |ln(k0/k_inf)|` has fallen below `1e-9`
/// are skipped, since the difference is then dominated by rounding. `None` when
/// the sampled signs disagree.
pub fn sampled_monotonicity(params: &GrowthParams, t_max: usize) -> Option<Monotonicity> {
    let limit = ClosedFormLimit::new(*params);
    let gap = params.log_gap();
    let diffs: Vec<f64> = (0..t_max)
        .take_while(|&t| params.alpha().powi(t as i32) * gap.abs() > 1e-9)
        .map(|t| limit.capital(t + 1) - limit.capital(t))
        .collect();
    if diffs.iter().all(|d| d.abs() <= STEADY_THRESHOLD) {
        Some(Monotonicity::Steady)
    } else if diffs.iter().all(|d| *d > 0.0) {
        Some(Monotonicity::Increasing)
    } else if diffs.iter().all(|d| *d < 0.0) {
        Some(Monotonicity::Decreasing)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    /// From the derivative formula.
    pub continuous: f64,
    /// One-period log difference of the closed form.
    pub discrete: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRates {
    pub consumption: Rate,
    pub capital: Rate,
}

/// Continuous rates `ln alpha · ln(k0/k_inf) · alpha^(t+1)` (consumption) and
/// `· alpha^t` (capital); discrete rates from `ln x°(t+1) - ln x°(t)`.
pub fn growth_rates(params: &GrowthParams, t: usize) -> GrowthRates {
    let limit = ClosedFormLimit::new(*params);
    let alpha = params.alpha();
    let base = alpha.ln() * params.log_gap();
    let a_t = alpha.powi(t as i32);
    GrowthRates {
        consumption: Rate {
            continuous: base * a_t * alpha,
            discrete: limit.ln_consumption(t + 1) - limit.ln_consumption(t),
        },
        capital: Rate {
            continuous: base * a_t,
            discrete: limit.ln_capital(t + 1) - limit.ln_capital(t),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscountRatio {
    /// `c°_beta(t) / c°_1(t)` from the two closed-form limits.
    pub exact: f64,
    /// `[(1-ab)/(1-alpha)] beta^(alpha(1-alpha^t)/(1-alpha))`.
    pub reduced: f64,
    /// `beta^((1-alpha^t)/(1-alpha))`.
    pub shorthand: f64,
    /// `exact - shorthand`.
    pub discrepancy: f64,
}

/// Limit consumption under `beta` relative to the undiscounted case with the
/// same `alpha` and `k0`.
pub fn discount_consumption_ratio(params: &GrowthParams, t: usize) -> Result<DiscountRatio> {
    let beta = params.beta();
    if beta > 1.0 {
        return Err(Error::ParameterOutOfRange(format!(
            "discount comparison needs beta <= 1, got {beta}"
        )));
    }
    let alpha = params.alpha();
    let undiscounted = GrowthParams::new(alpha, 1.0, params.k0())?;
    let exact = (ClosedFormLimit::new(*params).ln_consumption(t)
        - ClosedFormLimit::new(undiscounted).ln_consumption(t))
    .exp();
    let weight = (1.0 - alpha.powi(t as i32)) / (1.0 - alpha);
    let reduced = (1.0 - alpha * beta) / (1.0 - alpha) * beta.powf(alpha * weight);
    let shorthand = beta.powf(weight);
    Ok(DiscountRatio {
        exact,
        reduced,
        shorthand,
        discrepancy: exact - shorthand,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub alpha: f64,
    pub beta: f64,
    /// Formula values; only meaningful as a steady state when `feasible`.
    pub steady: SteadyState,
    /// `beta < 1/alpha` and `k_inf < 1`.
    pub feasible: bool,
    /// Evaluated from the formulas although the parameters are not admissible.
    pub formula_level: bool,
    /// `k_inf >= 1`, outside the state domain.
    pub domain_breach: bool,
    /// Direction of the limit path from `k0`; absent for inadmissible cells.
    pub monotonicity: Option<Monotonicity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub k0: f64,
    /// Row-major by `beta`, then `alpha`, in the order given.
    pub cells: Vec<SweepCell>,
}

fn sweep_cell(alpha: f64, beta: f64, k0: f64) -> Result<SweepCell> {
    if !(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0) {
        return Err(Error::ParameterOutOfRange(format!(
            "sweep cell needs alpha in (0, 1) and beta > 0, got ({alpha}, {beta})"
        )));
    }
    let steady = formula_steady_state(alpha, beta);
    let admissible = alpha * beta < 1.0;
    let domain_breach = !(steady.k_inf < 1.0);
    let feasible = admissible && !domain_breach;
    let monotonicity = GrowthParams::new(alpha, beta, k0)
        .ok()
        .filter(|_| admissible)
        .map(|p| monotonicity_class(&p));
    Ok(SweepCell {
        alpha,
        beta,
        steady,
        feasible,
        formula_level: !feasible,
        domain_breach,
        monotonicity,
    })
}

pub fn alpha_limit_sweep(beta: f64, alphas: &[f64], k0: f64) -> Result<SweepResult> {
    sweep_grid(alphas, &[beta], k0)
}

pub fn sweep_grid(alphas: &[f64], betas: &[f64], k0: f64) -> Result<SweepResult> {
    let mut cells = Vec::with_capacity(alphas.len() * betas.len());
    for &beta in betas {
        for &alpha in alphas {
            cells.push(sweep_cell(alpha, beta, k0)?);
        }
    }
    Ok(SweepResult { k0, cells })
}

/// Series `beta^t λ°(t)` for `t = 0..=t_max`. `pass` means `λ_inf` clears the
/// positivity floor, i.e. the usual transversality condition fails when
/// `beta = 1`.
pub fn transversality_check(params: &GrowthParams, t_max: usize) -> CriterionReport {
    let limit = ClosedFormLimit::new(*params);
    let values = (0..=t_max)
        .map(|t| discount(params.beta(), t) * limit.shadow_price(t))
        .collect();
    let series = PartialSumSeries::new(SeriesKind::ShadowPrice, 0, values);
    let lambda_inf = steady_state(params).lambda_inf;
    let last = series.last().expect("nonempty");
    let mut notes = vec![format!("limiting shadow price {lambda_inf}")];
    if params.beta() < 1.0 {
        notes.push(format!("discounted shadow price {last:e} at t = {t_max}"));
    } else {
        notes.push("undiscounted shadow price stays bounded away from zero".into());
    }
    CriterionReport {
        name: "transversality".into(),
        series,
        liminf: None,
        estimate: lambda_inf,
        tolerance: SHADOW_PRICE_FLOOR,
        pass: lambda_inf > SHADOW_PRICE_FLOOR,
        applicable: true,
        notes,
    }
}
