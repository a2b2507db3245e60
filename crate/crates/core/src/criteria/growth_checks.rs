//! Checks specific to the growth model: the theorem's ratio condition, the
//! convergence of log-consumption differences, and the terminal utility term.

use serde::{Deserialize, Serialize};

use super::{CriteriaConfig, CriterionReport, LiminfEstimate, PartialSumSeries, SeriesKind, Trend};
use crate::error::{Error, Result};
use crate::finite_solver::{log_factor, solve_policy_recursion};
use crate::limit_engine::ClosedFormLimit;
use crate::model::{discount, make_growth_model, GrowthParams, Path};

/// Lower bound accepted for a quantity that is nonnegative in exact arithmetic.
const POSITIVITY_SLACK: f64 = 1e-12;

/// Numerator and denominator of the theorem's ratio at horizon `T`.
///
/// The numerator compares the horizon-`T` optimum with the limit path converted
/// at `T`; the denominator is the optimum's own objective.
pub fn theorem_components(params: &GrowthParams, horizon: usize) -> Result<(f64, f64)> {
    let spec = make_growth_model(params);
    let limit = ClosedFormLimit::new(*params);
    let finite = solve_policy_recursion(params, horizon);
    let mut numerator = 0.0;
    for p in &finite.path.points()[..horizon] {
        let (k_lim, c_lim) = (limit.capital(p.t), limit.consumption(p.t));
        numerator += spec.gain(p.t, p.c, p.k) - spec.gain(p.t, c_lim, k_lim);
    }
    let end = finite.path.points()[horizon];
    let k_lim = limit.capital(horizon);
    let c_lim = spec.eat_up(horizon, k_lim)?;
    numerator += spec.gain(horizon, end.c, end.k) - spec.gain(horizon, c_lim, k_lim);
    if finite.objective == 0.0 || !finite.objective.is_finite() {
        return Err(Error::ZeroDenominator(horizon));
    }
    Ok((numerator, finite.objective))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroTrend {
    ConvergingToZero,
    ConvergingElsewhere,
    NotConverging,
    Inconclusive,
}

/// Whether `|series|` settles at zero.
///
/// A converging tail whose last value is above `zero_tol` still counts as
/// heading to zero when a Richardson step on `T·|x(T)|` puts the limit below a
/// tenth of the last value.
pub fn zero_trend(
    series: &PartialSumSeries,
    cfg: &CriteriaConfig,
) -> (ZeroTrend, Option<LiminfEstimate>) {
    let abs = series.abs();
    let Some(est) = cfg.liminf(&abs) else {
        return (ZeroTrend::Inconclusive, None);
    };
    if est.trend != Trend::Converging {
        return (ZeroTrend::NotConverging, Some(est));
    }
    if est.last <= cfg.zero_tol {
        return (ZeroTrend::ConvergingToZero, Some(est));
    }
    let (t0, t2) = est.window;
    let t1 = t2 - ((t2 - t0) / 4).max(1);
    let (v1, v2) = (abs.at(t1).unwrap_or(f64::NAN), est.last);
    let (t1, t2) = (t1 as f64, t2 as f64);
    let extrapolated = (t2 * v2 - t1 * v1) / (t2 - t1);
    if extrapolated.abs() <= 0.1 * v2 {
        (ZeroTrend::ConvergingToZero, Some(est))
    } else {
        (ZeroTrend::ConvergingElsewhere, Some(est))
    }
}

/// Ratio series `R(T)` for `T = 1..=t_max`. `pass` requires a trend to zero and
/// `|R(t_max)| <= zero_tol`.
pub fn theorem_condition_ratio(
    params: &GrowthParams,
    t_max: usize,
    cfg: &CriteriaConfig,
) -> Result<CriterionReport> {
    if t_max < 2 {
        return Err(Error::Domain(format!(
            "theorem check needs t_max >= 2, got {t_max}"
        )));
    }
    let mut values = Vec::with_capacity(t_max);
    for horizon in 1..=t_max {
        let (num, den) = theorem_components(params, horizon)?;
        values.push(num / den);
    }
    let series = PartialSumSeries::new(SeriesKind::Ratio, 1, values);
    let last = series.last().expect("t_max >= 2");
    let (trend, liminf) = zero_trend(&series, cfg);
    let (num, den) = theorem_components(params, t_max)?;
    let pass = trend == ZeroTrend::ConvergingToZero && last.abs() <= cfg.zero_tol;
    Ok(CriterionReport {
        name: "theorem".into(),
        series,
        liminf,
        estimate: last,
        tolerance: cfg.zero_tol,
        pass,
        applicable: true,
        notes: vec![
            format!("zero trend {trend:?}"),
            format!("numerator {num:e}, denominator {den:e} at T = {t_max}"),
        ],
    })
}

/// `ln c_T(t) - ln c°(t)` for `t = 0..=T`, from the exact log-correction
///
/// `-(1 - alpha) sum_{i<t} alpha^i ln(1 - ab^(T-t+1+i)) - alpha^t ln(1 - ab^(T+1))`,
///
/// accumulated through `S(t+1) = ln(1 - ab^(T-t)) + alpha S(t)`.
pub fn log_consumption_gaps(params: &GrowthParams, horizon: usize) -> Result<Vec<f64>> {
    let alpha = params.alpha();
    let ab = params.ab();
    let last = log_factor(ab, horizon + 1)?;
    let mut gaps = Vec::with_capacity(horizon + 1);
    let mut s = 0.0;
    let mut alpha_t = 1.0;
    for t in 0..=horizon {
        gaps.push(-(1.0 - alpha) * s - alpha_t * last);
        if t < horizon {
            s = log_factor(ab, horizon - t)? + alpha * s;
            alpha_t *= alpha;
        }
    }
    Ok(gaps)
}

/// `Δ(T) = sum_{t<=T} beta^t (ln c_T(t) - ln c°(t))`, where `c_T(T)` eats up and
/// `c°(T)` is the limit consumption.
pub fn appendix_c_delta(params: &GrowthParams, horizon: usize) -> Result<f64> {
    if horizon < 1 {
        return Err(Error::Domain("Δ(T) needs T >= 1".into()));
    }
    Ok(discounted_sum(
        params,
        &log_consumption_gaps(params, horizon)?,
    ))
}

fn discounted_sum(params: &GrowthParams, gaps: &[f64]) -> f64 {
    gaps.iter()
        .enumerate()
        .map(|(t, g)| discount(params.beta(), t) * g)
        .sum()
}

/// `Δ(T)` for `T = 1..=t_max`.
///
/// For `beta < 1` it passes when `Δ(t_max) <= zero_tol` and the tail never
/// increases; for `beta = 1` when the tail converges to a positive constant.
/// Every gap must also be nonnegative. Not applicable for `beta > 1`.
pub fn appendix_c_report(
    params: &GrowthParams,
    t_max: usize,
    cfg: &CriteriaConfig,
) -> Result<CriterionReport> {
    if t_max < 1 {
        return Err(Error::Domain("Δ(T) needs T >= 1".into()));
    }
    let mut values = Vec::with_capacity(t_max);
    let mut min_gap = f64::INFINITY;
    for horizon in 1..=t_max {
        let gaps = log_consumption_gaps(params, horizon)?;
        min_gap = gaps.iter().copied().fold(min_gap, f64::min);
        values.push(discounted_sum(params, &gaps));
    }
    let series = PartialSumSeries::new(SeriesKind::DeltaC, 1, values);
    let liminf = cfg.liminf(&series);
    let last = series.last().expect("t_max >= 1");
    let positive = min_gap >= -POSITIVITY_SLACK;
    let beta = params.beta();
    let bound = appendix_c_series_bound(params, t_max)?;
    let mut notes = vec![
        format!("smallest log-consumption gap {min_gap:e}"),
        format!(
            "series sum {:.12}, closed-form integral bound {:.12}",
            bound.sum, bound.integral_bound
        ),
    ];

    let (applicable, pass) = if beta < 1.0 {
        let tail = &series.values[cfg.burn_in.min(series.len() - 1)..];
        let non_increasing = tail.windows(2).all(|w| w[1] <= w[0]);
        notes.push(format!("tail non-increasing: {non_increasing}"));
        (
            true,
            positive && non_increasing && last.abs() <= cfg.zero_tol,
        )
    } else if beta == 1.0 {
        let settled =
            liminf.is_some_and(|l| l.trend == Trend::Converging && l.cauchy_gap <= cfg.cauchy_tol);
        notes.push(format!("limit constant estimate {last:.15}"));
        (true, positive && settled && last > cfg.zero_tol)
    } else {
        notes.push("beta above 1: no limit statement applies".into());
        (false, false)
    };
    Ok(CriterionReport {
        name: "appendix-c".into(),
        series,
        liminf,
        estimate: last,
        tolerance: if beta < 1.0 {
            cfg.zero_tol
        } else {
            cfg.cauchy_tol
        },
        pass,
        applicable,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesBound {
    /// `sum_{s=1}^{T} alpha^s (-ln(1 - alpha^s))`.
    pub sum: f64,
    /// The closed form
    /// `(1/ln alpha)[(1-alpha^T)ln(1-alpha^T) - (1-alpha)ln(1-alpha) - (1-alpha^T) + (1-alpha)]`.
    pub integral_bound: f64,
    /// `-ln(1 - ab^s) <= -ln(1 - alpha^s)` for every `s <= T`; `None` when `beta > 1`.
    pub dominated: Option<bool>,
}

pub fn appendix_c_series_bound(params: &GrowthParams, horizon: usize) -> Result<SeriesBound> {
    if horizon < 1 {
        return Err(Error::Domain("series bound needs T >= 1".into()));
    }
    let alpha = params.alpha();
    let mut sum = 0.0;
    let mut dominated = true;
    for s in 1..=horizon {
        let own = -log_factor(alpha, s)?;
        sum += alpha.powi(s as i32) * own;
        if params.beta() <= 1.0 {
            dominated &= -log_factor(params.ab(), s)? <= own;
        }
    }
    let x = 1.0 - alpha.powi(horizon as i32);
    let y = 1.0 - alpha;
    let lx = if x > 0.0 { x * x.ln() } else { 0.0 };
    let integral_bound = (lx - y * y.ln() - x + y) / alpha.ln();
    Ok(SeriesBound {
        sum,
        integral_bound,
        dominated: (params.beta() <= 1.0).then_some(dominated),
    })
}

/// `|gain(T, eat_up(T, k(T)), k(T))|` for `T = 0..=t_max`; for log utility this
/// is `beta^T |ln k(T)^alpha|`. Not applicable for `beta >= 1`.
pub fn terminal_term_limit(
    params: &GrowthParams,
    path: &Path,
    t_max: usize,
    cfg: &CriteriaConfig,
) -> Result<CriterionReport> {
    path.require(t_max)?;
    let spec = make_growth_model(params);
    let mut values = Vec::with_capacity(t_max + 1);
    for p in &path.points()[..=t_max] {
        let c = spec.eat_up(p.t, p.k)?;
        values.push(spec.gain(p.t, c, p.k).abs());
    }
    let series = PartialSumSeries::new(SeriesKind::TerminalTerm, 0, values);
    let liminf = cfg.liminf(&series);
    let last = series.last().expect("nonempty");
    let applicable = params.beta() < 1.0;
    let converging = liminf.is_some_and(|l| l.trend == Trend::Converging);
    let notes = if applicable {
        vec![format!("terminal term {last:e} at T = {t_max}")]
    } else {
        vec!["undiscounted or growing weights: the terminal term need not vanish".into()]
    };
    Ok(CriterionReport {
        name: "appendix-d".into(),
        series,
        liminf,
        estimate: last,
        tolerance: cfg.zero_tol,
        pass: applicable && converging && last <= cfg.zero_tol,
        applicable,
        notes,
    })
}
