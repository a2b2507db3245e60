use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CriteriaConfig, CriterionReport, PartialSumSeries, SeriesKind, Trend};
use crate::error::{Error, Result};
use crate::model::{Path, PathOrigin, PathPoint, ProblemSpec};

/// Truncates `path` at `horizon` and replaces the last decision with the one
/// that consumes everything.
pub fn convert_path(spec: &ProblemSpec, path: &Path, horizon: usize) -> Result<Path> {
    let mut out = path.truncated(horizon)?;
    let last = &mut out.points_mut()[horizon];
    last.c = spec.eat_up(horizon, last.k)?;
    Ok(out.with_origin(PathOrigin::Converted))
}

fn checked_gain(spec: &ProblemSpec, t: usize, c: f64, k: f64) -> Result<f64> {
    let value = spec.gain(t, c, k);
    let sign = spec.utility_sign();
    if !sign.admits(value) {
        return Err(Error::SignMismatch { t, value, sign });
    }
    Ok(value)
}

/// Per-step gains along `path` together with the gain of eating up at every
/// `t`, both for `t <= t_max`.
fn gain_columns(spec: &ProblemSpec, path: &Path, t_max: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    path.require(t_max)?;
    let mut kept = Vec::with_capacity(t_max + 1);
    let mut eaten = Vec::with_capacity(t_max + 1);
    for p in &path.points()[..=t_max] {
        kept.push(checked_gain(spec, p.t, p.c, p.k)?);
        let c_end = spec.eat_up(p.t, p.k)?;
        eaten.push(checked_gain(spec, p.t, c_end, p.k)?);
    }
    Ok((kept, eaten))
}

/// `S(T) = sum_{t<T} gain(t) + gain of eating up at T`, for `T = 0..=t_max`.
pub fn eat_up_partial_sums(spec: &ProblemSpec, path: &Path, t_max: usize) -> Result<Vec<f64>> {
    let (kept, eaten) = gain_columns(spec, path, t_max)?;
    let mut acc = 0.0;
    Ok((0..=t_max)
        .map(|t| {
            let s = acc + eaten[t];
            acc += kept[t];
            s
        })
        .collect())
}

/// Converted-path difference `S_challenger(T) - S_incumbent(T)` for `T = 1..=t_max`,
/// accumulated termwise.
fn converted_difference(
    spec: &ProblemSpec,
    challenger: &Path,
    incumbent: &Path,
    t_max: usize,
) -> Result<PartialSumSeries> {
    let (kc, ec) = gain_columns(spec, challenger, t_max)?;
    let (ki, ei) = gain_columns(spec, incumbent, t_max)?;
    let mut acc = kc[0] - ki[0];
    let mut values = Vec::with_capacity(t_max);
    for t in 1..=t_max {
        values.push(acc + (ec[t] - ei[t]));
        acc += kc[t] - ki[t];
    }
    Ok(PartialSumSeries::new(SeriesKind::Difference, 1, values))
}

fn require_horizon(t_max: usize) -> Result<()> {
    if t_max < 1 {
        return Err(Error::Domain(
            "criteria need a horizon of at least 1".into(),
        ));
    }
    Ok(())
}

/// Overtaking comparison on converted paths. `pass` means the incumbent is not
/// overtaken: the lim inf of the difference is not positive.
pub fn overtakes(
    spec: &ProblemSpec,
    challenger: &Path,
    incumbent: &Path,
    t_max: usize,
    cfg: &CriteriaConfig,
) -> Result<CriterionReport> {
    require_horizon(t_max)?;
    let series = converted_difference(spec, challenger, incumbent, t_max)?;
    let liminf = cfg.liminf(&series);
    let estimate = liminf
        .map(|l| l.estimate)
        .unwrap_or_else(|| series.values.iter().copied().fold(f64::INFINITY, f64::min));
    let mut notes = Vec::new();
    if let Some(l) = liminf {
        notes.push(format!("tail trend {:?}", l.trend));
    } else {
        notes.push("series shorter than burn-in; minimum over all values".into());
    }
    Ok(CriterionReport {
        name: "overtaking".into(),
        series,
        liminf,
        estimate,
        tolerance: cfg.zero_tol,
        pass: estimate <= cfg.zero_tol,
        applicable: true,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Overtaking {
    Overtakes,
    NotOvertaken,
    Inconclusive,
}

/// Three-way reading of an [`overtakes`] report: the challenger overtakes when
/// the lim inf is positive and the tail is not oscillating or falling.
pub fn overtaking_outcome(report: &CriterionReport) -> Overtaking {
    if report.estimate <= report.tolerance {
        return Overtaking::NotOvertaken;
    }
    match report.liminf.map(|l| l.trend) {
        Some(Trend::Converging) | Some(Trend::DivergingUp) => Overtaking::Overtakes,
        _ => Overtaking::Inconclusive,
    }
}

fn limit_style_report(
    name: &str,
    series: PartialSumSeries,
    cfg: &CriteriaConfig,
) -> CriterionReport {
    let liminf = cfg.liminf(&series);
    let last = series.last().unwrap_or(f64::NAN);
    let (estimate, pass, note) = match liminf {
        Some(l) => match l.trend {
            Trend::Converging => (
                l.last,
                l.last <= cfg.zero_tol,
                "tail converges; limit estimated by the last value".to_string(),
            ),
            Trend::DivergingDown => (l.estimate, true, "tail diverges to -inf".to_string()),
            t => (l.estimate, false, format!("tail trend {t:?}; no limit")),
        },
        None => (last, false, "series shorter than burn-in".to_string()),
    };
    CriterionReport {
        name: name.into(),
        series,
        liminf,
        estimate,
        tolerance: cfg.zero_tol,
        pass,
        applicable: true,
        notes: vec![note],
    }
}

/// Limit of converted-path differences. `pass` means the limit exists and is not
/// positive, or the difference diverges to minus infinity.
pub fn sum_criterion_def2(
    spec: &ProblemSpec,
    challenger: &Path,
    incumbent: &Path,
    t_max: usize,
    cfg: &CriteriaConfig,
) -> Result<CriterionReport> {
    require_horizon(t_max)?;
    let series = converted_difference(spec, challenger, incumbent, t_max)?;
    Ok(limit_style_report("sum-converted", series, cfg))
}

/// Same comparison on raw, unconverted partial sums through `T`.
pub fn sum_criterion_def3(
    spec: &ProblemSpec,
    challenger: &Path,
    incumbent: &Path,
    t_max: usize,
    cfg: &CriteriaConfig,
) -> Result<CriterionReport> {
    require_horizon(t_max)?;
    let (kc, _) = gain_columns(spec, challenger, t_max)?;
    let (ki, _) = gain_columns(spec, incumbent, t_max)?;
    let mut acc = 0.0;
    let values = kc
        .iter()
        .zip(&ki)
        .map(|(a, b)| {
            acc += a - b;
            acc
        })
        .collect();
    let series = PartialSumSeries::new(SeriesKind::Difference, 0, values);
    Ok(limit_style_report("sum-raw", series, cfg))
}

/// Challenger paths built from the model primitives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Keep the fraction `s` of output as next capital.
    ConstantSaving(f64),
    /// Leave only `eps` as next capital.
    Greedy(f64),
    /// Follow the limit path but move `k(t_star + 1)` by the factor `1 + delta`,
    /// rejoining it at `t_star + 2`.
    PerturbLimit { delta: f64, t_star: usize },
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::ConstantSaving(s) => write!(f, "constant-saving:{s}"),
            Strategy::Greedy(eps) => write!(f, "greedy:{eps}"),
            Strategy::PerturbLimit { delta, t_star } => write!(f, "perturb-limit:{delta}:{t_star}"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    /// `constant-saving:S`, `greedy:EPS`, or `perturb-limit:DELTA:T_STAR`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParameterOutOfRange(format!("unrecognised challenger '{s}'"));
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
        match parts.as_slice() {
            ["constant-saving", v] => Ok(Strategy::ConstantSaving(num(v)?)),
            ["greedy", v] => Ok(Strategy::Greedy(num(v)?)),
            ["perturb-limit", d, t] => Ok(Strategy::PerturbLimit {
                delta: num(d)?,
                t_star: t.trim().parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

/// Builds a feasible challenger through `t_max`. `limit` is only consulted by
/// [`Strategy::PerturbLimit`] and must reach `t_max + 1`.
pub fn make_challenger(
    spec: &ProblemSpec,
    strategy: &Strategy,
    t_max: usize,
    limit: Option<&Path>,
) -> Result<Path> {
    let infeasible = |t: usize, reason: String| Error::InfeasibleStrategy { t, reason };
    let step = |t: usize, k: f64, k_next: f64| -> Result<PathPoint> {
        if !spec.state_domain(t + 1).contains(k_next) {
            return Err(infeasible(
                t,
                format!("next capital {k_next} is outside the state domain"),
            ));
        }
        let c = spec
            .consumption_for_next(t, k, k_next)
            .map_err(|e| infeasible(t, e.to_string()))?;
        if !spec.feasible(t, c, k) {
            return Err(infeasible(
                t,
                format!("consumption {c} is outside the decision set"),
            ));
        }
        Ok(PathPoint { t, k, c })
    };

    let mut points = Vec::with_capacity(t_max + 1);
    match *strategy {
        Strategy::ConstantSaving(_) | Strategy::Greedy(_) => {
            let mut k = spec.initial_capital();
            for t in 0..=t_max {
                let k_next = match *strategy {
                    Strategy::ConstantSaving(s) => s * spec.transition(t, 0.0, k),
                    Strategy::Greedy(eps) => eps,
                    Strategy::PerturbLimit { .. } => unreachable!(),
                };
                let p = step(t, k, k_next)?;
                points.push(p);
                k = k_next;
            }
        }
        Strategy::PerturbLimit { delta, t_star } => {
            let limit = limit.ok_or_else(|| infeasible(0, "no limit path supplied".into()))?;
            if t_star + 1 > t_max {
                return Err(infeasible(
                    t_star,
                    format!(
                        "perturbation at t = {} lies beyond t_max = {t_max}",
                        t_star + 1
                    ),
                ));
            }
            limit.require(t_max + 1)?;
            let mut ks: Vec<f64> = limit.capitals().take(t_max + 2).collect();
            ks[t_star + 1] *= 1.0 + delta;
            for t in 0..=t_max {
                points.push(step(t, ks[t], ks[t + 1])?);
            }
        }
    }
    Path::new(PathOrigin::Challenger, points)
}
