//! Partial-sum series and the finite-sample lim inf estimator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    SinglePath,
    Difference,
    Ratio,
    DeltaC,
    TerminalTerm,
    ShadowPrice,
    Product,
}

/// Values indexed by horizon: `values[i]` belongs to `T = start + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialSumSeries {
    pub kind: SeriesKind,
    pub start: usize,
    pub values: Vec<f64>,
}

impl PartialSumSeries {
    pub fn new(kind: SeriesKind, start: usize, values: Vec<f64>) -> Self {
        Self {
            kind,
            start,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Last horizon in the series.
    pub fn end(&self) -> usize {
        self.start + self.values.len().saturating_sub(1)
    }

    pub fn at(&self, horizon: usize) -> Option<f64> {
        horizon
            .checked_sub(self.start)
            .and_then(|i| self.values.get(i).copied())
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Entrywise product over the common horizons.
    pub fn product(&self, other: &PartialSumSeries) -> PartialSumSeries {
        let start = self.start.max(other.start);
        let end = self.end().min(other.end());
        let values = (start..=end)
            .filter_map(|t| Some(self.at(t)? * other.at(t)?))
            .collect();
        PartialSumSeries::new(SeriesKind::Product, start, values)
    }

    pub fn abs(&self) -> PartialSumSeries {
        PartialSumSeries::new(
            self.kind,
            self.start,
            self.values.iter().map(|v| v.abs()).collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Converging,
    Oscillating,
    DivergingDown,
    DivergingUp,
}

/// Tail minimum of a series plus a classification of how the tail behaves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiminfEstimate {
    /// Minimum over the window.
    pub estimate: f64,
    /// Value at the end of the window.
    pub last: f64,
    /// Horizons `(T_start, T_end)` the estimate covers.
    pub window: (usize, usize),
    pub trend: Trend,
    /// Largest absolute successive difference over the last quarter of the window.
    pub cauchy_gap: f64,
}

/// Default tolerance for the successive-difference test in [`liminf_estimate`].
pub const DEFAULT_CAUCHY_TOL: f64 = 1e-8;

/// Fitted decay exponent of the tail increments above which the tail counts as
/// converging. `1/T` increments sit at 1 and must read as divergent, so the cut
/// stays clear of it.
const SUMMABLE_DECAY: f64 = 1.5;

/// A damped oscillation must shrink its range by at least this factor across
/// the tail.
const DAMPING: f64 = 0.5;

pub fn liminf_estimate(series: &PartialSumSeries, burn_in: usize) -> Result<LiminfEstimate> {
    liminf_estimate_with(series, burn_in, DEFAULT_CAUCHY_TOL)
}

/// The tail is everything after the first `burn_in` values.
///
/// Classification, applied to the tail increments:
/// - Cauchy gap within `gap_tol`: converging.
/// - Both signs present among significant last-quarter increments (minority at
///   least a quarter): oscillating, unless the value range of the last quarter
///   fell below half that of the first quarter (then converging).
/// - Otherwise the mean absolute increment is compared between the first and
///   last quarter; a fitted power-law decay faster than `T^-1.5` is converging,
///   anything slower diverges in the direction of the last-quarter drift.
pub fn liminf_estimate_with(
    series: &PartialSumSeries,
    burn_in: usize,
    gap_tol: f64,
) -> Result<LiminfEstimate> {
    let needed = burn_in + 3;
    if series.len() < needed {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            needed,
        });
    }
    let tail = &series.values[burn_in..];
    let first_t = series.start + burn_in;
    let window = (first_t, series.end());
    let estimate = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let last = *tail.last().expect("tail has at least three values");

    let diffs: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
    let m = diffs.len();
    let q = (m / 4).max(1);
    let late = &diffs[m - q..];
    let early = &diffs[..q];
    let cauchy_gap = late.iter().map(|d| d.abs()).fold(0.0, f64::max);

    let trend = if cauchy_gap <= gap_tol {
        Trend::Converging
    } else {
        let pos = late.iter().filter(|d| **d > gap_tol).count();
        let neg = late.iter().filter(|d| **d < -gap_tol).count();
        if pos > 0 && neg > 0 && 4 * pos.min(neg) >= pos + neg {
            let range = |v: &[f64]| {
                let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
                hi - lo
            };
            let n = tail.len();
            if range(&tail[n - 1 - q..]) < DAMPING * range(&tail[..=q]) {
                Trend::Converging
            } else {
                Trend::Oscillating
            }
        } else {
            let mean_abs = |v: &[f64]| v.iter().map(|d| d.abs()).sum::<f64>() / v.len() as f64;
            let (early_mean, late_mean) = (mean_abs(early), mean_abs(late));
            let mid = |offset: usize| (first_t + offset) as f64 + 0.5 * q as f64 + 1.0;
            let decay = (early_mean / late_mean).ln() / (mid(m - q) / mid(0)).ln();
            if early_mean > 0.0 && late_mean > 0.0 && decay > SUMMABLE_DECAY {
                Trend::Converging
            } else if late.iter().sum::<f64>() > 0.0 {
                Trend::DivergingUp
            } else {
                Trend::DivergingDown
            }
        }
    };

    Ok(LiminfEstimate {
        estimate,
        last,
        window,
        trend,
        cauchy_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_fn(start: usize, end: usize, f: impl Fn(f64) -> f64) -> PartialSumSeries {
        PartialSumSeries::new(
            SeriesKind::SinglePath,
            start,
            (start..=end).map(|t| f(t as f64)).collect(),
        )
    }

    #[test]
    fn alternating_values_oscillate() {
        let s = from_fn(1, 100, |t| if t as usize % 2 == 1 { 1.0 } else { 2.0 });
        let est = liminf_estimate(&s, 5).unwrap();
        assert_eq!(est.estimate, 1.0);
        assert_eq!(est.trend, Trend::Oscillating);
    }

    #[test]
    fn constant_series_converges_with_zero_gap() {
        let s = from_fn(1, 50, |_| -3.5);
        let est = liminf_estimate(&s, 5).unwrap();
        assert_eq!(est.estimate, -3.5);
        assert_eq!(est.trend, Trend::Converging);
        assert_eq!(est.cauchy_gap, 0.0);
        assert_eq!(est.window, (6, 50));
    }

    #[test]
    fn harmonic_tail_converges() {
        let s = from_fn(1, 100, |t| 1.0 + 1.0 / t);
        let est = liminf_estimate(&s, 5).unwrap();
        assert!((est.estimate - 1.01).abs() < 1e-15);
        assert_eq!(est.trend, Trend::Converging);
    }

    #[test]
    fn linear_drift_diverges() {
        let down = liminf_estimate(&from_fn(1, 200, |t| -0.04 * t), 5).unwrap();
        assert_eq!(down.trend, Trend::DivergingDown);
        let up = liminf_estimate(&from_fn(1, 200, |t| t.sqrt()), 5).unwrap();
        assert_eq!(up.trend, Trend::DivergingUp);
        let log = liminf_estimate(&from_fn(1, 400, |t| -t.ln()), 5).unwrap();
        assert_eq!(log.trend, Trend::DivergingDown);
    }

    #[test]
    fn damped_oscillation_converges() {
        let s = from_fn(1, 400, |t| (-1f64).powi(t as i32) / t);
        assert_eq!(liminf_estimate(&s, 5).unwrap().trend, Trend::Converging);
    }

    #[test]
    fn short_series_is_rejected() {
        let s = from_fn(1, 7, |t| t);
        assert!(matches!(
            liminf_estimate(&s, 5),
            Err(Error::SeriesTooShort { len: 7, needed: 8 })
        ));
        assert!(liminf_estimate(&from_fn(1, 8, |t| t), 5).is_ok());
    }

    #[test]
    fn series_indexing() {
        let s = from_fn(3, 6, |t| t * 2.0);
        assert_eq!(s.at(3), Some(6.0));
        assert_eq!(s.at(6), Some(12.0));
        assert_eq!(s.at(2), None);
        assert_eq!(s.end(), 6);
        let p = s.product(&from_fn(4, 9, |t| t));
        assert_eq!(p.start, 4);
        assert_eq!(p.values, vec![32.0, 50.0, 72.0]);
    }
}
