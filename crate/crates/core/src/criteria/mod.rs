//! Optimality criteria for infinite-horizon paths, evaluated on finite samples.

mod comparators;
mod growth_checks;
mod series;

use serde::{Deserialize, Serialize};

pub use comparators::{
    convert_path, eat_up_partial_sums, make_challenger, overtakes, overtaking_outcome,
    sum_criterion_def2, sum_criterion_def3, Overtaking, Strategy,
};
pub use growth_checks::{
    appendix_c_delta, appendix_c_report, appendix_c_series_bound, log_consumption_gaps,
    terminal_term_limit, theorem_components, theorem_condition_ratio, zero_trend, SeriesBound,
    ZeroTrend,
};
pub use series::{
    liminf_estimate, liminf_estimate_with, LiminfEstimate, PartialSumSeries, SeriesKind, Trend,
    DEFAULT_CAUCHY_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriteriaConfig {
    /// Threshold for "equals zero" and for "not positive".
    pub zero_tol: f64,
    /// Successive-difference threshold for convergence.
    pub cauchy_tol: f64,
    /// Leading values dropped before any tail statistic.
    pub burn_in: usize,
}

impl Default for CriteriaConfig {
    fn default() -> Self {
        Self {
            zero_tol: 1e-6,
            cauchy_tol: DEFAULT_CAUCHY_TOL,
            burn_in: 5,
        }
    }
}

impl CriteriaConfig {
    pub fn with_zero_tol(mut self, tol: f64) -> Self {
        self.zero_tol = tol;
        self
    }

    pub(crate) fn liminf(&self, series: &PartialSumSeries) -> Option<LiminfEstimate> {
        liminf_estimate_with(series, self.burn_in, self.cauchy_tol).ok()
    }
}

/// Outcome of one criterion on one finite sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub name: String,
    pub series: PartialSumSeries,
    pub liminf: Option<LiminfEstimate>,
    /// The headline number the pass flag was decided on.
    pub estimate: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// False when the criterion does not apply to these parameters; `pass` is
    /// then false as well.
    pub applicable: bool,
    pub notes: Vec<String>,
}

impl CriterionReport {
    pub fn window(&self) -> Option<(usize, usize)> {
        self.liminf.map(|l| l.window)
    }
}
