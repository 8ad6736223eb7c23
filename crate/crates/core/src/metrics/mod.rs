//! Lorenz curves, Gini estimates and the estimators applied to binned
//! income tables.

mod bins;
mod fit;
mod mixture;
mod pareto;

pub use bins::{
    bin_means, collapse_distance, lorenz_from_bins, normalize_density, rescale_income_axis,
    with_zero_income_bin, DensityPoint, DensityTable, DEFAULT_CORRECTION,
};
pub use fit::{
    compare_series, estimate_k_regression, fit_exponential, ComparisonRow, SeriesComparison,
};
pub use mixture::{mixture_gini, mixture_lorenz, TailComponent};
pub use pareto::{estimate_k_open_end, pareto_tail_stats, Convention, ParetoTail, TailStats};

use crate::pid::PopulationBase;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GiniMethod {
    Trapezoid,
    TrapezoidPlusParetoTail,
    ExactModel,
}

impl GiniMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            GiniMethod::Trapezoid => "trapezoid",
            GiniMethod::TrapezoidPlusParetoTail => "trapezoid_pareto_tail",
            GiniMethod::ExactModel => "exact_model",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GiniEstimate {
    pub value: f64,
    pub method: GiniMethod,
    pub population_base: PopulationBase,
    pub year: i32,
}

/// Cumulative population share against cumulative income share.
#[derive(Debug, Clone, PartialEq)]
pub struct LorenzCurve {
    points: Vec<(f64, f64)>,
}

impl LorenzCurve {
    /// Builds a curve from `(count, income)` segments already sorted by mean
    /// income. Zero-count segments are dropped.
    pub fn from_segments(segments: &[(f64, f64)]) -> Option<Self> {
        let pop: f64 = segments.iter().map(|s| s.0).sum();
        let inc: f64 = segments.iter().map(|s| s.1).sum();
        if !(pop > 0.0 && inc > 0.0) {
            return None;
        }
        let mut points = Vec::with_capacity(segments.len() + 1);
        points.push((0.0, 0.0));
        let (mut cp, mut ci) = (0.0, 0.0);
        for &(count, income) in segments.iter().filter(|s| s.0 > 0.0) {
            cp += count;
            ci += income;
            points.push(((cp / pop).min(1.0), (ci / inc).min(1.0)));
        }
        if let Some(last) = points.last_mut() {
            *last = (1.0, 1.0);
        }
        Some(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

/// `G = 1 - sum (X_i - X_{i-1}) (Y_{i-1} + Y_i)`.
pub fn gini_trapezoid(curve: &LorenzCurve) -> f64 {
    1.0 - curve
        .points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum::<f64>()
}
