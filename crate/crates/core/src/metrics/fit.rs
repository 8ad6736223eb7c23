use std::collections::BTreeMap;

use crate::error::MetricsError;

use super::{Convention, DensityTable};

/// Ordinary least squares `y = slope x + intercept`.
fn ols(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Log-log slope of density against mean income over bins starting at or
/// above `threshold`, and the Pareto index it implies.
pub fn estimate_k_regression(
    density: &DensityTable,
    threshold: f64,
    convention: Convention,
) -> Result<(f64, f64), MetricsError> {
    let pts: Vec<(f64, f64)> = density
        .points
        .iter()
        .filter(|p| p.lower >= threshold && p.density > 0.0 && p.mean > 0.0)
        .map(|p| (p.mean.ln(), p.density.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(MetricsError::InsufficientTailBins { found: pts.len() });
    }
    let (slope, _) = ols(&pts);
    let k = match convention {
        Convention::PaperMode => slope.abs() - 2.0,
        Convention::ConsistentMode => slope.abs() - 1.0,
    };
    Ok((slope, k))
}

/// Semi-log slope of density against mean income over bins ending at or
/// below `upper_limit`.
pub fn fit_exponential(density: &DensityTable, upper_limit: f64) -> Result<f64, MetricsError> {
    let pts: Vec<(f64, f64)> = density
        .points
        .iter()
        .filter(|p| p.upper <= upper_limit && p.density > 0.0)
        .map(|p| (p.mean, p.density.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(MetricsError::InsufficientBins { found: pts.len() });
    }
    Ok(ols(&pts).0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub year: i32,
    pub ours: f64,
    pub reference: f64,
    pub difference: f64,
    /// Change in the reference from the previous year, when both exist.
    pub reference_step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesComparison {
    pub rows: Vec<ComparisonRow>,
    /// Year and signed size of the largest year-over-year reference change.
    pub largest_jump: Option<(i32, f64)>,
}

pub fn compare_series(
    ours: &BTreeMap<i32, f64>,
    reference: &BTreeMap<i32, f64>,
) -> Result<SeriesComparison, MetricsError> {
    let step = |year: i32| Some(reference.get(&year)? - reference.get(&(year - 1))?);
    let rows: Vec<ComparisonRow> = ours
        .iter()
        .filter_map(|(&year, &o)| {
            let r = *reference.get(&year)?;
            Some(ComparisonRow {
                year,
                ours: o,
                reference: r,
                difference: o - r,
                reference_step: step(year),
            })
        })
        .collect();
    if rows.is_empty() {
        return Err(MetricsError::NoOverlap);
    }
    let largest_jump = reference
        .keys()
        .filter_map(|&y| step(y).map(|s| (y, s)))
        .fold(None, |best: Option<(i32, f64)>, (y, s)| match best {
            Some((_, b)) if b.abs() >= s.abs() => best,
            _ => Some((y, s)),
        });
    Ok(SeriesComparison { rows, largest_jump })
}
