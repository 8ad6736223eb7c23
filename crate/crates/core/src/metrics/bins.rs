use crate::error::MetricsError;
use crate::pid::{Bin, BinnedPid, IncomeUnits, PopulationBase};

use super::{LorenzCurve, ParetoTail};

/// Offset of the average income from the bin center, in bin widths.
pub const DEFAULT_CORRECTION: f64 = -0.12;

/// Mean income of each closed bin: the reported mean where present,
/// otherwise `center + correction * width` clamped into the bin.
pub fn bin_means(pid: &BinnedPid, correction: f64) -> Vec<f64> {
    pid.closed_bins()
        .iter()
        .map(|b| match (b.mean, b.upper) {
            (Some(m), _) => m,
            (None, Some(u)) => {
                let w = u - b.lower;
                (b.lower + 0.5 * w + correction * w).clamp(b.lower, u)
            }
            (None, None) => b.lower,
        })
        .collect()
}

/// Lorenz curve of a binned table. An open top bin uses its reported mean,
/// falling back to `tail.mean()`.
pub fn lorenz_from_bins(
    pid: &BinnedPid,
    means: &[f64],
    tail: Option<&ParetoTail>,
) -> Result<LorenzCurve, MetricsError> {
    let closed = pid.closed_bins();
    if means.len() != closed.len() {
        return Err(MetricsError::InvalidInput(format!(
            "{} means for {} closed bins",
            means.len(),
            closed.len()
        )));
    }
    let mut pieces: Vec<(f64, f64)> = closed
        .iter()
        .zip(means)
        .map(|(b, &m)| (m, b.count))
        .collect();
    if let Some(open) = pid.open_bin() {
        let mean = match (open.mean, tail) {
            (Some(m), _) => m,
            (None, Some(t)) => t.mean(),
            (None, None) => return Err(MetricsError::OpenBinUnresolved { lower: open.lower }),
        };
        pieces.push((mean, open.count));
    }
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    let segments: Vec<(f64, f64)> = pieces.iter().map(|&(m, c)| (c, m * c)).collect();
    LorenzCurve::from_segments(&segments)
        .ok_or_else(|| MetricsError::InvalidInput(format!("{}: table has no income", pid.year)))
}

/// Adds a zero-width bin at zero income for everyone without income.
pub fn with_zero_income_bin(pid: &BinnedPid, total_pop: f64) -> Result<BinnedPid, MetricsError> {
    if pid.population_base != PopulationBase::WithIncome {
        return Err(MetricsError::InvalidInput(format!(
            "{}: table already covers the whole population",
            pid.year
        )));
    }
    let counted = pid.total_count();
    if !(total_pop >= counted) {
        return Err(MetricsError::PopulationUnderflow {
            total: total_pop,
            counted,
        });
    }
    let mut bins = Vec::with_capacity(pid.bins().len() + 1);
    bins.push(Bin {
        lower: 0.0,
        upper: Some(0.0),
        count: total_pop - counted,
        mean: Some(0.0),
    });
    bins.extend_from_slice(pid.bins());
    BinnedPid::new(pid.year, PopulationBase::All15Plus, pid.income_units, bins)
        .map_err(|e| MetricsError::InvalidInput(format!("{}: {e}", pid.year)))
}

/// Divides every edge and mean by `factor`.
pub fn rescale_income_axis(pid: &BinnedPid, factor: f64) -> Result<BinnedPid, MetricsError> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(MetricsError::InvalidInput(format!(
            "rescale factor {factor} must be positive"
        )));
    }
    let bins = pid
        .bins()
        .iter()
        .map(|b| Bin {
            lower: b.lower / factor,
            upper: b.upper.map(|u| u / factor),
            count: b.count,
            mean: b.mean.map(|m| m / factor),
        })
        .collect();
    BinnedPid::new(pid.year, pid.population_base, IncomeUnits::ModelUnits, bins)
        .map_err(|e| MetricsError::InvalidInput(format!("{}: {e}", pid.year)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityPoint {
    pub lower: f64,
    pub upper: f64,
    pub mean: f64,
    /// Population fraction per unit income.
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    pub year: i32,
    pub points: Vec<DensityPoint>,
}

impl DensityTable {
    /// Log-density at `log x`, interpolated linearly in log-log space over
    /// points with positive density.
    fn log_density_at(&self, log_x: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self.log_points();
        let i = pts.partition_point(|p| p.0 < log_x);
        if i < pts.len() && pts[i].0 == log_x {
            return Some(pts[i].1);
        }
        if i == 0 || i == pts.len() {
            return None;
        }
        let (a, b) = (pts[i - 1], pts[i]);
        Some(a.1 + (b.1 - a.1) * (log_x - a.0) / (b.0 - a.0))
    }

    fn log_points(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter(|p| p.density > 0.0 && p.mean > 0.0)
            .map(|p| (p.mean.ln(), p.density.ln()))
            .collect()
    }
}

/// Count per person per unit income for each closed bin of positive width,
/// placed at the bin mean (default correction where none is reported).
pub fn normalize_density(pid: &BinnedPid, population: f64) -> DensityTable {
    let means = bin_means(pid, DEFAULT_CORRECTION);
    let points = pid
        .closed_bins()
        .iter()
        .zip(means)
        .filter_map(|(b, mean)| {
            let upper = b.upper?;
            let width = upper - b.lower;
            (width > 0.0).then(|| DensityPoint {
                lower: b.lower,
                upper,
                mean,
                density: b.count / (population * width),
            })
        })
        .collect();
    DensityTable {
        year: pid.year,
        points,
    }
}

const COLLAPSE_GRID: usize = 64;

/// Mean absolute difference of log-density over a shared log-income grid.
pub fn collapse_distance(a: &DensityTable, b: &DensityTable) -> Result<f64, MetricsError> {
    let (pa, pb) = (a.log_points(), b.log_points());
    if pa.is_empty() || pb.is_empty() {
        return Err(MetricsError::DisjointSupport);
    }
    let lo = pa[0].0.max(pb[0].0);
    let hi = pa[pa.len() - 1].0.min(pb[pb.len() - 1].0);
    if !(lo <= hi) {
        return Err(MetricsError::DisjointSupport);
    }
    let n = if hi > lo { COLLAPSE_GRID } else { 1 };
    let mut sum = 0.0;
    for i in 0..n {
        let x = if i + 1 == n {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        };
        let (ya, yb) = match (a.log_density_at(x), b.log_density_at(x)) {
            (Some(ya), Some(yb)) => (ya, yb),
            _ => return Err(MetricsError::DisjointSupport),
        };
        sum += (ya - yb).abs();
    }
    Ok(sum / n as f64)
}
