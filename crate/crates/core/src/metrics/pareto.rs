use std::fmt;
use std::str::FromStr;

use crate::error::MetricsError;

/// Which mean formula ties the Pareto index to a tail average.
///
/// `PaperMode` uses `x_av = (k + 1) x_m / k`, which is the mean of a Pareto
/// law with index `k + 1`; `ConsistentMode` uses the mean `k x_m / (k - 1)`
/// of the density `k x_m^k / x^(k+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    #[default]
    PaperMode,
    ConsistentMode,
}

impl Convention {
    pub fn as_str(self) -> &'static str {
        match self {
            Convention::PaperMode => "paper",
            Convention::ConsistentMode => "consistent",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Convention::PaperMode),
            "consistent" => Ok(Convention::ConsistentMode),
            other => Err(format!("unknown convention `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoTail {
    pub x_m: f64,
    pub k: f64,
    pub convention: Convention,
}

impl ParetoTail {
    pub fn new(x_m: f64, k: f64, convention: Convention) -> Result<Self, MetricsError> {
        if !(k > 1.0) || !k.is_finite() {
            return Err(MetricsError::NonFiniteMean { k });
        }
        if !(x_m > 0.0 && x_m.is_finite()) {
            return Err(MetricsError::InvalidInput(format!(
                "tail minimum {x_m} must be positive"
            )));
        }
        Ok(Self { x_m, k, convention })
    }

    /// Exponent of the density actually integrated.
    pub fn shape_index(&self) -> f64 {
        match self.convention {
            Convention::PaperMode => self.k + 1.0,
            Convention::ConsistentMode => self.k,
        }
    }

    pub fn mean(&self) -> f64 {
        let a = self.shape_index();
        a * self.x_m / (a - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailStats {
    pub pop_fraction: f64,
    pub income_fraction: f64,
    pub conditional_mean: f64,
}

/// Share of the tail population and tail income in `[a, b)`; `b = None` is
/// unbounded.
pub fn pareto_tail_stats(
    tail: &ParetoTail,
    a: f64,
    b: Option<f64>,
) -> Result<TailStats, MetricsError> {
    let k = tail.shape_index();
    if !(k > 1.0) {
        return Err(MetricsError::NonFiniteMean { k });
    }
    if a < tail.x_m || b.is_some_and(|b| b < a) {
        return Err(MetricsError::InvalidInput(format!(
            "interval [{a}, {b:?}) must start at or above x_m = {}",
            tail.x_m
        )));
    }
    let ra = tail.x_m / a;
    let rb = b.map_or(0.0, |b| tail.x_m / b);
    let pop_fraction = ra.powf(k) - rb.powf(k);
    let income_fraction = ra.powf(k - 1.0) - rb.powf(k - 1.0);
    let mean = k * tail.x_m / (k - 1.0);
    let conditional_mean = if pop_fraction > 0.0 {
        income_fraction * mean / pop_fraction
    } else {
        a
    };
    Ok(TailStats {
        pop_fraction,
        income_fraction,
        conditional_mean,
    })
}

/// Pareto index from the average income `x_av` of everyone above `x_m`.
pub fn estimate_k_open_end(
    x_m: f64,
    x_av: f64,
    convention: Convention,
) -> Result<f64, MetricsError> {
    if !(x_m > 0.0 && x_av > x_m && x_av.is_finite()) {
        return Err(MetricsError::DegenerateMean { x_m, mean: x_av });
    }
    Ok(match convention {
        Convention::PaperMode => x_m / (x_av - x_m),
        Convention::ConsistentMode => x_av / (x_av - x_m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn consistent(k: f64) -> ParetoTail {
        ParetoTail::new(1.0, k, Convention::ConsistentMode).unwrap()
    }

    #[test]
    fn whole_tail_mean() {
        let s = pareto_tail_stats(&consistent(1.35), 1.0, None).unwrap();
        assert!((s.pop_fraction - 1.0).abs() < 1e-15);
        assert!((s.conditional_mean - 3.857142857).abs() < 1e-6);
    }

    #[test]
    fn income_share_above_twice_minimum() {
        let s = pareto_tail_stats(&consistent(1.35), 2.0, None).unwrap();
        assert!((s.income_fraction - 2f64.powf(-0.35)).abs() < 1e-12);
        assert!((s.income_fraction - 0.784).abs() < 1e-3);
    }

    #[test]
    fn empty_interval() {
        let s = pareto_tail_stats(&consistent(1.35), 3.0, Some(3.0)).unwrap();
        assert_eq!(
            (s.pop_fraction, s.income_fraction, s.conditional_mean),
            (0.0, 0.0, 3.0)
        );
    }

    #[test]
    fn infinite_mean_rejected() {
        assert_eq!(
            ParetoTail::new(1.0, 1.0, Convention::ConsistentMode),
            Err(MetricsError::NonFiniteMean { k: 1.0 })
        );
    }

    #[test]
    fn paper_mode_mean_formula() {
        let t = ParetoTail::new(100.0, 1.35, Convention::PaperMode).unwrap();
        assert!((t.mean() - 2.35 * 100.0 / 1.35).abs() < 1e-12);
    }

    #[test]
    fn open_end_published_values() {
        let k1 = estimate_k_open_end(100_000.0, 176_068.0, Convention::PaperMode).unwrap();
        let k2 = estimate_k_open_end(250_000.0, 470_616.0, Convention::PaperMode).unwrap();
        assert!((k1 - 1.31).abs() < 0.005, "{k1}");
        assert!((k2 - 1.13).abs() < 0.005, "{k2}");
        assert!(matches!(
            estimate_k_open_end(10.0, 10.0, Convention::PaperMode),
            Err(MetricsError::DegenerateMean { .. })
        ));
    }

    proptest! {
        #[test]
        fn partition_fractions_sum_to_one(k in 1.05f64..4.0, cuts in proptest::collection::vec(1.0f64..50.0, 1..8)) {
            let t = consistent(k);
            let mut edges = cuts;
            edges.push(1.0);
            edges.sort_by(f64::total_cmp);
            edges.dedup();
            let mut pop = 0.0;
            let mut inc = 0.0;
            for (i, &a) in edges.iter().enumerate() {
                let s = pareto_tail_stats(&t, a, edges.get(i + 1).copied()).unwrap();
                pop += s.pop_fraction;
                inc += s.income_fraction;
            }
            prop_assert!((pop - 1.0).abs() < 1e-12);
            prop_assert!((inc - 1.0).abs() < 1e-12);
        }

        #[test]
        fn conventions_differ_by_one(x_m in 1.0f64..1e6, excess in 1e-3f64..10.0) {
            let x_av = x_m * (1.0 + excess);
            let p = estimate_k_open_end(x_m, x_av, Convention::PaperMode).unwrap();
            let c = estimate_k_open_end(x_m, x_av, Convention::ConsistentMode).unwrap();
            prop_assert!((c - 1.0 - p).abs() <= 1e-12 * c.max(1.0));
        }

        #[test]
        fn tail_mean_inverts_open_end_estimator(k in 1.05f64..5.0, x_m in 1.0f64..1e5) {
            for conv in [Convention::PaperMode, Convention::ConsistentMode] {
                let t = ParetoTail::new(x_m, k, conv).unwrap();
                let back = estimate_k_open_end(x_m, t.mean(), conv).unwrap();
                prop_assert!((back - k).abs() < 1e-9 * k);
            }
        }
    }
}
