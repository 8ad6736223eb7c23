use crate::error::MetricsError;

use super::LorenzCurve;

/// A Pareto-distributed block of `count` people with the given mean income
/// and density exponent `k` (minimum `mean (k - 1) / k`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailComponent {
    pub count: f64,
    pub mean: f64,
    pub k: f64,
}

impl TailComponent {
    pub fn x_m(&self) -> f64 {
        self.mean * (self.k - 1.0) / self.k
    }

    /// `E|c - Y|` for `Y` drawn from the tail.
    fn mean_abs_diff_from(&self, c: f64) -> f64 {
        let x_m = self.x_m();
        let mut e = self.mean - c;
        if c > x_m {
            let k = self.k;
            e += 2.0 * ((c - x_m) - x_m * ((c / x_m).powf(1.0 - k) - 1.0) / (1.0 - k));
        }
        e
    }
}

fn sorted_atoms(values: &[f64], weights: &[f64]) -> Result<Vec<(f64, f64)>, MetricsError> {
    if values.len() != weights.len() {
        return Err(MetricsError::InvalidInput(
            "values and weights differ in length".into(),
        ));
    }
    if values
        .iter()
        .chain(weights)
        .any(|v| !(v.is_finite() && *v >= 0.0))
    {
        return Err(MetricsError::InvalidInput(
            "incomes and weights must be finite and non-negative".into(),
        ));
    }
    let mut atoms: Vec<(f64, f64)> = values
        .iter()
        .copied()
        .zip(weights.iter().copied())
        .filter(|a| a.1 > 0.0)
        .collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(atoms)
}

fn check_tail(tail: &Option<TailComponent>) -> Result<Option<TailComponent>, MetricsError> {
    match *tail {
        Some(t) if t.count > 0.0 => {
            if !(t.k > 1.0) {
                return Err(MetricsError::NonFiniteMean { k: t.k });
            }
            if !(t.mean > 0.0 && t.mean.is_finite()) {
                return Err(MetricsError::InvalidInput(
                    "tail mean must be positive".into(),
                ));
            }
            Ok(Some(t))
        }
        _ => Ok(None),
    }
}

/// Exact Gini of weighted point incomes plus an optional Pareto block, from
/// the mean absolute difference.
pub fn mixture_gini(
    values: &[f64],
    weights: &[f64],
    tail: Option<TailComponent>,
) -> Result<f64, MetricsError> {
    let atoms = sorted_atoms(values, weights)?;
    let tail = check_tail(&tail)?;
    let mut n: f64 = atoms.iter().map(|a| a.1).sum();
    let mut total: f64 = atoms.iter().map(|a| a.0 * a.1).sum();
    // sum over ordered pairs of w_i w_j |v_i - v_j|
    let mut pairs = 0.0;
    let (mut cw, mut cvw) = (0.0, 0.0);
    for &(v, w) in &atoms {
        pairs += 2.0 * w * (v * cw - cvw);
        cw += w;
        cvw += v * w;
    }
    if let Some(t) = tail {
        let cross: f64 = atoms
            .iter()
            .map(|&(v, w)| w * t.mean_abs_diff_from(v))
            .sum();
        pairs += 2.0 * t.count * cross;
        pairs += t.count * t.count * 2.0 * t.mean / (2.0 * t.k - 1.0);
        n += t.count;
        total += t.count * t.mean;
    }
    if !(n > 0.0 && total > 0.0) {
        return Err(MetricsError::InvalidInput(
            "distribution has no income".into(),
        ));
    }
    Ok(pairs / (2.0 * n * total))
}

/// Lorenz curve of the same mixture with the tail cut into `tail_bins`
/// equal-population slices at their exact conditional means.
pub fn mixture_lorenz(
    values: &[f64],
    weights: &[f64],
    tail: Option<TailComponent>,
    tail_bins: usize,
) -> Result<LorenzCurve, MetricsError> {
    let mut pieces = sorted_atoms(values, weights)?;
    if let Some(t) = check_tail(&tail)? {
        let n = tail_bins.max(1);
        let k = t.k;
        // income share of the tail above the q-quantile is (1 - q)^((k - 1) / k)
        let share = |q: f64| (1.0 - q).max(0.0).powf((k - 1.0) / k);
        for j in 0..n {
            let (q0, q1) = (j as f64 / n as f64, (j + 1) as f64 / n as f64);
            let count = t.count / n as f64;
            let income = t.count * t.mean * (share(q0) - share(q1));
            pieces.push((income / count, count));
        }
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let segments: Vec<(f64, f64)> = pieces.iter().map(|&(m, w)| (w, m * w)).collect();
    LorenzCurve::from_segments(&segments)
        .ok_or_else(|| MetricsError::InvalidInput("distribution has no income".into()))
}

#[cfg(test)]
mod tests {
    use super::super::gini_trapezoid;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pure_pareto() {
        let t = TailComponent {
            count: 10.0,
            mean: 3.0,
            k: 1.35,
        };
        let g = mixture_gini(&[], &[], Some(t)).unwrap();
        assert!((g - 1.0 / 1.7).abs() < 1e-12);
    }

    #[test]
    fn two_atoms() {
        let g = mixture_gini(&[0.0, 1.0], &[1.0, 1.0], None).unwrap();
        assert!((g - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exact_matches_fine_lorenz() {
        let values: Vec<f64> = (0..200).map(|i| 0.01 * i as f64).collect();
        let weights: Vec<f64> = (0..200).map(|i| 1.0 + (i % 7) as f64).collect();
        let t = TailComponent {
            count: 60.0,
            mean: 2.5,
            k: 1.6,
        };
        let exact = mixture_gini(&values, &weights, Some(t)).unwrap();
        let curve = mixture_lorenz(&values, &weights, Some(t), 200_000).unwrap();
        assert!((gini_trapezoid(&curve) - exact).abs() < 2e-4);
    }

    proptest! {
        #[test]
        fn atoms_match_trapezoid(vals in proptest::collection::vec((0.0f64..100.0, 0.1f64..10.0), 1..40)) {
            let (v, w): (Vec<f64>, Vec<f64>) = vals.into_iter().unzip();
            prop_assume!(v.iter().any(|x| *x > 0.0));
            let exact = mixture_gini(&v, &w, None).unwrap();
            let curve = mixture_lorenz(&v, &w, None, 1).unwrap();
            prop_assert!((gini_trapezoid(&curve) - exact).abs() < 1e-9);
        }

        #[test]
        fn scale_invariant(scale in 0.01f64..100.0, k in 1.1f64..4.0) {
            let v = [0.5, 1.0, 2.0];
            let w = [3.0, 2.0, 1.0];
            let t = TailComponent { count: 1.0, mean: 4.0, k };
            let a = mixture_gini(&v, &w, Some(t)).unwrap();
            let vs: Vec<f64> = v.iter().map(|x| x * scale).collect();
            let b = mixture_gini(&vs, &w, Some(TailComponent { mean: 4.0 * scale, ..t })).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
