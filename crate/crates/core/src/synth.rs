//! Model income distributions per year and the Gini they predict.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::ages::AgeStructure;
use crate::economy::EconomySeries;
use crate::error::{MetricsError, ModelError};
use crate::metrics::{mixture_gini, Convention, GiniEstimate, GiniMethod, TailComponent};
use crate::model::{capability_grid, CohortState, ModelContext, ModelParams};
use crate::pid::PopulationBase;

/// Weighted group incomes for one year, in model units.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPid {
    pub year: i32,
    pub incomes: Vec<f64>,
    pub weights: Vec<f64>,
    pub threshold: f64,
    pub tail_count: f64,
    pub tail_income_factor: f64,
    pub dollars_per_unit: f64,
}

impl ModelPid {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_tail(&self, income: f64) -> bool {
        income >= self.threshold
    }

    /// Sum of model incomes at or above the threshold.
    pub fn theoretical_tail_income(&self) -> f64 {
        self.incomes
            .iter()
            .zip(&self.weights)
            .filter(|(v, _)| self.is_tail(**v))
            .map(|(v, w)| v * w)
            .sum()
    }
}

/// Model distribution with the tail replaced by a Pareto block.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoZone {
    pub year: i32,
    pub below_incomes: Vec<f64>,
    pub below_weights: Vec<f64>,
    pub threshold: f64,
    /// `None` when nobody reaches the threshold.
    pub tail: Option<TailComponent>,
    pub theoretical_tail_income: f64,
}

impl ParetoZone {
    pub fn empty_tail(&self) -> bool {
        self.tail.is_none()
    }

    pub fn tail_income(&self) -> f64 {
        self.tail.map_or(0.0, |t| t.count * t.mean)
    }

    pub fn population(&self) -> f64 {
        self.below_weights.iter().sum::<f64>() + self.tail.map_or(0.0, |t| t.count)
    }

    pub fn gini(&self) -> Result<f64, MetricsError> {
        mixture_gini(&self.below_incomes, &self.below_weights, self.tail)
    }
}

/// Keeps the tail headcount, scales its income by `boost` and spreads it as a
/// Pareto law whose exponent follows `convention` (`k` or `k + 1`).
pub fn apply_pareto_zone(
    pid: &ModelPid,
    k: f64,
    boost: f64,
    convention: Convention,
) -> Result<ParetoZone, ModelError> {
    if !(k > 1.0 && k.is_finite()) {
        return Err(ModelError::InvalidParameter("k must exceed 1".into()));
    }
    if !(boost >= 1.0 && boost.is_finite()) {
        return Err(ModelError::InvalidParameter(
            "boost must be at least 1".into(),
        ));
    }
    let mut below_incomes = Vec::with_capacity(pid.incomes.len());
    let mut below_weights = Vec::with_capacity(pid.incomes.len());
    let (mut count, mut theoretical) = (0.0, 0.0);
    for (&v, &w) in pid.incomes.iter().zip(&pid.weights) {
        if pid.is_tail(v) {
            count += w;
            theoretical += v * w;
        } else {
            below_incomes.push(v);
            below_weights.push(w);
        }
    }
    let shape = match convention {
        Convention::PaperMode => k + 1.0,
        Convention::ConsistentMode => k,
    };
    let tail = (count > 0.0).then(|| TailComponent {
        count,
        mean: boost * theoretical / count,
        k: shape,
    });
    Ok(ParetoZone {
        year: pid.year,
        below_incomes,
        below_weights,
        threshold: pid.threshold,
        tail,
        theoretical_tail_income: theoretical,
    })
}

/// Tail income implied by a Pareto law starting at the threshold over the
/// theoretical tail income, at matched headcount.
pub fn extra_income_ratio(
    k: f64,
    pid: &ModelPid,
    convention: Convention,
) -> Result<f64, ModelError> {
    if !(k > 1.0) {
        return Err(ModelError::InvalidParameter("k must exceed 1".into()));
    }
    let theoretical = pid.theoretical_tail_income();
    if !(pid.tail_count > 0.0 && theoretical > 0.0) {
        return Err(ModelError::EmptyTail);
    }
    let mean = match convention {
        Convention::PaperMode => (k + 1.0) * pid.threshold / k,
        Convention::ConsistentMode => k * pid.threshold / (k - 1.0),
    };
    Ok(pid.tail_count * mean / theoretical)
}

/// Incomes of every cohort alive in a span of years, computed once per
/// cohort.
#[derive(Debug, Clone)]
pub struct Simulation {
    ctx: ModelContext,
    ages: AgeStructure,
    grid: Vec<(f64, f64)>,
    from: i32,
    to: i32,
    /// birth year -> (first stored year, incomes per stored year)
    cohorts: BTreeMap<i32, (i32, Vec<Vec<f64>>)>,
}

impl Simulation {
    pub fn new(
        economy: &EconomySeries,
        ages: &AgeStructure,
        params: &ModelParams,
        from: i32,
        to: i32,
    ) -> Result<Self, ModelError> {
        params.validate()?;
        if from > to {
            return Err(ModelError::InvalidParameter(format!(
                "empty year range {from}..={to}"
            )));
        }
        for year in from..=to {
            economy
                .year(year)
                .map_err(|_| ModelError::EconomyTooShort { year })?;
        }
        let work_start = params.work_start_age.round() as i32;
        // birth year -> last year needed
        let mut needed: BTreeMap<i32, (i32, i32)> = BTreeMap::new();
        for year in from..=to {
            let row = ages.year(year)?;
            for (age, _) in row.iter().filter(|&(a, _)| a as i32 >= work_start) {
                let e = needed.entry(year - age as i32).or_insert((year, year));
                e.0 = e.0.min(year);
                e.1 = e.1.max(year);
            }
        }
        let earliest = needed
            .keys()
            .next()
            .map_or(from, |b| b + work_start)
            .min(from);
        let ctx = ModelContext::new(economy, params, earliest)?;
        let grid = capability_grid().entries().to_vec();
        let cohorts = needed
            .par_iter()
            .map(|(&birth, &(first, last))| {
                let mut state = CohortState::new(&ctx, grid.clone(), birth);
                let mut rows = Vec::with_capacity((last - first + 1) as usize);
                while state.year <= last {
                    if state.year >= first {
                        rows.push(state.incomes(&ctx)?);
                    }
                    if state.year == last {
                        break;
                    }
                    state.step(&ctx, None)?;
                }
                Ok((birth, (first, rows)))
            })
            .collect::<Result<BTreeMap<_, _>, ModelError>>()?;
        Ok(Self {
            ctx,
            ages: ages.clone(),
            grid,
            from,
            to,
            cohorts,
        })
    }

    pub fn context(&self) -> &ModelContext {
        &self.ctx
    }

    pub fn years(&self) -> std::ops::RangeInclusive<i32> {
        self.from..=self.to
    }

    pub fn pid(&self, year: i32) -> Result<ModelPid, ModelError> {
        if year < self.from || year > self.to {
            return Err(ModelError::YearOutOfRange {
                year,
                first: self.from,
                last: self.to,
            });
        }
        let row = self.ages.year(year)?;
        let n = self.grid.len() as f64;
        let mut incomes = Vec::new();
        let mut weights = Vec::new();
        for (age, count) in row
            .iter()
            .filter(|&(a, _)| a as i32 >= self.ctx.work_start())
        {
            let (first, rows) = &self.cohorts[&(year - age as i32)];
            incomes.extend_from_slice(&rows[(year - first) as usize]);
            weights.extend(std::iter::repeat_n(count / n, self.grid.len()));
        }
        let threshold = self.ctx.threshold(year)?;
        let tail_count = incomes
            .iter()
            .zip(&weights)
            .filter(|(v, _)| **v >= threshold)
            .map(|(_, w)| w)
            .sum();
        Ok(ModelPid {
            year,
            incomes,
            weights,
            threshold,
            tail_count,
            tail_income_factor: self.ctx.params().boost,
            dollars_per_unit: self.ctx.dollars_per_unit(),
        })
    }

    /// Exact Gini of the boosted Pareto-zone distribution.
    pub fn predicted_gini(&self, year: i32, k: f64) -> Result<GiniEstimate, ModelError> {
        let pid = self.pid(year)?;
        let zone = apply_pareto_zone(&pid, k, self.ctx.params().boost, Convention::ConsistentMode)?;
        let value = zone
            .gini()
            .map_err(|e| ModelError::InvalidParameter(e.to_string()))?;
        Ok(GiniEstimate {
            value,
            method: GiniMethod::ExactModel,
            population_base: PopulationBase::All15Plus,
            year,
        })
    }

    /// Predicted Gini for every year, in year order.
    pub fn gini_series(&self, k: f64) -> Result<Vec<GiniEstimate>, ModelError> {
        let years: Vec<i32> = self.years().collect();
        years
            .par_iter()
            .map(|&y| self.predicted_gini(y, k))
            .collect()
    }
}

pub fn synthesize_pid(
    year: i32,
    economy: &EconomySeries,
    ages: &AgeStructure,
    params: &ModelParams,
) -> Result<ModelPid, ModelError> {
    Simulation::new(economy, ages, params, year, year)?.pid(year)
}

pub fn predicted_gini(
    year: i32,
    economy: &EconomySeries,
    ages: &AgeStructure,
    params: &ModelParams,
) -> Result<GiniEstimate, ModelError> {
    Simulation::new(economy, ages, params, year, year)?.predicted_gini(year, params.k_pareto)
}

/// `(k, G)` rows with everything but the Pareto index fixed.
pub fn gini_sensitivity(
    year: i32,
    k_values: &[f64],
    economy: &EconomySeries,
    ages: &AgeStructure,
    params: &ModelParams,
) -> Result<Vec<(f64, f64)>, ModelError> {
    let sim = Simulation::new(economy, ages, params, year, year)?;
    k_values
        .iter()
        .map(|&k| Ok((k, sim.predicted_gini(year, k)?.value)))
        .collect()
}
