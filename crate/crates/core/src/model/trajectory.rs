use crate::economy::{EconomySeries, GdpPath};
use crate::error::ModelError;

use super::{decay_index, DecayScaling, Integrator, ModelParams};

/// Per-year model coefficients over a real GDP path that reaches back far
/// enough for the oldest cohort's work start.
#[derive(Debug, Clone)]
pub struct ModelContext {
    params: ModelParams,
    gdp: GdpPath,
    gdp_t0: f64,
    gdp_anchor: f64,
    gdp_unit: f64,
    alpha: f64,
    work_start: i32,
}

impl ModelContext {
    /// `earliest_year` is the first calendar year any trajectory will need.
    pub fn new(
        economy: &EconomySeries,
        params: &ModelParams,
        earliest_year: i32,
    ) -> Result<Self, ModelError> {
        params.validate()?;
        let gdp = economy.real_gdp_path(earliest_year);
        let at = |year: i32| gdp.get(year).ok_or(ModelError::EconomyTooShort { year });
        let gdp_t0 = at(params.start_year)?;
        let gdp_anchor = at(params.tcr_anchor.year)?;
        // keep alpha / lambda_min fixed at the calibration year
        let alpha = params.alpha * (at(params.alpha_year)? / gdp_t0).sqrt();
        let gdp_unit = at(params.unit_year)?;
        let work_start = params.work_start_age.round() as i32;
        Ok(Self {
            params: params.clone(),
            gdp,
            gdp_t0,
            gdp_anchor,
            gdp_unit,
            alpha,
            work_start,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn first_year(&self) -> i32 {
        self.gdp.first_year()
    }

    pub fn last_year(&self) -> i32 {
        self.gdp.last_year()
    }

    pub fn work_start(&self) -> i32 {
        self.work_start
    }

    /// Dissipation factor at the start year.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn gdp(&self, year: i32) -> Result<f64, ModelError> {
        self.gdp
            .get(year)
            .ok_or(ModelError::EconomyTooShort { year })
    }

    /// `sigma_min * lambda_min`, real GDP per person relative to the start year.
    pub fn income_scale(&self, year: i32) -> Result<f64, ModelError> {
        Ok(self.gdp(year)? / self.gdp_t0)
    }

    pub fn lambda_min(&self, year: i32) -> Result<f64, ModelError> {
        Ok(self.income_scale(year)?.sqrt())
    }

    pub fn t_cr(&self, year: i32) -> Result<f64, ModelError> {
        Ok(self.params.anchor_experience() * (self.gdp(year)? / self.gdp_anchor).sqrt())
    }

    pub fn alpha_l(&self, year: i32) -> Result<f64, ModelError> {
        let p = &self.params;
        decay_index(p.c_decay, p.a_decay, self.t_cr(year)?, p.work_start_age)
    }

    /// Pareto threshold in model units.
    pub fn threshold(&self, year: i32) -> Result<f64, ModelError> {
        Ok(self.params.pareto_threshold_0 * self.income_scale(year)?)
    }

    pub fn dollars_per_unit(&self) -> f64 {
        self.params.unit_dollars * self.gdp_t0 / self.gdp_unit
    }

    fn decay_divisor(&self, lambda_min: f64, l_rel: f64) -> f64 {
        match self.params.decay_scaling {
            DecayScaling::Uniform => 1.0,
            DecayScaling::Means => l_rel,
            DecayScaling::MeansAndLevel => lambda_min * l_rel,
        }
    }
}

/// Integration state for a set of groups from one cohort.
#[derive(Debug, Clone)]
pub(crate) struct CohortState {
    groups: Vec<(f64, f64)>,
    /// Saturation fraction or raw income, depending on the integrator.
    state: Vec<f64>,
    retired: Vec<bool>,
    pub(crate) year: i32,
    start: i32,
}

/// Values straddling the critical-experience crossing within one year.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossover {
    pub year: i32,
    /// Fraction of the year spent growing.
    pub growth_time: f64,
    /// Income at the crossing reached by the growth step.
    pub growth_side: f64,
    /// Income at the crossing recovered from the year-end decayed value.
    pub decay_side: f64,
}

impl CohortState {
    pub(crate) fn new(ctx: &ModelContext, groups: Vec<(f64, f64)>, birth_year: i32) -> Self {
        let start = birth_year + ctx.work_start;
        let n = groups.len();
        Self {
            groups,
            state: vec![0.0; n],
            retired: vec![false; n],
            year: start,
            start,
        }
    }

    pub(crate) fn incomes(&self, ctx: &ModelContext) -> Result<Vec<f64>, ModelError> {
        let scale = ctx.income_scale(self.year)?;
        Ok(self
            .groups
            .iter()
            .zip(&self.state)
            .map(|(&(s, l), &x)| match ctx.params.integrator {
                Integrator::ScaledSaturation => scale * s * l * x,
                Integrator::FrozenOde => x,
            })
            .collect())
    }

    /// Advances one calendar year. Returns the crossover of the group that
    /// reaches critical experience in this year, if `probe` names one.
    pub(crate) fn step(
        &mut self,
        ctx: &ModelContext,
        probe: Option<usize>,
    ) -> Result<Option<Crossover>, ModelError> {
        let y = self.year;
        let tau = (y - self.start) as f64;
        let scale = ctx.income_scale(y)?;
        let next_scale = ctx.income_scale(y + 1)?;
        let lambda = scale.sqrt();
        let t_cr = ctx.t_cr(y)?;
        let alpha_l = ctx.alpha_l(y)?;
        let mut cross = None;
        for (i, &(s, l)) in self.groups.iter().enumerate() {
            let dt_grow = if self.retired[i] {
                0.0
            } else {
                (t_cr - tau).clamp(0.0, 1.0)
            };
            let rate = ctx.alpha / (lambda * l);
            let decay = alpha_l / ctx.decay_divisor(lambda, l) * (1.0 - dt_grow);
            let x = &mut self.state[i];
            let mid = match ctx.params.integrator {
                Integrator::ScaledSaturation => 1.0 + (*x - 1.0) * (-rate * dt_grow).exp(),
                Integrator::FrozenOde => {
                    let target = scale * s * l;
                    target + (*x - target) * (-rate * dt_grow).exp()
                }
            };
            *x = mid * (-decay).exp();
            if probe == Some(i) && !self.retired[i] && tau + 1.0 >= t_cr {
                let to_income = |v: f64| match ctx.params.integrator {
                    Integrator::ScaledSaturation => scale * s * l * v,
                    Integrator::FrozenOde => v,
                };
                let year_end = match ctx.params.integrator {
                    Integrator::ScaledSaturation => next_scale * s * l * *x,
                    Integrator::FrozenOde => *x,
                };
                let back = match ctx.params.integrator {
                    Integrator::ScaledSaturation => year_end / next_scale * scale,
                    Integrator::FrozenOde => year_end,
                };
                cross = Some(Crossover {
                    year: y,
                    growth_time: dt_grow,
                    growth_side: to_income(mid),
                    decay_side: back * decay.exp(),
                });
            }
            if tau + 1.0 >= t_cr {
                self.retired[i] = true;
            }
        }
        self.year += 1;
        Ok(cross)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncomeTrajectory {
    pub s_rel: f64,
    pub l_rel: f64,
    pub birth_year: i32,
    first_year: i32,
    incomes: Vec<f64>,
}

impl IncomeTrajectory {
    /// First year is the work-start year, where income is zero.
    pub fn first_year(&self) -> i32 {
        self.first_year
    }

    pub fn last_year(&self) -> i32 {
        self.first_year + self.incomes.len() as i32 - 1
    }

    pub fn income(&self, year: i32) -> Option<f64> {
        let i = usize::try_from(year - self.first_year).ok()?;
        self.incomes.get(i).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.incomes
            .iter()
            .enumerate()
            .map(|(i, &v)| (self.first_year + i as i32, v))
    }
}

/// Income of one group from its work-start year to the end of the economy.
pub fn trajectory(
    s_rel: f64,
    l_rel: f64,
    birth_year: i32,
    economy: &EconomySeries,
    params: &ModelParams,
) -> Result<IncomeTrajectory, ModelError> {
    let start = birth_year + params.work_start_age.round() as i32;
    let ctx = ModelContext::new(economy, params, start)?;
    trajectory_in(&ctx, s_rel, l_rel, birth_year)
}

pub(crate) fn trajectory_in(
    ctx: &ModelContext,
    s_rel: f64,
    l_rel: f64,
    birth_year: i32,
) -> Result<IncomeTrajectory, ModelError> {
    let mut state = CohortState::new(ctx, vec![(s_rel, l_rel)], birth_year);
    if state.year > ctx.last_year() {
        return Err(ModelError::EconomyTooShort { year: state.year });
    }
    let mut incomes = vec![state.incomes(ctx)?[0]];
    while state.year < ctx.last_year() {
        state.step(ctx, None)?;
        incomes.push(state.incomes(ctx)?[0]);
    }
    Ok(IncomeTrajectory {
        s_rel,
        l_rel,
        birth_year,
        first_year: state.start,
        incomes,
    })
}

/// Crossover values for one group, or `None` if it never reaches critical
/// experience within the economy.
pub fn crossover(
    ctx: &ModelContext,
    s_rel: f64,
    l_rel: f64,
    birth_year: i32,
) -> Result<Option<Crossover>, ModelError> {
    let mut state = CohortState::new(ctx, vec![(s_rel, l_rel)], birth_year);
    while state.year < ctx.last_year() {
        if let Some(c) = state.step(ctx, Some(0))? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Income of the top group (s = l = 1) at age A over its income at the
/// critical experience, each taken relative to its own year's
/// `sigma_min * lambda_min`.
pub fn top_group_relative_income(ctx: &ModelContext, birth_year: i32) -> Result<f64, ModelError> {
    let p = ctx.params();
    let mut state = CohortState::new(ctx, vec![(1.0, 1.0)], birth_year);
    let age_a = birth_year + p.a_decay.round() as i32;
    let mut peak = None;
    while state.year < age_a {
        if let Some(c) = state.step(ctx, Some(0))? {
            peak = Some(c.growth_side / ctx.income_scale(c.year)?);
        }
    }
    let peak = peak.ok_or(ModelError::InvalidParameter(
        "critical experience not reached before age A".into(),
    ))?;
    Ok(state.incomes(ctx)?[0] / ctx.income_scale(age_a)? / peak)
}
