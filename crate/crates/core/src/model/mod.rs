//! Cohort income model: growth toward a GDP-scaled saturation level while
//! experience is below the critical value, exponential decay afterwards.

mod params;
mod trajectory;

pub use params::{
    capability_grid, CapabilityGrid, DecayScaling, Integrator, ModelParams, TcrAnchor, GRID_SIDE,
    GRID_SIZE,
};
pub(crate) use trajectory::CohortState;
pub use trajectory::{
    crossover, top_group_relative_income, trajectory, Crossover, IncomeTrajectory, ModelContext,
};

use crate::economy::{EconomySeries, GrowthLaw};
use crate::error::ModelError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledParams {
    pub sigma_min: f64,
    pub lambda_min: f64,
    /// Critical work experience in years.
    pub t_cr: f64,
    /// Pareto threshold in model units.
    pub m_p: f64,
}

pub fn scaled_params(
    params: &ModelParams,
    economy: &EconomySeries,
    year: i32,
) -> Result<ScaledParams, ModelError> {
    let lambda_min = economy.growth_factor(params.start_year, year, GrowthLaw::SquareRoot)?;
    let t_cr = params.anchor_experience()
        * economy.growth_factor(params.tcr_anchor.year, year, GrowthLaw::SquareRoot)?;
    let m_p = params.pareto_threshold_0
        * economy.growth_factor(params.start_year, year, GrowthLaw::Linear)?;
    Ok(ScaledParams {
        sigma_min: lambda_min,
        lambda_min,
        t_cr,
        m_p,
    })
}

/// Post-critical decay index: income falls to `c` of its critical-point level
/// at age `a`.
pub fn decay_index(c: f64, a: f64, t_cr: f64, work_start_age: f64) -> Result<f64, ModelError> {
    let window = (a - work_start_age) - t_cr;
    if !(window > 0.0) {
        return Err(ModelError::DegenerateWindow {
            window: a - work_start_age,
            t_cr,
        });
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(ModelError::InvalidParameter("C must lie in (0, 1)".into()));
    }
    Ok(-c.ln() / window)
}

/// Income after `tau` years of experience with all parameters frozen.
pub fn closed_form_income(
    s_rel: f64,
    l_rel: f64,
    tau: f64,
    alpha: f64,
    lambda_min: f64,
    sigma_min: f64,
) -> f64 {
    sigma_min * lambda_min * s_rel * l_rel * (1.0 - (-(alpha * tau / l_rel) / lambda_min).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economy::EconomyYear;

    fn economy(values: &[(i32, f64)]) -> EconomySeries {
        EconomySeries::from_rows(
            values
                .iter()
                .map(|&(year, g)| EconomyYear {
                    year,
                    real_gdp_pc: g,
                    nominal_gdp_pc: g,
                    nominal_gpi_pc_with_income: g,
                    pop_15plus: 1.0,
                    pop_with_income: 1.0,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn decay_index_default_constants() {
        let a = decay_index(0.72, 64.0, 40.0, 15.0).unwrap();
        assert!((a - 0.72f64.ln().abs() / 9.0).abs() < 1e-15);
        assert!((a - 0.03651).abs() < 1e-5);
    }

    #[test]
    fn decay_index_window_scaling() {
        let a = decay_index(0.72, 64.0, 40.0, 15.0).unwrap();
        let b = decay_index(0.72, 73.0, 40.0, 15.0).unwrap();
        assert_eq!(a, 2.0 * b);
        assert!(decay_index(0.999_999, 64.0, 40.0, 15.0).unwrap() < 1e-6);
    }

    #[test]
    fn decay_index_degenerate() {
        assert!(matches!(
            decay_index(0.72, 55.0, 40.0, 15.0),
            Err(ModelError::DegenerateWindow { .. })
        ));
    }

    #[test]
    fn closed_form_limits() {
        assert_eq!(closed_form_income(0.5, 0.5, 0.0, 0.086, 1.2, 1.2), 0.0);
        let sat = closed_form_income(0.5, 0.4, 1e6, 0.086, 1.2, 1.2);
        assert!((sat - 1.44 * 0.2).abs() < 1e-12);
    }

    #[test]
    fn scaled_params_at_start_year() {
        let years: Vec<_> = (1960..=2005)
            .map(|y| (y, 1.0 + (y - 1960) as f64 * 0.03))
            .collect();
        let e = economy(&years);
        let p = ModelParams::default();
        let s = scaled_params(&p, &e, 1960).unwrap();
        assert_eq!((s.sigma_min, s.lambda_min, s.m_p), (1.0, 1.0, 0.43));
        let s = scaled_params(&p, &e, 2005).unwrap();
        assert_eq!(s.t_cr, 40.0);
    }

    #[test]
    fn lambda_min_for_2_22_growth() {
        let mut years: Vec<_> = (1960..=2005).map(|y| (y, 1.0)).collect();
        for v in years.iter_mut().skip(42) {
            v.1 = 2.22;
        }
        let e = economy(&years);
        let p = ModelParams::default();
        let s = scaled_params(&p, &e, 2002).unwrap();
        assert!((s.lambda_min - 1.49).abs() < 0.005);
    }
}
