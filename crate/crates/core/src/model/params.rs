use crate::error::ModelError;

/// Divisor applied to the post-critical decay index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecayScaling {
    /// Every group decays at `alpha_l`.
    #[default]
    Uniform,
    /// `alpha_l / l_rel`.
    Means,
    /// `alpha_l / (lambda_min * l_rel)`.
    MeansAndLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    /// Advances the saturation fraction of the current year's attainable
    /// income, so income tracks `sigma_min * lambda_min` year by year.
    #[default]
    ScaledSaturation,
    /// Advances income itself with sigma and lambda frozen within each year.
    FrozenOde,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TcrAnchor {
    pub year: i32,
    pub age: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Dissipation factor calibrated at `alpha_year`.
    pub alpha: f64,
    pub alpha_year: i32,
    /// Year where sigma_min = lambda_min = 1.
    pub start_year: i32,
    pub c_decay: f64,
    pub a_decay: f64,
    pub work_start_age: f64,
    pub tcr_anchor: TcrAnchor,
    pub pareto_threshold_0: f64,
    pub k_pareto: f64,
    pub boost: f64,
    pub unit_dollars: f64,
    /// Year whose `sigma_min * lambda_min` equals one `unit_dollars`.
    pub unit_year: i32,
    pub decay_scaling: DecayScaling,
    pub integrator: Integrator,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            alpha: 0.086,
            alpha_year: 1960,
            start_year: 1960,
            c_decay: 0.72,
            a_decay: 64.0,
            work_start_age: 15.0,
            tcr_anchor: TcrAnchor {
                year: 2005,
                age: 55.0,
            },
            pareto_threshold_0: 0.43,
            k_pareto: 1.35,
            boost: 1.33,
            unit_dollars: 120_000.0,
            unit_year: 2000,
            decay_scaling: DecayScaling::Uniform,
            integrator: Integrator::ScaledSaturation,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::InvalidParameter(m.to_string()));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive");
        }
        if !(self.c_decay > 0.0 && self.c_decay < 1.0) {
            return bad("C must lie in (0, 1)");
        }
        if !(self.a_decay > self.tcr_anchor.age) {
            return bad("A must exceed the critical age anchor");
        }
        if !(self.tcr_anchor.age > self.work_start_age) {
            return bad("critical age anchor must exceed the work start age");
        }
        if !(self.k_pareto > 1.0 && self.k_pareto.is_finite()) {
            return bad("k must exceed 1");
        }
        if !(self.boost >= 1.0 && self.boost.is_finite()) {
            return bad("boost must be at least 1");
        }
        if !(self.pareto_threshold_0 > 0.0 && self.pareto_threshold_0.is_finite()) {
            return bad("Pareto threshold must be positive");
        }
        if !(self.unit_dollars > 0.0 && self.unit_dollars.is_finite()) {
            return bad("unit dollars must be positive");
        }
        Ok(())
    }

    /// Experience at the critical age anchor.
    pub fn anchor_experience(&self) -> f64 {
        self.tcr_anchor.age - self.work_start_age
    }
}

/// The 29 x 29 grid of relative capability and means, `2/30..=30/30`.
#[derive(Debug, Clone, PartialEq)]
pub struct CapabilityGrid {
    entries: Vec<(f64, f64)>,
}

pub const GRID_SIDE: usize = 29;
pub const GRID_SIZE: usize = GRID_SIDE * GRID_SIDE;

impl CapabilityGrid {
    /// `(s_rel, l_rel)` pairs, s-major.
    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn probability(&self) -> f64 {
        1.0 / self.entries.len() as f64
    }
}

pub fn capability_grid() -> CapabilityGrid {
    let levels = (2..=30).map(|i| i as f64 / 30.0);
    let entries = levels
        .clone()
        .flat_map(|s| levels.clone().map(move |l| (s, l)))
        .collect();
    CapabilityGrid { entries }
}
