//! Cohort income model driven by real GDP growth, and Gini estimation from
//! binned income tables.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ages;
pub mod economy;
pub mod error;
pub mod metrics;
pub mod model;
pub mod pid;
pub mod synth;
mod table;

pub use ages::{load_age_structure, AgeRow, AgeStructure};
pub use economy::{load_economy, EconomySeries, EconomyYear, GrowthLaw};
pub use error::{DataError, MetricsError, ModelError};
pub use pid::{load_pid_tables, Bin, BinnedPid, IncomeUnits, PopulationBase};
