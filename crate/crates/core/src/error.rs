use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while loading or validating input tables.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}: row {row}: cannot parse `{column}` from {value:?}")]
    Parse {
        path: PathBuf,
        row: usize,
        column: String,
        value: String,
    },
    #[error("{path}: row {row}: years are not contiguous, expected {expected}")]
    NonContiguousYears {
        path: PathBuf,
        row: usize,
        expected: i32,
    },
    #[error("{path}: row {row}: `{column}` must be strictly positive")]
    NonPositiveValue {
        path: PathBuf,
        row: usize,
        column: String,
    },
    #[error("{path}: row {row}: {message}")]
    Invalid {
        path: PathBuf,
        row: usize,
        message: String,
    },
    #[error("{path}: row {row}: bin overlaps or precedes the previous bin")]
    OverlappingBins { path: PathBuf, row: usize },
    #[error("{path}: year {year}: ages are not contiguous at age {age}")]
    NonContiguousAges { path: PathBuf, year: i32, age: u32 },
    #[error("{path}: file contains no data rows")]
    Empty { path: PathBuf },
}

/// Errors from the income model, synthesis and estimators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("year {year} outside series range {first}..={last}")]
    YearOutOfRange { year: i32, first: i32, last: i32 },
    #[error("decay window is empty: work years to age A ({window}) must exceed T_cr ({t_cr:.3})")]
    DegenerateWindow { window: f64, t_cr: f64 },
    #[error("economy series too short: year {year} is not covered")]
    EconomyTooShort { year: i32 },
    #[error("no age counts for year {year}")]
    MissingAgeCounts { year: i32 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no income above the Pareto threshold")]
    EmptyTail,
}

/// Errors from the empirical estimators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("open-ended bin starting at {lower} has no reported mean and no tail model")]
    OpenBinUnresolved { lower: f64 },
    #[error("Pareto index k = {k} gives an infinite mean; k must exceed 1")]
    NonFiniteMean { k: f64 },
    #[error("mean {mean} does not exceed the tail minimum {x_m}")]
    DegenerateMean { x_m: f64, mean: f64 },
    #[error("regression needs at least 3 tail bins, found {found}")]
    InsufficientTailBins { found: usize },
    #[error("fit needs at least 3 bins, found {found}")]
    InsufficientBins { found: usize },
    #[error("total population {total} is below the table count {counted}")]
    PopulationUnderflow { total: f64, counted: f64 },
    #[error("density tables have no overlapping income range")]
    DisjointSupport,
    #[error("series share no years")]
    NoOverlap,
    #[error("{0}")]
    InvalidInput(String),
}
