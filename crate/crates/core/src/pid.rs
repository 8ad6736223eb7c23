//! Binned personal income distribution tables.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::error::DataError;
use crate::table::{parse_field, parse_optional, required_columns, Table};

pub const PID_HEADER: [&str; 6] = [
    "year",
    "population_base",
    "bin_lower",
    "bin_upper",
    "count",
    "mean_income",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PopulationBase {
    WithIncome,
    All15Plus,
}

impl PopulationBase {
    pub fn as_str(self) -> &'static str {
        match self {
            PopulationBase::WithIncome => "with_income",
            PopulationBase::All15Plus => "all_15plus",
        }
    }
}

impl fmt::Display for PopulationBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PopulationBase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "with_income" => Ok(PopulationBase::WithIncome),
            "all_15plus" => Ok(PopulationBase::All15Plus),
            other => Err(format!("unknown population base `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncomeUnits {
    CurrentDollars,
    ModelUnits,
}

/// Income bin `[lower, upper)`; `upper == None` is the open-ended top bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bin {
    pub lower: f64,
    pub upper: Option<f64>,
    pub count: f64,
    pub mean: Option<f64>,
}

impl Bin {
    pub fn closed(lower: f64, upper: f64, count: f64) -> Self {
        Self {
            lower,
            upper: Some(upper),
            count,
            mean: None,
        }
    }

    pub fn open(lower: f64, count: f64) -> Self {
        Self {
            lower,
            upper: None,
            count,
            mean: None,
        }
    }

    pub fn with_mean(mut self, mean: f64) -> Self {
        self.mean = Some(mean);
        self
    }

    pub fn is_open(&self) -> bool {
        self.upper.is_none()
    }

    pub fn width(&self) -> Option<f64> {
        self.upper.map(|u| u - self.lower)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinnedPid {
    pub year: i32,
    pub population_base: PopulationBase,
    pub income_units: IncomeUnits,
    bins: Vec<Bin>,
}

/// Index of the first offending bin.
#[derive(Debug, Clone, PartialEq)]
pub enum BinError {
    Overlap(usize),
    Invalid(usize, String),
}

impl fmt::Display for BinError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BinError::Overlap(i) => write!(f, "bin {i} overlaps or precedes the previous bin"),
            BinError::Invalid(i, m) => write!(f, "bin {i}: {m}"),
        }
    }
}

fn check_bins(bins: &[Bin]) -> Result<(), BinError> {
    if bins.is_empty() {
        return Err(BinError::Invalid(0, "table has no bins".into()));
    }
    for (i, b) in bins.iter().enumerate() {
        if !(b.lower.is_finite() && b.lower >= 0.0) {
            return Err(BinError::Invalid(
                i,
                "lower edge must be finite and non-negative".into(),
            ));
        }
        if !(b.count.is_finite() && b.count >= 0.0) {
            return Err(BinError::Invalid(
                i,
                "count must be finite and non-negative".into(),
            ));
        }
        match b.upper {
            Some(u) if !u.is_finite() => {
                return Err(BinError::Invalid(i, "upper edge must be finite".into()))
            }
            // the zero-income bin is the only zero-width bin allowed
            Some(u) if u < b.lower || (u == b.lower && u != 0.0) => {
                return Err(BinError::Invalid(
                    i,
                    "upper edge must exceed lower edge".into(),
                ))
            }
            None if i + 1 != bins.len() => {
                return Err(BinError::Invalid(i, "only the last bin may be open".into()))
            }
            _ => {}
        }
        if let Some(m) = b.mean {
            let above = b.upper.is_some_and(|u| m > u);
            if !m.is_finite() || m < b.lower || above {
                return Err(BinError::Invalid(
                    i,
                    format!("mean income {m} lies outside its bin"),
                ));
            }
        }
        if i > 0 {
            let prev = &bins[i - 1];
            match prev.upper {
                Some(u) if b.lower >= u && b.lower >= prev.lower => {}
                _ => return Err(BinError::Overlap(i)),
            }
        }
    }
    Ok(())
}

impl BinnedPid {
    pub fn new(
        year: i32,
        population_base: PopulationBase,
        income_units: IncomeUnits,
        bins: Vec<Bin>,
    ) -> Result<Self, BinError> {
        check_bins(&bins)?;
        Ok(Self {
            year,
            population_base,
            income_units,
            bins,
        })
    }

    pub fn bins(&self) -> &[Bin] {
        &self.bins
    }

    pub fn total_count(&self) -> f64 {
        self.bins.iter().map(|b| b.count).sum()
    }

    pub fn open_bin(&self) -> Option<&Bin> {
        self.bins.last().filter(|b| b.is_open())
    }

    pub fn closed_bins(&self) -> &[Bin] {
        match self.open_bin() {
            Some(_) => &self.bins[..self.bins.len() - 1],
            None => &self.bins,
        }
    }
}

/// Groups rows into tables by `(year, population_base)` in first-seen order.
pub fn load_pid_tables(path: impl AsRef<Path>) -> Result<Vec<BinnedPid>, DataError> {
    let path = path.as_ref();
    let table = Table::read(path)?;
    let idx = required_columns(&table, &PID_HEADER)?;
    type Group = ((i32, PopulationBase), Vec<(Bin, usize)>);
    let mut groups: Vec<Group> = Vec::new();
    for (i, rec) in table.records.iter().enumerate() {
        let row = i + 1;
        let year: i32 = parse_field(path, row, "year", rec.get(idx[0]))?;
        let base: PopulationBase = parse_field(path, row, "population_base", rec.get(idx[1]))?;
        let bin = Bin {
            lower: parse_field(path, row, "bin_lower", rec.get(idx[2]))?,
            upper: parse_optional(path, row, "bin_upper", rec.get(idx[3]))?,
            count: parse_field(path, row, "count", rec.get(idx[4]))?,
            mean: parse_optional(path, row, "mean_income", rec.get(idx[5]))?,
        };
        let key = (year, base);
        match groups.iter_mut().find(|g| g.0 == key) {
            Some(g) => g.1.push((bin, row)),
            None => groups.push((key, vec![(bin, row)])),
        }
    }
    groups
        .into_iter()
        .map(|((year, base), rows)| {
            let bins: Vec<Bin> = rows.iter().map(|r| r.0).collect();
            BinnedPid::new(year, base, IncomeUnits::CurrentDollars, bins).map_err(|e| match e {
                BinError::Overlap(i) => DataError::OverlappingBins {
                    path: path.to_path_buf(),
                    row: rows[i].1,
                },
                BinError::Invalid(i, message) => DataError::Invalid {
                    path: path.to_path_buf(),
                    row: rows.get(i).map_or(0, |r| r.1),
                    message,
                },
            })
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_pid_tables<W: Write>(tables: &[BinnedPid], out: W) -> Result<(), csv::Error> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(PID_HEADER)?;
    for t in tables {
        for b in &t.bins {
            wtr.write_record([
                t.year.to_string(),
                t.population_base.to_string(),
                b.lower.to_string(),
                opt(b.upper),
                b.count.to_string(),
                opt(b.mean),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}
