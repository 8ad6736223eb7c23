//! Year-indexed macro series that drive the model: real GDP per person,
//! nominal GDP and gross personal income, and population counts.

use std::io::Write;
use std::path::Path;

use crate::error::{DataError, ModelError};
use crate::table::{parse_field, required_columns, Table};

/// How a parameter follows real GDP per person.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthLaw {
    Linear,
    SquareRoot,
}

/// One calendar year of the economy table.
///
/// Per-person GDP fields are per person aged 15 and over; the GPI field is
/// per person with income, as its name says.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EconomyYear {
    pub year: i32,
    pub real_gdp_pc: f64,
    pub nominal_gdp_pc: f64,
    pub nominal_gpi_pc_with_income: f64,
    pub pop_15plus: f64,
    pub pop_with_income: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageRatio {
    pub year: i32,
    pub gpi_over_gdp: f64,
    pub with_income_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EconomySeries {
    rows: Vec<EconomyYear>,
}

pub const ECONOMY_HEADER: [&str; 6] = [
    "year",
    "real_gdp_pc",
    "nominal_gdp_pc",
    "nominal_gpi_pc_with_income",
    "pop_15plus",
    "pop_with_income",
];

impl EconomySeries {
    /// Validates contiguity, positivity and `pop_with_income <= pop_15plus`.
    pub fn from_rows(rows: Vec<EconomyYear>) -> Result<Self, DataError> {
        Self::validated(rows, Path::new("<rows>"), 1)
    }

    fn validated(rows: Vec<EconomyYear>, path: &Path, first_row: usize) -> Result<Self, DataError> {
        if rows.is_empty() {
            return Err(DataError::Empty {
                path: path.to_path_buf(),
            });
        }
        for (i, r) in rows.iter().enumerate() {
            let row = first_row + i;
            if i > 0 && r.year != rows[i - 1].year + 1 {
                return Err(DataError::NonContiguousYears {
                    path: path.to_path_buf(),
                    row,
                    expected: rows[i - 1].year + 1,
                });
            }
            let fields = [
                ("real_gdp_pc", r.real_gdp_pc),
                ("nominal_gdp_pc", r.nominal_gdp_pc),
                ("nominal_gpi_pc_with_income", r.nominal_gpi_pc_with_income),
                ("pop_15plus", r.pop_15plus),
                ("pop_with_income", r.pop_with_income),
            ];
            for (column, value) in fields {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(DataError::NonPositiveValue {
                        path: path.to_path_buf(),
                        row,
                        column: column.to_string(),
                    });
                }
            }
            if r.pop_with_income > r.pop_15plus {
                return Err(DataError::Invalid {
                    path: path.to_path_buf(),
                    row,
                    message: "pop_with_income exceeds pop_15plus".into(),
                });
            }
        }
        Ok(Self { rows })
    }

    pub fn first_year(&self) -> i32 {
        self.rows[0].year
    }

    pub fn last_year(&self) -> i32 {
        self.rows[self.rows.len() - 1].year
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[EconomyYear] {
        &self.rows
    }

    pub fn get(&self, year: i32) -> Option<&EconomyYear> {
        let idx = year.checked_sub(self.first_year())?;
        usize::try_from(idx).ok().and_then(|i| self.rows.get(i))
    }

    pub fn year(&self, year: i32) -> Result<&EconomyYear, ModelError> {
        self.get(year).ok_or(ModelError::YearOutOfRange {
            year,
            first: self.first_year(),
            last: self.last_year(),
        })
    }

    /// Ratio of real GDP per person between `t0` and `t` under `law`.
    pub fn growth_factor(&self, t0: i32, t: i32, law: GrowthLaw) -> Result<f64, ModelError> {
        let ratio = self.year(t)?.real_gdp_pc / self.year(t0)?.real_gdp_pc;
        Ok(law.apply(ratio))
    }

    /// Aggregate GPI over aggregate GDP, and the share of the 15+
    /// population reporting income.
    pub fn coverage_ratios(&self) -> Vec<CoverageRatio> {
        self.rows
            .iter()
            .map(|r| CoverageRatio {
                year: r.year,
                gpi_over_gdp: (r.nominal_gpi_pc_with_income * r.pop_with_income)
                    / (r.nominal_gdp_pc * r.pop_15plus),
                with_income_fraction: r.pop_with_income / r.pop_15plus,
            })
            .collect()
    }

    /// Real GDP per person reaching back to `from_year`. Years before the
    /// series start are filled at the earliest observed year-over-year rate.
    pub fn real_gdp_path(&self, from_year: i32) -> GdpPath {
        let first = self.first_year();
        let rate = if self.rows.len() > 1 {
            self.rows[1].real_gdp_pc / self.rows[0].real_gdp_pc
        } else {
            1.0
        };
        let start = from_year.min(first);
        let mut values = Vec::with_capacity((self.last_year() - start + 1) as usize);
        for year in start..first {
            values.push(self.rows[0].real_gdp_pc * rate.powi(year - first));
        }
        values.extend(self.rows.iter().map(|r| r.real_gdp_pc));
        GdpPath {
            first_year: start,
            values,
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(ECONOMY_HEADER)?;
        for r in &self.rows {
            wtr.write_record([
                r.year.to_string(),
                r.real_gdp_pc.to_string(),
                r.nominal_gdp_pc.to_string(),
                r.nominal_gpi_pc_with_income.to_string(),
                r.pop_15plus.to_string(),
                r.pop_with_income.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

impl GrowthLaw {
    pub fn apply(self, ratio: f64) -> f64 {
        match self {
            GrowthLaw::Linear => ratio,
            GrowthLaw::SquareRoot => ratio.sqrt(),
        }
    }
}

/// Real GDP per person indexed by year, possibly back-extrapolated.
#[derive(Debug, Clone, PartialEq)]
pub struct GdpPath {
    first_year: i32,
    values: Vec<f64>,
}

impl GdpPath {
    pub fn from_values(first_year: i32, values: Vec<f64>) -> Self {
        Self { first_year, values }
    }

    pub fn first_year(&self) -> i32 {
        self.first_year
    }

    pub fn last_year(&self) -> i32 {
        self.first_year + self.values.len() as i32 - 1
    }

    pub fn get(&self, year: i32) -> Option<f64> {
        let idx = usize::try_from(year - self.first_year).ok()?;
        self.values.get(idx).copied()
    }
}

pub fn load_economy(path: impl AsRef<Path>) -> Result<EconomySeries, DataError> {
    let path = path.as_ref();
    let table = Table::read(path)?;
    let idx = required_columns(&table, &ECONOMY_HEADER)?;
    let mut rows = Vec::with_capacity(table.records.len());
    for (i, rec) in table.records.iter().enumerate() {
        let row = i + 1;
        let f = |c: usize| parse_field::<f64>(path, row, ECONOMY_HEADER[c], rec.get(idx[c]));
        rows.push(EconomyYear {
            year: parse_field::<i32>(path, row, "year", rec.get(idx[0]))?,
            real_gdp_pc: f(1)?,
            nominal_gdp_pc: f(2)?,
            nominal_gpi_pc_with_income: f(3)?,
            pop_15plus: f(4)?,
            pop_with_income: f(5)?,
        });
    }
    EconomySeries::validated(rows, path, 1)
}
