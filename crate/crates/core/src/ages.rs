//! Single-year-of-age population counts per calendar year.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::error::{DataError, ModelError};
use crate::table::{parse_field, required_columns, Table};

pub const AGES_HEADER: [&str; 3] = ["year", "age", "count"];

/// Counts for one year, indexed from `first_age`. The last entry may stand
/// for an open-ended oldest age group.
#[derive(Debug, Clone, PartialEq)]
pub struct AgeRow {
    pub first_age: u32,
    pub counts: Vec<f64>,
}

impl AgeRow {
    pub fn last_age(&self) -> u32 {
        self.first_age + self.counts.len() as u32 - 1
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    /// `(age, count)` pairs in ascending age.
    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.first_age + i as u32, c))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AgeStructure {
    years: BTreeMap<i32, AgeRow>,
}

impl AgeStructure {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or replaces a year. Counts must be finite and non-negative.
    pub fn insert(&mut self, year: i32, row: AgeRow) -> Result<(), ModelError> {
        if row.counts.is_empty() {
            return Err(ModelError::InvalidParameter(format!(
                "year {year}: no ages"
            )));
        }
        if row.counts.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(ModelError::InvalidParameter(format!(
                "year {year}: counts must be finite and non-negative"
            )));
        }
        self.years.insert(year, row);
        Ok(())
    }

    pub fn year(&self, year: i32) -> Result<&AgeRow, ModelError> {
        self.years
            .get(&year)
            .ok_or(ModelError::MissingAgeCounts { year })
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.years.keys().copied()
    }

    pub fn oldest_age(&self) -> Option<u32> {
        self.years.values().map(AgeRow::last_age).max()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(AGES_HEADER)?;
        for (year, row) in &self.years {
            for (age, count) in row.iter() {
                wtr.write_record([year.to_string(), age.to_string(), count.to_string()])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}

pub fn load_age_structure(path: impl AsRef<Path>) -> Result<AgeStructure, DataError> {
    let path = path.as_ref();
    let table = Table::read(path)?;
    let idx = required_columns(&table, &AGES_HEADER)?;
    let mut grouped: BTreeMap<i32, Vec<(u32, f64)>> = BTreeMap::new();
    for (i, rec) in table.records.iter().enumerate() {
        let row = i + 1;
        let year: i32 = parse_field(path, row, "year", rec.get(idx[0]))?;
        let age: u32 = parse_field(path, row, "age", rec.get(idx[1]))?;
        let count: f64 = parse_field(path, row, "count", rec.get(idx[2]))?;
        if !(count.is_finite() && count >= 0.0) {
            return Err(DataError::Invalid {
                path: path.to_path_buf(),
                row,
                message: "count must be finite and non-negative".into(),
            });
        }
        grouped.entry(year).or_default().push((age, count));
    }
    let mut out = AgeStructure::new();
    for (year, mut entries) in grouped {
        entries.sort_by_key(|e| e.0);
        let first_age = entries[0].0;
        for (j, &(age, _)) in entries.iter().enumerate() {
            let expected = first_age + j as u32;
            if age != expected {
                return Err(DataError::NonContiguousAges {
                    path: path.to_path_buf(),
                    year,
                    age: age.min(expected),
                });
            }
        }
        let counts = entries.iter().map(|e| e.1).collect();
        out.years.insert(year, AgeRow { first_age, counts });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_and_round_trips() {
        let text = "year,age,count\n2000,15,10\n2000,16,12.5\n2001,15,11\n2001,16,0\n";
        let f = write(text);
        let ages = load_age_structure(f.path()).unwrap();
        assert_eq!(ages.year(2000).unwrap().total(), 22.5);
        assert_eq!(ages.oldest_age(), Some(16));
        let mut buf = Vec::new();
        ages.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), text);
    }

    #[test]
    fn rejects_age_gap() {
        let f = write("year,age,count\n2000,15,1\n2000,17,1\n");
        let err = load_age_structure(f.path()).unwrap_err();
        assert!(matches!(
            err,
            DataError::NonContiguousAges {
                year: 2000,
                age: 16,
                ..
            }
        ));
    }

    #[test]
    fn rejects_negative_count() {
        let f = write("year,age,count\n2000,15,-1\n");
        assert!(matches!(
            load_age_structure(f.path()).unwrap_err(),
            DataError::Invalid { row: 1, .. }
        ));
    }

    #[test]
    fn missing_year_is_reported() {
        let ages = AgeStructure::new();
        assert_eq!(
            ages.year(1990),
            Err(ModelError::MissingAgeCounts { year: 1990 })
        );
    }
}
