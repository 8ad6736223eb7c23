//! Small CSV helpers shared by the loaders.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::DataError;

pub(crate) struct Table {
    pub path: PathBuf,
    pub headers: csv::StringRecord,
    pub records: Vec<csv::StringRecord>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self, DataError> {
        let file = std::fs::File::open(path).map_err(|source| DataError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(file);
        let csv_err = |source| DataError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let headers = rdr.headers().map_err(csv_err)?.clone();
        let records = rdr
            .records()
            .collect::<Result<Vec<_>, _>>()
            .map_err(csv_err)?;
        if records.is_empty() {
            return Err(DataError::Empty {
                path: path.to_path_buf(),
            });
        }
        Ok(Self {
            path: path.to_path_buf(),
            headers,
            records,
        })
    }
}

pub(crate) fn required_columns(table: &Table, names: &[&str]) -> Result<Vec<usize>, DataError> {
    names
        .iter()
        .map(|name| {
            table
                .headers
                .iter()
                .position(|h| h == *name)
                .ok_or_else(|| DataError::MissingColumn {
                    path: table.path.clone(),
                    column: name.to_string(),
                })
        })
        .collect()
}

pub(crate) fn parse_field<T: FromStr>(
    path: &Path,
    row: usize,
    column: &str,
    value: Option<&str>,
) -> Result<T, DataError> {
    let raw = value.unwrap_or("");
    raw.parse::<T>().map_err(|_| DataError::Parse {
        path: path.to_path_buf(),
        row,
        column: column.to_string(),
        value: raw.to_string(),
    })
}

/// Empty string maps to `None`.
pub(crate) fn parse_optional(
    path: &Path,
    row: usize,
    column: &str,
    value: Option<&str>,
) -> Result<Option<f64>, DataError> {
    match value {
        None | Some("") => Ok(None),
        Some(_) => parse_field(path, row, column, value).map(Some),
    }
}
