use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};

/// Writes a CSV file from preformatted cells.
pub fn write_csv(dir: &Path, name: &str, header: &str, rows: &[Vec<String>]) -> Result<()> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("{}: cannot create", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{header}")?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()
        .with_context(|| format!("{}: write failed", path.display()))
}

pub fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    // avoid "-0.000000"
    if s.trim_start_matches('-')
        .bytes()
        .all(|b| b == b'0' || b == b'.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("{}: cannot create directory", dir.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_decimals_without_negative_zero() {
        assert_eq!(num(0.5), "0.500000");
        assert_eq!(num(-1e-9), "0.000000");
        assert_eq!(num(-0.25), "-0.250000");
    }
}
