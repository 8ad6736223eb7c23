//! Writes the bundled input tables: economy.csv, ages.csv, pid_crude.csv and
//! pid_fine.csv.

mod income;
mod series;

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::{Context, Result};
use incomesim_core::ages::AgeRow;
use incomesim_core::pid::write_pid_tables;
use incomesim_core::{
    AgeStructure, Bin, BinnedPid, EconomySeries, EconomyYear, IncomeUnits, PopulationBase,
};

use income::{multinomial, rng_for, round_preserving, IncomeLaw};
use series::{years, FIRST_YEAR, LAST_YEAR, OLDEST_AGE};

const CRUDE_EDGES: [f64; 10] = [
    0.0, 2000.0, 4000.0, 6000.0, 8000.0, 10000.0, 12500.0, 15000.0, 20000.0, 25000.0,
];
const LAST_CRUDE_YEAR: i32 = 1987;

/// 2005 counts and means above $100,000: 100-150k, 150-200k, 200-250k, 250k+.
const TOP_2005_COUNTS: [f64; 4] = [6.861e6, 1.886e6, 0.815e6, 1.334e6];
const TOP_2005_OPEN_MEAN: f64 = 470_616.0;
const TOP_2005_MEAN_ABOVE_100K: f64 = 176_068.0;

fn steps(from: f64, to: f64, width: f64) -> Vec<f64> {
    let n = ((to - from) / width).round() as usize;
    (0..n).map(|i| from + i as f64 * width).collect()
}

/// Lower edges of the year-specific fine table; the last bin is open.
fn fine_edges(year: i32) -> Vec<f64> {
    let mut e = match year {
        ..=1952 => {
            let mut e = steps(0.0, 5000.0, 500.0);
            e.extend([5000.0, 6000.0, 7000.0, 10000.0]);
            e
        }
        1953..=1966 => {
            let mut e = steps(0.0, 5000.0, 500.0);
            e.extend(steps(5000.0, 10000.0, 1000.0));
            e.extend([10000.0, 15000.0, 25000.0]);
            e
        }
        1967..=1978 => {
            let mut e = steps(0.0, 10000.0, 1000.0);
            e.extend([
                10000.0, 12000.0, 15000.0, 20000.0, 25000.0, 35000.0, 50000.0,
            ]);
            e
        }
        1979..=1993 => {
            let mut e = steps(0.0, 50000.0, 2500.0);
            e.extend([50000.0, 75000.0, 100000.0]);
            e
        }
        1994..=1999 => {
            let mut e = steps(0.0, 100000.0, 2500.0);
            e.push(100000.0);
            e
        }
        _ => {
            let mut e = steps(0.0, 100000.0, 2500.0);
            e.extend([100000.0, 150000.0, 200000.0, 250000.0]);
            e
        }
    };
    e.dedup();
    e
}

fn survey_size(year: i32) -> u64 {
    let t = (year - FIRST_YEAR) as f64 / (LAST_YEAR - FIRST_YEAR) as f64;
    (25_000.0 + 125_000.0 * t).round() as u64
}

struct YearData {
    economy: EconomyYear,
    ages: Vec<f64>,
}

fn build_years() -> Vec<YearData> {
    let real = series::real_gdp();
    let ages = series::age_structure();
    years()
        .zip(real)
        .zip(ages)
        .map(|((year, real), ages)| {
            let ages: Vec<f64> = ages.iter().map(|m| (m * 1e6).round()).collect();
            let pop_15plus: f64 = ages.iter().sum();
            let pop_with_income = (series::coverage(year) * pop_15plus).round();
            let nominal = series::nominal_gdp(year) * 1e9;
            let cents = |x: f64| (x * 100.0).round() / 100.0;
            YearData {
                economy: EconomyYear {
                    year,
                    real_gdp_pc: cents(real * 1e9 / pop_15plus),
                    nominal_gdp_pc: cents(nominal / pop_15plus),
                    nominal_gpi_pc_with_income: cents(
                        series::gpi_ratio(year) * nominal / pop_with_income,
                    ),
                    pop_15plus,
                    pop_with_income,
                },
                ages,
            }
        })
        .collect()
}

/// Sampled counts on the union of both bin sets, scaled to the population.
fn sampled_cells(law: &IncomeLaw, e: &EconomyYear, cells: &[f64]) -> Vec<f64> {
    let gpi = e.nominal_gpi_pc_with_income;
    let mut uppers: Vec<f64> = cells[1..].to_vec();
    uppers.push(f64::INFINITY);
    let p: Vec<f64> = cells
        .iter()
        .zip(&uppers)
        .map(|(&a, &b)| law.cdf(b / gpi) - law.cdf(a / gpi))
        .collect();
    let n = survey_size(e.year);
    let draws = multinomial(&mut rng_for(e.year), n, &p);
    draws
        .iter()
        .map(|&d| d as f64 / n as f64 * e.pop_with_income)
        .collect()
}

fn aggregate(cells: &[f64], counts: &[f64], edges: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; edges.len()];
    for (&lower, &c) in cells.iter().zip(counts) {
        let j = edges.partition_point(|&e| e <= lower) - 1;
        out[j] += c;
    }
    out
}

fn table(year: i32, edges: &[f64], counts: &[f64], means: Option<&[f64]>) -> Result<BinnedPid> {
    let bins = edges
        .iter()
        .enumerate()
        .map(|(i, &lower)| Bin {
            lower,
            upper: edges.get(i + 1).copied(),
            count: counts[i],
            mean: means.map(|m| m[i]),
        })
        .collect();
    BinnedPid::new(
        year,
        PopulationBase::WithIncome,
        IncomeUnits::CurrentDollars,
        bins,
    )
    .map_err(|e| anyhow::anyhow!("{year}: {e}"))
}

fn exact_means(law: &IncomeLaw, gpi: f64, edges: &[f64]) -> Vec<f64> {
    edges
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let b = edges.get(i + 1).copied().unwrap_or(f64::INFINITY);
            let (za, zb) = (a / gpi, b / gpi);
            let p = law.cdf(zb) - law.cdf(za);
            let m = law.partial_mean(za, zb) / p * gpi;
            m.round().clamp(a, b)
        })
        .collect()
}

/// Pins the 2005 top bins to the published counts and means.
fn pin_2005_top(edges: &[f64], counts: &mut [f64], means: &mut [f64], total: f64) {
    let top = edges
        .iter()
        .position(|&e| e == 100_000.0)
        .expect("100k edge");
    let rest: f64 = counts[..top].iter().sum();
    let pinned: f64 = TOP_2005_COUNTS.iter().sum();
    for c in &mut counts[..top] {
        *c *= (total - pinned) / rest;
    }
    counts[top..].copy_from_slice(&TOP_2005_COUNTS);
    let closed: f64 = (0..3).map(|i| TOP_2005_COUNTS[i] * means[top + i]).sum();
    let scale =
        (TOP_2005_MEAN_ABOVE_100K * pinned - TOP_2005_COUNTS[3] * TOP_2005_OPEN_MEAN) / closed;
    for m in &mut means[top..top + 3] {
        *m = (*m * scale).round();
    }
    means[top + 3] = TOP_2005_OPEN_MEAN;
}

fn main() -> Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let data = build_years();
    let law = IncomeLaw::new();

    let economy = EconomySeries::from_rows(data.iter().map(|d| d.economy).collect())?;
    let mut ages = AgeStructure::new();
    for d in &data {
        ages.insert(
            d.economy.year,
            AgeRow {
                first_age: 15,
                counts: d.ages.clone(),
            },
        )?;
    }
    debug_assert_eq!(ages.oldest_age(), Some(OLDEST_AGE));

    let mut crude = Vec::new();
    let mut fine = Vec::new();
    for d in &data {
        let e = &d.economy;
        let fine_e = fine_edges(e.year);
        let mut cells = fine_e.clone();
        if e.year <= LAST_CRUDE_YEAR {
            cells.extend(CRUDE_EDGES);
        }
        cells.sort_by(f64::total_cmp);
        cells.dedup();
        let counts = sampled_cells(&law, e, &cells);
        if e.year <= LAST_CRUDE_YEAR {
            let c = aggregate(&cells, &counts, &CRUDE_EDGES);
            let c = round_preserving(&c, e.pop_with_income);
            crude.push(table(e.year, &CRUDE_EDGES, &c, None)?);
        }
        let mut f = aggregate(&cells, &counts, &fine_e);
        if e.year >= 2000 {
            let mut means = exact_means(&law, e.nominal_gpi_pc_with_income, &fine_e);
            if e.year == 2005 {
                pin_2005_top(&fine_e, &mut f, &mut means, e.pop_with_income);
            }
            let f = round_preserving(&f, e.pop_with_income);
            fine.push(table(e.year, &fine_e, &f, Some(&means))?);
        } else {
            let f = round_preserving(&f, e.pop_with_income);
            fine.push(table(e.year, &fine_e, &f, None)?);
        }
    }

    let create = |name: &str| -> Result<BufWriter<File>> {
        let path = out.join(name);
        Ok(BufWriter::new(
            File::create(&path).with_context(|| format!("creating {}", path.display()))?,
        ))
    };
    economy.write_csv(create("economy.csv")?)?;
    ages.write_csv(create("ages.csv")?)?;
    write_pid_tables(&crude, create("pid_crude.csv")?)?;
    write_pid_tables(&fine, create("pid_fine.csv")?)?;
    println!("wrote {} years to {}", data.len(), out.display());
    Ok(())
}
