use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use incomesim_core::metrics::{
    bin_means, collapse_distance, compare_series, estimate_k_open_end, estimate_k_regression,
    gini_trapezoid, lorenz_from_bins, normalize_density, rescale_income_axis, with_zero_income_bin,
    Convention, GiniMethod, LorenzCurve, ParetoTail,
};
use incomesim_core::model::ModelParams;
use incomesim_core::synth::{apply_pareto_zone, ModelPid, Simulation};
use incomesim_core::{
    load_age_structure, load_economy, load_pid_tables, BinnedPid, EconomySeries, PopulationBase,
};
use rayon::prelude::*;

use crate::output::{ensure_dir, num, write_csv};
use crate::svg::{line_chart, Series};
use crate::{data_file, CollapseArgs, CompareArgs, FitArgs, GiniArgs, SimulateArgs};

/// Empirical tail minimum as a share of GPI per person with income.
const THRESHOLD_GPI_RATIO: f64 = 0.9;

const SENSITIVITY_K: (f64, f64, usize) = (1.1, 0.05, 19);

fn economy_row(economy: &EconomySeries, year: i32) -> Result<&incomesim_core::EconomyYear> {
    economy.year(year).map_err(|e| anyhow!("economy: {e}"))
}

struct TableGini {
    value: f64,
    method: GiniMethod,
    curve: LorenzCurve,
}

fn table_gini(
    pid: &BinnedPid,
    correction: f64,
    tail_k: Option<f64>,
    convention: Convention,
) -> Result<TableGini> {
    let means = bin_means(pid, correction);
    let open = pid.open_bin();
    let tail = match (tail_k, open) {
        (Some(k), Some(b)) if b.mean.is_none() => Some(ParetoTail::new(b.lower, k, convention)?),
        _ => None,
    };
    let curve = lorenz_from_bins(pid, &means, tail.as_ref())?;
    let method = if tail.is_some() {
        GiniMethod::TrapezoidPlusParetoTail
    } else {
        GiniMethod::Trapezoid
    };
    Ok(TableGini {
        value: gini_trapezoid(&curve),
        method,
        curve,
    })
}

fn check_tail_k(tail_k: Option<f64>) -> Result<()> {
    if let Some(k) = tail_k {
        if !(k > 1.0 && k.is_finite()) {
            bail!("--tail-k: k must exceed 1");
        }
    }
    Ok(())
}

fn model_pid_rows(pid: &ModelPid, k: f64, boost: f64) -> Result<Vec<Vec<String>>> {
    const BINS: usize = 40;
    let zone = apply_pareto_zone(pid, k, boost, Convention::ConsistentMode)?;
    let d = pid.dollars_per_unit;
    let threshold = pid.threshold * d;
    let width = threshold / BINS as f64;
    let mut count = [0.0; BINS];
    let mut income = [0.0; BINS];
    for (&v, &w) in zone.below_incomes.iter().zip(&zone.below_weights) {
        let i = ((v * d / width) as usize).min(BINS - 1);
        count[i] += w;
        income[i] += w * v * d;
    }
    let mut rows = Vec::with_capacity(BINS + 1);
    for i in 0..BINS {
        let (lo, hi) = (width * i as f64, width * (i + 1) as f64);
        let mean = if count[i] > 0.0 {
            let (lo_r, hi_r) = (num(lo).parse::<f64>()?, num(hi).parse::<f64>()?);
            num((income[i] / count[i]).clamp(lo_r, hi_r))
        } else {
            String::new()
        };
        rows.push(vec![
            pid.year.to_string(),
            PopulationBase::All15Plus.to_string(),
            num(lo),
            num(hi),
            num(count[i]),
            mean,
        ]);
    }
    if let Some(t) = zone.tail {
        rows.push(vec![
            pid.year.to_string(),
            PopulationBase::All15Plus.to_string(),
            num(threshold),
            String::new(),
            num(t.count),
            num(t.mean * d),
        ]);
    }
    Ok(rows)
}

pub fn simulate(a: &SimulateArgs) -> Result<()> {
    let c = &a.common;
    let economy = load_economy(c.economy_path())?;
    let ages = load_age_structure(data_file(&a.ages, c, "ages.csv"))?;
    let defaults = ModelParams::default();
    let params = ModelParams {
        k_pareto: a.k,
        alpha: a.alpha.unwrap_or(defaults.alpha),
        boost: a.boost.unwrap_or(defaults.boost),
        ..defaults
    };
    params.validate()?;
    let from = c.from.unwrap_or(economy.first_year());
    let to = c.to.unwrap_or(economy.last_year());
    let sim = Simulation::new(&economy, &ages, &params, from, to)?;
    let series = sim.gini_series(params.k_pareto)?;
    ensure_dir(&c.out)?;

    let rows: Vec<Vec<String>> = series
        .iter()
        .map(|g| vec![g.year.to_string(), num(g.value)])
        .collect();
    write_csv(&c.out, "gini_predicted.csv", "year,gini", &rows)?;

    let years: Vec<i32> = sim.years().collect();
    let tables = years
        .par_iter()
        .map(|&y| model_pid_rows(&sim.pid(y)?, params.k_pareto, params.boost))
        .collect::<Result<Vec<_>>>()?;
    for (y, rows) in years.iter().zip(tables) {
        write_csv(
            &c.out,
            &format!("pid_model_{y}.csv"),
            "year,population_base,bin_lower,bin_upper,count,mean_income",
            &rows,
        )?;
    }

    let (k0, dk, n) = SENSITIVITY_K;
    let rows = (0..n)
        .map(|i| {
            let k = k0 + dk * i as f64;
            Ok(vec![num(k), num(sim.predicted_gini(to, k)?.value)])
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(&c.out, "sensitivity.csv", "k,gini", &rows)?;

    if a.svg {
        let mut lines = vec![Series {
            label: "predicted",
            color: "#1f4e9c",
            points: series.iter().map(|g| (g.year as f64, g.value)).collect(),
        }];
        if let Some(path) = &a.pid {
            let mut points = Vec::new();
            for t in load_pid_tables(path)? {
                if t.year < from || t.year > to || t.population_base != PopulationBase::WithIncome {
                    continue;
                }
                let all = with_zero_income_bin(&t, economy_row(&economy, t.year)?.pop_15plus)?;
                let g = table_gini(
                    &all,
                    a.correction,
                    Some(params.k_pareto),
                    Convention::ConsistentMode,
                )
                .with_context(|| format!("{}: year {}", path.display(), t.year))?;
                points.push((t.year as f64, g.value));
            }
            lines.push(Series {
                label: "measured (all 15+)",
                color: "#c0392b",
                points,
            });
        }
        let svg = line_chart("Gini coefficient, predicted and measured", &lines);
        std::fs::write(c.out.join("fig17.svg"), svg).context("fig17.svg: write failed")?;
    }
    Ok(())
}

fn lorenz_rows(curve: &LorenzCurve) -> Vec<Vec<String>> {
    curve
        .points()
        .iter()
        .map(|&(x, y)| vec![num(x), num(y)])
        .collect()
}

pub fn gini(a: &GiniArgs) -> Result<()> {
    let c = &a.common;
    check_tail_k(a.tail_k)?;
    let path = data_file(&a.pid, c, "pid_fine.csv");
    let mut tables: Vec<BinnedPid> = load_pid_tables(&path)?
        .into_iter()
        .filter(|t| c.in_range(t.year))
        .collect();
    if tables.is_empty() {
        bail!("{}: no tables in the requested years", path.display());
    }
    tables.sort_by_key(|t| (t.year, t.population_base));
    let economy = if a.all_population {
        Some(load_economy(c.economy_path())?)
    } else {
        None
    };
    let convention = a.convention.unwrap_or(Convention::ConsistentMode);
    ensure_dir(&c.out)?;

    let mut jobs: Vec<BinnedPid> = Vec::new();
    for t in tables {
        if let (Some(e), PopulationBase::WithIncome) = (&economy, t.population_base) {
            let all = with_zero_income_bin(&t, economy_row(e, t.year)?.pop_15plus)
                .with_context(|| format!("{}: year {}", path.display(), t.year))?;
            jobs.push(t);
            jobs.push(all);
        } else {
            jobs.push(t);
        }
    }
    let results = jobs
        .par_iter()
        .map(|t| {
            table_gini(t, a.correction, a.tail_k, convention)
                .with_context(|| format!("{}: year {}", path.display(), t.year))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (t, g) in jobs.iter().zip(&results) {
        rows.push(vec![
            t.year.to_string(),
            t.population_base.to_string(),
            g.method.as_str().to_string(),
            num(g.value),
        ]);
        let name = match t.population_base {
            PopulationBase::WithIncome => format!("lorenz_{}.csv", t.year),
            PopulationBase::All15Plus => format!("lorenz_{}_all_15plus.csv", t.year),
        };
        write_csv(&c.out, &name, "x,y", &lorenz_rows(&g.curve))?;
    }
    write_csv(
        &c.out,
        "gini_empirical.csv",
        "year,population_base,method,gini",
        &rows,
    )
}

pub fn fit_pareto(a: &FitArgs) -> Result<()> {
    let c = &a.common;
    let convention = a.convention.unwrap_or(Convention::PaperMode);
    let path = data_file(&a.pid, c, "pid_fine.csv");
    let tables: Vec<BinnedPid> = load_pid_tables(&path)?
        .into_iter()
        .filter(|t| c.in_range(t.year))
        .collect();
    if tables.is_empty() {
        bail!("{}: no tables in the requested years", path.display());
    }
    let economy = if a.min.is_none() {
        Some(load_economy(c.economy_path())?)
    } else {
        None
    };
    if let Some(m) = a.min {
        if m.is_nan() || m <= 0.0 {
            bail!("--min must be positive");
        }
    }
    ensure_dir(&c.out)?;
    let mut rows = Vec::new();
    for t in &tables {
        let ctx = || format!("{}: year {}", path.display(), t.year);
        let threshold = match (a.min, &economy) {
            (Some(m), _) => m,
            (None, Some(e)) => {
                THRESHOLD_GPI_RATIO * economy_row(e, t.year)?.nominal_gpi_pc_with_income
            }
            (None, None) => unreachable!(),
        };
        let means = bin_means(t, a.correction);
        let closed = t.closed_bins();
        let mut pop = 0.0;
        let mut income = 0.0;
        let mut x_m = None;
        for (b, m) in closed
            .iter()
            .zip(&means)
            .filter(|(b, _)| b.lower >= threshold)
        {
            x_m.get_or_insert(b.lower);
            pop += b.count;
            income += b.count * m;
        }
        let open_mean = t.open_bin().and_then(|b| {
            (b.lower >= threshold).then_some(())?;
            x_m.get_or_insert(b.lower);
            b.mean.map(|m| (b.count, m))
        });
        if let (Some(x_m), Some((n, m))) = (x_m, open_mean) {
            let x_av = (income + n * m) / (pop + n);
            let k = estimate_k_open_end(x_m, x_av, convention).with_context(ctx)?;
            rows.push(vec![
                t.year.to_string(),
                "open_end".into(),
                convention.to_string(),
                num(x_m),
                num(x_av),
                num(k),
            ]);
        }
        let density = normalize_density(t, t.total_count());
        let (slope, k) =
            estimate_k_regression(&density, threshold, convention).with_context(ctx)?;
        rows.push(vec![
            t.year.to_string(),
            "regression".into(),
            convention.to_string(),
            num(threshold),
            num(slope),
            num(k),
        ]);
    }
    write_csv(
        &c.out,
        "k_estimates.csv",
        "year,method,convention,x_m,statistic,k",
        &rows,
    )
}

fn density_for(
    t: &BinnedPid,
    economy: Option<&EconomySeries>,
) -> Result<incomesim_core::metrics::DensityTable> {
    let scaled = match economy {
        Some(e) => rescale_income_axis(t, economy_row(e, t.year)?.nominal_gpi_pc_with_income)?,
        None => t.clone(),
    };
    Ok(normalize_density(&scaled, t.total_count()))
}

pub fn collapse(a: &CollapseArgs) -> Result<()> {
    let c = &a.common;
    let path = data_file(&a.pid, c, "pid_crude.csv");
    let load = |p: &Path| -> Result<Vec<BinnedPid>> {
        let mut v: Vec<BinnedPid> = load_pid_tables(p)?
            .into_iter()
            .filter(|t| c.in_range(t.year))
            .collect();
        v.sort_by_key(|t| (t.year, t.population_base));
        Ok(v)
    };
    let tables = load(&path)?;
    if tables.is_empty() {
        bail!("{}: no tables in the requested years", path.display());
    }
    let economy = if a.raw {
        None
    } else {
        Some(load_economy(c.economy_path())?)
    };
    let densities = tables
        .iter()
        .map(|t| density_for(t, economy.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let other = match &a.against {
        Some(p) => {
            let b = load(p)?;
            let db = b
                .iter()
                .map(|t| density_for(t, economy.as_ref()))
                .collect::<Result<Vec<_>>>()?;
            for (i, t) in tables.iter().enumerate() {
                if let Some(j) = b
                    .iter()
                    .position(|u| u.year == t.year && u.population_base == t.population_base)
                {
                    pairs.push((i, j));
                }
            }
            if pairs.is_empty() {
                bail!(
                    "{}: no years in common with {}",
                    p.display(),
                    path.display()
                );
            }
            Some(db)
        }
        None => {
            for i in 0..tables.len() {
                for j in i + 1..tables.len() {
                    if tables[i].population_base == tables[j].population_base {
                        pairs.push((i, j));
                    }
                }
            }
            None
        }
    };
    let rhs = other.as_ref().unwrap_or(&densities);
    let dist = pairs
        .par_iter()
        .map(|&(i, j)| {
            collapse_distance(&densities[i], &rhs[j])
                .with_context(|| format!("years {} and {}", densities[i].year, rhs[j].year))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<String>> = pairs
        .iter()
        .zip(dist)
        .map(|(&(i, j), d)| {
            vec![
                densities[i].year.to_string(),
                rhs[j].year.to_string(),
                num(d),
            ]
        })
        .collect();
    ensure_dir(&c.out)?;
    write_csv(&c.out, "collapse.csv", "year_a,year_b,distance", &rows)
}

fn read_series(
    path: &Path,
    base: Option<&str>,
    method: Option<&str>,
) -> Result<BTreeMap<i32, f64>> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("{}", path.display()))?;
    let headers = rdr
        .headers()
        .with_context(|| format!("{}", path.display()))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let year = col("year").ok_or_else(|| anyhow!("{}: missing column `year`", path.display()))?;
    let gini = col("gini").ok_or_else(|| anyhow!("{}: missing column `gini`", path.display()))?;
    let filters: Vec<(usize, &str)> = [(col("population_base"), base), (col("method"), method)]
        .into_iter()
        .filter_map(|(c, v)| Some((c?, v?)))
        .collect();
    let mut out = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.with_context(|| format!("{}: row {row}", path.display()))?;
        if filters.iter().any(|&(c, v)| rec.get(c) != Some(v)) {
            continue;
        }
        let parse = |c: usize, name: &str| {
            rec.get(c)
                .unwrap_or("")
                .trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("{}: row {row}: cannot parse `{name}`", path.display()))
        };
        let y = parse(year, "year")? as i32;
        if out.insert(y, parse(gini, "gini")?).is_some() {
            bail!(
                "{}: row {row}: duplicate year {y}; narrow with --base or --method",
                path.display()
            );
        }
    }
    Ok(out)
}

pub fn compare(a: &CompareArgs) -> Result<()> {
    let c = &a.common;
    let filter = |m: BTreeMap<i32, f64>| -> BTreeMap<i32, f64> {
        m.into_iter().filter(|(y, _)| c.in_range(*y)).collect()
    };
    let ours = filter(read_series(
        &a.ours,
        a.base.as_deref(),
        a.method.as_deref(),
    )?);
    let reference = filter(read_series(
        &a.reference,
        a.base.as_deref(),
        a.method.as_deref(),
    )?);
    let cmp = compare_series(&ours, &reference)?;
    let rows: Vec<Vec<String>> = cmp
        .rows
        .iter()
        .map(|r| {
            vec![
                r.year.to_string(),
                num(r.ours),
                num(r.reference),
                num(r.difference),
                r.reference_step.map(num).unwrap_or_default(),
            ]
        })
        .collect();
    ensure_dir(&c.out)?;
    write_csv(
        &c.out,
        "comparison.csv",
        "year,ours,reference,difference,reference_step",
        &rows,
    )?;
    if let Some((year, step)) = cmp.largest_jump {
        println!("largest reference change: {year} ({})", num(step));
    }
    Ok(())
}
