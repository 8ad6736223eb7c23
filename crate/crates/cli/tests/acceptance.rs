use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use incomesim_core::metrics::{
    bin_means, collapse_distance, estimate_k_open_end, estimate_k_regression, gini_trapezoid,
    lorenz_from_bins, normalize_density, pareto_tail_stats, rescale_income_axis,
    with_zero_income_bin, Convention, DensityTable, ParetoTail, DEFAULT_CORRECTION,
};
use incomesim_core::model::{
    capability_grid, closed_form_income, crossover, top_group_relative_income, trajectory,
    Integrator, ModelContext, ModelParams,
};
use incomesim_core::synth::{extra_income_ratio, Simulation};
use incomesim_core::{
    load_age_structure, load_economy, load_pid_tables, Bin, BinnedPid, EconomySeries, EconomyYear,
    IncomeUnits, PopulationBase,
};
use rand::SeedableRng;
use rand_distr::{Distribution, LogNormal};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn table(bins: Vec<Bin>) -> BinnedPid {
    BinnedPid::new(
        2000,
        PopulationBase::WithIncome,
        IncomeUnits::ModelUnits,
        bins,
    )
    .unwrap()
}

fn table_gini(pid: &BinnedPid) -> f64 {
    let curve = lorenz_from_bins(pid, &bin_means(pid, DEFAULT_CORRECTION), None).unwrap();
    gini_trapezoid(&curve)
}

fn log_edges(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| lo * (hi / lo).powf(i as f64 / n as f64))
        .collect()
}

fn pareto_table(k: f64, n: usize) -> BinnedPid {
    let tail = ParetoTail::new(1.0, k, Convention::ConsistentMode).unwrap();
    let edges = log_edges(1.0, 1e12, n);
    let mut bins: Vec<Bin> = edges
        .windows(2)
        .map(|w| {
            let s = pareto_tail_stats(&tail, w[0], Some(w[1])).unwrap();
            Bin::closed(w[0], w[1], s.pop_fraction * 1e9).with_mean(s.conditional_mean)
        })
        .collect();
    let s = pareto_tail_stats(&tail, 1e12, None).unwrap();
    bins.push(Bin::open(1e12, s.pop_fraction * 1e9).with_mean(s.conditional_mean));
    table(bins)
}

fn pareto_gini_oracle() -> Outcome {
    let t0 = Instant::now();
    let g = table_gini(&pareto_table(1.35, 1000));
    let secs = t0.elapsed().as_secs_f64();
    let exact = 1.0 / (2.0 * 1.35 - 1.0);
    check(
        (g - exact).abs() <= 0.003 && secs < 1.0,
        format!("G = {g:.5}, closed form {exact:.5}, {secs:.3} s"),
    )
}

fn exponential_gini_oracle() -> Outcome {
    let mut edges = vec![0.0];
    edges.extend(log_edges(1e-6, 50.0, 1000));
    let mut bins: Vec<Bin> = edges
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            let p = (-w[0]).exp() * -(-d).exp_m1();
            let m = (w[0] + 1.0 - d / d.exp_m1()).clamp(w[0], w[1]);
            Bin::closed(w[0], w[1], p * 1e9).with_mean(m)
        })
        .collect();
    bins.push(Bin::open(50.0, (-50f64).exp() * 1e9).with_mean(51.0));
    let g = table_gini(&table(bins));
    check(
        (g - 0.5).abs() <= 0.005,
        format!("G = {g:.5}, closed form 0.5"),
    )
}

fn refinement_monotonicity() -> Outcome {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let dist = LogNormal::new(0.0, 0.9).unwrap();
    let mut sample: Vec<f64> = (0..200_000).map(|_| dist.sample(&mut rng)).collect();
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    let exact = {
        let total: f64 = sample.iter().sum();
        let ranked: f64 = sample
            .iter()
            .enumerate()
            .map(|(i, x)| (i as f64 + 1.0) * x)
            .sum();
        2.0 * ranked / (n * total) - (n + 1.0) / n
    };
    let lo = sample[0];
    let hi = sample[sample.len() - 1] * (1.0 + 1e-9);
    let gini_for = |bins_n: usize| {
        let edges = log_edges(lo, hi, bins_n);
        let mut bins = Vec::new();
        let mut i = 0;
        for w in edges.windows(2) {
            let start = i;
            while i < sample.len() && sample[i] < w[1] {
                i += 1;
            }
            let chunk = &sample[start..i];
            let mean = if chunk.is_empty() {
                w[0]
            } else {
                chunk.iter().sum::<f64>() / chunk.len() as f64
            };
            bins.push(Bin::closed(w[0], w[1], chunk.len() as f64).with_mean(mean));
        }
        table_gini(&table(bins))
    };
    let g: Vec<f64> = [10, 100, 1000].into_iter().map(gini_for).collect();
    check(
        g[0] <= g[1] && g[1] <= g[2] && g[2] <= exact,
        format!(
            "G = {:.5} -> {:.5} -> {:.5}, sample {exact:.5}",
            g[0], g[1], g[2]
        ),
    )
}

fn estimator_reproduction() -> Outcome {
    let a = estimate_k_open_end(100_000.0, 176_068.0, Convention::PaperMode).unwrap();
    let b = estimate_k_open_end(250_000.0, 470_616.0, Convention::PaperMode).unwrap();
    let t = pareto_table(1.35, 200);
    let (pop, income) = t.bins().iter().fold((0.0, 0.0), |(p, i), b| {
        (p + b.count, i + b.count * b.mean.unwrap())
    });
    let x_m = t.bins()[0].lower;
    let c = estimate_k_open_end(x_m, income / pop, Convention::ConsistentMode).unwrap();
    check(
        (a - 1.31).abs() <= 0.005 && (b - 1.13).abs() <= 0.005 && (c - 1.35).abs() <= 0.02,
        format!("paper mode {a:.4}, {b:.4}; consistent round trip {c:.4}"),
    )
}

fn regression_conversion() -> Outcome {
    let edges = log_edges(1.0, 1e4, 40);
    let bins: Vec<Bin> = edges
        .windows(2)
        .map(|w| {
            let mid = (w[0] * w[1]).sqrt();
            Bin::closed(w[0], w[1], mid.powf(-3.35) * (w[1] - w[0]) * 1e12).with_mean(mid)
        })
        .collect();
    let t = table(bins);
    let d: DensityTable = normalize_density(&t, t.total_count());
    let (slope, k) = estimate_k_regression(&d, 1.0, Convention::PaperMode).unwrap();
    check(
        (slope + 3.35).abs() <= 0.01 && (k - 1.35).abs() <= 0.01,
        format!("slope {slope:.4}, paper-mode k {k:.4}"),
    )
}

fn constant_economy() -> EconomySeries {
    EconomySeries::from_rows(
        (1900..=2100)
            .map(|year| EconomyYear {
                year,
                real_gdp_pc: 10_000.0,
                nominal_gdp_pc: 10_000.0,
                nominal_gpi_pc_with_income: 10_000.0,
                pop_15plus: 1.0,
                pop_with_income: 1.0,
            })
            .collect(),
    )
    .unwrap()
}

fn trajectory_checks() -> Outcome {
    let flat = constant_economy();
    let mut worst_oracle: f64 = 0.0;
    for integrator in [Integrator::ScaledSaturation, Integrator::FrozenOde] {
        let p = ModelParams {
            integrator,
            ..Default::default()
        };
        for &(s, l) in &[(2.0, 2.0), (7.0, 19.0), (30.0, 3.0), (30.0, 30.0)] {
            let (s, l) = (s / 30.0, l / 30.0);
            let t = trajectory(s, l, 1950, &flat, &p).unwrap();
            for tau in 0..40 {
                let got = t.income(1965 + tau).unwrap();
                let want = closed_form_income(s, l, tau as f64, p.alpha, 1.0, 1.0);
                if want > 0.0 {
                    worst_oracle = worst_oracle.max((got - want).abs() / want);
                }
            }
        }
    }

    let economy = load_economy(data_dir().join("economy.csv")).unwrap();
    let p = ModelParams::default();
    let ctx = ModelContext::new(&economy, &p, 1900).unwrap();
    let mut worst_cross: f64 = 0.0;
    for birth in (1890..=1960).step_by(5) {
        for &(s, l) in capability_grid().entries().iter().step_by(37) {
            if let Some(c) = crossover(&ctx, s, l, birth).unwrap() {
                worst_cross = worst_cross.max((c.growth_side - c.decay_side).abs() / c.growth_side);
            }
        }
    }

    let flat_ctx = ModelContext::new(&flat, &p, 1900).unwrap();
    let top = top_group_relative_income(&flat_ctx, 1950).unwrap();
    check(
        worst_oracle < 1e-6 && worst_cross < 1e-9 && (top - 0.72).abs() <= 1e-6,
        format!(
            "closed-form gap {worst_oracle:.2e}, crossover gap {worst_cross:.2e}, top group at 64 {top:.7}"
        ),
    )
}

fn bundled_simulation(from: i32, to: i32) -> Simulation {
    let dir = data_dir();
    let economy = load_economy(dir.join("economy.csv")).unwrap();
    let ages = load_age_structure(dir.join("ages.csv")).unwrap();
    Simulation::new(&economy, &ages, &ModelParams::default(), from, to).unwrap()
}

fn extra_income() -> Outcome {
    let sim = bundled_simulation(2005, 2005);
    let r = extra_income_ratio(1.35, &sim.pid(2005).unwrap(), Convention::PaperMode).unwrap();
    check((1.28..=1.38).contains(&r), format!("ratio {r:.4}"))
}

fn predicted_series() -> Outcome {
    let t0 = Instant::now();
    let sim = bundled_simulation(1947, 2005);
    let series = sim.gini_series(1.35).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let value = |y: i32| series.iter().find(|g| g.year == y).unwrap().value;
    let min = series
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .unwrap();
    let max = series
        .iter()
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .unwrap();
    let in_band = series.iter().all(|g| (0.50..=0.55).contains(&g.value));
    let range = max.value - min.value;
    let hard = [
        ("band", in_band),
        ("range", range < 0.02),
        ("max year", (1958..=1966).contains(&max.year)),
        ("min year", (1986..=1994).contains(&min.year)),
        ("time", secs < 10.0),
    ];
    let targets = [
        (1947, 0.5346),
        (1962, 0.5378),
        (1990, 0.5238),
        (2005, 0.5266),
    ];
    let soft: Vec<String> = targets
        .iter()
        .map(|&(y, want)| {
            let got = value(y);
            let tag = if (got - want).abs() <= 0.01 {
                "ok"
            } else {
                "off"
            };
            format!("{y} {got:.4}/{want} {tag}")
        })
        .collect();
    let failed: Vec<&str> = hard.iter().filter(|h| !h.1).map(|h| h.0).collect();
    check(
        failed.is_empty(),
        format!(
            "range {range:.4}, max {:.4} in {}, min {:.4} in {}, {secs:.2} s; targets: {}{}",
            max.value,
            max.year,
            min.value,
            min.year,
            soft.join(", "),
            if failed.is_empty() {
                String::new()
            } else {
                format!("; failed: {}", failed.join(", "))
            }
        ),
    )
}

fn empirical_gini(pid: &BinnedPid) -> f64 {
    let tail = pid
        .open_bin()
        .filter(|b| b.mean.is_none())
        .map(|b| ParetoTail::new(b.lower, 1.35, Convention::ConsistentMode).unwrap());
    let curve = lorenz_from_bins(pid, &bin_means(pid, DEFAULT_CORRECTION), tail.as_ref()).unwrap();
    gini_trapezoid(&curve)
}

fn zero_income_inclusion() -> Outcome {
    let dir = data_dir();
    let economy = load_economy(dir.join("economy.csv")).unwrap();
    let mut all_up = true;
    let mut checked = 0;
    let mut all_1947 = Vec::new();
    for file in ["pid_crude.csv", "pid_fine.csv"] {
        for t in load_pid_tables(dir.join(file)).unwrap() {
            if t.population_base != PopulationBase::WithIncome {
                continue;
            }
            let pop = economy.get(t.year).unwrap().pop_15plus;
            let all = with_zero_income_bin(&t, pop).unwrap();
            let (g, ga) = (empirical_gini(&t), empirical_gini(&all));
            all_up &= ga > g;
            checked += 1;
            if t.year == 1947 {
                all_1947.push(ga);
            }
        }
    }
    let gap = (all_1947[0] - all_1947[1]).abs();
    check(
        all_up && (gap - 0.04).abs() <= 0.01,
        format!("{checked} tables all increase: {all_up}; 1947 crude vs fine gap {gap:.4}"),
    )
}

fn collapse_property() -> Outcome {
    let base = vec![
        Bin::closed(0.0, 1.0, 30.0),
        Bin::closed(1.0, 2.0, 25.0),
        Bin::closed(2.0, 4.0, 25.0),
        Bin::closed(4.0, 8.0, 15.0),
        Bin::closed(8.0, 16.0, 5.0),
    ];
    let g = 3.7;
    let scaled: Vec<Bin> = base
        .iter()
        .map(|b| Bin::closed(b.lower * g, b.upper.unwrap() * g, b.count))
        .collect();
    let (a, b) = (table(base), table(scaled));
    let mean = |t: &BinnedPid| {
        let m = bin_means(t, DEFAULT_CORRECTION);
        t.bins()
            .iter()
            .zip(&m)
            .map(|(b, m)| b.count * m)
            .sum::<f64>()
            / t.total_count()
    };
    let density = |t: &BinnedPid, f: f64| {
        normalize_density(&rescale_income_axis(t, f).unwrap(), t.total_count())
    };
    let synthetic = collapse_distance(&density(&a, mean(&a)), &density(&b, mean(&b))).unwrap();

    let dir = data_dir();
    let economy = load_economy(dir.join("economy.csv")).unwrap();
    let tables: Vec<BinnedPid> = load_pid_tables(dir.join("pid_crude.csv"))
        .unwrap()
        .into_iter()
        .filter(|t| t.population_base == PopulationBase::WithIncome)
        .collect();
    let (mut raw, mut rescaled, mut pairs) = (0.0, 0.0, 0.0);
    let gpi = |t: &BinnedPid| economy.get(t.year).unwrap().nominal_gpi_pc_with_income;
    for i in 0..tables.len() {
        for j in i + 1..tables.len() {
            let (s, t) = (&tables[i], &tables[j]);
            raw += collapse_distance(&density(s, 1.0), &density(t, 1.0)).unwrap();
            rescaled += collapse_distance(&density(s, gpi(s)), &density(t, gpi(t))).unwrap();
            pairs += 1.0;
        }
    }
    let (raw, rescaled) = (raw / pairs, rescaled / pairs);
    check(
        synthetic <= 1e-12 && raw >= 5.0 * rescaled,
        format!(
            "synthetic {synthetic:.1e}; bundled mean distance raw {raw:.4}, rescaled {rescaled:.4} ({:.2}x)",
            raw / rescaled
        ),
    )
}

fn run_cli(out: &Path) {
    let dir = data_dir();
    let bin = env!("CARGO_BIN_EXE_incomesim");
    let runs: [&[&str]; 4] = [
        &["simulate", "--from", "1947", "--to", "2005", "--svg"],
        &["gini", "--all-population", "--tail-k", "1.35"],
        &["fit-pareto"],
        &["collapse"],
    ];
    for args in runs {
        let status = Command::new(bin)
            .args(args)
            .arg("--data")
            .arg(&dir)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success(), "incomesim {args:?} failed");
    }
}

fn determinism() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_cli(a.path());
    run_cli(b.path());
    let mut names: Vec<_> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    let differing: Vec<String> = names
        .iter()
        .filter(|n| std::fs::read(a.path().join(n)).ok() != std::fs::read(b.path().join(n)).ok())
        .map(|n| n.to_string_lossy().into_owned())
        .collect();
    check(
        differing.is_empty() && !names.is_empty(),
        format!(
            "{} files compared, {} differ {:?}",
            names.len(),
            differing.len(),
            differing
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("pareto gini oracle", pareto_gini_oracle),
        ("exponential gini oracle", exponential_gini_oracle),
        ("refinement monotonicity", refinement_monotonicity),
        ("estimator reproduction", estimator_reproduction),
        ("regression conversion", regression_conversion),
        ("trajectory continuity and oracle", trajectory_checks),
        ("extra-income ratio", extra_income),
        ("predicted gini series", predicted_series),
        ("zero-income inclusion", zero_income_inclusion),
        ("collapse property", collapse_property),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name}: {detail}", i + 1);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
