//! Annual aggregates and age-structure reconstruction.

pub const FIRST_YEAR: i32 = 1947;
pub const LAST_YEAR: i32 = 2005;
pub const OLDEST_AGE: u32 = 85;

/// Linear interpolation clamped to the end values.
pub fn interp(x: f64, xs: &[f64], ys: &[f64]) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    let i = xs.partition_point(|&v| v <= x);
    let (x0, x1, y0, y1) = (xs[i - 1], xs[i], ys[i - 1], ys[i]);
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

fn interp_pairs(x: f64, pairs: &[(f64, f64)]) -> f64 {
    let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
    interp(x, &xs, &ys)
}

pub fn years() -> impl Iterator<Item = i32> {
    FIRST_YEAR..=LAST_YEAR
}

fn idx(year: i32) -> usize {
    (year - FIRST_YEAR) as usize
}

/// Annual real GDP growth in percent, 1948 onward.
const REAL_GROWTH: [f64; 58] = [
    4.1, -0.5, 8.7, 8.0, 4.1, 4.7, -0.6, 7.1, 2.1, 2.1, -0.7, 6.9, 2.6, 2.6, 6.1, 4.4, 5.8, 6.5,
    6.6, 2.7, 4.9, 3.1, 0.2, 3.3, 5.3, 5.6, -0.5, -0.2, 5.4, 4.6, 5.5, 3.2, -0.3, 2.5, -1.8, 4.6,
    7.2, 4.2, 3.5, 3.5, 4.2, 3.7, 1.9, -0.1, 3.5, 2.8, 4.0, 2.7, 3.8, 4.4, 4.5, 4.8, 4.1, 1.0, 1.7,
    2.8, 3.8, 3.5,
];

/// Real GDP level anchors, billions of chained 2000 dollars.
const REAL_ANCHORS: [(f64, f64); 13] = [
    (1947.0, 1570.5),
    (1950.0, 1777.3),
    (1955.0, 2212.8),
    (1960.0, 2501.8),
    (1965.0, 3191.1),
    (1970.0, 3771.9),
    (1975.0, 4311.2),
    (1980.0, 5161.7),
    (1985.0, 6053.7),
    (1990.0, 7112.5),
    (1995.0, 8031.7),
    (2000.0, 9817.0),
    (2005.0, 11048.6),
];

/// Nominal GDP, billions of current dollars, 1947-2005.
const NOMINAL_GDP: [f64; 59] = [
    244.1, 269.1, 267.2, 293.7, 339.3, 358.3, 379.3, 380.4, 414.7, 437.4, 461.1, 467.2, 506.6,
    526.4, 544.7, 585.6, 617.7, 663.6, 719.1, 787.8, 832.6, 910.0, 984.6, 1038.5, 1127.1, 1238.3,
    1382.7, 1500.0, 1638.3, 1825.3, 2030.9, 2294.7, 2563.3, 2789.5, 3128.4, 3255.0, 3536.7, 3933.2,
    4220.3, 4462.8, 4739.5, 5103.8, 5484.4, 5803.1, 5995.9, 6337.7, 6657.4, 7072.2, 7397.7, 7816.9,
    8304.3, 8747.0, 9268.4, 9817.0, 10128.0, 10469.6, 10960.8, 11685.9, 12421.9,
];

/// Share of the 15+ population reporting income.
const COVERAGE: [(f64, f64); 14] = [
    (1947.0, 0.64),
    (1950.0, 0.66),
    (1955.0, 0.70),
    (1960.0, 0.74),
    (1965.0, 0.77),
    (1970.0, 0.81),
    (1975.0, 0.87),
    (1980.0, 0.91),
    (1985.0, 0.925),
    (1988.0, 0.93),
    (1990.0, 0.925),
    (1995.0, 0.91),
    (2000.0, 0.90),
    (2005.0, 0.89),
];

/// Aggregate gross personal income over nominal GDP.
const GPI_RATIO: [(f64, f64); 13] = [
    (1947.0, 0.785),
    (1951.0, 0.76),
    (1955.0, 0.765),
    (1960.0, 0.78),
    (1965.0, 0.775),
    (1970.0, 0.81),
    (1975.0, 0.825),
    (1980.0, 0.83),
    (1985.0, 0.835),
    (1990.0, 0.84),
    (1995.0, 0.845),
    (2001.0, 0.86),
    (2005.0, 0.82),
];

/// Births in millions by birth year.
#[allow(clippy::approx_constant)]
const BIRTHS: [(f64, f64); 34] = [
    (1855.0, 1.35),
    (1870.0, 1.6),
    (1880.0, 1.85),
    (1890.0, 2.05),
    (1900.0, 2.35),
    (1910.0, 2.75),
    (1915.0, 2.97),
    (1920.0, 2.95),
    (1921.0, 3.06),
    (1925.0, 2.91),
    (1930.0, 2.62),
    (1933.0, 2.31),
    (1935.0, 2.38),
    (1940.0, 2.56),
    (1943.0, 3.10),
    (1945.0, 2.86),
    (1946.0, 3.41),
    (1947.0, 3.82),
    (1950.0, 3.63),
    (1952.0, 3.91),
    (1955.0, 4.10),
    (1957.0, 4.31),
    (1960.0, 4.26),
    (1962.0, 4.17),
    (1964.0, 4.03),
    (1965.0, 3.76),
    (1967.0, 3.52),
    (1970.0, 3.73),
    (1972.0, 3.26),
    (1975.0, 3.14),
    (1978.0, 3.33),
    (1980.0, 3.61),
    (1985.0, 3.76),
    (1990.0, 4.16),
];

/// Decennial age-group totals in millions: 15-24, 25-34, 35-44, 45-54,
/// 55-64, 65+.
const CENSUS: [(f64, [f64; 6]); 7] = [
    (1950.0, [22.1, 24.0, 21.5, 17.4, 13.4, 12.4]),
    (1960.0, [24.0, 22.9, 24.2, 20.6, 15.6, 16.6]),
    (1970.0, [36.0, 25.3, 23.1, 23.3, 18.6, 20.0]),
    (1980.0, [42.5, 37.1, 25.6, 22.8, 21.7, 25.5]),
    (1990.0, [37.0, 43.2, 37.6, 25.2, 21.1, 31.2]),
    (2000.0, [39.2, 39.9, 45.1, 37.7, 24.3, 35.0]),
    (2005.0, [42.0, 40.0, 43.8, 42.7, 30.5, 36.8]),
];

const GROUP_EDGES: [u32; 7] = [15, 25, 35, 45, 55, 65, OLDEST_AGE + 1];
const GROUP_MIDS: [f64; 6] = [20.0, 30.0, 40.0, 50.0, 60.0, 75.0];

/// Real GDP, billions: growth rates chained and bent through the anchors.
pub fn real_gdp() -> Vec<f64> {
    let mut chained = vec![1.0; 59];
    for i in 1..59 {
        chained[i] = chained[i - 1] * (1.0 + REAL_GROWTH[i - 1] / 100.0);
    }
    let ax: Vec<f64> = REAL_ANCHORS.iter().map(|a| a.0).collect();
    let resid: Vec<f64> = REAL_ANCHORS
        .iter()
        .map(|&(y, v)| v.ln() - chained[idx(y as i32)].ln())
        .collect();
    years()
        .map(|y| chained[idx(y)] * interp(y as f64, &ax, &resid).exp())
        .collect()
}

pub fn nominal_gdp(year: i32) -> f64 {
    NOMINAL_GDP[idx(year)]
}

pub fn coverage(year: i32) -> f64 {
    interp_pairs(year as f64, &COVERAGE)
}

pub fn gpi_ratio(year: i32) -> f64 {
    interp_pairs(year as f64, &GPI_RATIO)
}

fn births(birth_year: f64) -> f64 {
    interp_pairs(birth_year, &BIRTHS)
}

/// Gompertz-Makeham survival to `age` with mortality improving over time.
fn survival(age: f64, year: f64) -> f64 {
    let t = (year - 1900.0) / 100.0;
    let a = 0.004 * (-1.6 * t).exp() + 0.0004;
    let b = 1.5e-4 * (-t).exp();
    let theta = 0.088;
    (-a * age - b / theta * ((theta * age).exp() - 1.0)).exp() * (0.80 + 0.19 * t.clamp(0.0, 1.0))
}

fn immigration(birth: f64, year: f64) -> f64 {
    let mut f = 1.0;
    if birth < 1915.0 {
        f *= 1.0 + 0.35 * ((1915.0 - birth) / 25.0).min(1.0);
    }
    if birth >= 1930.0 {
        f *= 1.0
            + 0.22 * ((year - 1968.0) / 37.0).clamp(0.0, 1.0) * ((birth - 1930.0) / 30.0).min(1.0);
    }
    f
}

/// Cohort-component estimate for ages 15..=85, the last entry holding 85+.
fn raw_ages(year: i32) -> Vec<f64> {
    let y = year as f64;
    let all: Vec<f64> = (15..120)
        .map(|a| {
            let a = a as f64;
            let b = y - a;
            births(b) * survival(a, b + 0.6 * a) * immigration(b, y)
        })
        .collect();
    let open = (OLDEST_AGE - 15) as usize;
    let mut out = all[..open].to_vec();
    out.push(all[open..].iter().sum());
    out
}

fn groups(row: &[f64]) -> [f64; 6] {
    let mut g = [0.0; 6];
    for (i, w) in GROUP_EDGES.windows(2).enumerate() {
        g[i] = row[(w[0] - 15) as usize..(w[1] - 15) as usize].iter().sum();
    }
    g
}

/// Population by single year of age (15..=85, 85 meaning 85+), millions,
/// calibrated to the decennial group totals.
pub fn age_structure() -> Vec<Vec<f64>> {
    let census_years: Vec<f64> = CENSUS.iter().map(|c| c.0).collect();
    let factors: Vec<[f64; 6]> = CENSUS
        .iter()
        .map(|(cy, totals)| {
            let g = groups(&raw_ages(*cy as i32));
            std::array::from_fn(|i| totals[i] / g[i])
        })
        .collect();
    years()
        .map(|year| {
            let f: Vec<f64> = (0..6)
                .map(|i| {
                    let col: Vec<f64> = factors.iter().map(|f| f[i]).collect();
                    interp(year as f64, &census_years, &col)
                })
                .collect();
            raw_ages(year)
                .iter()
                .enumerate()
                .map(|(j, v)| v * interp(15.0 + j as f64, &GROUP_MIDS, &f))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interp_clamps() {
        let xs = [0.0, 1.0, 3.0];
        let ys = [0.0, 2.0, 4.0];
        assert_eq!(interp(-1.0, &xs, &ys), 0.0);
        assert_eq!(interp(2.0, &xs, &ys), 3.0);
        assert_eq!(interp(9.0, &xs, &ys), 4.0);
        assert_eq!(interp(1.0, &xs, &ys), 2.0);
    }

    #[test]
    fn anchors_are_hit() {
        let g = real_gdp();
        assert!((g[0] - 1570.5).abs() < 1e-9);
        assert!((g[58] - 11048.6).abs() < 1e-9);
    }

    #[test]
    fn census_years_close_to_group_totals() {
        let ages = age_structure();
        let g = groups(&ages[idx(1990)]);
        for (a, b) in g.iter().zip([37.0, 43.2, 37.6, 25.2, 21.1, 31.2]) {
            assert!((a / b - 1.0).abs() < 0.05, "{a} vs {b}");
        }
    }
}
