//! Synthetic survey tables: a gamma body with a Pareto top in units of GPI
//! per person with income, binned and sampled at survey scale.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use statrs::distribution::{ContinuousCDF, Gamma};

const BODY_SHAPE: f64 = 1.8;
const TAIL_START: f64 = 1.8;
const TAIL_INDEX: f64 = 2.130_211_03;
const TAIL_WEIGHT: f64 = 0.059_303_08;
/// Mean income over GPI per person with income.
const MEAN_RATIO: f64 = 0.73;

pub struct IncomeLaw {
    body: Gamma,
    body_moment: Gamma,
    scale: f64,
}

impl IncomeLaw {
    pub fn new() -> Self {
        let tail_mean = TAIL_INDEX / (TAIL_INDEX - 1.0) * TAIL_START;
        let scale = (MEAN_RATIO - TAIL_WEIGHT * tail_mean) / (1.0 - TAIL_WEIGHT) / BODY_SHAPE;
        Self {
            body: Gamma::new(BODY_SHAPE, 1.0 / scale).expect("valid gamma"),
            body_moment: Gamma::new(BODY_SHAPE + 1.0, 1.0 / scale).expect("valid gamma"),
            scale,
        }
    }

    fn gamma_cdf(g: &Gamma, z: f64) -> f64 {
        if z.is_infinite() {
            1.0
        } else {
            g.cdf(z)
        }
    }

    pub fn cdf(&self, z: f64) -> f64 {
        let tail = if z > TAIL_START {
            1.0 - (TAIL_START / z).powf(TAIL_INDEX)
        } else {
            0.0
        };
        (1.0 - TAIL_WEIGHT) * Self::gamma_cdf(&self.body, z) + TAIL_WEIGHT * tail
    }

    /// First moment over `[a, b)`.
    pub fn partial_mean(&self, a: f64, b: f64) -> f64 {
        let body = BODY_SHAPE
            * self.scale
            * (Self::gamma_cdf(&self.body_moment, b) - Self::gamma_cdf(&self.body_moment, a));
        let c = TAIL_INDEX / (TAIL_INDEX - 1.0) * TAIL_START.powf(TAIL_INDEX);
        let lo = a.max(TAIL_START);
        let hi_term = if b.is_infinite() {
            0.0
        } else {
            b.max(TAIL_START).powf(1.0 - TAIL_INDEX)
        };
        let tail = c * (lo.powf(1.0 - TAIL_INDEX) - hi_term);
        (1.0 - TAIL_WEIGHT) * body + TAIL_WEIGHT * tail
    }
}

/// Draws a multinomial sample of `n` over cells with probabilities `p`.
pub fn multinomial(rng: &mut ChaCha8Rng, n: u64, p: &[f64]) -> Vec<u64> {
    let mut left = n;
    let mut mass = 1.0;
    let mut out = Vec::with_capacity(p.len());
    for &pi in p {
        let k = if left == 0 || mass <= 0.0 {
            0
        } else {
            let q = (pi / mass).clamp(0.0, 1.0);
            Binomial::new(left, q).expect("valid binomial").sample(rng)
        };
        out.push(k);
        left -= k;
        mass -= pi;
    }
    out
}

pub fn rng_for(year: i32) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x1947_2005 ^ year as u64)
}

/// Rounds to whole persons while keeping the exact integer total.
pub fn round_preserving(values: &[f64], total: f64) -> Vec<f64> {
    let mut out: Vec<f64> = values.iter().map(|v| v.round()).collect();
    let diff = total.round() - out.iter().sum::<f64>();
    if let Some(i) = (0..out.len()).max_by(|&a, &b| out[a].total_cmp(&out[b])) {
        out[i] += diff;
    }
    out
}
