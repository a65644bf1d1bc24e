//! Momentum versus winning: similarity measures, a quadratic response
//! surface, and a permutation test of the "it is all random" hypothesis.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Player;
use crate::linalg::lstsq;
use crate::momentum::{momentum_series, MomentumParams};
use crate::scalar::{dot, mean, norm, variance, Scalar};

pub fn cosine_similarity<F: Scalar>(a: &[F], b: &[F]) -> Result<F> {
    if a.len() != b.len() {
        return Err(Error::Shape { expected: a.len(), got: b.len() });
    }
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (na, nb) = (norm(a), norm(b));
    if na == F::zero() || nb == F::zero() {
        return Err(Error::ZeroVector);
    }
    // rounding can push |cos| a hair past 1
    Ok((dot(a, b) / (na * nb)).max(-F::one()).min(F::one()))
}

pub fn euclidean_distance<F: Scalar>(a: &[F], b: &[F]) -> Result<F> {
    if a.len() != b.len() {
        return Err(Error::Shape { expected: a.len(), got: b.len() });
    }
    Ok(a.iter().zip(b).map(|(&x, &y)| (y - x) * (y - x)).sum::<F>().sqrt())
}

/// Running share of points won by `player` up to and including each point.
pub fn cumulative_win_rate<F: Scalar>(victors: &[Player], player: Player) -> Vec<F> {
    let mut won = 0usize;
    victors
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v == player {
                won += 1;
            }
            F::count(won) / F::count(i + 1)
        })
        .collect()
}

/// `z ≈ p00 + p10·x + p01·y + p20·x² + p11·x·y + p02·y²`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceFit<F> {
    pub p00: F,
    pub p10: F,
    pub p01: F,
    pub p20: F,
    pub p11: F,
    pub p02: F,
    /// 1 − SSE/SST; defined as 1 when SST = 0
    pub r_squared: F,
    pub sse: F,
    pub residuals: Vec<F>,
    /// (min, max) of x and y over the samples
    pub x_range: (F, F),
    pub y_range: (F, F),
}

pub fn poly22_basis<F: Scalar>(x: F, y: F) -> [F; 6] {
    [F::one(), x, y, x * x, x * y, y * y]
}

impl<F: Scalar> SurfaceFit<F> {
    pub fn coefficients(&self) -> [F; 6] {
        [self.p00, self.p10, self.p01, self.p20, self.p11, self.p02]
    }

    pub fn predict(&self, x: F, y: F) -> F {
        dot(&poly22_basis(x, y), &self.coefficients())
    }

    /// `nx × ny` grid over the sampled ranges as CSV `x,y,z_hat`.
    pub fn write_grid_csv<W: Write>(&self, nx: usize, ny: usize, out: W) -> Result<()> {
        if nx < 2 || ny < 2 {
            return Err(Error::Spec("grid needs at least 2 points per axis".into()));
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "z_hat"])?;
        let at = |(lo, hi): (F, F), i: usize, n: usize| lo + (hi - lo) * F::count(i) / F::count(n - 1);
        for i in 0..nx {
            let x = at(self.x_range, i, nx);
            for j in 0..ny {
                let y = at(self.y_range, j, ny);
                w.write_record([x.to_string(), y.to_string(), self.predict(x, y).to_string()])?;
            }
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

pub fn fit_poly22<F: Scalar>(samples: &[(F, F, F)]) -> Result<SurfaceFit<F>> {
    if samples.len() < 6 {
        return Err(Error::InsufficientData(format!("poly22 needs at least 6 samples, got {}", samples.len())));
    }
    let design: Vec<Vec<F>> = samples.iter().map(|&(x, y, _)| poly22_basis(x, y).to_vec()).collect();
    let z: Vec<F> = samples.iter().map(|s| s.2).collect();
    let c = lstsq(&design, &z)?;
    let residuals: Vec<F> = design.iter().zip(&z).map(|(row, &zi)| zi - dot(row, &c)).collect();
    let sse: F = residuals.iter().map(|&r| r * r).sum();
    let zbar = mean(&z);
    let sst: F = z.iter().map(|&zi| (zi - zbar) * (zi - zbar)).sum();
    let r_squared = if sst > F::zero() { F::one() - sse / sst } else { F::one() };
    let range = |f: fn(&(F, F, F)) -> F| {
        samples.iter().map(f).fold((F::infinity(), F::neg_infinity()), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    Ok(SurfaceFit {
        p00: c[0],
        p10: c[1],
        p01: c[2],
        p20: c[3],
        p11: c[4],
        p02: c[5],
        r_squared,
        sse,
        residuals,
        x_range: range(|s| s.0),
        y_range: range(|s| s.1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// population variance of player one's momentum series
    #[default]
    MomentumVariance,
    /// longest run by either player
    MaxStreak,
    /// lag-1 autocorrelation of player one's ±1 outcomes
    Lag1Autocorr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationConfig {
    pub statistic: Statistic,
    pub n_permutations: usize,
    pub seed: u64,
    /// shuffle separately among points served by each player
    pub stratify_by_server: bool,
    pub parallel: bool,
}

impl Default for PermutationConfig {
    fn default() -> Self {
        Self { statistic: Statistic::default(), n_permutations: 999, seed: 7, stratify_by_server: false, parallel: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullSummary {
    pub mean: f64,
    pub sd: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationReport {
    pub statistic: Statistic,
    pub observed: f64,
    pub null: NullSummary,
    pub exceedances: usize,
    pub p_value: f64,
    pub n_permutations: usize,
    pub seed: u64,
    pub stratified: bool,
    pub warnings: Vec<String>,
}

pub const MIN_PERMUTATIONS: usize = 99;
pub const MIN_POINTS: usize = 20;

/// Longest run of identical consecutive victors.
pub fn max_streak(victors: &[Player]) -> usize {
    let mut best = 0;
    let mut run = 0;
    for (i, v) in victors.iter().enumerate() {
        run = if i > 0 && victors[i - 1] == *v { run + 1 } else { 1 };
        best = best.max(run);
    }
    best
}

/// Lag-1 autocorrelation of the ±1 outcome sequence; 0 when it is constant.
pub fn lag1_autocorr(victors: &[Player]) -> f64 {
    let x: Vec<f64> = victors.iter().map(|&v| if v == Player::One { 1.0 } else { -1.0 }).collect();
    let m = mean(&x);
    let den: f64 = x.iter().map(|&a| (a - m) * (a - m)).sum();
    if den == 0.0 {
        return 0.0;
    }
    x.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum::<f64>() / den
}

pub fn statistic_value(stat: Statistic, victors: &[Player], params: &MomentumParams) -> Result<f64> {
    Ok(match stat {
        Statistic::MomentumVariance => {
            let s = momentum_series::<f64>(victors, params)?;
            variance(&s.p1.momentum)
        }
        Statistic::MaxStreak => max_streak(victors) as f64,
        Statistic::Lag1Autocorr => lag1_autocorr(victors),
    })
}

/// Random generator of permutation `i`: its own stream of the seed, so the
/// draws do not depend on evaluation order.
pub fn permutation_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng
}

fn shuffled(victors: &[Player], strata: &[Vec<usize>], rng: &mut ChaCha8Rng) -> Vec<Player> {
    let mut out = victors.to_vec();
    for idx in strata {
        let mut vals: Vec<Player> = idx.iter().map(|&i| victors[i]).collect();
        vals.shuffle(rng);
        for (&i, v) in idx.iter().zip(vals) {
            out[i] = v;
        }
    }
    out
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Permutation test of whether a timeline has more structure than shuffled
/// copies of itself. `servers` is only needed for stratification.
pub fn randomness_test(
    victors: &[Player],
    servers: Option<&[Player]>,
    params: &MomentumParams,
    cfg: &PermutationConfig,
) -> Result<PermutationReport> {
    if cfg.n_permutations < MIN_PERMUTATIONS {
        return Err(Error::Config(format!("at least {MIN_PERMUTATIONS} permutations required, got {}", cfg.n_permutations)));
    }
    if victors.len() < MIN_POINTS {
        return Err(Error::InsufficientData(format!("at least {MIN_POINTS} points required, got {}", victors.len())));
    }
    let strata: Vec<Vec<usize>> = match (cfg.stratify_by_server, servers) {
        (false, _) => vec![(0..victors.len()).collect()],
        (true, Some(s)) if s.len() == victors.len() => [Player::One, Player::Two]
            .iter()
            .map(|&p| (0..s.len()).filter(|&i| s[i] == p).collect())
            .collect(),
        (true, Some(s)) => return Err(Error::Shape { expected: victors.len(), got: s.len() }),
        (true, None) => return Err(Error::Config("stratification needs the server sequence".into())),
    };

    let mut warnings = Vec::new();
    if victors.iter().all(|&v| v == victors[0]) {
        warnings.push("degenerate null: one player won every point, all permutations are identical".to_string());
    }

    let observed = statistic_value(cfg.statistic, victors, params)?;
    let one = |i: usize| -> Result<f64> {
        let mut rng = permutation_rng(cfg.seed, i);
        statistic_value(cfg.statistic, &shuffled(victors, &strata, &mut rng), params)
    };
    let null: Vec<f64> = if cfg.parallel {
        (0..cfg.n_permutations).into_par_iter().map(one).collect::<Result<_>>()?
    } else {
        (0..cfg.n_permutations).map(one).collect::<Result<_>>()?
    };

    let exceedances = null.iter().filter(|&&v| v >= observed).count();
    let p_value = (1 + exceedances) as f64 / (1 + cfg.n_permutations) as f64;
    let mut sorted = null.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(PermutationReport {
        statistic: cfg.statistic,
        observed,
        null: NullSummary {
            mean: mean(&null),
            sd: variance(&null).sqrt(),
            q05: quantile(&sorted, 0.05),
            q50: quantile(&sorted, 0.5),
            q95: quantile(&sorted, 0.95),
        },
        exceedances,
        p_value,
        n_permutations: cfg.n_permutations,
        seed: cfg.seed,
        stratified: cfg.stratify_by_server,
        warnings,
    })
}
