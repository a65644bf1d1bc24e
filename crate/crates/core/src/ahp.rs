//! Pairwise-comparison judgment matrices, indicator weights, consistency
//! ratios and weighted round scoring.
//!
//! Judgments use the 1–9 scale and its reciprocals:
//!
//! | value | meaning                        |
//! |-------|--------------------------------|
//! | 1     | equally important              |
//! | 3     | slightly more important        |
//! | 5     | obviously more important       |
//! | 7     | much more important            |
//! | 9     | extremely more important       |
//! | 2,4,6,8 | intermediate                 |
//! | 1/x   | the inverse comparison         |

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Random consistency index for orders 1..=9.
pub const RANDOM_INDEX: [f64; 9] = [0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45];

pub fn random_index(n: usize) -> Option<f64> {
    n.checked_sub(1).and_then(|i| RANDOM_INDEX.get(i).copied())
}

/// Positive reciprocal matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgmentMatrix<F> {
    n: usize,
    entries: Vec<F>,
}

impl<F: Scalar> JudgmentMatrix<F> {
    /// All-ones matrix of order `n`.
    pub fn ones(n: usize) -> Self {
        Self { n, entries: vec![F::one(); n * n] }
    }

    /// Builds from `(i, j, a_ij)` judgments (0-based). Unspecified pairs are 1;
    /// `a_ji` is set to `1/a_ij`.
    pub fn build(n: usize, judgments: &[(usize, usize, F)]) -> Result<Self> {
        let mut m = Self::ones(n);
        let mut seen = vec![false; n * n];
        let lo = F::lit(1.0 / 9.0) * (F::one() - F::lit(1e-12));
        let hi = F::lit(9.0) * (F::one() + F::lit(1e-12));
        for &(i, j, v) in judgments {
            if i >= n || j >= n || i == j {
                return Err(Error::Domain(format!("invalid pair ({i}, {j}) for order {n}")));
            }
            if !(v > F::zero()) || !v.is_finite() {
                return Err(Error::Domain(format!("judgment for ({i}, {j}) must be positive, got {v}")));
            }
            if v < lo || v > hi {
                return Err(Error::Domain(format!("judgment {v} for ({i}, {j}) outside [1/9, 9]")));
            }
            let (a, b, v) = if i < j { (i, j, v) } else { (j, i, F::one() / v) };
            if seen[a * n + b] {
                return Err(Error::ConflictingPair(a, b));
            }
            seen[a * n + b] = true;
            m.entries[a * n + b] = v;
            m.entries[b * n + a] = F::one() / v;
        }
        Ok(m)
    }

    /// Validates a full matrix: positive, unit diagonal, reciprocal within 1e-9.
    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let mut entries = Vec::with_capacity(n * n);
        for r in &rows {
            if r.len() != n {
                return Err(Error::Shape { expected: n, got: r.len() });
            }
            entries.extend_from_slice(r);
        }
        let tol = F::lit(1e-9);
        for i in 0..n {
            if (entries[i * n + i] - F::one()).abs() > tol {
                return Err(Error::Domain(format!("diagonal entry {i} is not 1")));
            }
            for j in 0..n {
                let a = entries[i * n + j];
                if !(a > F::zero()) || !a.is_finite() {
                    return Err(Error::Domain(format!("entry ({i}, {j}) must be positive")));
                }
                if (a * entries[j * n + i] - F::one()).abs() > tol {
                    return Err(Error::Domain(format!("entries ({i}, {j}) and ({j}, {i}) are not reciprocal")));
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<F>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// `a_ij = w_i / w_j`; a perfectly consistent matrix.
    pub fn from_weights(w: &[F]) -> Result<Self> {
        if w.iter().any(|&x| !(x > F::zero())) {
            return Err(Error::Domain("weights must be positive".into()));
        }
        let n = w.len();
        let mut entries = Vec::with_capacity(n * n);
        for &wi in w {
            for &wj in w {
                entries.push(wi / wj);
            }
        }
        Ok(Self { n, entries })
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        (0..self.n).map(|i| crate::scalar::dot(self.row(i), v)).collect()
    }
}

/// Parses a square, header-free CSV matrix. Cells may be decimals or `p/q`.
pub fn parse_matrix_csv<F: Scalar>(text: &str) -> Result<JudgmentMatrix<F>> {
    let rows = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').map(|c| parse_cell(c.trim())).collect::<Result<Vec<F>>>())
        .collect::<Result<Vec<_>>>()?;
    JudgmentMatrix::from_rows(rows)
}

fn parse_cell<F: Scalar>(cell: &str) -> Result<F> {
    let bad = || Error::Domain(format!("cannot parse judgment {cell:?}"));
    let v = match cell.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            p / q
        }
        None => cell.parse().map_err(|_| bad())?,
    };
    Ok(F::lit(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMethod {
    /// `W_i = (Σ_j a_ij + n/2 − 1) / (n(n−1))`, renormalized
    Eq21,
    /// normalized row geometric means
    #[default]
    GeometricMean,
    /// principal eigenvector by power iteration
    Eigenvector,
}

pub fn weights<F: Scalar>(m: &JudgmentMatrix<F>, method: WeightMethod) -> Result<Vec<F>> {
    let n = m.order();
    if n < 2 {
        return Err(Error::Domain("weights need an order of at least 2".into()));
    }
    let raw: Vec<F> = match method {
        WeightMethod::Eq21 => {
            let nf = F::count(n);
            let half = nf / F::lit(2.0);
            (0..n)
                .map(|i| (m.row(i).iter().copied().sum::<F>() + half - F::one()) / (nf * (nf - F::one())))
                .collect()
        }
        WeightMethod::GeometricMean => {
            let inv = F::one() / F::count(n);
            (0..n)
                .map(|i| (m.row(i).iter().map(|a| a.ln()).sum::<F>() * inv).exp())
                .collect()
        }
        WeightMethod::Eigenvector => principal_eigenvector(m),
    };
    let total: F = raw.iter().copied().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

fn principal_eigenvector<F: Scalar>(m: &JudgmentMatrix<F>) -> Vec<F> {
    let n = m.order();
    let mut v = vec![F::one() / F::count(n); n];
    for _ in 0..10_000 {
        let mut next = m.mul_vec(&v);
        let s: F = next.iter().copied().sum();
        next.iter_mut().for_each(|x| *x = *x / s);
        let delta = next.iter().zip(&v).map(|(a, b)| (*a - *b).abs()).fold(F::zero(), F::max);
        v = next;
        if delta <= F::epsilon() * F::lit(4.0) {
            break;
        }
    }
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AhpResult<F> {
    pub weights: Vec<F>,
    pub lambda_max: F,
    pub ci: F,
    pub cr: F,
    pub consistent: bool,
}

/// Threshold below which a consistency ratio is acceptable.
pub const CR_THRESHOLD: f64 = 0.1;

/// Consistency check with the standard random index table (orders ≤ 9).
pub fn consistency<F: Scalar>(m: &JudgmentMatrix<F>, w: &[F]) -> Result<AhpResult<F>> {
    let n = m.order();
    let ri = random_index(n).ok_or(Error::MissingRandomIndex(n))?;
    consistency_with_ri(m, w, F::lit(ri))
}

/// Consistency check with a caller-supplied random index.
///
/// `λ_max` is the mean of `(A·w)_i / w_i`; `CR` is 0 for orders ≤ 2.
pub fn consistency_with_ri<F: Scalar>(m: &JudgmentMatrix<F>, w: &[F], ri: F) -> Result<AhpResult<F>> {
    let n = m.order();
    if w.len() != n {
        return Err(Error::Shape { expected: n, got: w.len() });
    }
    if w.iter().any(|&x| !(x > F::zero())) {
        return Err(Error::Domain("weights must be positive".into()));
    }
    let aw = m.mul_vec(w);
    let lambda_max = aw.iter().zip(w).map(|(&a, &b)| a / b).sum::<F>() / F::count(n);
    let nf = F::count(n);
    let ci = if n > 1 { (lambda_max - nf) / (nf - F::one()) } else { F::zero() };
    let cr = if n <= 2 {
        F::zero()
    } else if ri > F::zero() {
        ci / ri
    } else {
        return Err(Error::MissingRandomIndex(n));
    };
    let total: F = w.iter().copied().sum();
    Ok(AhpResult {
        weights: w.iter().map(|&x| x / total).collect(),
        lambda_max,
        ci,
        cr,
        consistent: cr < F::lit(CR_THRESHOLD),
    })
}

/// Weights then consistency in one call.
pub fn evaluate<F: Scalar>(m: &JudgmentMatrix<F>, method: WeightMethod) -> Result<AhpResult<F>> {
    let w = weights(m, method)?;
    consistency(m, &w)
}

/// Composite ratio `Σ CI(j)·a_j / Σ RI(j)·a_j` over `(CI, RI, a_j)` triples.
pub fn composite_cr<F: Scalar>(layers: &[(F, F, F)]) -> Result<F> {
    let num: F = layers.iter().map(|&(ci, _, a)| ci * a).sum();
    let den: F = layers.iter().map(|&(_, ri, a)| ri * a).sum();
    if den <= F::zero() {
        return Err(Error::Domain("composite random index is zero".into()));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundScores<F> {
    pub scores: Vec<F>,
    /// score / Σ scores
    pub standardized: Vec<F>,
    /// 1 = best; equal scores share a rank
    pub ranking: Vec<usize>,
}

/// Min-max normalizes each indicator column (a constant column maps to ½)
/// and scores every round by the weighted sum.
pub fn score_rounds<F: Scalar>(indicators: &[Vec<F>], w: &[F]) -> Result<RoundScores<F>> {
    let cols = w.len();
    if indicators.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(r) = indicators.iter().find(|r| r.len() != cols) {
        return Err(Error::Shape { expected: cols, got: r.len() });
    }
    let total_w: F = w.iter().copied().sum();
    if (total_w - F::one()).abs() > F::lit(1e-9) || w.iter().any(|&x| x < F::zero()) {
        return Err(Error::Domain("indicator weights must be non-negative and sum to 1".into()));
    }
    let ranges: Vec<(F, F)> = (0..cols)
        .map(|j| {
            indicators.iter().fold((F::infinity(), F::neg_infinity()), |(lo, hi), r| (lo.min(r[j]), hi.max(r[j])))
        })
        .collect();
    let scores: Vec<F> = indicators
        .iter()
        .map(|r| {
            r.iter()
                .zip(&ranges)
                .zip(w)
                .map(|((&x, &(lo, hi)), &wj)| {
                    let norm = if hi > lo { (x - lo) / (hi - lo) } else { F::lit(0.5) };
                    wj * norm
                })
                .sum()
        })
        .collect();
    let sum: F = scores.iter().copied().sum();
    let standardized = scores
        .iter()
        .map(|&s| if sum > F::zero() { s / sum } else { F::zero() })
        .collect();
    Ok(RoundScores { ranking: dense_rank(&scores), scores, standardized })
}

/// Dense ranking, highest score first. Scores within a relative 1e-9 of a
/// group's leading score share its rank, so rounding noise does not split ties.
pub fn dense_rank<F: Scalar>(scores: &[F]) -> Vec<usize> {
    let scale = scores.iter().fold(F::one(), |m, s| m.max(s.abs()));
    let tol = F::lit(1e-9) * scale;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(std::cmp::Ordering::Equal));
    let mut ranks = vec![0; scores.len()];
    let mut rank = 0;
    let mut lead: Option<F> = None;
    for i in order {
        if lead.is_none_or(|l| l - scores[i] > tol) {
            rank += 1;
            lead = Some(scores[i]);
        }
        ranks[i] = rank;
    }
    ranks
}
