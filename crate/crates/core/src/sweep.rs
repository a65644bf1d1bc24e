//! Grid sensitivity of a learned momentum response to one or two indicators,
//! under serve-first and serve-second contexts, with crossover detection.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::lstsq;
use crate::scalar::Scalar;

/// Binary context feature overridden by every sweep.
pub const SERVE_FEATURE: &str = "serve_indicator";

/// Upper bound on 2-D grid cells.
pub const MAX_CELLS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Context {
    ServeFirst,
    ServeSecond,
}

impl Context {
    pub const BOTH: [Context; 2] = [Context::ServeFirst, Context::ServeSecond];

    pub fn indicator<F: Scalar>(self) -> F {
        match self {
            Context::ServeFirst => F::one(),
            Context::ServeSecond => F::zero(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Context::ServeFirst => "serve_first",
            Context::ServeSecond => "serve_second",
        }
    }
}

/// Anything that maps a full feature vector to a momentum value.
pub trait ResponseModel<F: Scalar>: Sync {
    fn feature_names(&self) -> &[String];
    fn evaluate(&self, features: &[F]) -> F;

    fn feature_index(&self, name: &str) -> Result<usize> {
        self.feature_names()
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownIndicator(name.to_string()))
    }
}

/// Closure-backed response, mostly for fixtures.
pub struct FnResponse<G> {
    names: Vec<String>,
    f: G,
}

impl<G> FnResponse<G> {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>, f: G) -> Self {
        Self { names: names.into_iter().map(Into::into).collect(), f }
    }
}

impl<F: Scalar, G: Fn(&[F]) -> F + Sync> ResponseModel<F> for FnResponse<G> {
    fn feature_names(&self) -> &[String] {
        &self.names
    }

    fn evaluate(&self, features: &[F]) -> F {
        (self.f)(features)
    }
}

/// Per-feature quadratic with serve interactions on standardized inputs:
///
/// `y = c₀ + c_s·s + Σ_j (a_j·z_j + b_j·z_j² + c_j·s·z_j)`, `z_j = (x_j − μ_j)/σ_j`
///
/// where `s` is the raw serve indicator. Entries of `linear`, `quadratic` and
/// `interaction` at the serve feature's position are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticResponse<F> {
    pub feature_names: Vec<String>,
    pub serve_feature: String,
    pub mean: Vec<F>,
    pub std: Vec<F>,
    pub intercept: F,
    pub serve: F,
    pub linear: Vec<F>,
    pub quadratic: Vec<F>,
    pub interaction: Vec<F>,
}

impl<F: Scalar> QuadraticResponse<F> {
    pub fn validate(&self) -> Result<()> {
        let p = self.feature_names.len();
        for v in [&self.mean, &self.std, &self.linear, &self.quadratic, &self.interaction] {
            if v.len() != p {
                return Err(Error::Shape { expected: p, got: v.len() });
            }
        }
        self.serve_index()?;
        if self.std.iter().any(|&s| !(s > F::zero())) {
            return Err(Error::Domain("feature scales must be positive".into()));
        }
        Ok(())
    }

    fn serve_index(&self) -> Result<usize> {
        self.feature_names
            .iter()
            .position(|n| *n == self.serve_feature)
            .ok_or_else(|| Error::UnknownIndicator(self.serve_feature.clone()))
    }

    /// Ridge fit (intercept unpenalized). Constant features get unit scale.
    pub fn fit(rows: &[Vec<F>], target: &[F], names: &[String], serve_feature: &str, ridge: F) -> Result<Self> {
        let p = names.len();
        if rows.is_empty() {
            return Err(Error::EmptyInput);
        }
        if rows.len() != target.len() {
            return Err(Error::Shape { expected: rows.len(), got: target.len() });
        }
        if let Some(r) = rows.iter().find(|r| r.len() != p) {
            return Err(Error::Shape { expected: p, got: r.len() });
        }
        let si = names
            .iter()
            .position(|n| n == serve_feature)
            .ok_or_else(|| Error::UnknownIndicator(serve_feature.to_string()))?;
        let nf = F::count(rows.len());
        let mean: Vec<F> = (0..p).map(|j| rows.iter().map(|r| r[j]).sum::<F>() / nf).collect();
        let std: Vec<F> = (0..p)
            .map(|j| {
                let v = rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<F>() / nf;
                if v > F::epsilon() { v.sqrt() } else { F::one() }
            })
            .collect();
        let others: Vec<usize> = (0..p).filter(|&j| j != si).collect();
        let expand = |r: &[F]| -> Vec<F> {
            let s = r[si];
            let mut out = vec![F::one(), s];
            for &j in &others {
                let z = (r[j] - mean[j]) / std[j];
                out.extend([z, z * z, s * z]);
            }
            out
        };
        let mut design: Vec<Vec<F>> = rows.iter().map(|r| expand(r)).collect();
        let mut y = target.to_vec();
        let cols = design[0].len();
        let lam = ridge.max(F::zero()).sqrt();
        for c in 1..cols {
            let mut row = vec![F::zero(); cols];
            row[c] = lam;
            design.push(row);
            y.push(F::zero());
        }
        let c = lstsq(&design, &y)?;
        let mut linear = vec![F::zero(); p];
        let mut quadratic = vec![F::zero(); p];
        let mut interaction = vec![F::zero(); p];
        for (k, &j) in others.iter().enumerate() {
            linear[j] = c[2 + 3 * k];
            quadratic[j] = c[3 + 3 * k];
            interaction[j] = c[4 + 3 * k];
        }
        Ok(Self {
            feature_names: names.to_vec(),
            serve_feature: serve_feature.to_string(),
            mean,
            std,
            intercept: c[0],
            serve: c[1],
            linear,
            quadratic,
            interaction,
        })
    }

    /// Training means, a natural sweep baseline.
    pub fn baseline(&self) -> Vec<F> {
        self.mean.clone()
    }
}

impl<F: Scalar> ResponseModel<F> for QuadraticResponse<F> {
    fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    fn evaluate(&self, x: &[F]) -> F {
        let si = self.serve_index().unwrap_or(usize::MAX);
        let s = x.get(si).copied().unwrap_or_else(F::zero);
        let mut y = self.intercept + self.serve * s;
        for (j, &xj) in x.iter().enumerate() {
            if j == si {
                continue;
            }
            let z = (xj - self.mean[j]) / self.std[j];
            y = y + self.linear[j] * z + self.quadratic[j] * z * z + self.interaction[j] * s * z;
        }
        y
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis<F> {
    pub indicator: String,
    pub lo: F,
    pub hi: F,
    pub step: F,
}

impl<F: Scalar> Axis<F> {
    /// `lo, lo+step, …` up to `hi` (inclusive within rounding).
    pub fn grid(&self) -> Result<Vec<F>> {
        if !(self.lo < self.hi) {
            return Err(Error::Spec(format!("{}: lo must be below hi", self.indicator)));
        }
        if !(self.step > F::zero()) {
            return Err(Error::Spec(format!("{}: step must be positive", self.indicator)));
        }
        let steps = ((self.hi - self.lo) / self.step + F::lit(1e-9)).floor();
        let n = steps.to_usize().unwrap_or(0) + 1;
        if n < 2 {
            return Err(Error::Spec(format!("{}: grid has fewer than 2 points", self.indicator)));
        }
        Ok((0..n).map(|i| self.lo + self.step * F::count(i)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec<F> {
    /// one or two axes
    pub axes: Vec<Axis<F>>,
    /// full feature vector the sweep perturbs
    pub baseline: Vec<F>,
    pub tolerance: F,
}

impl<F: Scalar> SweepSpec<F> {
    pub fn new(axes: Vec<Axis<F>>, baseline: Vec<F>) -> Self {
        Self { axes, baseline, tolerance: F::lit(DEFAULT_TOLERANCE) }
    }
}

pub const DEFAULT_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing<F> {
    /// interpolated indicator values of the crossing
    pub at: Vec<F>,
    /// flat grid indices bracketing it
    pub between: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "points", rename_all = "snake_case")]
pub enum Crossovers<F> {
    /// the two contexts agree within tolerance everywhere
    Coincident,
    Found(Vec<Crossing<F>>),
}

impl<F> Crossovers<F> {
    pub fn points(&self) -> &[Crossing<F>] {
        match self {
            Crossovers::Coincident => &[],
            Crossovers::Found(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArgMax<F> {
    pub index: usize,
    pub at: Vec<F>,
    pub momentum: F,
}

/// Surfaces are flattened row-major with the first axis outermost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult<F> {
    pub indicators: Vec<String>,
    pub grid: Vec<Vec<F>>,
    pub serve_first: Vec<F>,
    pub serve_second: Vec<F>,
    pub mean: Vec<F>,
    pub crossovers: Crossovers<F>,
    pub argmax_mean: ArgMax<F>,
}

impl<F: Scalar> SweepResult<F> {
    pub fn shape(&self) -> Vec<usize> {
        self.grid.iter().map(Vec::len).collect()
    }

    /// Indicator values at a flat index.
    pub fn coords(&self, flat: usize) -> Vec<F> {
        let shape = self.shape();
        let mut rest = flat;
        let mut out = vec![F::zero(); shape.len()];
        for a in (0..shape.len()).rev() {
            out[a] = self.grid[a][rest % shape[a]];
            rest /= shape[a];
        }
        out
    }

    /// Long format: one column per indicator, then `context,momentum`.
    pub fn write_long_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = self.indicators.clone();
        header.extend(["context".to_string(), "momentum".to_string()]);
        w.write_record(&header)?;
        for (name, series) in [("serve_first", &self.serve_first), ("serve_second", &self.serve_second), ("mean", &self.mean)] {
            for (i, v) in series.iter().enumerate() {
                let mut rec: Vec<String> = self.coords(i).iter().map(ToString::to_string).collect();
                rec.extend([name.to_string(), v.to_string()]);
                w.write_record(&rec)?;
            }
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

/// Evaluates both contexts over the product grid of one or two axes.
pub fn sweep<F: Scalar, M: ResponseModel<F> + ?Sized>(model: &M, spec: &SweepSpec<F>) -> Result<SweepResult<F>> {
    if spec.axes.is_empty() || spec.axes.len() > 2 {
        return Err(Error::Spec(format!("expected 1 or 2 indicators, got {}", spec.axes.len())));
    }
    let p = model.feature_names().len();
    if spec.baseline.len() != p {
        return Err(Error::Shape { expected: p, got: spec.baseline.len() });
    }
    let serve = model.feature_index(SERVE_FEATURE)?;
    let mut idx = Vec::new();
    for a in &spec.axes {
        let i = model.feature_index(&a.indicator)?;
        if i == serve {
            return Err(Error::Spec(format!("{SERVE_FEATURE} is the context and cannot be swept")));
        }
        idx.push(i);
    }
    if idx.len() == 2 && idx[0] == idx[1] {
        return Err(Error::Spec("the two indicators must differ".into()));
    }
    let grid: Vec<Vec<F>> = spec.axes.iter().map(Axis::grid).collect::<Result<_>>()?;
    let cells: usize = grid.iter().map(Vec::len).product();
    if cells > MAX_CELLS {
        return Err(Error::Spec(format!("grid has {cells} cells, limit is {MAX_CELLS}")));
    }
    let shape: Vec<usize> = grid.iter().map(Vec::len).collect();

    let eval = |flat: usize, ctx: Context| -> F {
        let mut x = spec.baseline.clone();
        let mut rest = flat;
        for a in (0..shape.len()).rev() {
            x[idx[a]] = grid[a][rest % shape[a]];
            rest /= shape[a];
        }
        x[serve] = ctx.indicator();
        model.evaluate(&x)
    };
    let pairs: Vec<(F, F)> =
        (0..cells).into_par_iter().map(|i| (eval(i, Context::ServeFirst), eval(i, Context::ServeSecond))).collect();
    let (serve_first, serve_second): (Vec<F>, Vec<F>) = pairs.into_iter().unzip();
    let two = F::lit(2.0);
    let mean: Vec<F> = serve_first.iter().zip(&serve_second).map(|(&a, &b)| (a + b) / two).collect();
    let diff: Vec<F> = serve_first.iter().zip(&serve_second).map(|(&a, &b)| a - b).collect();

    let mut result = SweepResult {
        indicators: spec.axes.iter().map(|a| a.indicator.clone()).collect(),
        grid,
        serve_first,
        serve_second,
        mean,
        crossovers: Crossovers::Coincident,
        argmax_mean: ArgMax { index: 0, at: Vec::new(), momentum: F::zero() },
    };
    result.crossovers = if diff.iter().all(|d| d.abs() < spec.tolerance) {
        Crossovers::Coincident
    } else if shape.len() == 1 {
        Crossovers::Found(crossings_1d(&result.grid[0], &diff, spec.tolerance))
    } else {
        Crossovers::Found(locus_2d(&result, &diff, spec.tolerance))
    };
    let best = result
        .mean
        .iter()
        .enumerate()
        .fold(0, |b, (i, &v)| if v > result.mean[b] { i } else { b });
    result.argmax_mean = ArgMax { index: best, at: result.coords(best), momentum: result.mean[best] };
    Ok(result)
}

fn sign<F: Scalar>(d: F, tol: F) -> i8 {
    if d.abs() < tol {
        0
    } else if d > F::zero() {
        1
    } else {
        -1
    }
}

fn interpolate<F: Scalar>(x0: F, d0: F, x1: F, d1: F) -> F {
    x0 + (x1 - x0) * d0 / (d0 - d1)
}

/// Sign changes of `diff` along a line. Near-zero runs count as a crossing
/// only when the signs on either side differ.
fn crossings_1d<F: Scalar>(xs: &[F], diff: &[F], tol: F) -> Vec<Crossing<F>> {
    let mut out = Vec::new();
    let mut last: Option<usize> = None;
    for i in 0..diff.len() {
        if sign(diff[i], tol) == 0 {
            continue;
        }
        if let Some(l) = last {
            if sign(diff[l], tol) != sign(diff[i], tol) {
                out.push(Crossing { at: vec![interpolate(xs[l], diff[l], xs[i], diff[i])], between: (l, i) });
            }
        }
        last = Some(i);
    }
    out
}

/// Points where the context difference changes sign between neighbouring
/// cells along either axis, plus cells where it vanishes.
fn locus_2d<F: Scalar>(r: &SweepResult<F>, diff: &[F], tol: F) -> Vec<Crossing<F>> {
    let (nx, ny) = (r.grid[0].len(), r.grid[1].len());
    let (gx, gy) = (&r.grid[0], &r.grid[1]);
    let mut out = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            let a = i * ny + j;
            let sa = sign(diff[a], tol);
            if sa == 0 {
                out.push(Crossing { at: vec![gx[i], gy[j]], between: (a, a) });
                continue;
            }
            if i + 1 < nx {
                let b = (i + 1) * ny + j;
                if sign(diff[b], tol) == -sa {
                    out.push(Crossing { at: vec![interpolate(gx[i], diff[a], gx[i + 1], diff[b]), gy[j]], between: (a, b) });
                }
            }
            if j + 1 < ny {
                let b = a + 1;
                if sign(diff[b], tol) == -sa {
                    out.push(Crossing { at: vec![gx[i], interpolate(gy[j], diff[a], gy[j + 1], diff[b])], between: (a, b) });
                }
            }
        }
    }
    out
}
