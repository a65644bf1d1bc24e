//! Continuous Morlet wavelet transform of short series by direct summation.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `π^(−1/4)·e^{iω₀t}·e^{−t²/2}`
pub fn morlet<F: Scalar>(t: F, omega0: F) -> Complex<F> {
    let envelope = F::lit(PI).powf(F::lit(-0.25)) * (-(t * t) / F::lit(2.0)).exp();
    Complex::from_polar(envelope, omega0 * t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    ZeroPad,
    /// half-sample symmetric extension, folded as often as needed
    #[default]
    Reflect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scales {
    /// `count` geometric scales whose equivalent periods span
    /// `[min_period, max_period]`; `None` bounds default to 2 and N/2
    Ladder { count: usize, min_period: Option<f64>, max_period: Option<f64> },
    Explicit(Vec<f64>),
}

impl Default for Scales {
    fn default() -> Self {
        Scales::Ladder { count: 32, min_period: None, max_period: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WaveletConfig {
    pub omega0: f64,
    pub scales: Scales,
    pub boundary: Boundary,
    /// the wavelet is truncated at `|u| ≤ support`
    pub support: f64,
}

impl Default for WaveletConfig {
    fn default() -> Self {
        Self { omega0: 6.0, scales: Scales::default(), boundary: Boundary::default(), support: 8.0 }
    }
}

pub const MIN_SIGNAL: usize = 8;

impl WaveletConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 >= 5.0) {
            return Err(Error::Config(format!("omega0 must be at least 5, got {}", self.omega0)));
        }
        if !(self.support > 0.0) {
            return Err(Error::Config("support must be positive".into()));
        }
        Ok(())
    }

    /// Scale whose centre frequency matches `period` samples.
    pub fn scale_for_period(&self, period: f64) -> f64 {
        period * self.omega0 / (2.0 * PI)
    }

    pub fn period_for_scale(&self, scale: f64) -> f64 {
        scale * 2.0 * PI / self.omega0
    }

    pub fn resolve_scales(&self, n: usize) -> Result<Vec<f64>> {
        let scales = match &self.scales {
            Scales::Explicit(s) => s.clone(),
            Scales::Ladder { count, min_period, max_period } => {
                let lo = min_period.unwrap_or(2.0);
                let hi = max_period.unwrap_or(n as f64 / 2.0);
                if *count < 2 || !(lo > 0.0 && lo < hi) {
                    return Err(Error::Config(format!("bad scale ladder: {count} scales over periods {lo}..{hi}")));
                }
                let ratio = (hi / lo).powf(1.0 / (*count - 1) as f64);
                (0..*count).map(|i| self.scale_for_period(lo * ratio.powi(i as i32))).collect()
            }
        };
        if scales.is_empty() {
            return Err(Error::Config("no scales".into()));
        }
        if let Some(s) = scales.iter().find(|&&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::Domain(format!("scale must be positive, got {s}")));
        }
        Ok(scales)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scalogram<F> {
    pub scales: Vec<F>,
    pub periods: Vec<F>,
    /// scales × times
    pub coefficients: Vec<Vec<Complex<F>>>,
    pub amplitude: Vec<Vec<F>>,
}

impl<F> Scalogram<F> {
    pub fn n_scales(&self) -> usize {
        self.scales.len()
    }

    pub fn n_times(&self) -> usize {
        self.amplitude.first().map_or(0, Vec::len)
    }
}

/// Index into a half-sample symmetric periodic extension of length `n`.
fn reflect(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period);
    if m < n as isize { m as usize } else { (period - 1 - m) as usize }
}

/// `W(a,b) = Σ_t f(t)·a^{−½}·ψ*((t−b)/a)` with unit sample spacing.
pub fn cwt<F: Scalar>(signal: &[F], cfg: &WaveletConfig) -> Result<Scalogram<F>> {
    if signal.is_empty() {
        return Err(Error::EmptyInput);
    }
    if signal.len() < MIN_SIGNAL {
        return Err(Error::InsufficientData(format!("wavelet needs at least {MIN_SIGNAL} samples, got {}", signal.len())));
    }
    cfg.validate()?;
    let n = signal.len();
    let scales = cfg.resolve_scales(n)?;
    let omega0 = F::lit(cfg.omega0);

    let row = |&a: &f64| -> Vec<Complex<F>> {
        let reach = (cfg.support * a).floor() as isize;
        let af = F::lit(a);
        let norm = F::one() / af.sqrt();
        // wavelet taps are shared by every shift
        let taps: Vec<Complex<F>> = (-reach..=reach)
            .map(|k| morlet(F::lit(k as f64) / af, omega0).conj() * norm)
            .collect();
        (0..n as isize)
            .map(|b| {
                let mut acc = Complex::new(F::zero(), F::zero());
                for (tap, k) in taps.iter().zip(-reach..=reach) {
                    let t = b + k;
                    let x = match cfg.boundary {
                        Boundary::ZeroPad if t < 0 || t >= n as isize => continue,
                        Boundary::ZeroPad => signal[t as usize],
                        Boundary::Reflect => signal[reflect(t, n)],
                    };
                    acc = acc + *tap * x;
                }
                acc
            })
            .collect()
    };
    let coefficients: Vec<Vec<Complex<F>>> = scales.par_iter().map(row).collect();
    let amplitude = coefficients.iter().map(|r| r.iter().map(|c| c.norm()).collect()).collect();
    Ok(Scalogram {
        periods: scales.iter().map(|&a| F::lit(cfg.period_for_scale(a))).collect(),
        scales: scales.into_iter().map(F::lit).collect(),
        coefficients,
        amplitude,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak<F> {
    pub scale_index: usize,
    pub time: usize,
    pub scale: F,
    pub amplitude: F,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalogramExport<F> {
    /// (scale, time, amplitude), scale-major
    pub rows: Vec<(F, usize, F)>,
    /// strongest time per scale
    pub scale_maxima: Vec<Peak<F>>,
    /// strongest scale per time
    pub time_maxima: Vec<Peak<F>>,
    pub global: Peak<F>,
}

pub fn scalogram_export<F: Scalar>(s: &Scalogram<F>) -> ScalogramExport<F> {
    let peak = |i: usize, t: usize| Peak { scale_index: i, time: t, scale: s.scales[i], amplitude: s.amplitude[i][t] };
    let mut rows = Vec::with_capacity(s.n_scales() * s.n_times());
    for (i, r) in s.amplitude.iter().enumerate() {
        for (t, &a) in r.iter().enumerate() {
            rows.push((s.scales[i], t, a));
        }
    }
    let scale_maxima: Vec<Peak<F>> = (0..s.n_scales())
        .map(|i| peak(i, (0..s.n_times()).fold(0, |b, t| if s.amplitude[i][t] > s.amplitude[i][b] { t } else { b })))
        .collect();
    let time_maxima: Vec<Peak<F>> = (0..s.n_times())
        .map(|t| peak((0..s.n_scales()).fold(0, |b, i| if s.amplitude[i][t] > s.amplitude[b][t] { i } else { b }), t))
        .collect();
    let global = scale_maxima
        .iter()
        .copied()
        .fold(scale_maxima[0], |b, p| if p.amplitude > b.amplitude { p } else { b });
    ScalogramExport { rows, scale_maxima, time_maxima, global }
}

impl<F: Scalar> ScalogramExport<F> {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["scale", "time", "amplitude"])?;
        for (s, t, a) in &self.rows {
            w.write_record([s.to_string(), t.to_string(), a.to_string()])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}
