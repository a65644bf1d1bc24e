#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Tennis match-flow analytics over point-by-point data.
//!
//! The numeric modules are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the common choice.

pub mod ahp;
pub mod bayes;
pub mod error;
pub mod ingest;
pub mod linalg;
pub mod metrics;
pub mod momentum;
pub mod scalar;
pub mod softmax;
pub mod sweep;
pub mod trend;
pub mod wavelet;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type SoftmaxModel64 = softmax::SoftmaxModel<f64>;
pub type SoftmaxModel32 = softmax::SoftmaxModel<f32>;
pub type ServeWinStats64 = bayes::ServeWinStats<f64>;
pub type MetricsSummary64 = metrics::MetricsSummary<f64>;
pub type RocCurve64 = metrics::RocCurve<f64>;
pub type MomentumSeries64 = momentum::MomentumSeries<f64>;
pub type MomentumSeries32 = momentum::MomentumSeries<f32>;
pub type JudgmentMatrix64 = ahp::JudgmentMatrix<f64>;
pub type AhpResult64 = ahp::AhpResult<f64>;
pub type SurfaceFit64 = trend::SurfaceFit<f64>;
pub type QuadraticResponse64 = sweep::QuadraticResponse<f64>;
pub type SweepResult64 = sweep::SweepResult<f64>;
pub type Scalogram64 = wavelet::Scalogram<f64>;
pub type Scalogram32 = wavelet::Scalogram<f32>;
