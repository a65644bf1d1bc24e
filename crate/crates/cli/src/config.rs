//! Run configuration: a TOML document with one section per stage. Every key
//! is optional; command-line flags override whatever the file says.

use std::path::{Path, PathBuf};

use matchflow::ahp::WeightMethod;
use matchflow::bayes::Unit;
use matchflow::ingest::ColumnMap;
use matchflow::momentum::MomentumParams;
use matchflow::softmax::TrainConfig;
use matchflow::trend::Statistic;
use matchflow::wavelet::WaveletConfig;
use serde::{Deserialize, Serialize};

use crate::exit::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub holdout: Option<String>,
    pub plots: bool,
    pub columns: ColumnMap,
    pub labels: LabelsSection,
    pub train: TrainConfig,
    pub momentum: MomentumParams,
    pub ahp: AhpSection,
    pub trend: TrendSection,
    pub random: RandomSection,
    pub sweep: SweepSection,
    pub wavelet: WaveletConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            out_dir: None,
            seed: None,
            holdout: None,
            plots: true,
            columns: ColumnMap::new(),
            labels: LabelsSection::default(),
            train: TrainConfig::default(),
            momentum: MomentumParams::default(),
            ahp: AhpSection::default(),
            trend: TrendSection::default(),
            random: RandomSection::default(),
            sweep: SweepSection::default(),
            wavelet: WaveletConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabelsSection {
    pub unit: Unit,
    pub smooth: bool,
    /// train on the state before each point instead of after it
    pub lagged_features: bool,
}

impl Default for LabelsSection {
    fn default() -> Self {
        Self { unit: Unit::Point, smooth: false, lagged_features: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AhpSection {
    /// square CSV judgment matrix; the built-in one is used otherwise
    pub matrix: Option<PathBuf>,
    /// inline `[i, j, value]` judgments (0-based), used when no file is given
    pub judgments: Vec<(usize, usize, f64)>,
    pub indicators: Vec<String>,
    pub method: WeightMethod,
    pub random_index: Option<f64>,
}

pub const DEFAULT_AHP_INDICATORS: [&str; 4] = ["momentum", "score_diff", "streak_len_p1", "psychological_factor"];

/// Judgments over [`DEFAULT_AHP_INDICATORS`].
pub const DEFAULT_JUDGMENTS: [(usize, usize, f64); 6] =
    [(0, 1, 2.0), (0, 2, 3.0), (0, 3, 4.0), (1, 2, 2.0), (1, 3, 3.0), (2, 3, 2.0)];

impl Default for AhpSection {
    fn default() -> Self {
        Self {
            matrix: None,
            judgments: DEFAULT_JUDGMENTS.to_vec(),
            indicators: DEFAULT_AHP_INDICATORS.iter().map(|s| s.to_string()).collect(),
            method: WeightMethod::GeometricMean,
            random_index: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrendSection {
    pub x: String,
    pub y: String,
    pub z: String,
    /// points per axis of the exported surface grid
    pub grid: usize,
}

impl Default for TrendSection {
    fn default() -> Self {
        Self { x: "momentum".into(), y: "streak_len_p1".into(), z: "win_rate".into(), grid: 25 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomSection {
    pub statistic: Statistic,
    pub permutations: usize,
    pub stratify: bool,
}

impl Default for RandomSection {
    fn default() -> Self {
        Self { statistic: Statistic::MomentumVariance, permutations: 999, stratify: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub indicator: String,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// pre-fitted response model JSON; otherwise one is fitted to the input
    pub model: Option<PathBuf>,
    pub axes: Vec<AxisConfig>,
    pub tolerance: f64,
    pub ridge: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            model: None,
            axes: vec![AxisConfig { indicator: "psychological_factor".into(), lo: 0.0, hi: 1.0, step: 0.02 }],
            tolerance: matchflow::sweep::DEFAULT_TOLERANCE,
            ridge: 1e-6,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |e: matchflow::Error| CliError::Config(e.to_string());
        self.columns.validate().map_err(bad)?;
        self.train.validate().map_err(bad)?;
        self.momentum.validate().map_err(bad)?;
        self.wavelet.validate().map_err(bad)?;
        if self.sweep.axes.is_empty() || self.sweep.axes.len() > 2 {
            return Err(CliError::Config("sweep needs one or two axes".into()));
        }
        if self.trend.grid < 2 {
            return Err(CliError::Config("trend grid needs at least 2 points".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_default() {
        let c: RunConfig = toml::from_str("").unwrap();
        assert_eq!(c, RunConfig::default());
    }

    #[test]
    fn nested_sections() {
        let c: RunConfig = toml::from_str(
            r#"
            seed = 11
            [momentum]
            alpha1 = 0.002
            [columns]
            point_victor = "winner"
            [[sweep.axes]]
            indicator = "x"
            lo = 0.0
            hi = 0.12
            step = 0.01
            "#,
        )
        .unwrap();
        assert_eq!(c.seed, Some(11));
        assert_eq!(c.momentum.alpha1, 0.002);
        assert_eq!(c.momentum.w1, 0.7);
        assert_eq!(c.sweep.axes[0].hi, 0.12);
        c.validate().unwrap();
    }

    #[test]
    fn shipped_example_parses() {
        let c: RunConfig = toml::from_str(include_str!("../../../docs/example.toml")).unwrap();
        c.validate().unwrap();
        assert_eq!(c.momentum, MomentumParams::default());
        assert_eq!(c.ahp, AhpSection::default());
        assert_eq!(c.wavelet, WaveletConfig::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<RunConfig>("sed = 1").is_err());
    }
}
