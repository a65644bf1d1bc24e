mod commands;
mod config;
mod exit;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;

use commands::Ctx;
use config::{AxisConfig, RunConfig};
use exit::CliError;
use output::OutDir;

/// Point-by-point tennis momentum analysis.
#[derive(Parser, Debug)]
#[command(name = "matchflow", version)]
struct Cli {
    /// TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// point-by-point CSV
    #[arg(long, short, global = true)]
    input: Option<PathBuf>,
    /// output directory
    #[arg(long, global = true, env = "MATCHFLOW_OUT_DIR")]
    out: Option<PathBuf>,
    /// seed for training and permutations [default: 7]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// match to hold out / analyse (full id or unique suffix)
    #[arg(long, global = true)]
    holdout: Option<String>,
    /// skip SVG output
    #[arg(long, global = true)]
    no_plots: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse, repair and impute the input; write the cleaned table and features.
    Clean {
        /// where to write the cleaned CSV (default: <out>/cleaned.csv)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Label points, fit the softmax classifier and evaluate on the held-out match.
    TrainEval {
        /// point | game | set
        #[arg(long)]
        unit: Option<String>,
        #[arg(long)]
        smooth: bool,
        /// use the state before each point as features
        #[arg(long)]
        lagged_features: bool,
    },
    /// Momentum series and swing points.
    Momentum {
        /// restrict to one match (same matching as --holdout)
        #[arg(long = "match")]
        match_id: Option<String>,
    },
    /// Secondary analyses on the momentum series.
    Analyze {
        #[command(subcommand)]
        what: Analysis,
    },
    /// Run every stage on one match and write report.json.
    Report {
        #[arg(long = "match")]
        match_id: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum Analysis {
    /// Indicator weights, consistency and per-game ranking.
    Ahp {
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// eq21 | geometric_mean | eigenvector
        #[arg(long)]
        method: Option<String>,
        #[arg(long = "match")]
        match_id: Option<String>,
    },
    /// Similarity to the win rate and a quadratic surface fit.
    Trend {
        #[arg(long = "match")]
        match_id: Option<String>,
    },
    /// Permutation test against i.i.d. point outcomes.
    Random {
        /// momentum_variance | max_streak | lag1_autocorr
        #[arg(long)]
        statistic: Option<String>,
        #[arg(long)]
        permutations: Option<usize>,
        #[arg(long)]
        stratify: bool,
        #[arg(long = "match")]
        match_id: Option<String>,
    },
    /// Sweep indicators through a response model.
    Sweep {
        /// response model JSON
        #[arg(long)]
        model: Option<PathBuf>,
        /// name:lo:hi:step, once or twice
        #[arg(long = "axis")]
        axes: Vec<String>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Morlet scalogram of the momentum series.
    Wavelet {
        #[arg(long)]
        omega0: Option<f64>,
        #[arg(long = "match")]
        match_id: Option<String>,
    },
}

fn parse_enum<T: DeserializeOwned>(what: &str, s: &str) -> Result<T, CliError> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| CliError::Config(format!("unknown {what} {s:?}")))
}

fn parse_axis(s: &str) -> Result<AxisConfig, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::Config(format!("axis {s:?} is not name:lo:hi:step"));
    if parts.len() != 4 {
        return Err(bad());
    }
    let num = |p: &str| p.parse::<f64>().map_err(|_| bad());
    Ok(AxisConfig { indicator: parts[0].to_string(), lo: num(parts[1])?, hi: num(parts[2])?, step: num(parts[3])? })
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if cli.input.is_some() {
        cfg.input = cli.input.clone();
    }
    if cli.holdout.is_some() {
        cfg.holdout = cli.holdout.clone();
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.no_plots {
        cfg.plots = false;
    }
    let out_root = cli.out.clone().or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));

    let mut pick = |m: &Option<String>| {
        if m.is_some() {
            cfg.holdout = m.clone();
        }
    };
    match &cli.cmd {
        Command::TrainEval { unit, smooth, lagged_features } => {
            if let Some(u) = unit {
                cfg.labels.unit = parse_enum("unit", u)?;
            }
            cfg.labels.smooth |= smooth;
            cfg.labels.lagged_features |= lagged_features;
        }
        Command::Momentum { match_id } | Command::Report { match_id } => pick(match_id),
        Command::Analyze { what } => match what {
            Analysis::Ahp { matrix, method, match_id } => {
                pick(match_id);
                if matrix.is_some() {
                    cfg.ahp.matrix = matrix.clone();
                }
                if let Some(m) = method {
                    cfg.ahp.method = parse_enum("weight method", m)?;
                }
            }
            Analysis::Trend { match_id } => pick(match_id),
            Analysis::Random { statistic, permutations, stratify, match_id } => {
                pick(match_id);
                if let Some(s) = statistic {
                    cfg.random.statistic = parse_enum("statistic", s)?;
                }
                if let Some(p) = permutations {
                    cfg.random.permutations = *p;
                }
                cfg.random.stratify |= stratify;
            }
            Analysis::Sweep { model, axes, tolerance } => {
                if model.is_some() {
                    cfg.sweep.model = model.clone();
                }
                if !axes.is_empty() {
                    cfg.sweep.axes = axes.iter().map(|a| parse_axis(a)).collect::<Result<_, _>>()?;
                }
                if let Some(t) = tolerance {
                    cfg.sweep.tolerance = *t;
                }
            }
            Analysis::Wavelet { omega0, match_id } => {
                pick(match_id);
                if let Some(w) = omega0 {
                    cfg.wavelet.omega0 = *w;
                }
            }
        },
        Command::Clean { .. } => {}
    }
    cfg.validate()?;

    let seed = cfg.seed.unwrap_or(7);
    let plots = cfg.plots;
    let ctx = Ctx { cfg, seed };
    let mut out = OutDir::create(&out_root)?;
    match cli.cmd {
        Command::Clean { output } => {
            let s = commands::clean(&ctx, &mut out, output.as_ref())?;
            eprintln!(
                "cleaned {} rows in {} match(es): {} AD replacements, {} imputations, {} repairs, {} rejected",
                s.rows_out, s.matches, s.ad_replacements, s.imputations, s.repairs, s.rejected
            );
        }
        Command::TrainEval { .. } => {
            let s = commands::train_eval(&ctx, &mut out)?;
            eprintln!(
                "held out {}: accuracy {:.4}, macro F1 {:.4} over {} points",
                s.holdout, s.micro_accuracy, s.macro_f1, s.n_test
            );
        }
        Command::Momentum { match_id } => {
            let s = commands::momentum(&ctx, &mut out, match_id.is_some(), plots)?;
            eprintln!("momentum for {} match(es)", s.len());
        }
        Command::Analyze { what } => match what {
            Analysis::Ahp { .. } => {
                let s = commands::analyze_ahp(&ctx, &mut out)?;
                eprintln!("CR = {:.4} ({})", s.result.cr, if s.result.consistent { "consistent" } else { "inconsistent" });
            }
            Analysis::Trend { .. } => {
                let s = commands::analyze_trend(&ctx, &mut out)?;
                eprintln!("cosine {:.4}, surface R^2 {:.4}", s.cosine_similarity, s.surface.r_squared);
            }
            Analysis::Random { .. } => {
                let s = commands::analyze_random(&ctx, &mut out)?;
                eprintln!("p = {:.4}", s.report.p_value);
            }
            Analysis::Sweep { .. } => {
                let s = commands::analyze_sweep(&ctx, &mut out, plots)?;
                eprintln!("{} crossover(s)", s.crossovers.len());
            }
            Analysis::Wavelet { .. } => {
                let s = commands::analyze_wavelet(&ctx, &mut out, plots)?;
                eprintln!("{} scales, global peak at period {:.2}", s.scales.len(), s.periods[s.global_peak.scale_index]);
            }
        },
        Command::Report { .. } => {
            commands::report(&ctx, &mut out, plots)?;
            eprintln!("report written to {}", out.path("report.json").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::code_for(&e) as u8)
        }
    }
}
