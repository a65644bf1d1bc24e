use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use matchflow::ahp::{self, AhpResult, JudgmentMatrix};
use matchflow::bayes::{estimate_serve_win_posterior, LabelScale, Level, ServeWinStats};
use matchflow::ingest::{derive_features, parse_match_csv, write_clean_csv, Corpus, FeatureTable, MatchTimeline, Player, FEATURE_NAMES};
use matchflow::metrics::{confusion, metrics_table, roc_for_class, summary_metrics, ConfusionCounts, MetricsSummary, MetricsTable};
use matchflow::momentum::{local_extrema, timeline_momentum, Extremum, MomentumParams};
use matchflow::softmax::{argmax, train};
use matchflow::sweep::{sweep, ArgMax, Axis, Crossovers, QuadraticResponse, SweepResult, SweepSpec, SERVE_FEATURE};
use matchflow::trend::{cosine_similarity, cumulative_win_rate, euclidean_distance, fit_poly22, randomness_test, PermutationConfig, PermutationReport};
use matchflow::wavelet::{cwt, scalogram_export, Peak, WaveletConfig};
use matchflow::{MomentumSeries64, SoftmaxModel64};
use serde::Serialize;

use crate::config::{AxisConfig, RunConfig};
use crate::exit::CliError;
use crate::output::{slug, OutDir};
use crate::svg::{heatmap, line_chart, Series};

pub const CLASS_NAMES: [&str; 4] = ["L0", "L_lose", "L_win", "L1"];

/// Resolved settings shared by every command.
pub struct Ctx {
    pub cfg: RunConfig,
    pub seed: u64,
}

impl Ctx {
    pub fn input(&self) -> Result<&Path> {
        self.cfg
            .input
            .as_deref()
            .ok_or_else(|| CliError::Config("no input file; pass --input or set `input` in the config".into()).into())
    }

    pub fn corpus(&self) -> Result<Corpus> {
        let path = self.input()?;
        let raw = std::fs::read(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        parse_match_csv(&raw, &self.cfg.columns).with_context(|| format!("loading {}", path.display()))
    }

    /// Index of the match under analysis: the requested id (exact, or a unique
    /// suffix), else the match ending in "1701", else the first match unless
    /// `required`.
    pub fn select(&self, corpus: &Corpus, required: bool) -> Result<usize> {
        let ids: Vec<&str> = corpus.timelines.iter().map(|t| t.match_id.as_str()).collect();
        if let Some(want) = &self.cfg.holdout {
            if let Some(i) = ids.iter().position(|id| id == want) {
                return Ok(i);
            }
            let hits: Vec<usize> = (0..ids.len()).filter(|&i| ids[i].ends_with(want.as_str())).collect();
            return match hits.as_slice() {
                [i] => Ok(*i),
                [] => Err(CliError::Config(format!("match {want:?} not found in input")).into()),
                _ => Err(CliError::Config(format!("match {want:?} is ambiguous")).into()),
            };
        }
        if let Some(i) = ids.iter().position(|id| id.ends_with("1701")) {
            return Ok(i);
        }
        if required || ids.is_empty() {
            return Err(CliError::Config("no match id ending in 1701; pass --holdout".into()).into());
        }
        Ok(0)
    }

    fn momentum(&self, t: &MatchTimeline) -> Result<MomentumSeries64> {
        Ok(timeline_momentum(t, &self.cfg.momentum)?)
    }
}

fn features(t: &MatchTimeline, lagged: bool) -> FeatureTable {
    let f = derive_features(t);
    if lagged {
        f.lagged()
    } else {
        f
    }
}

/// Named per-point series: `momentum`, `win_rate` or any feature column.
fn indicator(name: &str, feats: &FeatureTable, momentum: &[f64], win_rate: &[f64]) -> Result<Vec<f64>> {
    match name {
        "momentum" => Ok(momentum.to_vec()),
        "win_rate" => Ok(win_rate.to_vec()),
        _ => feats.column(name).ok_or_else(|| matchflow::Error::UnknownIndicator(name.to_string()).into()),
    }
}

// ---------------------------------------------------------------- clean

#[derive(Debug, Serialize)]
pub struct CleanSummary {
    pub matches: usize,
    pub rows_in: usize,
    pub rows_out: usize,
    pub ad_replacements: usize,
    pub imputations: usize,
    pub repairs: usize,
    pub rejected: usize,
}

pub fn clean(ctx: &Ctx, out: &mut OutDir, cleaned_path: Option<&PathBuf>) -> Result<CleanSummary> {
    let corpus = ctx.corpus()?;
    match cleaned_path {
        Some(p) => {
            let f = std::fs::File::create(p).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display())))?;
            write_clean_csv(&corpus.timelines, std::io::BufWriter::new(f))?;
        }
        None => write_clean_csv(&corpus.timelines, out.writer("cleaned.csv")?)?,
    }
    let mut w = csv::Writer::from_writer(out.writer("features.csv")?);
    let mut header = vec!["match_id".to_string(), "point_no".to_string()];
    header.extend(FEATURE_NAMES.iter().map(|s| s.to_string()));
    w.write_record(&header)?;
    for t in &corpus.timelines {
        for (r, rec) in derive_features(t).rows.iter().zip(&t.records) {
            let mut row = vec![t.match_id.clone(), rec.point_no.to_string()];
            row.extend(r.to_array().iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    out.json("cleaning_report.json", "cleaning_report", &corpus.report)?;
    let r = &corpus.report;
    Ok(CleanSummary {
        matches: corpus.timelines.len(),
        rows_in: r.rows_in,
        rows_out: r.rows_out,
        ad_replacements: r.ad_replacements,
        imputations: r.imputations,
        repairs: r.repairs,
        rejected: r.rejected.len(),
    })
}

// ---------------------------------------------------------------- train-eval

#[derive(Serialize)]
struct ModelDoc<'a> {
    unit: matchflow::bayes::Unit,
    lagged_features: bool,
    label_scale: LabelScale,
    posterior: &'a ServeWinStats<f64>,
    model: &'a SoftmaxModel64,
}

#[derive(Serialize)]
struct MetricsDoc<'a> {
    holdout: &'a str,
    n_train: usize,
    n_test: usize,
    confusion: &'a ConfusionCounts,
    summary: &'a MetricsSummary<f64>,
    table: &'a MetricsTable,
    auc: &'a BTreeMap<String, Option<f64>>,
    warnings: &'a [String],
}

#[derive(Debug, Serialize)]
pub struct TrainSummary {
    pub holdout: String,
    pub n_train: usize,
    pub n_test: usize,
    pub p_win_given_serve: f64,
    pub p_lose_given_serve: f64,
    pub micro_accuracy: f64,
    pub micro_f1: f64,
    pub macro_f1: f64,
    pub auc: BTreeMap<String, Option<f64>>,
    pub converged: bool,
    pub iterations: usize,
}

fn dataset(timelines: &[&MatchTimeline], lagged: bool) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for t in timelines {
        rows.extend(features(t, lagged).matrix::<f64>());
        labels.extend(t.records.iter().map(|r| Level::for_point(r.point_victor, r.server).index()));
    }
    (rows, labels)
}

pub fn train_eval(ctx: &Ctx, out: &mut OutDir) -> Result<TrainSummary> {
    let corpus = ctx.corpus()?;
    let h = ctx.select(&corpus, true)?;
    let holdout = &corpus.timelines[h];
    let training: Vec<&MatchTimeline> = corpus.timelines.iter().enumerate().filter(|&(i, _)| i != h).map(|(_, t)| t).collect();
    if training.is_empty() {
        return Err(CliError::Config("the input has no match besides the held-out one".into()).into());
    }
    let labels_cfg = &ctx.cfg.labels;
    let owned: Vec<MatchTimeline> = training.iter().map(|t| (*t).clone()).collect();
    let stats: ServeWinStats<f64> = estimate_serve_win_posterior(&owned, labels_cfg.unit, labels_cfg.smooth)?;
    let scale = LabelScale::from_stats(&stats)?;

    let (rows, labels) = dataset(&training, labels_cfg.lagged_features);
    let mut tcfg = ctx.cfg.train.clone();
    tcfg.seed = ctx.seed;
    let class_names: Vec<String> = CLASS_NAMES.iter().map(|s| s.to_string()).collect();
    let class_values: Vec<f64> = Level::ALL.iter().map(|&l| scale.value(l)).collect();
    let model = train(&rows, &labels, class_names.clone(), class_values, FeatureTable::names(), &tcfg)?;

    let (test_rows, truth) = dataset(&[holdout], labels_cfg.lagged_features);
    let proba: Vec<Vec<f64>> = test_rows.iter().map(|r| model.predict_proba(r)).collect::<Result<_, _>>()?;
    let pred: Vec<usize> = proba.iter().map(|p| argmax(p)).collect();
    let counts = confusion(&truth, &pred, 4)?;
    let summary: MetricsSummary<f64> = summary_metrics(&counts);
    let table = metrics_table(&counts, &summary, &class_names);

    let mut auc = BTreeMap::new();
    let mut warnings = Vec::new();
    for (c, name) in CLASS_NAMES.iter().enumerate() {
        match roc_for_class(&truth, &proba, c) {
            Ok(roc) => {
                let mut w = csv::Writer::from_writer(out.writer(&format!("roc_{name}.csv"))?);
                w.write_record(["fpr", "tpr", "threshold"])?;
                for (i, (x, y)) in roc.points.iter().enumerate() {
                    let th = if i == 0 { "inf".to_string() } else { roc.thresholds[i - 1].to_string() };
                    w.write_record([x.to_string(), y.to_string(), th])?;
                }
                w.flush()?;
                auc.insert(name.to_string(), Some(roc.auc));
            }
            Err(matchflow::Error::UndefinedRoc(why)) => {
                warnings.push(format!("ROC for {name} undefined: {why}"));
                auc.insert(name.to_string(), None);
            }
            Err(e) => return Err(e.into()),
        }
    }

    let mut w = csv::Writer::from_writer(out.writer("probabilities.csv")?);
    let mut header = vec!["point_no".to_string()];
    header.extend(CLASS_NAMES.iter().map(|c| format!("p_{c}")));
    header.extend(["predicted", "predicted_value", "actual", "actual_value"].map(String::from));
    w.write_record(&header)?;
    for (i, rec) in holdout.records.iter().enumerate() {
        let mut row = vec![rec.point_no.to_string()];
        row.extend(proba[i].iter().map(|p| p.to_string()));
        row.extend([
            CLASS_NAMES[pred[i]].to_string(),
            model.class_values[pred[i]].to_string(),
            CLASS_NAMES[truth[i]].to_string(),
            model.class_values[truth[i]].to_string(),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;

    out.json(
        "model.json",
        "softmax_model",
        &ModelDoc { unit: labels_cfg.unit, lagged_features: labels_cfg.lagged_features, label_scale: scale, posterior: &stats, model: &model },
    )?;
    out.json(
        "metrics.json",
        "metrics",
        &MetricsDoc {
            holdout: &holdout.match_id,
            n_train: rows.len(),
            n_test: truth.len(),
            confusion: &counts,
            summary: &summary,
            table: &table,
            auc: &auc,
            warnings: &warnings,
        },
    )?;
    Ok(TrainSummary {
        holdout: holdout.match_id.clone(),
        n_train: rows.len(),
        n_test: truth.len(),
        p_win_given_serve: stats.p_win_given_serve,
        p_lose_given_serve: stats.p_lose_given_serve,
        micro_accuracy: summary.micro_avg.accuracy,
        micro_f1: summary.micro_avg.f1,
        macro_f1: summary.macro_avg.f1,
        auc,
        converged: model.meta.converged,
        iterations: model.meta.iterations,
    })
}

// ---------------------------------------------------------------- momentum

#[derive(Debug, Clone, Serialize)]
pub struct Swing {
    pub point_no: u32,
    pub kind: Extremum,
    pub p1_momentum: f64,
}

#[derive(Debug, Serialize)]
pub struct MatchSwings {
    pub match_id: String,
    pub points: usize,
    pub swings: Vec<Swing>,
    pub p1_mean: f64,
    pub p1_max: f64,
    pub p1_min: f64,
}

#[derive(Serialize)]
struct SwingsDoc<'a> {
    params: &'a MomentumParams,
    matches: &'a [MatchSwings],
}

pub fn momentum(ctx: &Ctx, out: &mut OutDir, only_selected: bool, plots: bool) -> Result<Vec<MatchSwings>> {
    let corpus = ctx.corpus()?;
    let chosen: Vec<usize> = if only_selected || ctx.cfg.holdout.is_some() {
        vec![ctx.select(&corpus, false)?]
    } else {
        (0..corpus.timelines.len()).collect()
    };
    let mut w = csv::Writer::from_writer(out.writer("momentum.csv")?);
    w.write_record([
        "match_id", "point_no", "set_no", "game_no", "server", "point_victor", "p1_momentum", "p2_momentum",
        "p1_short", "p1_long", "streak", "streak_holder", "swing", "game_victor", "set_victor",
    ])?;
    let mut all = Vec::new();
    for &i in &chosen {
        let t = &corpus.timelines[i];
        let s = ctx.momentum(t)?;
        let ext: BTreeMap<usize, Extremum> = local_extrema(&s.p1.momentum).into_iter().collect();
        for (n, rec) in t.records.iter().enumerate() {
            let mark = |yes: bool| if yes { rec.point_victor.id().to_string() } else { "0".to_string() };
            w.write_record([
                t.match_id.clone(),
                rec.point_no.to_string(),
                rec.set_no.to_string(),
                rec.game_no.to_string(),
                rec.server.id().to_string(),
                rec.point_victor.id().to_string(),
                s.p1.momentum[n].to_string(),
                s.p2.momentum[n].to_string(),
                s.p1.short[n].to_string(),
                s.p1.long[n].to_string(),
                s.streak[n].to_string(),
                s.streak_holder[n].id().to_string(),
                match ext.get(&n) {
                    Some(Extremum::Peak) => "peak".into(),
                    Some(Extremum::Trough) => "trough".into(),
                    None => String::new(),
                },
                mark(t.ends_game(n)),
                mark(t.ends_set(n)),
            ])?;
        }
        let m = &s.p1.momentum;
        let swings: Vec<Swing> = ext
            .iter()
            .map(|(&n, &kind)| Swing { point_no: t.records[n].point_no, kind, p1_momentum: m[n] })
            .collect();
        if plots {
            let x: Vec<f64> = (1..=m.len()).map(|v| v as f64).collect();
            let markers: Vec<(f64, f64, &str)> = ext
                .iter()
                .map(|(&n, &k)| ((n + 1) as f64, m[n], if k == Extremum::Peak { "green" } else { "red" }))
                .collect();
            let svg = line_chart(
                &format!("Momentum, {}", t.match_id),
                &x,
                &[
                    Series { name: &t.players.0, values: m, color: "#1f77b4" },
                    Series { name: &t.players.1, values: &s.p2.momentum, color: "#ff7f0e" },
                ],
                &markers,
                Some((0.0, 1.0)),
            );
            out.text(&format!("momentum_{}.svg", slug(&t.match_id)), &svg)?;
        }
        all.push(MatchSwings {
            match_id: t.match_id.clone(),
            points: m.len(),
            swings,
            p1_mean: m.iter().sum::<f64>() / m.len().max(1) as f64,
            p1_max: m.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            p1_min: m.iter().copied().fold(f64::INFINITY, f64::min),
        });
    }
    w.flush()?;
    out.json("swings.json", "momentum_swings", &SwingsDoc { params: &ctx.cfg.momentum, matches: &all })?;
    Ok(all)
}

// ---------------------------------------------------------------- ahp

#[derive(Debug, Serialize)]
pub struct AhpSummary {
    pub indicators: Vec<String>,
    pub method: ahp::WeightMethod,
    pub matrix: Vec<Vec<f64>>,
    pub result: AhpResult<f64>,
    pub match_id: Option<String>,
    pub rounds: usize,
    pub top_round: Option<usize>,
}

pub fn analyze_ahp(ctx: &Ctx, out: &mut OutDir) -> Result<AhpSummary> {
    let a = &ctx.cfg.ahp;
    let n = a.indicators.len();
    let matrix: JudgmentMatrix<f64> = match &a.matrix {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("cannot read {}: {e}", p.display())))?;
            ahp::parse_matrix_csv(&text)?
        }
        None => JudgmentMatrix::build(n, &a.judgments)?,
    };
    let mut names = a.indicators.clone();
    if matrix.order() != n && ctx.cfg.input.is_none() {
        // weights only; nothing to rank, so the criteria can stay anonymous
        names = (1..=matrix.order()).map(|k| format!("c{k}")).collect();
    } else if matrix.order() != n {
        return Err(CliError::Config(format!("judgment matrix has order {} but {n} indicators are listed", matrix.order())).into());
    }
    let w = ahp::weights(&matrix, a.method)?;
    let result = match a.random_index {
        Some(ri) => ahp::consistency_with_ri(&matrix, &w, ri)?,
        None => ahp::consistency(&matrix, &w)?,
    };

    let mut summary = AhpSummary {
        indicators: names,
        method: a.method,
        matrix: matrix.rows(),
        result,
        match_id: None,
        rounds: 0,
        top_round: None,
    };
    if ctx.cfg.input.is_some() {
        let corpus = ctx.corpus()?;
        let t = &corpus.timelines[ctx.select(&corpus, false)?];
        let s = ctx.momentum(t)?;
        let feats = derive_features(t);
        let win_rate: Vec<f64> = cumulative_win_rate(&t.victors(), Player::One);
        let series: Vec<Vec<f64>> =
            a.indicators.iter().map(|name| indicator(name, &feats, &s.p1.momentum, &win_rate)).collect::<Result<_>>()?;
        // one round per game: indicator means over its points
        let mut rounds: Vec<(u32, u32, Vec<f64>)> = Vec::new();
        let mut start = 0;
        for i in 0..t.len() {
            if t.ends_game(i) {
                let len = (i + 1 - start) as f64;
                let vals = series.iter().map(|col| col[start..=i].iter().sum::<f64>() / len).collect();
                rounds.push((t.records[i].set_no, t.records[i].game_no, vals));
                start = i + 1;
            }
        }
        let table: Vec<Vec<f64>> = rounds.iter().map(|r| r.2.clone()).collect();
        let scored = ahp::score_rounds(&table, &summary.result.weights)?;
        let mut wr = csv::Writer::from_writer(out.writer("ahp_rounds.csv")?);
        wr.write_record(["round", "set_no", "game_no", "score", "standardization", "ranking"])?;
        for (k, (set_no, game_no, _)) in rounds.iter().enumerate() {
            wr.write_record([
                (k + 1).to_string(),
                set_no.to_string(),
                game_no.to_string(),
                scored.scores[k].to_string(),
                scored.standardized[k].to_string(),
                scored.ranking[k].to_string(),
            ])?;
        }
        wr.flush()?;
        summary.match_id = Some(t.match_id.clone());
        summary.rounds = rounds.len();
        summary.top_round = scored.ranking.iter().position(|&r| r == 1).map(|k| k + 1);
    }
    out.json("ahp.json", "ahp", &summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------- trend

#[derive(Debug, Serialize)]
pub struct Surface {
    pub p00: f64,
    pub p10: f64,
    pub p01: f64,
    pub p20: f64,
    pub p11: f64,
    pub p02: f64,
    pub r_squared: f64,
    pub sse: f64,
    pub samples: usize,
}

#[derive(Debug, Serialize)]
pub struct TrendSummary {
    pub match_id: String,
    pub x: String,
    pub y: String,
    pub z: String,
    pub cosine_similarity: f64,
    pub euclidean_distance: f64,
    pub surface: Surface,
}

pub fn analyze_trend(ctx: &Ctx, out: &mut OutDir) -> Result<TrendSummary> {
    let corpus = ctx.corpus()?;
    let t = &corpus.timelines[ctx.select(&corpus, false)?];
    let s = ctx.momentum(t)?;
    let feats = derive_features(t);
    let win_rate: Vec<f64> = cumulative_win_rate(&t.victors(), Player::One);
    let tc = &ctx.cfg.trend;
    let m = &s.p1.momentum;
    let x = indicator(&tc.x, &feats, m, &win_rate)?;
    let y = indicator(&tc.y, &feats, m, &win_rate)?;
    let z = indicator(&tc.z, &feats, m, &win_rate)?;
    let samples: Vec<(f64, f64, f64)> = (0..x.len()).map(|i| (x[i], y[i], z[i])).collect();
    let fit = fit_poly22(&samples)?;
    fit.write_grid_csv(tc.grid, tc.grid, out.writer("trend_surface.csv")?)?;
    let summary = TrendSummary {
        match_id: t.match_id.clone(),
        x: tc.x.clone(),
        y: tc.y.clone(),
        z: tc.z.clone(),
        cosine_similarity: cosine_similarity(m, &win_rate)?,
        euclidean_distance: euclidean_distance(m, &win_rate)?,
        surface: Surface {
            p00: fit.p00,
            p10: fit.p10,
            p01: fit.p01,
            p20: fit.p20,
            p11: fit.p11,
            p02: fit.p02,
            r_squared: fit.r_squared,
            sse: fit.sse,
            samples: samples.len(),
        },
    };
    out.json("trend.json", "trend", &summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------- random

#[derive(Debug, Serialize)]
pub struct RandomSummary {
    pub match_id: String,
    #[serde(flatten)]
    pub report: PermutationReport,
}

pub fn analyze_random(ctx: &Ctx, out: &mut OutDir) -> Result<RandomSummary> {
    let corpus = ctx.corpus()?;
    let t = &corpus.timelines[ctx.select(&corpus, false)?];
    let r = &ctx.cfg.random;
    let cfg = PermutationConfig {
        statistic: r.statistic,
        n_permutations: r.permutations,
        seed: ctx.seed,
        stratify_by_server: r.stratify,
        parallel: true,
    };
    let report = randomness_test(&t.victors(), Some(&t.servers()), &ctx.cfg.momentum, &cfg)?;
    let summary = RandomSummary { match_id: t.match_id.clone(), report };
    out.json("random.json", "randomness_test", &summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------- sweep

#[derive(Debug, Serialize)]
pub struct SweepSummary {
    pub model: String,
    pub indicators: Vec<String>,
    pub shape: Vec<usize>,
    pub tolerance: f64,
    pub coincident: bool,
    pub crossovers: Vec<Vec<f64>>,
    pub argmax_mean: ArgMax<f64>,
}

pub fn load_response_model(path: &Path) -> Result<QuadraticResponse<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let m: QuadraticResponse<f64> =
        serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: not a response model: {e}", path.display())))?;
    m.validate()?;
    Ok(m)
}

pub fn analyze_sweep(ctx: &Ctx, out: &mut OutDir, plots: bool) -> Result<SweepSummary> {
    let sc = &ctx.cfg.sweep;
    let (model, source) = match &sc.model {
        Some(p) => (load_response_model(p)?, p.file_name().map_or_else(String::new, |f| f.to_string_lossy().into_owned())),
        None => {
            let corpus = ctx.corpus()?;
            let mut rows = Vec::new();
            let mut target = Vec::new();
            for t in &corpus.timelines {
                rows.extend(derive_features(t).matrix::<f64>());
                target.extend(ctx.momentum(t)?.p1.momentum);
            }
            let m = QuadraticResponse::fit(&rows, &target, &FeatureTable::names(), SERVE_FEATURE, sc.ridge)?;
            out.json("response_model.json", "response_model", &m)?;
            (m, "fitted".to_string())
        }
    };
    let axes = sc
        .axes
        .iter()
        .map(|a: &AxisConfig| Axis { indicator: a.indicator.clone(), lo: a.lo, hi: a.hi, step: a.step })
        .collect();
    let spec = SweepSpec { axes, baseline: model.baseline(), tolerance: sc.tolerance };
    let r: SweepResult<f64> = sweep(&model, &spec)?;
    r.write_long_csv(out.writer("sweep.csv")?)?;
    if plots {
        let svg = if r.grid.len() == 1 {
            line_chart(
                &format!("Momentum response to {}", r.indicators[0]),
                &r.grid[0],
                &[
                    Series { name: "serve first", values: &r.serve_first, color: "#1f77b4" },
                    Series { name: "serve second", values: &r.serve_second, color: "#ff7f0e" },
                    Series { name: "mean", values: &r.mean, color: "#2ca02c" },
                ],
                &r.crossovers.points().iter().map(|c| (c.at[0], r.mean[c.between.0], "black")).collect::<Vec<_>>(),
                None,
            )
        } else {
            let ny = r.grid[1].len();
            let rows: Vec<Vec<f64>> = r.mean.chunks(ny).map(<[f64]>::to_vec).collect();
            heatmap("Mean momentum", &rows, &r.grid[0], &r.indicators[1], &r.indicators[0])
        };
        out.text("sweep.svg", &svg)?;
    }
    let summary = SweepSummary {
        model: source,
        indicators: r.indicators.clone(),
        shape: r.shape(),
        tolerance: sc.tolerance,
        coincident: r.crossovers == Crossovers::Coincident,
        crossovers: r.crossovers.points().iter().map(|c| c.at.clone()).collect(),
        argmax_mean: r.argmax_mean.clone(),
    };
    out.json("sweep.json", "sweep", &summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------- wavelet

#[derive(Debug, Serialize)]
pub struct WaveletSummary {
    pub match_id: String,
    pub config: WaveletConfig,
    pub scales: Vec<f64>,
    pub periods: Vec<f64>,
    pub global_peak: Peak<f64>,
    pub scale_maxima: Vec<Peak<f64>>,
    pub time_maxima: Vec<Peak<f64>>,
}

pub fn analyze_wavelet(ctx: &Ctx, out: &mut OutDir, plots: bool) -> Result<WaveletSummary> {
    let corpus = ctx.corpus()?;
    let t = &corpus.timelines[ctx.select(&corpus, false)?];
    let s = ctx.momentum(t)?;
    let scal = cwt(&s.p1.momentum, &ctx.cfg.wavelet)?;
    let e = scalogram_export(&scal);
    e.write_csv(out.writer("scalogram.csv")?)?;
    if plots {
        let svg = heatmap(&format!("Momentum scalogram, {}", t.match_id), &scal.amplitude, &scal.periods, "point", "period");
        out.text("wavelet.svg", &svg)?;
    }
    let summary = WaveletSummary {
        match_id: t.match_id.clone(),
        config: ctx.cfg.wavelet.clone(),
        scales: scal.scales.clone(),
        periods: scal.periods.clone(),
        global_peak: e.global,
        scale_maxima: e.scale_maxima,
        time_maxima: e.time_maxima,
    };
    out.json("wavelet.json", "wavelet", &summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------- report

#[derive(Serialize)]
struct ReportDoc<'a> {
    match_id: &'a str,
    players: (&'a str, &'a str),
    points: usize,
    seed: u64,
    clean: &'a CleanSummary,
    train_eval: &'a TrainSummary,
    momentum: &'a MatchSwings,
    ahp: &'a AhpSummary,
    trend: &'a TrendSummary,
    random: &'a RandomSummary,
    sweep: &'a SweepSummary,
    wavelet: WaveletBrief,
    files: Vec<String>,
}

#[derive(Serialize)]
struct WaveletBrief {
    scales: usize,
    global_peak: Peak<f64>,
}

pub fn report(ctx: &Ctx, out: &mut OutDir, plots: bool) -> Result<()> {
    let corpus = ctx.corpus()?;
    let h = ctx.select(&corpus, true)?;
    let t = &corpus.timelines[h];
    // every later stage analyses the same match
    let ctx = Ctx { cfg: RunConfig { holdout: Some(t.match_id.clone()), ..ctx.cfg.clone() }, seed: ctx.seed };

    let clean = clean(&ctx, out, None)?;
    let train_eval = train_eval(&ctx, out)?;
    let mut swings = momentum(&ctx, out, true, plots)?;
    let ahp = analyze_ahp(&ctx, out)?;
    let trend = analyze_trend(&ctx, out)?;
    let random = analyze_random(&ctx, out)?;
    let sweep = analyze_sweep(&ctx, out, plots)?;
    let wavelet = analyze_wavelet(&ctx, out, plots)?;

    let mut files = out.files();
    files.push("report.json".into());
    files.sort();
    let doc = ReportDoc {
        match_id: &t.match_id,
        players: (&t.players.0, &t.players.1),
        points: t.len(),
        seed: ctx.seed,
        clean: &clean,
        train_eval: &train_eval,
        momentum: &swings.remove(0),
        ahp: &ahp,
        trend: &trend,
        random: &random,
        sweep: &sweep,
        wavelet: WaveletBrief { scales: wavelet.scales.len(), global_peak: wavelet.global_peak },
        files,
    };
    out.json("report.json", "report", &doc)
}
