//! One-vs-rest confusion statistics, macro/micro F1 and ROC curves.
//!
//! Zero denominators yield 0 for precision, recall and specificity.
//! Micro averages pool the per-class counts before dividing; macro averages
//! take the mean of per-class precision and recall and apply the F1 formula
//! to those means.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub n_classes: usize,
    pub total: u64,
    pub per_class: Vec<ClassCounts>,
    /// `matrix[truth][pred]`
    pub matrix: Vec<Vec<u64>>,
}

pub fn confusion(truth: &[usize], pred: &[usize], n_classes: usize) -> Result<ConfusionCounts> {
    if truth.len() != pred.len() {
        return Err(Error::Shape { expected: truth.len(), got: pred.len() });
    }
    let mut matrix = vec![vec![0u64; n_classes]; n_classes];
    for (&t, &p) in truth.iter().zip(pred) {
        if t >= n_classes || p >= n_classes {
            return Err(Error::Domain(format!("label outside {n_classes} classes")));
        }
        matrix[t][p] += 1;
    }
    let total = truth.len() as u64;
    let per_class = (0..n_classes)
        .map(|c| {
            let tp = matrix[c][c];
            let fn_ = matrix[c].iter().sum::<u64>() - tp;
            let fp = matrix.iter().map(|row| row[c]).sum::<u64>() - tp;
            ClassCounts { tp, fp, fn_, tn: total - tp - fp - fn_ }
        })
        .collect();
    Ok(ConfusionCounts { n_classes, total, per_class, matrix })
}

impl ConfusionCounts {
    pub fn correct(&self) -> u64 {
        self.per_class.iter().map(|c| c.tp).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSet<F> {
    pub precision: F,
    pub recall: F,
    pub specificity: F,
    pub accuracy: F,
    pub f1: F,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary<F> {
    pub per_class: Vec<RateSet<F>>,
    /// F1 of the averaged precision and recall
    pub macro_avg: RateSet<F>,
    /// unweighted mean of per-class F1
    pub mean_class_f1: F,
    pub micro_avg: RateSet<F>,
}

fn safe_div<F: Scalar>(num: u64, den: u64) -> F {
    if den == 0 {
        F::zero()
    } else {
        F::lit(num as f64) / F::lit(den as f64)
    }
}

pub fn f1<F: Scalar>(precision: F, recall: F) -> F {
    let s = precision + recall;
    if s == F::zero() {
        F::zero()
    } else {
        F::lit(2.0) * precision * recall / s
    }
}

pub fn summary_metrics<F: Scalar>(counts: &ConfusionCounts) -> MetricsSummary<F> {
    let per_class: Vec<RateSet<F>> = counts
        .per_class
        .iter()
        .map(|c| {
            let precision = safe_div(c.tp, c.tp + c.fp);
            let recall = safe_div(c.tp, c.tp + c.fn_);
            RateSet {
                precision,
                recall,
                specificity: safe_div(c.tn, c.tn + c.fp),
                accuracy: safe_div(c.tp + c.tn, counts.total),
                f1: f1(precision, recall),
            }
        })
        .collect();
    let k = F::count(per_class.len().max(1));
    let avg = |f: fn(&RateSet<F>) -> F| per_class.iter().map(f).sum::<F>() / k;
    let p_macro = avg(|r| r.precision);
    let r_macro = avg(|r| r.recall);
    let macro_avg = RateSet {
        precision: p_macro,
        recall: r_macro,
        specificity: avg(|r| r.specificity),
        accuracy: avg(|r| r.accuracy),
        f1: f1(p_macro, r_macro),
    };
    let sum = |f: fn(&ClassCounts) -> u64| counts.per_class.iter().map(f).sum::<u64>();
    let (tp, fp, fn_, tn) = (sum(|c| c.tp), sum(|c| c.fp), sum(|c| c.fn_), sum(|c| c.tn));
    let p_micro = safe_div(tp, tp + fp);
    let r_micro = safe_div(tp, tp + fn_);
    let micro_avg = RateSet {
        precision: p_micro,
        recall: r_micro,
        specificity: safe_div(tn, tn + fp),
        // single-label: pooled accuracy is the share of correct predictions
        accuracy: safe_div(tp, counts.total),
        f1: f1(p_micro, r_micro),
    };
    MetricsSummary { mean_class_f1: avg(|r| r.f1), per_class, macro_avg, micro_avg }
}

/// Row-per-metric table with one column per class plus macro and micro averages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsTable {
    pub columns: Vec<String>,
    pub rows: Vec<MetricsRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub metric: String,
    pub values: Vec<f64>,
}

pub fn metrics_table<F: Scalar>(counts: &ConfusionCounts, summary: &MetricsSummary<F>, class_names: &[String]) -> MetricsTable {
    let mut columns: Vec<String> = class_names.iter().map(|c| format!("{c} is positive")).collect();
    columns.push("MacroAVG".into());
    columns.push("MicroAVG".into());
    let k = counts.per_class.len().max(1) as f64;
    let count_row = |name: &str, f: fn(&ClassCounts) -> u64| {
        let mut values: Vec<f64> = counts.per_class.iter().map(|c| f(c) as f64).collect();
        let total: f64 = values.iter().sum();
        values.push(total / k);
        values.push(total);
        MetricsRow { metric: name.into(), values }
    };
    let rate_row = |name: &str, f: fn(&RateSet<F>) -> F| {
        let mut values: Vec<f64> = summary.per_class.iter().map(|r| f(r).as_f64()).collect();
        values.push(f(&summary.macro_avg).as_f64());
        values.push(f(&summary.micro_avg).as_f64());
        MetricsRow { metric: name.into(), values }
    };
    MetricsTable {
        columns,
        rows: vec![
            count_row("true_positive", |c| c.tp),
            count_row("false_positive", |c| c.fp),
            count_row("false_negative", |c| c.fn_),
            count_row("true_negative", |c| c.tn),
            rate_row("precision", |r| r.precision),
            rate_row("sensitivity", |r| r.recall),
            rate_row("specificity", |r| r.specificity),
            rate_row("accuracy", |r| r.accuracy),
            rate_row("F-measure", |r| r.f1),
        ],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve<F> {
    /// `thresholds[i]` produces `points[i + 1]`; descending
    pub thresholds: Vec<F>,
    /// (FPR, TPR), from (0,0) to (1,1)
    pub points: Vec<(F, F)>,
    pub auc: F,
}

/// ROC curve of `scores` against the binary truth `positive`.
///
/// Equal scores form one threshold step, so ties contribute a diagonal
/// segment (half credit).
pub fn roc_auc<F: Scalar>(positive: &[bool], scores: &[F]) -> Result<RocCurve<F>> {
    if positive.len() != scores.len() {
        return Err(Error::Shape { expected: positive.len(), got: scores.len() });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Domain("NaN score".into()));
    }
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 {
        return Err(Error::UndefinedRoc("no positive samples"));
    }
    if n_neg == 0 {
        return Err(Error::UndefinedRoc("no negative samples"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("no NaN"));

    let (np, nn) = (F::count(n_pos), F::count(n_neg));
    let mut points = vec![(F::zero(), F::zero())];
    let mut thresholds = Vec::new();
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auc = F::zero();
    let mut i = 0;
    while i < order.len() {
        let t = scores[order[i]];
        while i < order.len() && scores[order[i]] == t {
            if positive[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let (x0, y0) = *points.last().expect("non-empty");
        let next = (F::count(fp) / nn, F::count(tp) / np);
        auc = auc + (next.0 - x0) * (next.1 + y0) / F::lit(2.0);
        points.push(next);
        thresholds.push(t);
    }
    Ok(RocCurve { thresholds, points, auc })
}

/// One-vs-rest ROC for class `class` from per-sample probability vectors.
pub fn roc_for_class<F: Scalar>(truth: &[usize], probabilities: &[Vec<F>], class: usize) -> Result<RocCurve<F>> {
    let positive: Vec<bool> = truth.iter().map(|&t| t == class).collect();
    let scores: Vec<F> = probabilities
        .iter()
        .map(|p| p.get(class).copied().ok_or(Error::Shape { expected: class + 1, got: p.len() }))
        .collect::<Result<_>>()?;
    roc_auc(&positive, &scores)
}
