//! K-class logistic regression with a reference class.
//!
//! Class `K−1` is the reference: its linear score is fixed at 0, so
//! `P(Y=k) = e^{s_k} / (1 + Σ_{j<K−1} e^{s_j})` and the reference takes the
//! remainder. Coefficients are fitted by maximum likelihood with full-batch
//! gradient descent and a halving line search.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Logistic function, stable for large `|z|`.
pub fn sigmoid<F: Scalar>(z: F) -> F {
    if z >= F::zero() {
        F::one() / (F::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (F::one() + e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_iters: usize,
    /// stop once the gradient norm falls to this value
    pub tol: f64,
    pub l2_penalty: f64,
    pub seed: u64,
    /// fraction of samples held out by [`stratified_split`]
    pub test_fraction: f64,
    /// halve the step whenever the loss would increase
    pub backtracking: bool,
    pub standardize: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1.0,
            max_iters: 2000,
            tol: 1e-6,
            l2_penalty: 1e-4,
            seed: 7,
            test_fraction: 0.2,
            backtracking: true,
            standardize: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        if !(self.tol >= 0.0) || !(self.l2_penalty >= 0.0) {
            return Err(Error::Config("tol and l2_penalty must be non-negative".into()));
        }
        if !(0.0..1.0).contains(&self.test_fraction) {
            return Err(Error::Config("test_fraction must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub seed: u64,
    pub iterations: usize,
    pub final_loss: f64,
    pub gradient_norm: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftmaxModel<F> {
    pub class_names: Vec<String>,
    pub class_values: Vec<f64>,
    pub feature_names: Vec<String>,
    /// `(K−1) × (p+1)`, intercept first in every row
    pub coefficients: Vec<Vec<F>>,
    pub feature_mean: Vec<F>,
    pub feature_std: Vec<F>,
    pub meta: TrainingMeta,
}

/// Penalized mean negative log-likelihood over already-standardized rows.
///
/// Parameters are flattened row-major from the `(K−1) × (p+1)` matrix.
#[derive(Debug, Clone, Copy)]
pub struct Objective<'a, F> {
    pub rows: &'a [Vec<F>],
    pub labels: &'a [usize],
    pub n_classes: usize,
    pub l2: F,
}

impl<'a, F: Scalar> Objective<'a, F> {
    pub fn n_params(&self) -> usize {
        (self.n_classes - 1) * (self.width())
    }

    fn width(&self) -> usize {
        self.rows.first().map_or(0, Vec::len) + 1
    }

    fn scores(&self, w: &[F], row: &[F], out: &mut [F]) {
        let width = self.width();
        for k in 0..self.n_classes - 1 {
            let c = &w[k * width..(k + 1) * width];
            out[k] = c[0] + crate::scalar::dot(&c[1..], row);
        }
        out[self.n_classes - 1] = F::zero();
    }

    fn penalty(&self, w: &[F]) -> F {
        let width = self.width();
        let ss: F = w
            .iter()
            .enumerate()
            .filter(|(i, _)| i % width != 0)
            .map(|(_, &v)| v * v)
            .sum();
        F::lit(0.5) * self.l2 * ss
    }

    pub fn loss(&self, w: &[F]) -> F {
        let mut s = vec![F::zero(); self.n_classes];
        let mut total = F::zero();
        for (row, &y) in self.rows.iter().zip(self.labels) {
            self.scores(w, row, &mut s);
            total = total + log_sum_exp(&s) - s[y];
        }
        total / F::count(self.rows.len()) + self.penalty(w)
    }

    pub fn gradient(&self, w: &[F]) -> Vec<F> {
        let width = self.width();
        let mut g = vec![F::zero(); self.n_params()];
        let mut s = vec![F::zero(); self.n_classes];
        let n = F::count(self.rows.len());
        for (row, &y) in self.rows.iter().zip(self.labels) {
            self.scores(w, row, &mut s);
            softmax_in_place(&mut s);
            for k in 0..self.n_classes - 1 {
                let resid = s[k] - if k == y { F::one() } else { F::zero() };
                let gk = &mut g[k * width..(k + 1) * width];
                gk[0] = gk[0] + resid / n;
                for (gj, &xj) in gk[1..].iter_mut().zip(row) {
                    *gj = *gj + resid * xj / n;
                }
            }
        }
        for (i, gi) in g.iter_mut().enumerate() {
            if i % width != 0 {
                *gi = *gi + self.l2 * w[i];
            }
        }
        g
    }
}

fn log_sum_exp<F: Scalar>(s: &[F]) -> F {
    let m = s.iter().copied().fold(F::neg_infinity(), F::max);
    m + s.iter().map(|&v| (v - m).exp()).sum::<F>().ln()
}

fn softmax_in_place<F: Scalar>(s: &mut [F]) {
    let m = s.iter().copied().fold(F::neg_infinity(), F::max);
    s.iter_mut().for_each(|v| *v = (*v - m).exp());
    let z: F = s.iter().copied().sum();
    s.iter_mut().for_each(|v| *v = *v / z);
}

/// Index of the largest probability; ties go to the lowest index.
pub fn argmax<F: Scalar>(p: &[F]) -> usize {
    let mut best = 0;
    for (i, &v) in p.iter().enumerate().skip(1) {
        if v > p[best] {
            best = i;
        }
    }
    best
}

fn column_stats<F: Scalar>(rows: &[Vec<F>], standardize: bool) -> (Vec<F>, Vec<F>) {
    let p = rows.first().map_or(0, Vec::len);
    if !standardize {
        return (vec![F::zero(); p], vec![F::one(); p]);
    }
    let n = F::count(rows.len());
    let mean: Vec<F> = (0..p).map(|j| rows.iter().map(|r| r[j]).sum::<F>() / n).collect();
    let std = (0..p)
        .map(|j| {
            let v = rows.iter().map(|r| (r[j] - mean[j]) * (r[j] - mean[j])).sum::<F>() / n;
            let s = v.sqrt();
            if s > F::epsilon() {
                s
            } else {
                F::one()
            }
        })
        .collect();
    (mean, std)
}

/// Fits a `n_classes`-class model. `labels[i]` is the class index of `rows[i]`.
pub fn train<F: Scalar>(
    rows: &[Vec<F>],
    labels: &[usize],
    class_names: Vec<String>,
    class_values: Vec<f64>,
    feature_names: Vec<String>,
    cfg: &TrainConfig,
) -> Result<SoftmaxModel<F>> {
    cfg.validate()?;
    let k = class_names.len();
    if class_values.len() != k {
        return Err(Error::Shape { expected: k, got: class_values.len() });
    }
    if k < 2 {
        return Err(Error::DegenerateLabels("need at least two classes".into()));
    }
    if rows.len() != labels.len() {
        return Err(Error::Shape { expected: rows.len(), got: labels.len() });
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let p = feature_names.len();
    for r in rows {
        if r.len() != p {
            return Err(Error::Shape { expected: p, got: r.len() });
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite feature value".into()));
        }
    }
    let mut seen = vec![false; k];
    for &y in labels {
        if y >= k {
            return Err(Error::DegenerateLabels(format!("label index {y} outside {k} classes")));
        }
        seen[y] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::DegenerateLabels(format!(
            "class {} absent from training data",
            class_names[missing]
        )));
    }

    let (mean, std) = column_stats(rows, cfg.standardize);
    let scaled: Vec<Vec<F>> = rows
        .iter()
        .map(|r| r.iter().zip(&mean).zip(&std).map(|((&v, &m), &s)| (v - m) / s).collect())
        .collect();
    let obj = Objective { rows: &scaled, labels, n_classes: k, l2: F::lit(cfg.l2_penalty) };

    let mut w = vec![F::zero(); obj.n_params()];
    let mut loss = obj.loss(&w);
    if !loss.is_finite() {
        return Err(Error::Diverged { iteration: 0 });
    }
    let lr = F::lit(cfg.learning_rate);
    let mut step = lr;
    let mut iterations = 0;
    let mut grad_norm = F::infinity();
    let mut converged = false;
    while iterations < cfg.max_iters {
        let g = obj.gradient(&w);
        grad_norm = crate::scalar::norm(&g);
        if grad_norm <= F::lit(cfg.tol) {
            converged = true;
            break;
        }
        iterations += 1;
        if !cfg.backtracking {
            w.iter_mut().zip(&g).for_each(|(wi, &gi)| *wi = *wi - lr * gi);
            loss = obj.loss(&w);
            if !loss.is_finite() {
                return Err(Error::Diverged { iteration: iterations });
            }
            continue;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<F> = w.iter().zip(&g).map(|(&wi, &gi)| wi - step * gi).collect();
            let l = obj.loss(&trial);
            if l.is_finite() && l <= loss {
                w = trial;
                loss = l;
                accepted = true;
                step = (step + step).min(lr);
                break;
            }
            step = step / F::lit(2.0);
        }
        if !accepted {
            // no descent possible at machine precision
            converged = true;
            break;
        }
    }
    if iterations == cfg.max_iters && !converged {
        grad_norm = crate::scalar::norm(&obj.gradient(&w));
        converged = grad_norm <= F::lit(cfg.tol);
    }

    let width = p + 1;
    let coefficients = w.chunks(width).map(<[F]>::to_vec).collect();
    Ok(SoftmaxModel {
        class_names,
        class_values,
        feature_names,
        coefficients,
        feature_mean: mean,
        feature_std: std,
        meta: TrainingMeta {
            seed: cfg.seed,
            iterations,
            final_loss: loss.as_f64(),
            gradient_norm: grad_norm.as_f64(),
            converged,
        },
    })
}

impl<F: Scalar> SoftmaxModel<F> {
    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Raw class scores; the reference class scores 0.
    pub fn scores(&self, row: &[F]) -> Result<Vec<F>> {
        let p = self.feature_names.len();
        if row.len() != p {
            return Err(Error::Shape { expected: p, got: row.len() });
        }
        let x: Vec<F> = row
            .iter()
            .zip(&self.feature_mean)
            .zip(&self.feature_std)
            .map(|((&v, &m), &s)| (v - m) / s)
            .collect();
        let mut s: Vec<F> = self
            .coefficients
            .iter()
            .map(|c| c[0] + crate::scalar::dot(&c[1..], &x))
            .collect();
        s.push(F::zero());
        Ok(s)
    }

    pub fn predict_proba(&self, row: &[F]) -> Result<Vec<F>> {
        let mut s = self.scores(row)?;
        softmax_in_place(&mut s);
        Ok(s)
    }

    /// Predicted class index.
    pub fn predict(&self, row: &[F]) -> Result<usize> {
        Ok(argmax(&self.predict_proba(row)?))
    }
}

/// Seeded stratified split returning `(train, test)` sample indices, each sorted.
///
/// Every class keeps at least one training sample.
pub fn stratified_split(labels: &[usize], test_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_classes = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for c in 0..n_classes {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        idx.shuffle(&mut rng);
        let n_test = ((idx.len() as f64) * test_fraction).round() as usize;
        let n_test = n_test.min(idx.len().saturating_sub(1));
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn names(k: usize) -> (Vec<String>, Vec<f64>) {
        ((0..k).map(|i| format!("c{i}")).collect(), (0..k).map(|i| i as f64).collect())
    }

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0_f64), 0.5);
        assert!((sigmoid(40.0_f64) - 1.0).abs() < 1e-12);
        for z in [-3.0_f64, 0.7, 12.0] {
            assert!((sigmoid(z) + sigmoid(-z) - 1.0).abs() < 1e-15);
        }
        assert!(sigmoid(-700.0_f64).is_finite());
        assert!(sigmoid(700.0_f64) == 1.0);
        assert!((sigmoid(0.0_f32) - 0.5).abs() < 1e-7);
    }

    fn separable() -> (Vec<Vec<f64>>, Vec<usize>) {
        let rows = vec![
            vec![0.0, 0.1],
            vec![0.2, 0.4],
            vec![0.5, 0.0],
            vec![0.1, 0.9],
            vec![0.8, 0.3],
            vec![2.0, 2.1],
            vec![2.5, 1.7],
            vec![1.9, 2.8],
            vec![3.0, 2.2],
            vec![2.2, 3.1],
        ];
        // separated by x + y = 2
        let labels = rows.iter().map(|r| usize::from(r[0] + r[1] > 2.0)).collect();
        (rows, labels)
    }

    #[test]
    fn separable_toy_reaches_full_accuracy() {
        let (rows, labels) = separable();
        let (n, v) = names(2);
        let m = train(&rows, &labels, n, v, vec!["x".into(), "y".into()], &TrainConfig::default()).unwrap();
        for (r, &y) in rows.iter().zip(&labels) {
            assert_eq!(m.predict(r).unwrap(), y);
        }
    }

    #[test]
    fn identical_labels_are_degenerate() {
        let (rows, _) = separable();
        let (n, v) = names(2);
        let r = train(&rows, &vec![0; rows.len()], n, v, vec!["x".into(), "y".into()], &TrainConfig::default());
        assert!(matches!(r, Err(Error::DegenerateLabels(_))));
    }

    #[test]
    fn zero_iterations_is_uniform() {
        let (rows, labels) = separable();
        let labels: Vec<usize> = labels.iter().enumerate().map(|(i, &y)| if i % 5 == 0 { 2 + y } else { y }).collect();
        let (n, v) = names(4);
        let cfg = TrainConfig { max_iters: 0, ..Default::default() };
        let m = train(&rows, &labels, n, v, vec!["x".into(), "y".into()], &cfg).unwrap();
        assert_eq!(m.predict_proba(&[1.0, 1.0]).unwrap(), vec![0.25; 4]);
        // exact tie resolves to class 0
        assert_eq!(m.predict(&[1.0, 1.0]).unwrap(), 0);
    }

    #[test]
    fn three_class_zero_coefficients() {
        let m = SoftmaxModel::<f64> {
            class_names: vec!["A".into(), "B".into(), "C".into()],
            class_values: vec![0.0, 0.5, 1.0],
            feature_names: vec!["x".into()],
            coefficients: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            feature_mean: vec![0.0],
            feature_std: vec![1.0],
            meta: TrainingMeta { seed: 0, iterations: 0, final_loss: 0.0, gradient_norm: 0.0, converged: true },
        };
        for p in m.predict_proba(&[3.7]).unwrap() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(matches!(m.predict_proba(&[1.0, 2.0]), Err(Error::Shape { expected: 1, got: 2 })));
    }

    #[test]
    fn argmax_examples() {
        assert_eq!(argmax(&[0.1, 0.7, 0.1, 0.1]), 1);
        assert_eq!(argmax(&[0.25; 4]), 0);
        // printed probabilities for the first held-out point
        assert_eq!(argmax(&[7.19e-15, 0.859431, 9.17e-23, 0.140568]), 1);
    }

    #[test]
    fn divergence_without_backtracking() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![(i as f64) * 1e3]).collect();
        let labels: Vec<usize> = (0..20).map(|i| i % 2).collect();
        let (n, v) = names(2);
        let cfg = TrainConfig {
            learning_rate: 1e300,
            backtracking: false,
            standardize: false,
            ..Default::default()
        };
        let r = train(&rows, &labels, n, v, vec!["x".into()], &cfg);
        assert!(matches!(r, Err(Error::Diverged { .. })), "{r:?}");
    }

    #[test]
    fn loss_never_increases_with_backtracking() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rows: Vec<Vec<f64>> = (0..40).map(|_| (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let labels: Vec<usize> = (0..40).map(|i| i % 4).collect();
        let (n, v) = names(4);
        let mut prev = f64::INFINITY;
        for iters in [0, 1, 2, 5, 10, 50, 200] {
            let cfg = TrainConfig { max_iters: iters, learning_rate: 50.0, ..Default::default() };
            let m = train(&rows, &labels, n.clone(), v.clone(), vec!["a".into(), "b".into(), "c".into()], &cfg).unwrap();
            assert!(m.meta.final_loss <= prev + 1e-15);
            prev = m.meta.final_loss;
        }
    }

    #[test]
    fn split_is_stratified_and_seeded() {
        let labels: Vec<usize> = (0..100).map(|i| i % 4).collect();
        let (tr, te) = stratified_split(&labels, 0.2, 9);
        assert_eq!(te.len(), 20);
        assert_eq!(tr.len() + te.len(), 100);
        for c in 0..4 {
            assert_eq!(te.iter().filter(|&&i| labels[i] == c).count(), 5);
        }
        assert_eq!(stratified_split(&labels, 0.2, 9), (tr, te));
    }
}
