use matchflow::metrics::{confusion, roc_auc, summary_metrics};
use matchflow::softmax::{train, Objective, TrainConfig};
use matchflow::MetricsSummary64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_problem(rng: &mut ChaCha8Rng, n: usize, p: usize, k: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
    let mut labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    // every class present
    for c in 0..k {
        labels[c] = c;
    }
    (rows, labels)
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let (rows, labels) = random_problem(&mut rng, 25, 3, 4);
        let obj = Objective { rows: &rows, labels: &labels, n_classes: 4, l2: 0.01 };
        let w: Vec<f64> = (0..obj.n_params()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = obj.gradient(&w);
        let h = 1e-6;
        for i in 0..w.len() {
            let (mut a, mut b) = (w.clone(), w.clone());
            a[i] += h;
            b[i] -= h;
            let fd = (obj.loss(&a) - obj.loss(&b)) / (2.0 * h);
            let rel = (g[i] - fd).abs() / g[i].abs().max(fd.abs()).max(1e-3);
            assert!(rel <= 1e-5, "param {i}: analytic {} vs numeric {fd}", g[i]);
        }
    }
}

#[test]
fn probabilities_lie_on_the_simplex() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cfg = TrainConfig { max_iters: 200, ..Default::default() };
    for _ in 0..100 {
        let (rows, labels) = random_problem(&mut rng, 30, 2, 4);
        let names = (0..4).map(|c| format!("c{c}")).collect();
        let m = train(&rows, &labels, names, vec![0.0, 0.3, 0.7, 1.0], vec!["a".into(), "b".into()], &cfg).unwrap();
        for r in &rows {
            let p = m.predict_proba(r).unwrap();
            assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

fn brute_counts(truth: &[usize], pred: &[usize], c: usize) -> (u64, u64, u64, u64) {
    let mut t = (0, 0, 0, 0);
    for (&y, &p) in truth.iter().zip(pred) {
        match (y == c, p == c) {
            (true, true) => t.0 += 1,
            (false, true) => t.1 += 1,
            (true, false) => t.2 += 1,
            (false, false) => t.3 += 1,
        }
    }
    t
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 { 0.0 } else { a as f64 / b as f64 }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) }
}

#[test]
fn counts_and_f1_equal_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let k = rng.gen_range(2..6);
        let truth: Vec<usize> = (0..50).map(|_| rng.gen_range(0..k)).collect();
        let pred: Vec<usize> = (0..50).map(|_| rng.gen_range(0..k)).collect();
        let cc = confusion(&truth, &pred, k).unwrap();
        let s: MetricsSummary64 = summary_metrics(&cc);
        let (mut ps, mut rs) = (0.0, 0.0);
        let (mut tp_all, mut fp_all, mut fn_all) = (0, 0, 0);
        for c in 0..k {
            let (tp, fp, fn_, tn) = brute_counts(&truth, &pred, c);
            let got = cc.per_class[c];
            assert_eq!((got.tp, got.fp, got.fn_, got.tn), (tp, fp, fn_, tn));
            ps += ratio(tp, tp + fp);
            rs += ratio(tp, tp + fn_);
            tp_all += tp;
            fp_all += fp;
            fn_all += fn_;
        }
        let macro_f1 = harmonic(ps / k as f64, rs / k as f64);
        assert_eq!(s.macro_avg.f1, macro_f1);
        let micro_f1 = harmonic(ratio(tp_all, tp_all + fp_all), ratio(tp_all, tp_all + fn_all));
        assert_eq!(s.micro_avg.f1, micro_f1);
        let correct = truth.iter().zip(&pred).filter(|(a, b)| a == b).count();
        let acc = correct as f64 / 50.0;
        assert!((s.micro_avg.accuracy - acc).abs() < 1e-15);
        assert!((s.micro_avg.f1 - acc).abs() < 1e-12);
    }
}

#[test]
fn auc_equals_mann_whitney() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let mut pos: Vec<bool> = (0..50).map(|_| rng.gen_bool(0.4)).collect();
        pos[0] = true;
        pos[1] = false;
        // coarse scores to force ties
        let scores: Vec<f64> = (0..50).map(|_| (rng.gen_range(0.0..1.0f64) * 10.0).round() / 10.0).collect();
        let mut wins = 0.0;
        let (mut np, mut nn) = (0.0, 0.0);
        for i in 0..50 {
            if !pos[i] {
                continue;
            }
            np += 1.0;
            for j in 0..50 {
                if pos[j] {
                    continue;
                }
                wins += if scores[i] > scores[j] { 1.0 } else if scores[i] == scores[j] { 0.5 } else { 0.0 };
            }
        }
        nn += pos.iter().filter(|p| !**p).count() as f64;
        let oracle = wins / (np * nn);
        let roc = roc_auc(&pos, &scores).unwrap();
        assert!((roc.auc - oracle).abs() < 1e-12, "{} vs {oracle}", roc.auc);
        assert_eq!(roc.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(roc.points.last(), Some(&(1.0, 1.0)));
    }
}
