use matchflow::sweep::{sweep, Axis, FnResponse, SweepSpec, SERVE_FEATURE};
use proptest::prelude::*;

fn model(c: f64, slope: f64) -> FnResponse<impl Fn(&[f64]) -> f64 + Sync> {
    FnResponse::new(["x", SERVE_FEATURE], move |v: &[f64]| {
        if v[1] == 1.0 { slope * (v[0] - c) + (v[0] - c).powi(3) } else { 0.0 }
    })
}

fn one_axis(lo: f64, hi: f64, step: f64) -> SweepSpec<f64> {
    SweepSpec::new(vec![Axis { indicator: "x".into(), lo, hi, step }], vec![0.0, 0.0])
}

proptest! {
    #[test]
    fn refining_keeps_the_crossing(c in 0.13f64..0.87, slope in 0.2f64..3.0) {
        let m = model(c, slope);
        let coarse = sweep(&m, &one_axis(0.0, 1.0, 0.1)).unwrap();
        let fine = sweep(&m, &one_axis(0.0, 1.0, 0.05)).unwrap();
        prop_assume!(!coarse.crossovers.points().is_empty());
        for p in coarse.crossovers.points() {
            prop_assert!(fine.crossovers.points().iter().any(|q| (q.at[0] - p.at[0]).abs() <= 0.1));
            let (l, r) = p.between;
            let d = |i: usize| coarse.serve_first[i] - coarse.serve_second[i];
            prop_assert!(d(l) * d(r) < 0.0);
        }
    }

    #[test]
    fn repeated_sweeps_are_identical(c in 0.0f64..1.0) {
        let m = model(c, 1.0);
        let spec = one_axis(0.0, 1.0, 0.01);
        prop_assert_eq!(sweep(&m, &spec).unwrap(), sweep(&m, &spec).unwrap());
    }
}

#[test]
fn sweep_leaves_baseline_untouched() {
    let m = model(0.5, 1.0);
    let spec = one_axis(0.0, 1.0, 0.25);
    let before = spec.clone();
    let _ = sweep(&m, &spec).unwrap();
    assert_eq!(spec, before);
}

#[test]
fn coincident_surfaces_flagged() {
    let m = FnResponse::new(["x", "y", SERVE_FEATURE], |v: &[f64]| v[0] * v[1]);
    let spec = SweepSpec::new(
        vec![
            Axis { indicator: "x".into(), lo: 0.0, hi: 1.0, step: 0.1 },
            Axis { indicator: "y".into(), lo: 0.0, hi: 1.0, step: 0.1 },
        ],
        vec![0.0; 3],
    );
    let r = sweep(&m, &spec).unwrap();
    assert_eq!(r.crossovers, matchflow::sweep::Crossovers::Coincident);
    assert_eq!(r.mean.len(), 121);
}
