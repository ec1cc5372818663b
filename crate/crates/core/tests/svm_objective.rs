mod support;

use ndarray::{Array1, Array2};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;
use samkit::classify::{empirical_risk, svm_fit};
use samkit::rng::substream;

/// Labels from a random hyperplane, with points inside the margin rejected.
fn separable(seed: u64, n: usize, margin: f64) -> (Array2<f64>, Array1<f64>) {
    let mut rng = substream(seed, 3);
    let w: Vec<f64> = (0..2).map(|_| rng.sample(StandardNormal)).collect();
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    let b: f64 = rng.random_range(-0.5..0.5);
    let mut x = Array2::zeros((n, 2));
    let mut y = Array1::zeros(n);
    let mut i = 0;
    while i < n {
        let p: [f64; 2] = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let dist = (p[0] * w[0] + p[1] * w[1]) / norm + b;
        let label = if i % 2 == 0 { 1.0 } else { -1.0 };
        if dist * label >= margin {
            x[[i, 0]] = p[0];
            x[[i, 1]] = p[1];
            y[i] = label;
            i += 1;
        }
    }
    (x, y)
}

fn overlapping(seed: u64, n: usize, k: usize) -> (Array2<f64>, Array1<f64>) {
    let x = support::gaussian(n, k, seed);
    let y = Array1::from_shape_fn(n, |i| if i % 2 == 0 { 1.0 } else { -1.0 });
    let mut x = x;
    for (mut row, &label) in x.rows_mut().into_iter().zip(y.iter()) {
        row[0] += label;
    }
    (x, y)
}

/// `0.5 (|w|^2 + b^2) + C sum hinge`, with the bias regularized.
fn primal(w: &[f64], b: f64, c: f64, x: &Array2<f64>, y: &Array1<f64>) -> f64 {
    let reg = 0.5 * (w.iter().map(|v| v * v).sum::<f64>() + b * b);
    let loss: f64 = x
        .rows()
        .into_iter()
        .zip(y.iter())
        .map(|(row, &label)| {
            let f = row.iter().zip(w).map(|(a, v)| a * v).sum::<f64>() + b;
            (1.0 - label * f).max(0.0)
        })
        .sum();
    reg + c * loss
}

#[test]
fn separable_sets_reach_zero_risk() {
    for seed in 0..100 {
        let (x, y) = separable(seed, 100, 0.5);
        let model = svm_fit(x.view(), y.view(), 10.0, 1e-6).unwrap();
        let risk = empirical_risk(&model, x.view(), y.view()).unwrap();
        assert_eq!(risk.errors, 0, "seed {seed}");
    }
}

#[test]
fn reported_objective_is_the_primal() {
    for seed in 0..20 {
        let (x, y) = overlapping(seed, 60, 1 + seed as usize % 3);
        let model = svm_fit(x.view(), y.view(), 1.0, 1e-6).unwrap();
        let direct = primal(&model.w, model.b, 1.0, &x, &y);
        assert!((direct - model.final_objective).abs() <= 1e-9 * direct.max(1.0));
        assert!(model.converged);
    }
}

#[test]
fn solution_beats_random_candidates_on_the_hinge_objective() {
    for seed in 0..50 {
        let k = 1 + seed as usize % 3;
        let (x, y) = overlapping(seed, 60, k);
        let c = 5.0;
        let model = svm_fit(x.view(), y.view(), c, 1e-6).unwrap();
        let fitted = model.final_objective;
        let mut rng = substream(seed, 4);
        for _ in 0..500 {
            let w: Vec<f64> = model
                .w
                .iter()
                .map(|v| v + rng.sample::<f64, _>(StandardNormal))
                .collect();
            let b = model.b + rng.sample::<f64, _>(StandardNormal);
            assert!(fitted <= primal(&w, b, c, &x, &y) * (1.0 + 1e-6));
        }
        assert!(fitted <= primal(&vec![0.0; k], 0.0, c, &x, &y));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn objective_never_exceeds_the_zero_start(seed in 0u64..100_000, n in 2usize..80, k in 1usize..4, c in 0.01f64..50.0) {
        let (x, y) = overlapping(seed, n, k);
        let model = svm_fit(x.view(), y.view(), c, 1e-6).unwrap();
        prop_assert!(model.final_objective >= 0.0);
        prop_assert!(model.final_objective <= c * n as f64 * (1.0 + 1e-12));
    }

    #[test]
    fn refits_are_bitwise_identical(seed in 0u64..100_000, k in 1usize..4) {
        let (x, y) = overlapping(seed, 40, k);
        let a = svm_fit(x.view(), y.view(), 1.0, 1e-6).unwrap();
        let b = svm_fit(x.view(), y.view(), 1.0, 1e-6).unwrap();
        prop_assert_eq!(a, b);
    }
}
