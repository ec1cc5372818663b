use ndarray::{Array1, ArrayView2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classify::{predict, svm_fit_with, SvmOptions};
use crate::error::{Error, Result};
use crate::par::map_indexed;
use crate::rng::substream;

/// Penalty and epoch cap for the pseudo-label fits. A large penalty makes the
/// hinge fit track 0-1 ERM; an unconverged fit can only underestimate the
/// supremum further.
const PSEUDO_LABEL_C: f64 = 10.0;
const PSEUDO_LABEL_EPOCHS: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RademacherEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
}

/// Monte Carlo estimate of `E_sigma sup_g |(1/n) sum sigma_i g(x_i)|` over
/// homogeneous linear classifiers `g` on the rows of `features`.
///
/// The supremum for each sign draw is approximated by fitting a homogeneous
/// SVM to `sigma` as pseudo-labels (and comparing against the constant
/// classifier `w = 0`), so the estimate is a lower approximation of the true
/// average. Trial `t` draws from substream `t` of `seed`.
pub fn rademacher_monte_carlo(
    features: ArrayView2<f64>,
    trials: usize,
    seed: u64,
) -> Result<RademacherEstimate> {
    let n = features.nrows();
    if n == 0 || features.ncols() == 0 {
        return Err(Error::Input("empty dataset".into()));
    }
    if trials < 1 {
        return Err(Error::param("trials", "need at least one trial"));
    }
    let opts = SvmOptions {
        c_reg: PSEUDO_LABEL_C,
        max_epochs: PSEUDO_LABEL_EPOCHS,
        fit_intercept: false,
        ..SvmOptions::default()
    };

    let sups = map_indexed(trials, |t| -> Result<f64> {
        let mut rng = substream(seed, t as u64);
        let sigma = Array1::from_shape_fn(n, |_| if rng.random::<bool>() { 1.0 } else { -1.0 });
        // w = 0 predicts +1 everywhere.
        let constant = (sigma.sum() / n as f64).abs();
        let both_signs = sigma.iter().any(|&s| s > 0.0) && sigma.iter().any(|&s| s < 0.0);
        if !both_signs {
            return Ok(constant);
        }
        let model = svm_fit_with(features, sigma.view(), &opts)?;
        let fitted = predict(&model, features)?;
        let corr = fitted
            .iter()
            .zip(sigma.iter())
            .map(|(g, s)| g * s)
            .sum::<f64>()
            / n as f64;
        Ok(corr.abs().max(constant))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;

    let mean = sups.iter().sum::<f64>() / trials as f64;
    let std_error = if trials > 1 {
        let var = sups.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        (var / trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(RademacherEstimate {
        mean,
        std_error,
        trials,
    })
}
