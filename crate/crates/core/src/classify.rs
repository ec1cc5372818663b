//! Linear SVM (the in-sample ERM learner) and 0-1 empirical risk.
//!
//! The solver is dual coordinate descent on the L1-loss (hinge) SVM dual,
//! sweeping samples in index order. The bias is learned as the weight of an
//! augmented constant feature, so it is regularized together with `w`.
//! Training stops once the duality gap falls below `tol * max(1, primal)`.

use ndarray::{ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_C_REG: f64 = 1.0;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_EPOCHS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmOptions {
    pub c_reg: f64,
    pub tol: f64,
    pub max_epochs: usize,
    /// Learn a bias term. Disable for separators through the origin.
    pub fit_intercept: bool,
}

impl Default for SvmOptions {
    fn default() -> Self {
        SvmOptions {
            c_reg: DEFAULT_C_REG,
            tol: DEFAULT_TOL,
            max_epochs: DEFAULT_MAX_EPOCHS,
            fit_intercept: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearClassifier {
    pub w: Vec<f64>,
    pub b: f64,
    pub c_reg: f64,
    pub converged: bool,
    /// Primal objective `0.5 |w~|^2 + C sum hinge` at the returned solution.
    pub final_objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub errors: usize,
    pub n: usize,
    pub empirical_risk: f64,
    pub empirical_accuracy: f64,
}

impl RiskEstimate {
    pub fn from_counts(errors: usize, n: usize) -> Self {
        let empirical_risk = errors as f64 / n as f64;
        RiskEstimate {
            errors,
            n,
            empirical_risk,
            empirical_accuracy: 1.0 - empirical_risk,
        }
    }
}

impl LinearClassifier {
    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn decision(&self, x: ArrayView1<f64>) -> f64 {
        self.w.iter().zip(x.iter()).map(|(w, x)| w * x).sum::<f64>() + self.b
    }

    /// `sign(w.x + b)` with exact zero mapped to +1.
    pub fn predict_one(&self, x: ArrayView1<f64>) -> f64 {
        if self.decision(x) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Same decisions with `(w, b)` multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> LinearClassifier {
        LinearClassifier {
            w: self.w.iter().map(|w| w * factor).collect(),
            b: self.b * factor,
            ..self.clone()
        }
    }
}

pub fn svm_fit(
    scores: ArrayView2<f64>,
    y: ArrayView1<f64>,
    c_reg: f64,
    tol: f64,
) -> Result<LinearClassifier> {
    svm_fit_with(
        scores,
        y,
        &SvmOptions {
            c_reg,
            tol,
            ..SvmOptions::default()
        },
    )
}

pub fn svm_fit_with(
    scores: ArrayView2<f64>,
    y: ArrayView1<f64>,
    opts: &SvmOptions,
) -> Result<LinearClassifier> {
    let (n, k) = scores.dim();
    if y.len() != n {
        return Err(Error::Shape(format!(
            "{n} score rows but {} labels",
            y.len()
        )));
    }
    if n < 2 {
        return Err(Error::Input(format!("need at least 2 samples, got {n}")));
    }
    if k < 1 {
        return Err(Error::Shape("score matrix has no columns".into()));
    }
    check_labels(y)?;
    if !(opts.c_reg > 0.0 && opts.c_reg.is_finite()) {
        return Err(Error::param(
            "c_reg",
            format!("must be positive, got {}", opts.c_reg),
        ));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::param(
            "tol",
            format!("must be positive, got {}", opts.tol),
        ));
    }

    let c = opts.c_reg;
    let dim = if opts.fit_intercept { k + 1 } else { k };
    let feature = |i: usize, j: usize| if j < k { scores[[i, j]] } else { 1.0 };
    let q_diag: Vec<f64> = (0..n)
        .map(|i| (0..dim).map(|j| feature(i, j).powi(2)).sum())
        .collect();

    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; dim];
    let objective_at_zero = c * n as f64;
    let mut converged = false;

    for _ in 0..opts.max_epochs {
        for i in 0..n {
            let yi = y[i];
            let margin: f64 = (0..dim).map(|j| w[j] * feature(i, j)).sum();
            let grad = yi * margin - 1.0;
            let projected = if alpha[i] <= 0.0 {
                grad.min(0.0)
            } else if alpha[i] >= c {
                grad.max(0.0)
            } else {
                grad
            };
            if projected == 0.0 {
                continue;
            }
            let old = alpha[i];
            alpha[i] = if q_diag[i] > 0.0 {
                (old - grad / q_diag[i]).clamp(0.0, c)
            } else {
                c
            };
            let step = (alpha[i] - old) * yi;
            if step != 0.0 {
                for (j, wj) in w.iter_mut().enumerate() {
                    *wj += step * feature(i, j);
                }
            }
        }
        let (primal, dual) = objectives(&w, &alpha, c, y, &feature);
        if primal - dual <= opts.tol * primal.abs().max(1.0) {
            converged = true;
            break;
        }
    }

    let (mut primal, _) = objectives(&w, &alpha, c, y, &feature);
    if primal > objective_at_zero {
        w.iter_mut().for_each(|v| *v = 0.0);
        primal = objective_at_zero;
    }
    let b = if opts.fit_intercept { w[k] } else { 0.0 };
    w.truncate(k);
    Ok(LinearClassifier {
        w,
        b,
        c_reg: c,
        converged,
        final_objective: primal,
    })
}

fn objectives(
    w: &[f64],
    alpha: &[f64],
    c: f64,
    y: ArrayView1<f64>,
    feature: &impl Fn(usize, usize) -> f64,
) -> (f64, f64) {
    let half_norm = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
    let hinge: f64 = (0..alpha.len())
        .map(|i| {
            let m: f64 = w.iter().enumerate().map(|(j, wj)| wj * feature(i, j)).sum();
            (1.0 - y[i] * m).max(0.0)
        })
        .sum();
    let primal = half_norm + c * hinge;
    let dual = alpha.iter().sum::<f64>() - half_norm;
    (primal, dual)
}

pub(crate) fn check_labels(y: ArrayView1<f64>) -> Result<()> {
    let mut pos = false;
    let mut neg = false;
    for (i, &v) in y.iter().enumerate() {
        if v == 1.0 {
            pos = true;
        } else if v == -1.0 {
            neg = true;
        } else {
            return Err(Error::Input(format!("label {i} is {v}, expected -1 or +1")));
        }
    }
    if pos && neg {
        Ok(())
    } else {
        Err(Error::Input("both classes must be present".into()))
    }
}

pub fn predict(model: &LinearClassifier, scores: ArrayView2<f64>) -> Result<Vec<f64>> {
    if scores.ncols() != model.dim() {
        return Err(Error::Shape(format!(
            "model has {} weights but scores have {} columns",
            model.dim(),
            scores.ncols()
        )));
    }
    Ok(scores
        .rows()
        .into_iter()
        .map(|r| model.predict_one(r))
        .collect())
}

/// Fraction of 0-1 mistakes of `model` on `(scores, y)`.
pub fn empirical_risk(
    model: &LinearClassifier,
    scores: ArrayView2<f64>,
    y: ArrayView1<f64>,
) -> Result<RiskEstimate> {
    if scores.nrows() != y.len() {
        return Err(Error::Shape(format!(
            "{} score rows but {} labels",
            scores.nrows(),
            y.len()
        )));
    }
    if y.is_empty() {
        return Err(Error::Input("empty evaluation sample".into()));
    }
    let predictions = predict(model, scores)?;
    let errors = predictions
        .iter()
        .zip(y.iter())
        .filter(|(p, t)| p != t)
        .count();
    Ok(RiskEstimate::from_counts(errors, y.len()))
}
