//! Partial least squares feature extraction against a single ±1 response.
//!
//! Each component takes the unit direction maximizing the squared covariance
//! of the current (deflated) block with the labels, which for one response is
//! `w = X'y / |X'y|`, then removes the rank-one part `s p'` explained by the
//! score before extracting the next component.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::classify::check_labels;
use crate::error::{Error, Result};

/// Relative size of `|X'y|` below which a direction is treated as degenerate.
const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlsModel {
    /// Column means subtracted before extraction.
    pub means: Array1<f64>,
    /// `d x k`, unit-norm columns.
    pub weights: Array2<f64>,
    /// `d x k`.
    pub loadings: Array2<f64>,
    pub k: usize,
    /// `n x k` scores of the training rows.
    pub train_scores: Array2<f64>,
}

impl PlsModel {
    pub fn n_features(&self) -> usize {
        self.means.len()
    }

    /// Scores for new rows: same centering, weights and deflation chain.
    pub fn transform(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.n_features() {
            return Err(Error::Shape(format!(
                "model fitted on {} features, got {}",
                self.n_features(),
                x.ncols()
            )));
        }
        let mut block = center(x, self.means.view());
        let mut scores = Array2::zeros((x.nrows(), self.k));
        for j in 0..self.k {
            let s = block.dot(&self.weights.column(j).to_owned());
            subtract_rank_one(&mut block, s.view(), self.loadings.column(j));
            scores.column_mut(j).assign(&s);
        }
        Ok(scores)
    }
}

pub fn pls_transform(model: &PlsModel, x: ArrayView2<f64>) -> Result<Array2<f64>> {
    model.transform(x)
}

pub fn pls_fit(x: ArrayView2<f64>, y: ArrayView1<f64>, k: usize) -> Result<PlsModel> {
    let (n, d) = x.dim();
    if y.len() != n {
        return Err(Error::Shape(format!("{n} rows but {} labels", y.len())));
    }
    if n < 2 {
        return Err(Error::Input(format!("need at least 2 samples, got {n}")));
    }
    if k < 1 || k > d {
        return Err(Error::param(
            "k",
            format!("component count must lie in 1..={d}, got {k}"),
        ));
    }
    check_labels(y)?;

    let means = x.mean_axis(Axis(0)).expect("n >= 2");
    let mut block = center(x, means.view());
    let mut weights = Array2::zeros((d, k));
    let mut loadings = Array2::zeros((d, k));
    let mut train_scores = Array2::zeros((n, k));
    let scale = frobenius(block.view()) * y.dot(&y).sqrt();

    for j in 0..k {
        let cross = block.t().dot(&y);
        let norm = cross.dot(&cross).sqrt();
        if norm.is_nan() || norm <= DEGENERATE_TOL * scale || norm == 0.0 {
            return Err(Error::DegenerateDirection { component: j + 1 });
        }
        // cov(Xw, y) = |X'y| / n > 0, so the sign convention holds by construction.
        let w = cross / norm;
        let s = block.dot(&w);
        let p = loading(block.view(), s.view())
            .ok_or(Error::DegenerateDirection { component: j + 1 })?;
        subtract_rank_one(&mut block, s.view(), p.view());
        weights.column_mut(j).assign(&w);
        loadings.column_mut(j).assign(&p);
        train_scores.column_mut(j).assign(&s);
    }

    Ok(PlsModel {
        means,
        weights,
        loadings,
        k,
        train_scores,
    })
}

/// `p = X's / s's` and `X - s p'`.
pub fn deflate(x: ArrayView2<f64>, s: ArrayView1<f64>) -> Result<(Array2<f64>, Array1<f64>)> {
    if s.len() != x.nrows() {
        return Err(Error::Shape(format!(
            "score has length {} but matrix has {} rows",
            s.len(),
            x.nrows()
        )));
    }
    let p = loading(x, s).ok_or(Error::DegenerateDirection { component: 1 })?;
    let mut out = x.to_owned();
    subtract_rank_one(&mut out, s, p.view());
    Ok((out, p))
}

fn loading(x: ArrayView2<f64>, s: ArrayView1<f64>) -> Option<Array1<f64>> {
    let ss = s.dot(&s);
    if ss > 0.0 && ss.is_finite() {
        Some(x.t().dot(&s) / ss)
    } else {
        None
    }
}

fn center(x: ArrayView2<f64>, means: ArrayView1<f64>) -> Array2<f64> {
    let mut out = x.to_owned();
    for mut row in out.rows_mut() {
        row.zip_mut_with(&means, |v, m| *v -= m);
    }
    out
}

fn subtract_rank_one(block: &mut Array2<f64>, s: ArrayView1<f64>, p: ArrayView1<f64>) {
    for (mut row, &si) in block.rows_mut().into_iter().zip(s.iter()) {
        row.zip_mut_with(&p, |v, pj| *v -= si * pj);
    }
}

fn frobenius(x: ArrayView2<f64>) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
