//! Brute-force oracle for the growth function: enumerate every labeling of a
//! small point set and decide linear separability of each with an LP.

use itertools::Itertools;
use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::simplex;
use crate::error::{Error, Result};

/// Largest sample for which all `2^n` labelings are enumerated.
pub const MAX_ENUMERATION: usize = 16;

/// Margin a labeling must reach (with `|w|_inf <= 1`) to count as strictly separable.
const MARGIN_TOL: f64 = 1e-9;

/// Relative pivot threshold for the general-position rank test.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DichotomyCount {
    pub count: u64,
    /// False when some subset of points is linearly dependent; the count is
    /// still exact for the given points but need not match Cover's formula.
    pub general_position: bool,
}

/// Counts labelings of the rows of `points` realizable by a linear separator,
/// through the origin when `homogeneous` is set, otherwise affine.
pub fn enumerate_dichotomies(points: ArrayView2<f64>, homogeneous: bool) -> Result<DichotomyCount> {
    let n = points.nrows();
    if n > MAX_ENUMERATION {
        return Err(Error::Size(format!(
            "enumeration supports at most {MAX_ENUMERATION} points, got {n}"
        )));
    }
    if points.ncols() == 0 {
        return Err(Error::Shape("points must have at least one column".into()));
    }
    if points.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("points contain non-finite values".into()));
    }
    let lifted = lift(points, homogeneous);
    let general_position = rows_in_general_position(lifted.view());
    if n == 0 {
        return Ok(DichotomyCount {
            count: 1,
            general_position,
        });
    }

    // y and -y are separable together, so fix the sign of the last point.
    let half = 1u64 << (n - 1);
    let mut count = 0;
    for mask in 0..half {
        let labels: Vec<f64> = (0..n)
            .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
            .collect();
        if strictly_separable(lifted.view(), &labels) {
            count += 2;
        }
    }
    Ok(DichotomyCount {
        count,
        general_position,
    })
}

/// General-position check matching the separator family (homogeneous or affine).
pub fn in_general_position(points: ArrayView2<f64>, homogeneous: bool) -> bool {
    rows_in_general_position(lift(points, homogeneous).view())
}

fn lift(points: ArrayView2<f64>, homogeneous: bool) -> Array2<f64> {
    if homogeneous {
        points.to_owned()
    } else {
        let (n, d) = points.dim();
        Array2::from_shape_fn(
            (n, d + 1),
            |(i, j)| if j < d { points[[i, j]] } else { 1.0 },
        )
    }
}

/// Every subset of `min(n, d)` rows is linearly independent.
fn rows_in_general_position(points: ArrayView2<f64>) -> bool {
    let (n, d) = points.dim();
    let size = n.min(d);
    (0..n).combinations(size).all(|subset| {
        let rows: Vec<Vec<f64>> = subset.iter().map(|&i| points.row(i).to_vec()).collect();
        full_row_rank(rows)
    })
}

fn full_row_rank(mut rows: Vec<Vec<f64>>) -> bool {
    let r = rows.len();
    if r == 0 {
        return true;
    }
    let d = rows[0].len();
    let scale = rows
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return false;
    }
    let mut rank = 0;
    for col in 0..d {
        if rank == r {
            break;
        }
        let (pivot, value) =
            (rank..r)
                .map(|i| (i, rows[i][col].abs()))
                .fold(
                    (rank, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if value <= RANK_TOL * scale {
            continue;
        }
        rows.swap(rank, pivot);
        for i in rank + 1..r {
            let f = rows[i][col] / rows[rank][col];
            let (head, tail) = rows.split_at_mut(i);
            for (a, b) in tail[0][col..d].iter_mut().zip(&head[rank][col..d]) {
                *a -= f * b;
            }
        }
        rank += 1;
    }
    rank == r
}

/// Homogeneous strict separability: is there `w` with `y_i w.x_i > 0` for all i?
///
/// Solved as `max t  s.t.  y_i w.x_i >= t, -1 <= w_j <= 1, t <= 1`, shifted
/// (`w = u - 1`, `t = v - K`) so the origin of `(u, v)` is feasible.
fn strictly_separable(points: ArrayView2<f64>, labels: &[f64]) -> bool {
    let (n, d) = points.dim();
    let k = points
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);

    let nv = d + 1;
    let mut a = Vec::with_capacity(n + d + 1);
    let mut b = Vec::with_capacity(n + d + 1);
    for (row, &y) in points.rows().into_iter().zip(labels) {
        let mut coeffs: Vec<f64> = row.iter().map(|&x| -y * x).collect();
        coeffs.push(1.0);
        a.push(coeffs);
        b.push(k - y * row.sum());
    }
    for j in 0..d {
        let mut coeffs = vec![0.0; nv];
        coeffs[j] = 1.0;
        a.push(coeffs);
        b.push(2.0);
    }
    let mut cap = vec![0.0; nv];
    cap[d] = 1.0;
    a.push(cap);
    b.push(k + 1.0);
    for v in &mut b {
        // Rounding in k - y.sum can dip a hair below zero.
        *v = v.max(0.0);
    }

    let mut c = vec![0.0; nv];
    c[d] = 1.0;
    match simplex::maximize(&c, &a, &b) {
        Some(best) => best - k > MARGIN_TOL,
        None => true,
    }
}
