//! Dense tableau simplex for small LPs of the form
//! `max c.x  s.t.  A x <= b, x >= 0` with `b >= 0` (origin feasible).
//!
//! Bland's rule throughout, so degenerate pivots cannot cycle.

const EPS: f64 = 1e-12;

/// Optimal objective value, or `None` if the LP is unbounded.
pub(crate) fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<f64> {
    let m = a.len();
    let nv = c.len();
    let width = nv + m + 1;
    debug_assert!(b.iter().all(|&v| v >= 0.0));

    // Rows 0..m are constraints, row m is the objective (reduced costs).
    let mut t = vec![vec![0.0; width]; m + 1];
    for (i, row) in a.iter().enumerate() {
        t[i][..nv].copy_from_slice(row);
        t[i][nv + i] = 1.0;
        t[i][width - 1] = b[i];
    }
    for (j, &cj) in c.iter().enumerate() {
        t[m][j] = -cj;
    }
    let mut basis: Vec<usize> = (nv..nv + m).collect();

    loop {
        let Some(enter) = (0..nv + m).find(|&j| t[m][j] < -EPS) else {
            return Some(t[m][width - 1]);
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let coef = t[i][enter];
            if coef > EPS {
                let ratio = t[i][width - 1] / coef;
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best - EPS || (ratio <= best + EPS && basis[i] < basis[l]),
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let leave = leave?;
        pivot(&mut t, leave, enter);
        basis[leave] = enter;
    }
}

fn pivot(t: &mut [Vec<f64>], row: usize, col: usize) {
    let p = t[row][col];
    for v in t[row].iter_mut() {
        *v /= p;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let f = r[col];
        if f != 0.0 {
            for (v, &pv) in r.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
    }
}
