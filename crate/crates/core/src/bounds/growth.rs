use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `ln N(n, d)`, the log-count of homogeneously linearly separable
/// dichotomies of `n` points in general position in `R^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFunction {
    pub n: u64,
    pub d: u64,
    pub log_n_dichotomies: f64,
}

impl GrowthFunction {
    /// `N(n, d)` as a float; overflows to infinity for large samples.
    pub fn count(&self) -> f64 {
        self.log_n_dichotomies.exp()
    }

    pub fn shatters(&self) -> bool {
        self.n <= self.d
    }
}

/// Cover's function-counting theorem, `N(n, d) = 2 sum_{k<d} C(n-1, k)`,
/// evaluated in log space.
pub fn log_growth_cover(n: u64, d: u64) -> Result<GrowthFunction> {
    if n < 1 {
        return Err(Error::param("n", "sample count must be at least 1"));
    }
    if d < 1 {
        return Err(Error::param("d", "dimension must be at least 1"));
    }
    let shatter = n as f64 * LN_2;
    let log_n_dichotomies = if n <= d {
        shatter
    } else {
        // d - 1 < n - 1 here, so every term is a proper binomial.
        let m = (n - 1) as f64;
        let mut terms = Vec::with_capacity(d as usize);
        let mut log_binom = 0.0;
        terms.push(log_binom);
        for k in 1..d {
            let k = k as f64;
            log_binom += (m - k + 1.0).ln() - k.ln();
            terms.push(log_binom);
        }
        let peak = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = terms.iter().map(|t| (t - peak).exp()).sum();
        (LN_2 + peak + sum.ln()).min(shatter)
    };
    Ok(GrowthFunction {
        n,
        d,
        log_n_dichotomies,
    })
}

/// Exact `N(n, d)` in integer arithmetic, `None` on overflow.
pub fn cover_dichotomy_count(n: u64, d: u64) -> Option<u128> {
    if n == 0 || d == 0 {
        return None;
    }
    let m = (n - 1) as u128;
    let mut binom: u128 = 1;
    let mut sum: u128 = 1;
    for k in 1..d.min(n) as u128 {
        binom = binom.checked_mul(m - k + 1)? / k;
        sum = sum.checked_add(binom)?;
    }
    sum.checked_mul(2)
}
