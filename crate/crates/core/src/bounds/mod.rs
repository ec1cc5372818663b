//! Deviation bounds between empirical and actual risk of linear classifiers.
//!
//! Three closed forms are provided, all holding with probability `1 - delta`
//! over the draw of an `n`-sample:
//!
//! * [`massart_bound`]: finite-class bound driven by the number of
//!   dichotomies the class realizes on the sample,
//!   `8 sqrt(ln N / n) + sqrt(ln(1/delta) / 2n)`.
//! * [`vc_bound`]: Vapnik's bound for a class of VC dimension `h`.
//! * [`cover_bound`]: the function-counting bound for points in general
//!   position in dimension `d`.
//!
//! All logarithms are natural. Results above 1 are returned as-is and
//! flagged [`BoundResult::vacuous`].

mod dichotomy;
mod growth;
mod rademacher;
mod simplex;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_delta, Error, Result};

pub use dichotomy::{enumerate_dichotomies, in_general_position, DichotomyCount, MAX_ENUMERATION};
pub use growth::{cover_dichotomy_count, log_growth_cover, GrowthFunction};
pub use rademacher::{rademacher_monte_carlo, RademacherEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMethod {
    Massart,
    Vc,
    Cover,
}

impl BoundMethod {
    pub const ALL: [BoundMethod; 3] = [BoundMethod::Massart, BoundMethod::Vc, BoundMethod::Cover];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundMethod::Massart => "massart",
            BoundMethod::Vc => "vc",
            BoundMethod::Cover => "cover",
        }
    }
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "massart" => Ok(BoundMethod::Massart),
            "vc" => Ok(BoundMethod::Vc),
            "cover" => Ok(BoundMethod::Cover),
            other => Err(Error::param(
                "method",
                format!("unknown bound method `{other}` (expected massart, vc or cover)"),
            )),
        }
    }
}

/// A bound evaluation request: method, sample size, feature dimension, confidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRequest {
    pub method: BoundMethod,
    pub n: u64,
    pub dim: u64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub method: BoundMethod,
    pub n: u64,
    pub dim: u64,
    pub delta: f64,
    pub delta_n: f64,
    /// `delta_n >= 1`: the bound says nothing about a 0-1 risk.
    pub vacuous: bool,
}

impl BoundRequest {
    pub fn new(method: BoundMethod, n: u64, dim: u64, delta: f64) -> Result<Self> {
        let req = BoundRequest {
            method,
            n,
            dim,
            delta,
        };
        req.validate()?;
        Ok(req)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::param("n", "sample count must be at least 1"));
        }
        if self.dim < 1 {
            return Err(Error::param("dim", "dimension must be at least 1"));
        }
        check_delta(self.delta)
    }

    /// VC dimension of affine linear classifiers in `dim` dimensions.
    pub fn vc_dimension(&self) -> u64 {
        self.dim + 1
    }

    pub fn evaluate(&self) -> Result<BoundResult> {
        self.validate()?;
        let delta_n = match self.method {
            BoundMethod::Massart => {
                let growth = log_growth_cover(self.n, self.dim)?;
                massart_bound(self.n, growth.log_n_dichotomies, self.delta)?
            }
            BoundMethod::Vc => vc_bound(self.n, self.vc_dimension(), self.delta)?,
            BoundMethod::Cover => cover_bound(self.n, self.dim, self.delta)?,
        };
        Ok(BoundResult {
            method: self.method,
            n: self.n,
            dim: self.dim,
            delta: self.delta,
            delta_n,
            vacuous: delta_n >= 1.0,
        })
    }
}

/// Convenience wrapper around [`BoundRequest::evaluate`].
pub fn evaluate(method: BoundMethod, n: u64, dim: u64, delta: f64) -> Result<BoundResult> {
    BoundRequest::new(method, n, dim, delta)?.evaluate()
}

/// Fluctuation term `sqrt(ln(1/delta) / 2n)` of the bounded-differences inequality.
///
/// `delta = 1` is accepted here (the term is then exactly 0), unlike the
/// full bounds which need `delta < 1`.
pub fn hoeffding_term(n: u64, delta: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::param("n", "sample count must be at least 1"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::param(
            "delta",
            format!("must lie in (0, 1], got {delta}"),
        ));
    }
    Ok(((1.0 / delta).ln() / (2.0 * n as f64)).sqrt())
}

/// `8 sqrt(ln N / n) + sqrt(ln(1/delta) / 2n)` where `log_n = ln N`.
pub fn massart_bound(n: u64, log_n: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(log_n >= 0.0 && log_n.is_finite()) {
        return Err(Error::param(
            "log_n",
            format!("must be finite and >= 0, got {log_n}"),
        ));
    }
    let hoeffding = hoeffding_term(n, delta)?;
    Ok(8.0 * (log_n / n as f64).sqrt() + hoeffding)
}

/// `sqrt((h (ln(2n/h) + 1) - ln(delta/4)) / n)`; requires `n >= h >= 1`.
pub fn vc_bound(n: u64, h: u64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if h < 1 {
        return Err(Error::param("h", "VC dimension must be at least 1"));
    }
    if n < h {
        return Err(Error::param(
            "n",
            format!("VC bound needs n >= h, got n = {n} < h = {h}"),
        ));
    }
    let (n, h) = (n as f64, h as f64);
    Ok(((h * ((2.0 * n / h).ln() + 1.0) - (delta / 4.0).ln()) / n).sqrt())
}

/// `sqrt(((d - 1) ln(n + 1) + 2 + ln(1/delta)) / 2n)`.
pub fn cover_bound(n: u64, d: u64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if n < 1 {
        return Err(Error::param("n", "sample count must be at least 1"));
    }
    if d < 1 {
        return Err(Error::param("d", "dimension must be at least 1"));
    }
    let n = n as f64;
    let complexity = (d - 1) as f64 * (n + 1.0).ln();
    Ok(((complexity + 2.0 + (1.0 / delta).ln()) / (2.0 * n)).sqrt())
}
