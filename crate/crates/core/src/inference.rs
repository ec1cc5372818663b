//! Worst-case accuracies, the one-sided proportion z-test, and the final
//! region selection.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::PipelineConfig;

/// Accuracy guaranteed with probability `1 - delta`: `acc - delta_n` clamped to `[0, 1]`.
pub fn worst_case_accuracy(empirical_accuracy: f64, delta_n: f64) -> f64 {
    (empirical_accuracy - delta_n).clamp(0.0, 1.0)
}

/// Which per-region proportion enters the z-test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    #[default]
    WorstCase,
    Empirical,
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "worst_case" => Ok(Statistic::WorstCase),
            "empirical" => Ok(Statistic::Empirical),
            other => Err(Error::param(
                "statistic",
                format!("expected worst_case or empirical, got `{other}`"),
            )),
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistic::WorstCase => "worst_case",
            Statistic::Empirical => "empirical",
        })
    }
}

/// One-sided test of `H0: pi = pi0` against `H1: pi > pi0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProportionTest {
    pub pi0: f64,
    /// Denominator of the null standard error.
    pub l: usize,
    pub alpha: f64,
}

impl ProportionTest {
    /// Requires `l pi0 >= 10` and `l (1 - pi0) >= 10`, i.e. `l >= 20` at
    /// `pi0 = 0.5`, so that the normal approximation is reasonable.
    pub fn new(pi0: f64, l: usize, alpha: f64) -> Result<Self> {
        if !(pi0 > 0.0 && pi0 < 1.0) {
            return Err(Error::param(
                "pi0",
                format!("must lie in (0, 1), got {pi0}"),
            ));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::param(
                "alpha",
                format!("must lie in (0, 1), got {alpha}"),
            ));
        }
        let lf = l as f64;
        if lf * pi0 < 10.0 - 1e-9 || lf * (1.0 - pi0) < 10.0 - 1e-9 {
            return Err(Error::param(
                "l",
                format!("normal approximation needs l*pi0 >= 10 and l*(1-pi0) >= 10, got l = {l}, pi0 = {pi0}"),
            ));
        }
        Ok(ProportionTest { pi0, l, alpha })
    }

    pub fn sigma0(&self) -> f64 {
        (self.pi0 * (1.0 - self.pi0) / self.l as f64).sqrt()
    }
}

/// `(pi_hat - pi0) / sigma0`.
pub fn proportion_z(pi_hat: f64, test: &ProportionTest) -> Result<f64> {
    let sigma0 = test.sigma0();
    if !(sigma0 > 0.0 && sigma0.is_finite()) {
        return Err(Error::param(
            "sigma0",
            format!("null standard error is {sigma0}"),
        ));
    }
    Ok((pi_hat - test.pi0) / sigma0)
}

/// Upper-tail normal probability `1 - Phi(z) = erfc(z / sqrt 2) / 2`.
///
/// Uses the musl/FreeBSD `erfc` (relative error about 1 ulp). Results that
/// would underflow are floored at `f64::MIN_POSITIVE` so the p-value stays
/// in `(0, 1]`.
pub fn p_value_one_sided(z: f64) -> f64 {
    (0.5 * libm::erfc(z / std::f64::consts::SQRT_2)).clamp(f64::MIN_POSITIVE, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoiAnalysis {
    pub roi_id: u32,
    pub roi_name: String,
    pub n: usize,
    pub k: usize,
    pub empirical_accuracy: f64,
    pub delta_n: f64,
    pub worst_case_accuracy: f64,
    pub z: f64,
    pub p_value: f64,
    pub significant: bool,
    /// The region could not be modelled (no label covariance); it is kept in
    /// the report with a majority-class accuracy and never significant.
    #[serde(default)]
    pub degenerate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl RoiAnalysis {
    pub fn statistic(&self, which: Statistic) -> f64 {
        match which {
            Statistic::WorstCase => self.worst_case_accuracy,
            Statistic::Empirical => self.empirical_accuracy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SelectionOptions {
    pub statistic: Statistic,
    /// Test each region at `alpha / regions`.
    pub bonferroni: bool,
}

/// Per-region table plus everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamReport {
    pub test: ProportionTest,
    pub selection: SelectionOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<PipelineConfig>,
    pub regions: Vec<RoiAnalysis>,
}

#[derive(Serialize)]
pub(crate) struct Provenance<'a> {
    test: &'a ProportionTest,
    selection: &'a SelectionOptions,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<&'a PipelineConfig>,
}

impl SamReport {
    pub fn significant_ids(&self) -> Vec<u32> {
        self.regions
            .iter()
            .filter(|r| r.significant)
            .map(|r| r.roi_id)
            .collect()
    }

    pub fn significant_count(&self) -> usize {
        self.regions.iter().filter(|r| r.significant).count()
    }

    /// Level each region is tested at.
    pub fn effective_alpha(&self) -> f64 {
        effective_alpha(&self.test, &self.selection, self.regions.len())
    }

    pub(crate) fn provenance(&self) -> Provenance<'_> {
        Provenance {
            test: &self.test,
            selection: &self.selection,
            config: self.config.as_ref(),
        }
    }
}

fn effective_alpha(test: &ProportionTest, selection: &SelectionOptions, regions: usize) -> f64 {
    if selection.bonferroni {
        test.alpha / regions.max(1) as f64
    } else {
        test.alpha
    }
}

/// Tests every region's statistic and assembles the report, ordered by `roi_id`.
pub fn select_significant(
    analyses: Vec<RoiAnalysis>,
    test: &ProportionTest,
    selection: SelectionOptions,
) -> Result<SamReport> {
    if analyses.is_empty() {
        return Err(Error::Input("no regions to test".into()));
    }
    let level = effective_alpha(test, &selection, analyses.len());
    let mut regions = analyses;
    for r in &mut regions {
        r.z = proportion_z(r.statistic(selection.statistic), test)?;
        r.p_value = p_value_one_sided(r.z);
        r.significant = !r.degenerate && r.p_value < level;
    }
    regions.sort_by_key(|r| r.roi_id);
    Ok(SamReport {
        test: *test,
        selection,
        config: None,
        regions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn region(id: u32, worst: f64) -> RoiAnalysis {
        RoiAnalysis {
            roi_id: id,
            roi_name: format!("r{id}"),
            n: 100,
            k: 1,
            empirical_accuracy: worst,
            delta_n: 0.0,
            worst_case_accuracy: worst,
            z: 0.0,
            p_value: 1.0,
            significant: false,
            degenerate: false,
            warning: None,
        }
    }

    #[test]
    fn worst_case_examples() {
        assert_abs_diff_eq!(worst_case_accuracy(0.85, 0.0707), 0.7793, epsilon = 1e-12);
        assert_eq!(worst_case_accuracy(0.5, 0.8), 0.0);
        for acc in [0.0, 0.37, 1.0] {
            assert_eq!(worst_case_accuracy(acc, 0.0), acc);
        }
    }

    #[test]
    fn z_examples() {
        let t = ProportionTest::new(0.5, 116, 0.05).unwrap();
        assert_eq!(proportion_z(0.5, &t).unwrap(), 0.0);
        // sigma0 = sqrt(0.25 / 116) = 0.046424...
        assert_abs_diff_eq!(t.sigma0(), 0.046_423_8, epsilon = 1e-6);
        assert_abs_diff_eq!(proportion_z(0.6, &t).unwrap(), 2.154_065, epsilon = 1e-5);
        for l in [20, 116, 1000] {
            let t = ProportionTest::new(0.5, l, 0.05).unwrap();
            assert_abs_diff_eq!(
                proportion_z(0.5 + t.sigma0(), &t).unwrap(),
                1.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn test_parameters_are_validated() {
        assert!(ProportionTest::new(0.5, 19, 0.05).is_err());
        assert!(ProportionTest::new(0.5, 20, 0.05).is_ok());
        assert!(ProportionTest::new(0.0, 100, 0.05).is_err());
        assert!(ProportionTest::new(0.5, 100, 1.0).is_err());
        assert!(ProportionTest::new(0.9, 50, 0.05).is_err());
    }

    #[test]
    fn p_value_examples() {
        assert_eq!(p_value_one_sided(0.0), 0.5);
        assert_abs_diff_eq!(p_value_one_sided(1.6449), 0.05, epsilon = 1e-4);
        assert_abs_diff_eq!(p_value_one_sided(2.1541), 0.0156, epsilon = 1e-3);
        assert!(p_value_one_sided(50.0) > 0.0);
        assert_eq!(p_value_one_sided(-50.0), 1.0);
    }

    #[test]
    fn selection_examples() {
        let t = ProportionTest::new(0.5, 116, 0.05).unwrap();
        let null: Vec<_> = (0..5).map(|i| region(i, 0.5)).collect();
        let r = select_significant(null, &t, SelectionOptions::default()).unwrap();
        assert_eq!(r.significant_count(), 0);

        let mut regions: Vec<_> = (0..5).rev().map(|i| region(i, 0.5)).collect();
        regions[2] = region(2, 0.70);
        let r = select_significant(regions, &t, SelectionOptions::default()).unwrap();
        assert_eq!(r.significant_ids(), vec![2]);
        assert_abs_diff_eq!(r.regions[2].z, 4.308_132, epsilon = 1e-5);
        assert_eq!(
            r.regions.iter().map(|r| r.roi_id).collect::<Vec<_>>(),
            vec![0, 1, 2, 3, 4]
        );

        assert!(select_significant(vec![], &t, SelectionOptions::default()).is_err());
    }

    #[test]
    fn significance_is_monotone_in_accuracy() {
        let t = ProportionTest::new(0.5, 116, 0.05).unwrap();
        let mut was_significant = false;
        for step in 0..=400 {
            let acc = 0.5 + 0.4 * step as f64 / 400.0;
            let r =
                select_significant(vec![region(0, acc)], &t, SelectionOptions::default()).unwrap();
            let now = r.regions[0].significant;
            assert!(!was_significant || now, "lost significance at {acc}");
            was_significant = now;
        }
        assert!(was_significant);
    }

    #[test]
    fn degenerate_regions_never_significant() {
        let t = ProportionTest::new(0.5, 20, 0.05).unwrap();
        let mut r = region(0, 0.95);
        r.degenerate = true;
        let rep = select_significant(vec![r], &t, SelectionOptions::default()).unwrap();
        assert!(!rep.regions[0].significant);
    }

    #[test]
    fn statistic_and_bonferroni_options() {
        let t = ProportionTest::new(0.5, 20, 0.05).unwrap();
        let mut r = region(0, 0.60);
        r.empirical_accuracy = 0.80;
        let worst = select_significant(vec![r.clone()], &t, SelectionOptions::default()).unwrap();
        assert!(!worst.regions[0].significant);
        let emp = SelectionOptions {
            statistic: Statistic::Empirical,
            bonferroni: false,
        };
        assert!(
            select_significant(vec![r.clone()], &t, emp)
                .unwrap()
                .regions[0]
                .significant
        );

        // z = 0.2 / 0.1118 = 1.789, p = 0.0368: passes alone, fails over 20 regions.
        let regions: Vec<_> = (0..20)
            .map(|i| region(i, if i == 0 { 0.70 } else { 0.5 }))
            .collect();
        let plain = select_significant(regions.clone(), &t, SelectionOptions::default()).unwrap();
        assert_eq!(plain.significant_ids(), vec![0]);
        let strict = SelectionOptions {
            statistic: Statistic::WorstCase,
            bonferroni: true,
        };
        let corrected = select_significant(regions, &t, strict).unwrap();
        assert_eq!(corrected.significant_count(), 0);
        assert_abs_diff_eq!(corrected.effective_alpha(), 0.0025, epsilon = 1e-15);
    }
}
