//! Region-wise PLS -> SVM -> bound -> test orchestration, plus the Monte
//! Carlo experiments that check the bounds against held-out risk.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bounds::{BoundMethod, BoundRequest, BoundResult};
use crate::classify::{empirical_risk, svm_fit_with, LinearClassifier, SvmOptions, DEFAULT_TOL};
use crate::dataio::{LabeledDataset, Parcellation};
use crate::error::{check_delta, Error, Result};
use crate::inference::{
    p_value_one_sided, proportion_z, select_significant, worst_case_accuracy, ProportionTest,
    RoiAnalysis, SamReport, SelectionOptions, Statistic,
};
use crate::par::{map_indexed, map_indexed_serial};
use crate::pls::{pls_fit, PlsModel};
use crate::rng::substream;

/// Denominator `l` of the proportion test's null standard error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Denominator {
    /// Number of regions analyzed.
    #[default]
    Rois,
    /// Number of subjects.
    Samples,
}

impl FromStr for Denominator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rois" => Ok(Denominator::Rois),
            "samples" => Ok(Denominator::Samples),
            other => Err(Error::param(
                "denominator",
                format!("expected rois or samples, got `{other}`"),
            )),
        }
    }
}

impl fmt::Display for Denominator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Denominator::Rois => "rois",
            Denominator::Samples => "samples",
        })
    }
}

/// Dimension handed to the bound for a `k`-component region model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDim {
    /// `d = k`.
    #[default]
    Components,
    /// `d = k + 1`, counting the SVM bias.
    ComponentsPlusBias,
}

impl FromStr for BoundDim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "components" => Ok(BoundDim::Components),
            "components_plus_bias" => Ok(BoundDim::ComponentsPlusBias),
            other => Err(Error::param(
                "bound_dim",
                format!("expected components or components_plus_bias, got `{other}`"),
            )),
        }
    }
}

impl BoundDim {
    pub fn for_components(self, k: usize) -> u64 {
        match self {
            BoundDim::Components => k as u64,
            BoundDim::ComponentsPlusBias => k as u64 + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub k: usize,
    pub bound_method: BoundMethod,
    pub bound_dim: BoundDim,
    pub delta: f64,
    pub alpha: f64,
    pub pi0: f64,
    pub c_reg: f64,
    pub tol: f64,
    pub statistic: Statistic,
    pub denominator: Denominator,
    pub bonferroni: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            k: 1,
            bound_method: BoundMethod::Cover,
            bound_dim: BoundDim::Components,
            delta: 0.05,
            alpha: 0.05,
            pi0: 0.5,
            c_reg: 1.0,
            tol: DEFAULT_TOL,
            statistic: Statistic::WorstCase,
            denominator: Denominator::Rois,
            bonferroni: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::param("k", "need at least one component"));
        }
        check_delta(self.delta)?;
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::param(
                "alpha",
                format!("must lie in (0, 1), got {}", self.alpha),
            ));
        }
        if !(self.c_reg > 0.0 && self.c_reg.is_finite()) {
            return Err(Error::param(
                "c_reg",
                format!("must be positive, got {}", self.c_reg),
            ));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::param("tol", "must be positive"));
        }
        Ok(())
    }

    pub fn selection(&self) -> SelectionOptions {
        SelectionOptions {
            statistic: self.statistic,
            bonferroni: self.bonferroni,
        }
    }

    fn svm_options(&self) -> SvmOptions {
        SvmOptions {
            c_reg: self.c_reg,
            tol: self.tol,
            ..SvmOptions::default()
        }
    }

    /// Proportion test for a study with `regions` regions and `n` subjects.
    pub fn proportion_test(&self, regions: usize, n: usize) -> Result<ProportionTest> {
        let l = match self.denominator {
            Denominator::Rois => regions,
            Denominator::Samples => n,
        };
        ProportionTest::new(self.pi0, l, self.alpha)
    }
}

/// Fits one region and tests it; `l` is the proportion-test denominator.
///
/// A region whose PLS direction is degenerate is reported with the accuracy
/// of the majority-class predictor and is never significant.
pub fn analyze_roi(
    region: &LabeledDataset,
    roi_id: u32,
    roi_name: &str,
    config: &PipelineConfig,
    l: usize,
) -> Result<RoiAnalysis> {
    config.validate()?;
    let n = region.n();
    if region.d() < 1 {
        return Err(Error::Shape(format!("region {roi_id} has no features")));
    }
    let k = config.k.min(region.d());
    let test = ProportionTest::new(config.pi0, l, config.alpha)?;

    let (accuracy, degenerate, warning) = match fit_region(region, k, config) {
        Ok((_, _, acc)) => (acc, false, None),
        Err(Error::DegenerateDirection { component }) => {
            let (pos, neg) = region.class_counts();
            (
                pos.max(neg) as f64 / n as f64,
                true,
                Some(format!(
                    "PLS component {component} has zero covariance with the labels; majority-class accuracy reported"
                )),
            )
        }
        Err(e) => return Err(e),
    };

    let bound = BoundRequest::new(
        config.bound_method,
        n as u64,
        config.bound_dim.for_components(k),
        config.delta,
    )?
    .evaluate()?;
    let worst = worst_case_accuracy(accuracy, bound.delta_n);
    let statistic = match config.statistic {
        Statistic::WorstCase => worst,
        Statistic::Empirical => accuracy,
    };
    let z = proportion_z(statistic, &test)?;
    let p_value = p_value_one_sided(z);
    Ok(RoiAnalysis {
        roi_id,
        roi_name: roi_name.to_string(),
        n,
        k,
        empirical_accuracy: accuracy,
        delta_n: bound.delta_n,
        worst_case_accuracy: worst,
        z,
        p_value,
        significant: !degenerate && p_value < test.alpha,
        degenerate,
        warning,
    })
}

fn fit_region(
    region: &LabeledDataset,
    k: usize,
    config: &PipelineConfig,
) -> Result<(PlsModel, LinearClassifier, f64)> {
    let pls = pls_fit(region.features.view(), region.labels.view(), k)?;
    let svm = svm_fit_with(
        pls.train_scores.view(),
        region.labels.view(),
        &config.svm_options(),
    )?;
    let risk = empirical_risk(&svm, pls.train_scores.view(), region.labels.view())?;
    Ok((pls, svm, risk.empirical_accuracy))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Parallel,
}

pub fn build_sam(
    dataset: &LabeledDataset,
    parcellation: &Parcellation,
    config: &PipelineConfig,
) -> Result<SamReport> {
    build_sam_with(dataset, parcellation, config, Execution::Parallel)
}

/// Analyzes every region and assembles the map. Both execution modes
/// produce identical reports.
pub fn build_sam_with(
    dataset: &LabeledDataset,
    parcellation: &Parcellation,
    config: &PipelineConfig,
    execution: Execution,
) -> Result<SamReport> {
    config.validate()?;
    if dataset.d() != parcellation.n_features() {
        return Err(Error::Shape(format!(
            "dataset has {} features but the parcellation covers {}",
            dataset.d(),
            parcellation.n_features()
        )));
    }
    let regions: Vec<(u32, Vec<usize>)> = parcellation.regions().into_iter().collect();
    let test = config.proportion_test(regions.len(), dataset.n())?;
    let job = |i: usize| -> Result<RoiAnalysis> {
        let (roi, columns) = &regions[i];
        let sub = dataset.select_columns(columns)?;
        analyze_roi(&sub, *roi, parcellation.name(*roi), config, test.l)
    };
    let analyses = match execution {
        Execution::Serial => map_indexed_serial(regions.len(), job),
        Execution::Parallel => map_indexed(regions.len(), job),
    }
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut report = select_significant(analyses, &test, config.selection())?;
    report.config = Some(config.clone());
    Ok(report)
}

/// Population and fitting settings for [`coverage_experiment_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageSpec {
    pub n: usize,
    pub dim: usize,
    pub method: BoundMethod,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
    /// Fresh samples used to measure each trial's actual risk.
    pub holdout: usize,
    /// Distance between the two class means (unit-variance isotropic classes).
    pub separation: f64,
    pub c_reg: f64,
}

pub const DEFAULT_HOLDOUT: usize = 100_000;
pub const DEFAULT_SEPARATION: f64 = 1.0;
pub const MIN_COVERAGE_TRIALS: usize = 100;

impl CoverageSpec {
    pub fn new(
        n: usize,
        dim: usize,
        method: BoundMethod,
        delta: f64,
        trials: usize,
        seed: u64,
    ) -> Self {
        CoverageSpec {
            n,
            dim,
            method,
            delta,
            trials,
            seed,
            holdout: DEFAULT_HOLDOUT,
            separation: DEFAULT_SEPARATION,
            c_reg: 1.0,
        }
    }

    /// Class `y` mean: `y * separation / 2` spread evenly over all coordinates.
    pub fn class_mean(&self) -> Array1<f64> {
        Array1::from_elem(self.dim, 0.5 * self.separation / (self.dim as f64).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageResult {
    pub method: BoundMethod,
    pub n: usize,
    pub dim: usize,
    pub delta: f64,
    pub delta_n: f64,
    pub trials: usize,
    pub violations: usize,
    pub violation_rate: f64,
    pub mean_empirical_risk: f64,
    pub mean_actual_risk: f64,
    pub holdout: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub empirical_risk: f64,
    pub actual_risk: f64,
    /// Fitted rule in the original feature space: `sign(weights.x + offset)`.
    pub weights: Array1<f64>,
    pub offset: f64,
}

pub fn coverage_experiment(
    n: usize,
    dim: usize,
    method: BoundMethod,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<CoverageResult> {
    coverage_experiment_with(&CoverageSpec::new(n, dim, method, delta, trials, seed))
}

/// Counts trials where held-out risk exceeds empirical risk plus the bound.
///
/// Each trial draws `n` labels uniformly from {-1, +1} with Gaussian
/// features around `y * class_mean`, fits PLS (`k = dim`) and the SVM
/// in-sample, and measures actual risk on `holdout` fresh draws.
pub fn coverage_experiment_with(spec: &CoverageSpec) -> Result<CoverageResult> {
    if spec.trials < MIN_COVERAGE_TRIALS {
        return Err(Error::param(
            "trials",
            format!(
                "need at least {MIN_COVERAGE_TRIALS} trials, got {}",
                spec.trials
            ),
        ));
    }
    if spec.n < 2 {
        return Err(Error::param("n", "need at least 2 samples"));
    }
    if spec.dim < 1 {
        return Err(Error::param("dim", "need at least one dimension"));
    }
    if spec.holdout < 1 {
        return Err(Error::param("holdout", "need at least one holdout sample"));
    }
    if !(spec.separation >= 0.0 && spec.separation.is_finite()) {
        return Err(Error::param("separation", "must be finite and >= 0"));
    }
    let bound =
        BoundRequest::new(spec.method, spec.n as u64, spec.dim as u64, spec.delta)?.evaluate()?;

    let outcomes = map_indexed(spec.trials, |t| coverage_trial(spec, t as u64))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let violations = outcomes
        .iter()
        .filter(|o| o.actual_risk > o.empirical_risk + bound.delta_n)
        .count();
    let trials = spec.trials as f64;
    Ok(CoverageResult {
        method: spec.method,
        n: spec.n,
        dim: spec.dim,
        delta: spec.delta,
        delta_n: bound.delta_n,
        trials: spec.trials,
        violations,
        violation_rate: violations as f64 / trials,
        mean_empirical_risk: outcomes.iter().map(|o| o.empirical_risk).sum::<f64>() / trials,
        mean_actual_risk: outcomes.iter().map(|o| o.actual_risk).sum::<f64>() / trials,
        holdout: spec.holdout,
        seed: spec.seed,
    })
}

/// One coverage trial; public so tests can check it against closed-form risk.
pub fn coverage_trial(spec: &CoverageSpec, trial: u64) -> Result<TrialOutcome> {
    let mut rng = substream(spec.seed, trial);
    let mean = spec.class_mean();
    let (x, y) = draw_mixture(&mut rng, spec.n, mean.view());

    let (pos, neg) = (
        y.iter().filter(|&&v| v > 0.0).count(),
        y.iter().filter(|&&v| v < 0.0).count(),
    );
    let (weights, offset, empirical) = if pos == 0 || neg == 0 {
        // Single-class draw: the only sensible rule predicts that class.
        let label = if pos > 0 { 1.0 } else { -1.0 };
        (Array1::zeros(spec.dim), label, 0.0)
    } else {
        let pls = pls_fit(x.view(), y.view(), spec.dim)?;
        let opts = SvmOptions {
            c_reg: spec.c_reg,
            ..SvmOptions::default()
        };
        let svm = svm_fit_with(pls.train_scores.view(), y.view(), &opts)?;
        let risk = empirical_risk(&svm, pls.train_scores.view(), y.view())?;
        let (v, c) = raw_space_rule(&pls, &svm)?;
        (v, c, risk.empirical_risk)
    };

    let mut errors = 0usize;
    for _ in 0..spec.holdout {
        let label = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let mut decision = offset;
        for (w, m) in weights.iter().zip(mean.iter()) {
            let noise: f64 = rng.sample(StandardNormal);
            decision += w * (label * m + noise);
        }
        let predicted = if decision >= 0.0 { 1.0 } else { -1.0 };
        if predicted != label {
            errors += 1;
        }
    }
    Ok(TrialOutcome {
        empirical_risk: empirical,
        actual_risk: errors as f64 / spec.holdout as f64,
        weights,
        offset,
    })
}

/// Collapses centering, PLS projection and the SVM into `sign(v.x + c)` on
/// raw features.
pub fn raw_space_rule(pls: &PlsModel, svm: &LinearClassifier) -> Result<(Array1<f64>, f64)> {
    let d = pls.n_features();
    let probes = Array2::from_shape_fn((d, d), |(i, j)| {
        pls.means[j] + if i == j { 1.0 } else { 0.0 }
    });
    let basis_scores = pls.transform(probes.view())?;
    let w = ArrayView1::from(&svm.w[..]);
    let v = basis_scores.dot(&w);
    let c = svm.b - v.dot(&pls.means);
    Ok((v, c))
}

fn draw_mixture(rng: &mut impl Rng, n: usize, mean: ArrayView1<f64>) -> (Array2<f64>, Array1<f64>) {
    let dim = mean.len();
    let mut x = Array2::zeros((n, dim));
    let mut y = Array1::zeros(n);
    for i in 0..n {
        let label = if rng.random::<bool>() { 1.0 } else { -1.0 };
        y[i] = label;
        for j in 0..dim {
            let noise: f64 = rng.sample(StandardNormal);
            x[[i, j]] = label * mean[j] + noise;
        }
    }
    (x, y)
}

/// Bound values over a grid, `n` varying fastest within each `dim`. Grid
/// points where a method is undefined (VC with `n < dim + 1`) are skipped.
pub fn bound_curve(
    n_grid: &[u64],
    dim_grid: &[u64],
    method: BoundMethod,
    delta: f64,
) -> Result<Vec<BoundResult>> {
    if n_grid.is_empty() || dim_grid.is_empty() {
        return Err(Error::Input("bound curve grids must be non-empty".into()));
    }
    check_delta(delta)?;
    let mut rows = Vec::with_capacity(n_grid.len() * dim_grid.len());
    for &dim in dim_grid {
        for &n in n_grid {
            let req = BoundRequest::new(method, n, dim, delta)?;
            if method == BoundMethod::Vc && n < req.vc_dimension() {
                continue;
            }
            rows.push(req.evaluate()?);
        }
    }
    Ok(rows)
}

pub const CURVE_COLUMNS: [&str; 6] = ["method", "n", "dim", "delta", "delta_n", "vacuous"];

pub fn write_curve_csv(rows: &[BoundResult], out: impl Write) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CURVE_COLUMNS)?;
    for r in rows {
        writer.write_record([
            r.method.to_string(),
            r.n.to_string(),
            r.dim.to_string(),
            crate::dataio::fmt_float(r.delta),
            crate::dataio::fmt_float(r.delta_n),
            r.vacuous.to_string(),
        ])?;
    }
    writer
        .flush()
        .map_err(|e| Error::io(Path::new("<curve>"), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{synth_generate, SynthConfig};
    use ndarray::Axis;

    #[test]
    fn perfectly_separable_single_feature_region() {
        let labels = Array1::from_shape_fn(40, |i| if i % 2 == 0 { 1.0 } else { -1.0 });
        let region = LabeledDataset::new(labels.clone().insert_axis(Axis(1)), labels).unwrap();
        let cfg = PipelineConfig::default();
        let r = analyze_roi(&region, 4, "feat", &cfg, 20).unwrap();
        assert_eq!(r.empirical_accuracy, 1.0);
        assert_eq!(r.worst_case_accuracy, 1.0 - r.delta_n);
        assert_eq!(r.delta_n, crate::bounds::cover_bound(40, 1, 0.05).unwrap());
        assert_eq!((r.roi_id, r.roi_name.as_str(), r.k), (4, "feat", 1));
    }

    #[test]
    fn degenerate_region_falls_back_to_majority() {
        let labels = Array1::from_shape_fn(30, |i| if i % 3 == 0 { 1.0 } else { -1.0 });
        let region = LabeledDataset::new(Array2::from_elem((30, 2), 1.5), labels).unwrap();
        let r = analyze_roi(&region, 0, "flat", &PipelineConfig::default(), 20).unwrap();
        assert!(r.degenerate);
        assert!(r.warning.is_some());
        assert!(!r.significant);
        assert!((r.empirical_accuracy - 20.0 / 30.0).abs() < 1e-15);
    }

    #[test]
    fn components_are_capped_by_region_width() {
        let data = synth_generate(&SynthConfig {
            n: 40,
            rois: 1,
            voxels_per_roi: 2,
            effect_rois: vec![0],
            ..SynthConfig::default()
        })
        .unwrap();
        let cfg = PipelineConfig {
            k: 8,
            ..PipelineConfig::default()
        };
        let r = analyze_roi(&data.dataset, 0, "r", &cfg, 20).unwrap();
        assert_eq!(r.k, 2);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let data = synth_generate(&SynthConfig {
            n: 20,
            rois: 20,
            voxels_per_roi: 2,
            ..SynthConfig::default()
        })
        .unwrap();
        let short = Parcellation::new(vec![0; 39], [(0, "a".to_string())].into()).unwrap();
        assert!(matches!(
            build_sam(&data.dataset, &short, &PipelineConfig::default()),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn curve_is_monotone_and_skips_undefined_vc_points() {
        let ns = [10, 50, 100, 500, 1000];
        let dims = [1, 2, 4, 8];
        let rows = bound_curve(&ns, &dims, BoundMethod::Cover, 0.05).unwrap();
        assert_eq!(rows.len(), 20);
        for chunk in rows.chunks(ns.len()) {
            assert!(chunk.windows(2).all(|w| w[1].delta_n < w[0].delta_n));
        }
        for (i, &n) in ns.iter().enumerate() {
            let column: Vec<f64> = (0..dims.len())
                .map(|j| rows[j * ns.len() + i].delta_n)
                .collect();
            assert!(column.windows(2).all(|w| w[1] > w[0]), "n={n}");
        }
        let vc = bound_curve(&[1, 2, 3], &[2], BoundMethod::Vc, 0.05).unwrap();
        assert_eq!(vc.len(), 1);
        assert!(bound_curve(&[], &[1], BoundMethod::Cover, 0.05).is_err());
    }

    #[test]
    fn curve_csv_layout() {
        let rows = bound_curve(&[500], &[1], BoundMethod::Cover, 0.05).unwrap();
        let mut buf = Vec::new();
        write_curve_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "method,n,dim,delta,delta_n,vacuous");
        assert!(lines
            .next()
            .unwrap()
            .starts_with("cover,500,1,5.0000000000000003e-2,7.068049429336"));
    }

    #[test]
    fn coverage_rejects_too_few_trials() {
        assert!(coverage_experiment(50, 1, BoundMethod::Cover, 0.05, 99, 0).is_err());
    }
}
