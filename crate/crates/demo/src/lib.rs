//! Browser bindings for the demo page in `www/`.
//!
//! Each export takes plain numbers and strings and returns a JSON document
//! for the page to draw. The `*_json` functions hold the logic so they can be
//! tested natively; the `#[wasm_bindgen]` wrappers only convert errors.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use samkit::bounds::{self, BoundMethod};
use samkit::classify::{empirical_risk, svm_fit};
use samkit::dataio::{synth_generate, SynthConfig};
use samkit::inference::worst_case_accuracy;
use samkit::pipeline::{build_sam, raw_space_rule, PipelineConfig};
use samkit::pls::pls_fit;
use samkit::{Error, Result};

const CURVE_POINTS: usize = 60;
const CURVE_MIN_N: f64 = 10.0;

#[derive(Serialize)]
struct Series {
    method: BoundMethod,
    dim: u64,
    /// `[n, delta_n]` pairs.
    points: Vec<(u64, f64)>,
}

#[derive(Serialize)]
struct Curves {
    delta: f64,
    series: Vec<Series>,
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &'static str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Input(format!("bad {what} entry `{s}`")))
        })
        .collect()
}

/// Deviation bound against sample size for each method and `dim = 1..=dim_max`,
/// on a log-spaced grid from 10 to `n_max`.
pub fn bound_curves_json(methods: &str, n_max: u32, dim_max: u32, delta: f64) -> Result<String> {
    let methods: Vec<BoundMethod> = parse_list(methods, "method")?;
    if methods.is_empty() || dim_max < 1 || (n_max as f64) <= CURVE_MIN_N {
        return Err(Error::Input(
            "need a method, dim_max >= 1 and n_max > 10".into(),
        ));
    }
    let step = (n_max as f64 / CURVE_MIN_N).ln() / (CURVE_POINTS - 1) as f64;
    let mut grid: Vec<u64> = (0..CURVE_POINTS)
        .map(|i| (CURVE_MIN_N * (step * i as f64).exp()).round() as u64)
        .collect();
    grid.dedup();

    let mut series = Vec::new();
    for &method in &methods {
        for dim in 1..=dim_max as u64 {
            let mut points = Vec::with_capacity(grid.len());
            for &n in &grid {
                if method == BoundMethod::Vc && n < dim + 1 {
                    continue;
                }
                points.push((n, bounds::evaluate(method, n, dim, delta)?.delta_n));
            }
            series.push(Series {
                method,
                dim,
                points,
            });
        }
    }
    Ok(serde_json::to_string(&Curves { delta, series })?)
}

#[derive(Serialize)]
struct ClassifierView {
    /// `[x0, x1, label]` rows.
    points: Vec<(f64, f64, f64)>,
    /// Decision rule `v . x + c >= 0` on the raw coordinates.
    v: Vec<f64>,
    c: f64,
    empirical_accuracy: f64,
    bounds: Vec<BoundView>,
}

#[derive(Serialize)]
struct BoundView {
    method: BoundMethod,
    delta_n: f64,
    worst_case_accuracy: f64,
}

/// Two-dimensional two-class sample, one-component PLS + SVM fit, and the
/// worst-case accuracy under each bound.
pub fn classifier_json(
    n: u32,
    separation: f64,
    c_reg: f64,
    delta: f64,
    seed: u64,
) -> Result<String> {
    let data = synth_generate(&SynthConfig {
        n: n as usize,
        rois: 1,
        voxels_per_roi: 2,
        effect_rois: vec![0],
        effect_size: separation,
        noise_sd: 1.0,
        seed,
    })?
    .dataset;
    let pls = pls_fit(data.features.view(), data.labels.view(), 1)?;
    let svm = svm_fit(pls.train_scores.view(), data.labels.view(), c_reg, 1e-6)?;
    let accuracy =
        empirical_risk(&svm, pls.train_scores.view(), data.labels.view())?.empirical_accuracy;
    let (v, c) = raw_space_rule(&pls, &svm)?;

    let bounds = BoundMethod::ALL
        .iter()
        .map(|&method| {
            let delta_n = bounds::evaluate(method, n as u64, 1, delta)?.delta_n;
            Ok(BoundView {
                method,
                delta_n,
                worst_case_accuracy: worst_case_accuracy(accuracy, delta_n),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let points = data
        .features
        .rows()
        .into_iter()
        .zip(data.labels.iter())
        .map(|(row, &label)| (row[0], row[1], label))
        .collect();
    Ok(serde_json::to_string(&ClassifierView {
        points,
        v: v.to_vec(),
        c,
        empirical_accuracy: accuracy,
        bounds,
    })?)
}

#[derive(Serialize)]
struct MapView<'a> {
    planted: Vec<u32>,
    significant: Vec<u32>,
    report: &'a samkit::SamReport,
}

/// Synthetic study with planted regions, mapped with the default pipeline.
pub fn sam_json(
    n: u32,
    rois: u32,
    voxels_per_roi: u32,
    effect_rois: &str,
    effect_size: f64,
    seed: u64,
) -> Result<String> {
    let config = SynthConfig {
        n: n as usize,
        rois: rois as usize,
        voxels_per_roi: voxels_per_roi as usize,
        effect_rois: parse_list(effect_rois, "region")?,
        effect_size,
        noise_sd: 1.0,
        seed,
    };
    let data = synth_generate(&config)?;
    let report = build_sam(
        &data.dataset,
        &data.parcellation,
        &PipelineConfig::default(),
    )?;
    Ok(serde_json::to_string(&MapView {
        planted: data.ground_truth.iter().copied().collect(),
        significant: report.significant_ids(),
        report: &report,
    })?)
}

fn js(result: Result<String>) -> std::result::Result<String, JsError> {
    result.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = boundCurves)]
pub fn bound_curves(
    methods: &str,
    n_max: u32,
    dim_max: u32,
    delta: f64,
) -> std::result::Result<String, JsError> {
    js(bound_curves_json(methods, n_max, dim_max, delta))
}

#[wasm_bindgen]
pub fn classifier(
    n: u32,
    separation: f64,
    c_reg: f64,
    delta: f64,
    seed: u32,
) -> std::result::Result<String, JsError> {
    js(classifier_json(n, separation, c_reg, delta, seed as u64))
}

#[wasm_bindgen(js_name = samMap)]
pub fn sam_map(
    n: u32,
    rois: u32,
    voxels_per_roi: u32,
    effect_rois: &str,
    effect_size: f64,
    seed: u32,
) -> std::result::Result<String, JsError> {
    js(sam_json(
        n,
        rois,
        voxels_per_roi,
        effect_rois,
        effect_size,
        seed as u64,
    ))
}
