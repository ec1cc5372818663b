//! Datasets, parcellations, the synthetic generator, and report files.
//!
//! On-disk formats:
//!
//! * manifest JSON `{"features": path, "labels": path, "n": int, "d": int}`,
//!   paths resolved relative to the manifest's directory;
//! * features CSV, header-free, one subject per row;
//! * labels file, one `-1` or `+1` per line;
//! * parcellation CSV with header `feature_index,roi_id,roi_name`;
//! * reports as JSON or CSV (see [`write_report`]).

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::SamReport;
use crate::rng::substream;

/// `n x D` features with ±1 labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub features: Array2<f64>,
    pub labels: Array1<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject_ids: Option<Vec<String>>,
}

impl LabeledDataset {
    pub fn new(features: Array2<f64>, labels: Array1<f64>) -> Result<Self> {
        let ds = LabeledDataset {
            features,
            labels,
            subject_ids: None,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn with_subject_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.n() {
            return Err(Error::Shape(format!(
                "{} subject ids for {} rows",
                ids.len(),
                self.n()
            )));
        }
        self.subject_ids = Some(ids);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let (n, _) = self.features.dim();
        if self.labels.len() != n {
            return Err(Error::Shape(format!(
                "{n} feature rows but {} labels",
                self.labels.len()
            )));
        }
        if n < 2 {
            return Err(Error::Input(format!("need at least 2 samples, got {n}")));
        }
        if let Some(((i, j), v)) = self.features.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Input(format!(
                "non-finite feature {v} at row {}, column {}",
                i + 1,
                j + 1
            )));
        }
        crate::classify::check_labels(self.labels.view())
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn d(&self) -> usize {
        self.features.ncols()
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&v| v > 0.0).count();
        (pos, self.n() - pos)
    }

    /// Same subjects, restricted to the given feature columns.
    pub fn select_columns(&self, columns: &[usize]) -> Result<LabeledDataset> {
        if let Some(&bad) = columns.iter().find(|&&c| c >= self.d()) {
            return Err(Error::Shape(format!(
                "column {bad} out of range for {} features",
                self.d()
            )));
        }
        Ok(LabeledDataset {
            features: self.features.select(Axis(1), columns),
            labels: self.labels.clone(),
            subject_ids: self.subject_ids.clone(),
        })
    }

    /// First `m` subjects.
    pub fn head(&self, m: usize) -> Result<LabeledDataset> {
        if m > self.n() {
            return Err(Error::Shape(format!("asked for {m} rows of {}", self.n())));
        }
        let ds = LabeledDataset {
            features: self.features.slice(ndarray::s![..m, ..]).to_owned(),
            labels: self.labels.slice(ndarray::s![..m]).to_owned(),
            subject_ids: self.subject_ids.as_ref().map(|ids| ids[..m].to_vec()),
        };
        ds.validate()?;
        Ok(ds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub features: PathBuf,
    pub labels: PathBuf,
    pub n: usize,
    pub d: usize,
}

pub fn load_dataset(manifest_path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let manifest_path = manifest_path.as_ref();
    let text = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| Error::format(manifest_path, format!("invalid manifest: {e}")))?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let features_path = base.join(&manifest.features);
    let labels_path = base.join(&manifest.labels);

    let features = read_features(&features_path, manifest.d)?;
    if features.nrows() != manifest.n {
        return Err(Error::format(
            &features_path,
            format!(
                "manifest declares n = {} but file has {} rows",
                manifest.n,
                features.nrows()
            ),
        ));
    }
    let labels = read_labels(&labels_path)?;
    if labels.len() != manifest.n {
        return Err(Error::format(
            &labels_path,
            format!(
                "manifest declares n = {} but file has {} labels",
                manifest.n,
                labels.len()
            ),
        ));
    }
    LabeledDataset::new(features, labels)
}

fn read_features(path: &Path, d: usize) -> Result<Array2<f64>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut values = Vec::new();
    let mut rows = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::format(path, format!("row {}: {e}", i + 1)))?;
        if record.len() != d {
            return Err(Error::format(
                path,
                format!(
                    "row {}: manifest declares d = {d} but row has {} columns",
                    i + 1,
                    record.len()
                ),
            ));
        }
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                Error::format(
                    path,
                    format!("row {}, column {}: `{field}` is not a number", i + 1, j + 1),
                )
            })?;
            if !v.is_finite() {
                return Err(Error::format(
                    path,
                    format!("row {}, column {}: non-finite value", i + 1, j + 1),
                ));
            }
            values.push(v);
        }
        rows += 1;
    }
    Array2::from_shape_vec((rows, d), values).map_err(|e| Error::Shape(e.to_string()))
}

fn read_labels(path: &Path) -> Result<Array1<f64>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut labels = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let token = line.trim();
        if token.is_empty() {
            continue;
        }
        let v = match token.parse::<f64>() {
            Ok(v) if v == 1.0 || v == -1.0 => v,
            _ => {
                return Err(Error::format(
                    path,
                    format!("line {}: label `{token}` is not -1 or +1", i + 1),
                ))
            }
        };
        labels.push(v);
    }
    Ok(Array1::from(labels))
}

/// Writes `features.csv`, `labels.csv` and `manifest.json` into `dir`;
/// returns the manifest path.
pub fn write_dataset(dataset: &LabeledDataset, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let features_path = dir.join("features.csv");
    write_text(&features_path, |out| {
        for row in dataset.features.rows() {
            let line: Vec<String> = row.iter().map(|v| fmt_float(*v)).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    })?;
    let labels_path = dir.join("labels.csv");
    write_text(&labels_path, |out| {
        for v in &dataset.labels {
            writeln!(out, "{}", if *v > 0.0 { "1" } else { "-1" })?;
        }
        Ok(())
    })?;
    let manifest = Manifest {
        features: "features.csv".into(),
        labels: "labels.csv".into(),
        n: dataset.n(),
        d: dataset.d(),
    };
    let manifest_path = dir.join("manifest.json");
    write_json(&manifest_path, &manifest)?;
    Ok(manifest_path)
}

/// Feature-to-region map; region ids need not be contiguous.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parcellation {
    pub roi_of_feature: Vec<u32>,
    pub roi_names: BTreeMap<u32, String>,
}

impl Parcellation {
    pub fn new(roi_of_feature: Vec<u32>, roi_names: BTreeMap<u32, String>) -> Result<Self> {
        if roi_of_feature.is_empty() {
            return Err(Error::Input("parcellation covers no features".into()));
        }
        if let Some(missing) = roi_of_feature.iter().find(|id| !roi_names.contains_key(id)) {
            return Err(Error::Input(format!("region {missing} has no name")));
        }
        let used: BTreeSet<u32> = roi_of_feature.iter().copied().collect();
        let names = roi_names
            .into_iter()
            .filter(|(id, _)| used.contains(id))
            .collect();
        Ok(Parcellation {
            roi_of_feature,
            roi_names: names,
        })
    }

    pub fn n_features(&self) -> usize {
        self.roi_of_feature.len()
    }

    pub fn region_count(&self) -> usize {
        self.roi_names.len()
    }

    /// Feature indices of each region, ordered by region id.
    pub fn regions(&self) -> BTreeMap<u32, Vec<usize>> {
        let mut out: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (feature, &roi) in self.roi_of_feature.iter().enumerate() {
            out.entry(roi).or_default().push(feature);
        }
        out
    }

    pub fn name(&self, roi: u32) -> &str {
        self.roi_names.get(&roi).map(String::as_str).unwrap_or("")
    }
}

#[derive(Debug, Deserialize, Serialize)]
struct ParcellationRow {
    feature_index: usize,
    roi_id: u32,
    roi_name: String,
}

pub fn load_parcellation(path: impl AsRef<Path>) -> Result<Parcellation> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut by_feature: BTreeMap<usize, u32> = BTreeMap::new();
    let mut names: BTreeMap<u32, String> = BTreeMap::new();
    for (i, row) in reader.deserialize::<ParcellationRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::format(path, format!("line {line}: {e}")))?;
        if by_feature.insert(row.feature_index, row.roi_id).is_some() {
            return Err(Error::format(
                path,
                format!("line {line}: feature {} listed twice", row.feature_index),
            ));
        }
        match names.get(&row.roi_id) {
            Some(existing) if *existing != row.roi_name => {
                return Err(Error::format(
                    path,
                    format!(
                        "line {line}: region {} named both `{existing}` and `{}`",
                        row.roi_id, row.roi_name
                    ),
                ))
            }
            Some(_) => {}
            None => {
                names.insert(row.roi_id, row.roi_name);
            }
        }
    }
    let d = by_feature.len();
    if let Some(missing) = (0..d).find(|j| !by_feature.contains_key(j)) {
        return Err(Error::format(
            path,
            format!("feature index {missing} missing; indices must cover 0..{d} exactly once"),
        ));
    }
    Parcellation::new(by_feature.into_values().collect(), names)
}

pub fn write_parcellation(parcellation: &Parcellation, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::Writer::from_writer(BufWriter::new(file));
    for (feature_index, &roi_id) in parcellation.roi_of_feature.iter().enumerate() {
        writer.serialize(ParcellationRow {
            feature_index,
            roi_id,
            roi_name: parcellation.name(roi_id).to_string(),
        })?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n: usize,
    pub rois: usize,
    pub voxels_per_roi: usize,
    pub effect_rois: Vec<u32>,
    /// Mean shift of class +1, in units of `noise_sd`.
    pub effect_size: f64,
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n: 200,
            rois: 20,
            voxels_per_roi: 50,
            effect_rois: vec![0, 1, 2],
            effect_size: 1.5,
            noise_sd: 1.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || !self.n.is_multiple_of(2) {
            return Err(Error::param(
                "n",
                format!("must be even and at least 2, got {}", self.n),
            ));
        }
        if self.rois < 1 {
            return Err(Error::param("rois", "need at least one region"));
        }
        if self.voxels_per_roi < 1 {
            return Err(Error::param(
                "voxels_per_roi",
                "need at least one feature per region",
            ));
        }
        if let Some(bad) = self.effect_rois.iter().find(|&&r| r as usize >= self.rois) {
            return Err(Error::param(
                "effect_rois",
                format!("region {bad} outside 0..{}", self.rois),
            ));
        }
        if !(self.effect_size >= 0.0 && self.effect_size.is_finite()) {
            return Err(Error::param("effect_size", "must be finite and >= 0"));
        }
        if !(self.noise_sd > 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::param("noise_sd", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    pub dataset: LabeledDataset,
    pub parcellation: Parcellation,
    pub ground_truth: BTreeSet<u32>,
}

/// Balanced two-class data with a mean shift planted in `effect_rois`.
///
/// Rows alternate `+1, -1, ...`, and row `i` draws only from substream `i`,
/// so the first `m` rows of an `n`-row draw equal an `m`-row draw with the
/// same seed.
pub fn synth_generate(config: &SynthConfig) -> Result<SynthData> {
    config.validate()?;
    let d = config.rois * config.voxels_per_roi;
    let effect: BTreeSet<u32> = config.effect_rois.iter().copied().collect();
    let shifted: Vec<bool> = (0..d)
        .map(|j| effect.contains(&((j / config.voxels_per_roi) as u32)))
        .collect();
    let shift = config.effect_size * config.noise_sd;

    let mut features = Array2::zeros((config.n, d));
    let mut labels = Array1::zeros(config.n);
    for (i, mut row) in features.rows_mut().into_iter().enumerate() {
        let label = if i % 2 == 0 { 1.0 } else { -1.0 };
        labels[i] = label;
        let mut rng = substream(config.seed, i as u64);
        for (j, v) in row.iter_mut().enumerate() {
            let noise: f64 = rng.sample(StandardNormal);
            *v = config.noise_sd * noise
                + if label > 0.0 && shifted[j] {
                    shift
                } else {
                    0.0
                };
        }
    }

    let roi_of_feature = (0..d).map(|j| (j / config.voxels_per_roi) as u32).collect();
    let roi_names = (0..config.rois as u32)
        .map(|r| (r, format!("roi_{r:03}")))
        .collect();
    Ok(SynthData {
        dataset: LabeledDataset::new(features, labels)?,
        parcellation: Parcellation::new(roi_of_feature, roi_names)?,
        ground_truth: effect,
    })
}

/// Writes dataset, `atlas.csv` and `ground_truth.json` into `dir`.
pub fn write_synth(
    data: &SynthData,
    config: &SynthConfig,
    dir: impl AsRef<Path>,
) -> Result<PathBuf> {
    let dir = dir.as_ref();
    let manifest = write_dataset(&data.dataset, dir)?;
    write_parcellation(&data.parcellation, dir.join("atlas.csv"))?;
    #[derive(Serialize)]
    struct Truth<'a> {
        config: &'a SynthConfig,
        effect_rois: &'a BTreeSet<u32>,
    }
    write_json(
        &dir.join("ground_truth.json"),
        &Truth {
            config,
            effect_rois: &data.ground_truth,
        },
    )?;
    Ok(manifest)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::param(
                "format",
                format!("expected json or csv, got `{other}`"),
            )),
        }
    }
}

pub const REPORT_COLUMNS: [&str; 10] = [
    "roi_id",
    "roi_name",
    "n",
    "k",
    "empirical_accuracy",
    "delta_n",
    "worst_case_accuracy",
    "z",
    "p_value",
    "significant",
];

/// Writes the report as JSON, or as CSV with [`REPORT_COLUMNS`]. The CSV form
/// carries its configuration block in a `<path>.config.json` sidecar.
pub fn write_report(
    report: &SamReport,
    path: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<()> {
    let path = path.as_ref();
    match format {
        ReportFormat::Json => write_json(path, report),
        ReportFormat::Csv => {
            let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
            let mut writer = csv::Writer::from_writer(BufWriter::new(file));
            writer.write_record(REPORT_COLUMNS)?;
            for r in &report.regions {
                writer.write_record([
                    r.roi_id.to_string(),
                    r.roi_name.clone(),
                    r.n.to_string(),
                    r.k.to_string(),
                    fmt_float(r.empirical_accuracy),
                    fmt_float(r.delta_n),
                    fmt_float(r.worst_case_accuracy),
                    fmt_float(r.z),
                    fmt_float(r.p_value),
                    r.significant.to_string(),
                ])?;
            }
            writer.flush().map_err(|e| Error::io(path, e))?;
            let mut sidecar = path.as_os_str().to_owned();
            sidecar.push(".config.json");
            write_json(Path::new(&sidecar), &report.provenance())
        }
    }
}

pub fn read_report(path: impl AsRef<Path>) -> Result<SamReport> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, format!("invalid report: {e}")))
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub(crate) fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_text(path, |out| {
        serde_json::to_writer_pretty(&mut *out, value)?;
        writeln!(out)?;
        Ok(())
    })
}

fn write_text(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<fs::File>) -> std::result::Result<(), Box<dyn std::error::Error>>,
) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    body(&mut out).map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    out.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use tempfile::tempdir;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    fn manifest(dir: &Path, n: usize, d: usize) -> PathBuf {
        write(
            dir,
            "manifest.json",
            &format!(r#"{{"features": "x.csv", "labels": "y.csv", "n": {n}, "d": {d}}}"#),
        )
    }

    #[test]
    fn smallest_valid_dataset() {
        let dir = tempdir().unwrap();
        write(dir.path(), "x.csv", "0.5,1\n-2,3.25\n");
        write(dir.path(), "y.csv", "1\n-1\n");
        let ds = load_dataset(manifest(dir.path(), 2, 2)).unwrap();
        assert_eq!((ds.n(), ds.d()), (2, 2));
        assert_eq!(ds.features, array![[0.5, 1.0], [-2.0, 3.25]]);
    }

    #[test]
    fn zero_label_is_rejected_with_line() {
        let dir = tempdir().unwrap();
        write(dir.path(), "x.csv", "1\n2\n3\n");
        write(dir.path(), "y.csv", "1\n0\n-1\n");
        let err = load_dataset(manifest(dir.path(), 3, 1))
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn row_count_mismatch() {
        let dir = tempdir().unwrap();
        let rows: String = (0..99).map(|i| format!("{i}\n")).collect();
        write(dir.path(), "x.csv", &rows);
        write(dir.path(), "y.csv", &"1\n-1\n".repeat(50));
        let err = load_dataset(manifest(dir.path(), 100, 1))
            .unwrap_err()
            .to_string();
        assert!(err.contains("n = 100") && err.contains("99 rows"), "{err}");
    }

    #[test]
    fn bad_cells_report_coordinates() {
        let dir = tempdir().unwrap();
        write(dir.path(), "x.csv", "1,2\n3,abc\n");
        write(dir.path(), "y.csv", "1\n-1\n");
        let err = load_dataset(manifest(dir.path(), 2, 2))
            .unwrap_err()
            .to_string();
        assert!(err.contains("row 2, column 2"), "{err}");
        write(dir.path(), "x.csv", "1,2\n3,NaN\n");
        let err = load_dataset(manifest(dir.path(), 2, 2))
            .unwrap_err()
            .to_string();
        assert!(err.contains("non-finite"), "{err}");
        let missing = dir.path().join("nope.json");
        assert!(matches!(load_dataset(missing), Err(Error::Io { .. })));
    }

    #[test]
    fn parcellation_cases() {
        let dir = tempdir().unwrap();
        let ok = write(
            dir.path(),
            "a.csv",
            "feature_index,roi_id,roi_name\n0,1,left\n1,1,left\n2,7,right\n3,7,right\n",
        );
        let p = load_parcellation(ok).unwrap();
        assert_eq!(p.region_count(), 2);
        assert_eq!(p.regions()[&7], vec![2, 3]);
        let total: usize = p.regions().values().map(Vec::len).sum();
        assert_eq!(total, p.n_features());

        let gap = write(
            dir.path(),
            "b.csv",
            "feature_index,roi_id,roi_name\n0,1,a\n1,1,a\n2,2,b\n4,2,b\n",
        );
        assert!(load_parcellation(gap)
            .unwrap_err()
            .to_string()
            .contains("feature index 3"));

        let conflict = write(
            dir.path(),
            "c.csv",
            "feature_index,roi_id,roi_name\n0,1,a\n1,1,b\n",
        );
        assert!(load_parcellation(conflict)
            .unwrap_err()
            .to_string()
            .contains("named both"));

        let dup = write(
            dir.path(),
            "d.csv",
            "feature_index,roi_id,roi_name\n0,1,a\n0,1,a\n",
        );
        assert!(load_parcellation(dup)
            .unwrap_err()
            .to_string()
            .contains("twice"));
    }

    #[test]
    fn synth_is_deterministic_and_prefix_stable() {
        let cfg = SynthConfig {
            n: 40,
            rois: 3,
            voxels_per_roi: 4,
            effect_rois: vec![1],
            seed: 9,
            ..SynthConfig::default()
        };
        let a = synth_generate(&cfg).unwrap();
        let b = synth_generate(&cfg).unwrap();
        assert_eq!(a, b);
        let short = synth_generate(&SynthConfig {
            n: 20,
            ..cfg.clone()
        })
        .unwrap();
        assert_eq!(a.dataset.head(20).unwrap(), short.dataset);
        assert_eq!(a.dataset.class_counts(), (20, 20));
        assert_eq!(a.parcellation.region_count(), 3);
        assert_eq!(a.ground_truth, BTreeSet::from([1]));
    }

    #[test]
    fn synth_rejects_bad_configs() {
        let base = SynthConfig::default();
        assert!(synth_generate(&SynthConfig {
            n: 201,
            ..base.clone()
        })
        .is_err());
        assert!(synth_generate(&SynthConfig {
            effect_rois: vec![20],
            ..base.clone()
        })
        .is_err());
        assert!(synth_generate(&SynthConfig {
            noise_sd: 0.0,
            ..base.clone()
        })
        .is_err());
        assert!(synth_generate(&SynthConfig {
            effect_size: -1.0,
            ..base
        })
        .is_err());
    }

    #[test]
    fn dataset_round_trips_through_files() {
        let data = synth_generate(&SynthConfig {
            n: 10,
            rois: 2,
            voxels_per_roi: 3,
            effect_rois: vec![0],
            ..SynthConfig::default()
        })
        .unwrap();
        let dir = tempdir().unwrap();
        let manifest = write_dataset(&data.dataset, dir.path()).unwrap();
        let back = load_dataset(manifest).unwrap();
        assert_eq!(back, data.dataset);
        write_parcellation(&data.parcellation, dir.path().join("atlas.csv")).unwrap();
        assert_eq!(
            load_parcellation(dir.path().join("atlas.csv")).unwrap(),
            data.parcellation
        );
    }

    #[test]
    fn float_format_has_17_significant_digits() {
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
