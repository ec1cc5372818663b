//! Worst-case accuracy bounds for linear classifiers and region-wise
//! statistical agnostic maps.
//!
//! A region is declared significant when the accuracy of an in-sample
//! PLS + linear SVM model, minus a distribution-free deviation bound, is
//! still significantly above chance under a one-sided proportion test.
//!
//! * [`bounds`]: Massart, VC and function-counting deviation bounds, plus
//!   combinatorial and Monte Carlo oracles.
//! * [`pls`]: partial least squares feature extraction.
//! * [`classify`]: linear SVM and empirical risk.
//! * [`inference`]: worst-case accuracy, z-test, region selection.
//! * [`dataio`]: file formats and the synthetic generator.
//! * [`pipeline`]: end-to-end map construction and coverage experiments.

pub mod bounds;
pub mod classify;
pub mod dataio;
pub mod error;
pub mod inference;
mod par;
pub mod pipeline;
pub mod pls;
pub mod rng;

pub use bounds::{BoundMethod, BoundRequest, BoundResult};
pub use classify::{LinearClassifier, RiskEstimate};
pub use dataio::{LabeledDataset, Parcellation, SynthConfig};
pub use error::{Error, Result};
pub use inference::{ProportionTest, RoiAnalysis, SamReport, Statistic};
pub use pipeline::{CoverageResult, PipelineConfig};
pub use pls::PlsModel;
