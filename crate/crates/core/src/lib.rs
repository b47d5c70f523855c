//! Curvature of the Gauduchon family of Hermitian connections on local
//! Hermitian metrics, with exact Taylor-jet differentiation.

// Index loops mirror the tensor formulas; `!(x > 0.0)` checks deliberately reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod chern;
pub mod error;
pub mod gauduchon;
pub mod jets;
pub mod metric_dsl;
pub mod models;
pub mod report;
pub mod tensorcore;

pub use error::{Error, Result};
pub use jets::{evaluate_jet, ChartPoint, MetricField, MetricJet};
pub use models::{build_model, lambda_star, ModelSpec};
pub use tensorcore::{CMat, LabeledTensor, C64};
