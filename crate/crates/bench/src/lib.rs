//! Private Lasso benchmarks: synthetic data, a DP-SGD baseline, experiment
//! grids over privacy budgets and CSV export.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod data;
pub mod dpsgd;
pub mod error;
pub mod experiment;
pub mod export;
pub mod reference;

pub use error::{BenchError, Result};

/// Environment variable naming the output directory.
pub const OUT_DIR_ENV: &str = "NOISYFIX_OUT";

/// One recorded iteration of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iter: usize,
    pub objective: f64,
    pub dist_sq: Option<f64>,
}

/// `$NOISYFIX_OUT`, or the current directory.
pub fn output_dir() -> std::path::PathBuf {
    std::env::var_os(OUT_DIR_ENV).map_or_else(|| std::path::PathBuf::from("."), Into::into)
}
