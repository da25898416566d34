//! Noisy fixed-point iterations and private ADMM.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the bottom of this file fix the precision for common use.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admm;
pub mod error;
pub mod fixedpoint;
pub mod linalg;
pub mod operators;
pub mod privacy;
pub mod rng;
pub mod scalar;
pub mod simnet;
pub mod utility;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use operators::{BlockVector, Expansiveness, OperatorHandle, ProxSpec};
pub use rng::{Domain, Streams};
pub use scalar::Scalar;

pub type BlockVector64 = operators::BlockVector<f64>;
pub type BlockVector32 = operators::BlockVector<f32>;
pub type Matrix64 = linalg::Matrix<f64>;
pub type Matrix32 = linalg::Matrix<f32>;
pub type ProxSpec64 = operators::ProxSpec<f64>;
pub type ProxSpec32 = operators::ProxSpec<f32>;
pub type OperatorHandle64 = operators::OperatorHandle<f64>;
pub type OperatorHandle32 = operators::OperatorHandle<f32>;
pub type IterationConfig64 = fixedpoint::IterationConfig<f64>;
pub type IterationConfig32 = fixedpoint::IterationConfig<f32>;
pub type RunTrace64 = fixedpoint::RunTrace<f64>;
pub type RunTrace32 = fixedpoint::RunTrace<f32>;
pub type ConsensusProblem64 = admm::ConsensusProblem<f64>;
pub type ConsensusProblem32 = admm::ConsensusProblem<f32>;
pub type GeneralAdmmProblem64 = admm::GeneralAdmmProblem<f64>;
pub type GeneralAdmmProblem32 = admm::GeneralAdmmProblem<f32>;
pub type AdmmConfig64 = admm::AdmmConfig<f64>;
pub type AdmmConfig32 = admm::AdmmConfig<f32>;
pub type RdpCurve64 = privacy::RdpCurve<f64>;
pub type RdpCurve32 = privacy::RdpCurve<f32>;
pub type UtilityParams64 = utility::UtilityParams<f64>;
pub type UtilityParams32 = utility::UtilityParams<f32>;
