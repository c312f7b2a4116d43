//! Threshold analysis for fault-tolerant quantum computation with a
//! concatenated `[m, 1]` code that corrects one error per block.
//!
//! The per-period logical depth of a level-`k` circuit with error
//! correction every `r` operations is `L = alpha k + beta k + r delta`.
//! To leading order a block fails with probability `c q^2`, so the top
//! level fails with `(1/c) [c L p]^(2^k)`. Requiring that to stay below the
//! unprotected `r p` gives the threshold
//!
//! ```text
//! p_th = (1/c) (r / L^(2^k))^(1 / (2^k - 1))
//! ```
//!
//! which peaks at `r* = (alpha + beta) k / (delta (2^k - 1))`.
//!
//! * [`model`]: depth, per-qubit error, leading-order failure, threshold.
//! * [`optimize`]: closed-form and numerical optimal period, level search.
//! * [`oracle`]: exact binomial recursion and a Monte Carlo sampler.
//!
//! Every routine is generic over [`Scalar`] (`f32`, `f64`); the `*F64` and
//! `*F32` aliases below fix the scalar.

pub mod error;
pub mod model;
pub mod optimize;
pub mod oracle;
pub mod scalar;

pub use error::{Error, Result};
pub use model::{
    block_failure_leading, log_threshold_slope, log_top_level_failure_leading, per_qubit_error,
    period_depth, scan_threshold_curve, threshold_condition, threshold_value, top_level_failure,
    top_level_failure_leading, CodeParameters, ErrorModel, LeadingFailure, ScheduleQuery,
    ThresholdCurve, ThresholdPoint, MAX_LEVEL,
};
pub use optimize::{
    closed_form_period, concavity_second_difference, optimal_period_closed_form,
    optimal_period_numeric, required_level, required_level_up_to, verify_concavity, OptimalPeriod,
};
pub use oracle::{
    block_failure_exact, log_recursive_failure_exact, recursive_failure_exact, simulate_failure,
    simulate_failure_with, wilson_interval, BottomMode, Execution, FailureEstimate, IntervalMethod,
    SimulationConfig,
};
pub use scalar::Scalar;

pub type CodeParametersF64 = CodeParameters<f64>;
pub type ScheduleQueryF64 = ScheduleQuery<f64>;
pub type ThresholdPointF64 = ThresholdPoint<f64>;
pub type ThresholdCurveF64 = ThresholdCurve<f64>;
pub type LeadingFailureF64 = LeadingFailure<f64>;
pub type OptimalPeriodF64 = OptimalPeriod<f64>;
pub type SimulationConfigF64 = SimulationConfig<f64>;
pub type FailureEstimateF64 = FailureEstimate<f64>;

pub type CodeParametersF32 = CodeParameters<f32>;
pub type ScheduleQueryF32 = ScheduleQuery<f32>;
pub type ThresholdPointF32 = ThresholdPoint<f32>;
pub type ThresholdCurveF32 = ThresholdCurve<f32>;
pub type LeadingFailureF32 = LeadingFailure<f32>;
pub type OptimalPeriodF32 = OptimalPeriod<f32>;
pub type SimulationConfigF32 = SimulationConfig<f32>;
pub type FailureEstimateF32 = FailureEstimate<f32>;
