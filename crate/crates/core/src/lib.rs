//! Tail bounds for sums of heavy-tailed integer random variables.
//!
//! A law `X` belongs to the class `D(alpha_l, alpha_r)` when
//! `P[X >= k] <= V k^-alpha_r` and `P[X <= -k] <= W k^-alpha_l` for `k >= 1`.
//! For sums `S_n` of such variables the crate evaluates the closed-form tail
//! bounds, the finite-n bounds they are derived from, the exact truncated
//! moment generating function behind them, and Monte Carlo estimates to check
//! them against.
//!
//! The analytic modules are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the precision. Simulation works in `f64`.

pub mod bounds;
pub mod distributions;
pub mod error;
pub mod exact_engine;
pub mod montecarlo;
pub mod scalar;
pub mod tail_model;

pub use bounds::{preasymptotic_bound, thm1_bound, thm2_bound, thm3_bound, thm4_bound, BoundKind};
pub use distributions::{DistKind, Expectation};
pub use error::{Error, Result};
pub use exact_engine::{interval_decomposition, mu_schedule, summation_by_parts_check, truncated_mgf};
pub use scalar::Scalar;
pub use tail_model::{aggregate_sequence, verify_membership, RegimeTag, TailFunctions, TailSide};

pub type TailClass = tail_model::TailClassSpec<f64>;
pub type Distribution = distributions::IntegerDistribution<f64>;
pub type Schedule = exact_engine::MuSchedule<f64>;
pub type Decomposition = exact_engine::IntervalDecomposition<f64>;
pub type Bound = bounds::BoundEvaluation<f64>;

pub type TailClass32 = tail_model::TailClassSpec<f32>;
pub type Distribution32 = distributions::IntegerDistribution<f32>;
pub type Schedule32 = exact_engine::MuSchedule<f32>;
pub type Decomposition32 = exact_engine::IntervalDecomposition<f32>;
pub type Bound32 = bounds::BoundEvaluation<f32>;
