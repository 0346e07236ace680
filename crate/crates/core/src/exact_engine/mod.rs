//! Exact evaluation of the truncated moment generating function and the
//! explicit-constant interval bounds that control it.

mod decomposition;
pub mod grid;
mod mgf;
mod parts;
mod schedule;

pub use decomposition::{interval_decomposition, t0_term, tau_term, IntervalDecomposition};
pub use mgf::truncated_mgf;
pub use parts::{summation_by_parts_check, IdentityReport};
pub use schedule::{mu_schedule, threshold_exponent, MuSchedule};
