//! Error norms of finite element fields against spectral references,
//! time-aggregated norms and convergence-rate fits.

mod nested;
mod norms;
mod rate;
mod sine;
mod time;

pub use nested::nested_error;
pub use norms::{error_norm, ErrorEvaluator, FieldErrors, NormValue};
pub use rate::{fit_rate, ConvergenceReport, ErrorRecord, NormKind};
pub use sine::{fe_sine_coefficients, fe_sine_coefficients_with};
pub use time::{time_aggregate, time_aggregate_report, Aggregated, AggregationRule, TimeAggregation};
