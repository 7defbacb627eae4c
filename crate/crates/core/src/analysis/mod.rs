//! Analyses built on the solvers: off-support extension, payment
//! monotonicity, gap sweeps and non-monotonicity gaps.

mod extension;
mod sweep;

pub use extension::{
    check_agreement, check_payment_monotone, extend_query, restrict_to, uniform_grid, AgreementIssue,
    ExtendedMechanism, MonotonicityReport, PaymentViolation,
};
pub use sweep::{gap_sweep, nonmono_gap, Benchmark, BoundKind, GapPoint, GapReport, NonmonotonicityGap, Trend};
