//! Solver-independent certification of schedules and the satisfaction
//! metrics used to compare them.

mod metrics;
mod validate;

pub use metrics::{compute_metrics, distance, u_metrics, MetricsReport, MissionSatisfaction};
pub use validate::{
    validate_schedule, Rule, TrackVerdict, ValidateOptions, ValidationReport,
};
