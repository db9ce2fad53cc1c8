//! Solver backends: an external MILP process fed through MPS files, and an
//! exhaustive oracle for tiny instances.

mod external;
mod mps;
mod oracle;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::milp::MilpModel;

pub use external::{parse_solution, solve_external, ExternalSolver, SolutionFile};
pub use mps::{export_mps, read_mps, MpsModel, MpsSense};
pub use oracle::{solve_exact_oracle, OracleBackend, OracleLimits, OracleSolution};

/// Environment variable holding the default solver command template.
pub const SOLVER_ENV: &str = "DSNSCHED_SOLVER";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    FeasibleTimeLimit,
    Infeasible,
}

impl SolveStatus {
    pub fn has_solution(self) -> bool {
        !matches!(self, SolveStatus::Infeasible)
    }
}

/// A verified 0/1 assignment. `values` is empty when infeasible.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assignment {
    pub values: Vec<u8>,
    /// Recomputed from `values` and the model weights.
    pub objective: f64,
    pub status: SolveStatus,
}

pub trait Backend {
    /// Identifier recorded in run manifests.
    fn id(&self) -> String;

    fn solve(&mut self, model: &MilpModel, time_limit: Duration) -> Result<Assignment>;
}
