//! End-to-end runs: split, build, balance and certify.

use crate::balance::{initial_weights, run_balancer, BalancerConfig, BalancerResult, IterationRecord, MilpScheduleSolver};
use crate::error::Result;
use crate::evaluate::{validate_schedule, ValidateOptions, ValidationReport};
use crate::instance::ProblemInstance;
use crate::milp::{build_model, ModelOptions};
use crate::solve::{Backend, ExternalSolver, OracleBackend, OracleLimits};
use crate::splitter::{expand_splits, ExpandedInstance, SplitRegistry, SplitRounding};

#[derive(Clone, Debug, PartialEq)]
pub enum SolverChoice {
    Oracle(OracleLimits),
    /// Command template for an external MILP solver.
    External(String),
}

impl SolverChoice {
    /// `oracle` selects the exhaustive solver, anything else is a template.
    pub fn parse(s: &str) -> Self {
        if s.trim() == "oracle" {
            SolverChoice::Oracle(OracleLimits::default())
        } else {
            SolverChoice::External(s.to_string())
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub model: ModelOptions,
    pub split_rounding: SplitRounding,
    pub balancer: BalancerConfig,
    pub solver: SolverChoice,
}

pub struct RunOutcome {
    pub expanded: ExpandedInstance,
    pub registry: SplitRegistry,
    pub balance: BalancerResult,
    /// Validation of the chosen schedule.
    pub validation: ValidationReport,
    pub backend_id: String,
}

pub fn validate_options(model: &ModelOptions) -> ValidateOptions {
    ValidateOptions {
        strict_containment: model.strict_containment,
        single_interval: model.single_interval,
    }
}

pub fn run_schedule(
    instance: &ProblemInstance,
    options: &RunOptions,
    on_iteration: &mut dyn FnMut(&IterationRecord),
) -> Result<RunOutcome> {
    let (expanded, registry) = expand_splits(instance, options.split_rounding)?;
    options.balancer.check()?;
    let weights = initial_weights(&expanded, &options.balancer)?;
    let model = build_model(&expanded, &registry, &weights, &options.model)?;
    for w in &model.warnings {
        log::warn!("{w}");
    }
    let backend: Box<dyn Backend + '_> = match &options.solver {
        SolverChoice::Oracle(limits) => Box::new(OracleBackend {
            expanded: &expanded,
            registry: &registry,
            limits: *limits,
        }),
        SolverChoice::External(t) => Box::new(ExternalSolver::new(t.clone())),
    };
    let backend_id = backend.id();
    let mut solver = MilpScheduleSolver {
        expanded: &expanded,
        model,
        backend,
    };
    let balance = run_balancer(&expanded, &registry, &mut solver, &options.balancer, on_iteration)?;
    drop(solver);
    let validation = validate_schedule(
        &expanded,
        &registry,
        &balance.chosen().schedule,
        &validate_options(&options.model),
    )?;
    Ok(RunOutcome {
        expanded,
        registry,
        balance,
        validation,
        backend_id,
    })
}
