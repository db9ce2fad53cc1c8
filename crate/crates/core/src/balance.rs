//! Iterative reweighting for fairness across missions.
//!
//! Each round solves the program, measures per-mission satisfaction and
//! doubles the objective weights of every mission below the current
//! threshold. When all missions clear the threshold it is raised and the
//! round counter restarts; when a round reproduces the previous schedule
//! the time limit doubles. Among all saved schedules the one closest to
//! the ideal in (U_RMS, U_MAX, 1/U_AVG[, 1/U_PRIO]) is kept.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Duration;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluate::{compute_metrics, distance, MetricsReport};
use crate::milp::{extract_schedule, MilpModel, Weights};
use crate::schedule::Schedule;
use crate::solve::{Backend, SolveStatus};
use crate::splitter::{ExpandedInstance, SplitRegistry};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BalancerConfig {
    pub eta0: f64,
    pub incr_threshold: f64,
    pub k_max: u32,
    pub k_time: Duration,
    pub priority_multiplier: f64,
    pub prioritized: BTreeSet<String>,
    /// Safety stop on the total number of solves.
    pub max_solves: usize,
}

impl Default for BalancerConfig {
    fn default() -> Self {
        BalancerConfig {
            eta0: 0.15,
            incr_threshold: 0.05,
            k_max: 10,
            k_time: Duration::from_secs(1800),
            priority_multiplier: 5.0,
            prioritized: BTreeSet::new(),
            max_solves: 50,
        }
    }
}

impl BalancerConfig {
    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.eta0 > 0.0 && self.eta0 < 1.0) {
            return bad("threshold must lie strictly between 0 and 1");
        }
        if !(self.incr_threshold > 0.0 && self.incr_threshold.is_finite()) {
            return bad("threshold increment must be positive");
        }
        if self.k_max < 1 {
            return bad("iterations must be at least 1");
        }
        if self.k_time.is_zero() {
            return bad("time limit must be positive");
        }
        if !(self.priority_multiplier >= 1.0 && self.priority_multiplier.is_finite()) {
            return bad("priority weight must be at least 1");
        }
        if self.max_solves < 1 {
            return bad("solve cap must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolvedSchedule {
    pub schedule: Schedule,
    pub objective: f64,
    pub status: SolveStatus,
}

/// Anything that turns objective weights into a schedule.
pub trait ScheduleSolver {
    fn id(&self) -> String;
    fn solve(&mut self, weights: &Weights, time_limit: Duration) -> Result<SolvedSchedule>;
}

/// Builds the program once and re-solves it with new weights each round.
pub struct MilpScheduleSolver<'a> {
    pub expanded: &'a ExpandedInstance,
    pub model: MilpModel,
    pub backend: Box<dyn Backend + 'a>,
}

impl ScheduleSolver for MilpScheduleSolver<'_> {
    fn id(&self) -> String {
        self.backend.id()
    }

    fn solve(&mut self, weights: &Weights, time_limit: Duration) -> Result<SolvedSchedule> {
        self.model.set_weights(weights)?;
        let a = self.backend.solve(&self.model, time_limit)?;
        if !a.status.has_solution() {
            return Err(Error::Backend {
                message: "solver reported the program infeasible".into(),
                diagnostics: "the all-zero assignment is always feasible".into(),
            });
        }
        Ok(SolvedSchedule {
            schedule: extract_schedule(&self.model, self.expanded, &a.values)?,
            objective: a.objective,
            status: a.status,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    /// Zero-based solve count.
    pub solve: usize,
    pub k: u32,
    pub threshold: f64,
    pub k_time_s: f64,
    pub objective: f64,
    pub status: SolveStatus,
    pub satisfaction: BTreeMap<String, f64>,
    pub u_rms: f64,
    pub u_max: f64,
    pub u_avg: f64,
    pub u_prio: Option<f64>,
    pub d: f64,
    /// Missions whose weights were doubled after this solve.
    pub doubled: Vec<String>,
    pub threshold_raised: u32,
    pub k_time_doubled: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SavedSolution {
    pub schedule: Schedule,
    pub metrics: MetricsReport,
    /// Weights the solve ran with.
    pub weights: Weights,
    pub threshold: f64,
    pub objective: f64,
    pub status: SolveStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BalancerResult {
    pub solutions: Vec<SavedSolution>,
    pub chosen_index: usize,
    pub log: Vec<IterationRecord>,
    /// True when the solve cap, not the round limit, ended the loop.
    pub cap_fired: bool,
}

impl BalancerResult {
    pub fn chosen(&self) -> &SavedSolution {
        &self.solutions[self.chosen_index]
    }
}

/// All ones, with prioritized missions' completion weights raised to the
/// multiplier.
pub fn initial_weights(expanded: &ExpandedInstance, config: &BalancerConfig) -> Result<Weights> {
    let inst = &expanded.instance;
    let mut w = Weights::uniform(inst.activities.len(), inst.view_periods.len());
    for p in &config.prioritized {
        let m = inst
            .mission_index(p)
            .ok_or_else(|| Error::Config(format!("prioritized mission {p} is not in the instance")))?;
        for &a in inst.activities_of(m) {
            w.c1[a] = config.priority_multiplier;
        }
    }
    Ok(w)
}

/// Doubles every weight of each mission strictly below `threshold`.
/// Returns the new weights and the missions that were doubled.
pub fn update_weights(
    expanded: &ExpandedInstance,
    weights: &Weights,
    satisfactions: &BTreeMap<String, f64>,
    threshold: f64,
) -> (Weights, Vec<String>) {
    let inst = &expanded.instance;
    let mut w = weights.clone();
    let mut doubled = Vec::new();
    for (id, &s) in satisfactions {
        if s >= threshold {
            continue;
        }
        let Some(m) = inst.mission_index(id) else {
            continue;
        };
        for &a in inst.activities_of(m) {
            w.c1[a] *= 2.0;
            for &v in inst.view_periods_of(a) {
                w.c2[v] *= 2.0;
            }
        }
        doubled.push(id.clone());
    }
    (w, doubled)
}

/// Index of the report with the smallest distance; ties go to the earliest.
pub fn select_best(reports: &[&MetricsReport], prioritized: bool) -> Result<usize> {
    if reports.is_empty() {
        return Err(Error::Balance("no solutions to choose from".into()));
    }
    let d = |r: &MetricsReport| {
        let prio = prioritized.then(|| r.u_prio.unwrap_or(0.0));
        distance(r.u_rms, r.u_max, r.u_avg, prio)
    };
    let mut best = 0;
    let mut best_d = d(reports[0]);
    for (i, r) in reports.iter().enumerate().skip(1) {
        let di = d(r);
        if di < best_d {
            best = i;
            best_d = di;
        }
    }
    Ok(best)
}

pub fn run_balancer(
    expanded: &ExpandedInstance,
    registry: &SplitRegistry,
    solver: &mut dyn ScheduleSolver,
    config: &BalancerConfig,
    on_iteration: &mut dyn FnMut(&IterationRecord),
) -> Result<BalancerResult> {
    config.check()?;
    let mut weights = initial_weights(expanded, config)?;
    let mut k = 0u32;
    let mut raises = 0u32;
    let mut threshold = config.eta0;
    let mut k_time = config.k_time;
    let mut previous: Option<Schedule> = None;
    let mut solutions = Vec::new();
    let mut log = Vec::new();
    let mut cap_fired = false;

    while k < config.k_max {
        if solutions.len() >= config.max_solves {
            log::warn!(
                "balancer stopped by the {}-solve cap before its own exit condition",
                config.max_solves
            );
            cap_fired = true;
            break;
        }
        let solved = solver.solve(&weights, k_time)?;
        let mut schedule = solved.schedule;
        schedule.normalize();
        let metrics = compute_metrics(expanded, registry, &schedule, &config.prioritized)?;
        let satisfaction: BTreeMap<String, f64> = metrics
            .missions
            .iter()
            .map(|m| (m.mission_id.clone(), m.ratio))
            .collect();

        let threshold_at_solve = threshold;
        let k_at_solve = k;
        let k_time_at_solve = k_time;
        let (next_weights, doubled) = update_weights(expanded, &weights, &satisfaction, threshold);

        let mut raised = 0;
        if let Some(min) = metrics.min_satisfaction() {
            while min >= threshold {
                raises += 1;
                raised += 1;
                threshold = config.eta0 + f64::from(raises) * config.incr_threshold;
                k = 0;
            }
        }
        let repeated = previous.as_ref() == Some(&schedule);
        if repeated {
            k_time *= 2;
            k = 0;
        }
        k += 1;

        let record = IterationRecord {
            solve: solutions.len(),
            k: k_at_solve,
            threshold: threshold_at_solve,
            k_time_s: k_time_at_solve.as_secs_f64(),
            objective: solved.objective,
            status: solved.status,
            satisfaction,
            u_rms: metrics.u_rms,
            u_max: metrics.u_max,
            u_avg: metrics.u_avg,
            u_prio: metrics.u_prio,
            d: metrics.d,
            doubled,
            threshold_raised: raised,
            k_time_doubled: repeated,
        };
        log::info!(
            "solve {}: objective {:.2}, U_AVG {:.3}, U_MAX {:.3}, d {:.4}",
            record.solve,
            record.objective,
            record.u_avg,
            record.u_max,
            record.d
        );
        on_iteration(&record);
        log.push(record);
        solutions.push(SavedSolution {
            schedule: schedule.clone(),
            metrics,
            weights: weights.clone(),
            threshold: threshold_at_solve,
            objective: solved.objective,
            status: solved.status,
        });
        previous = Some(schedule);
        weights = next_weights;
    }

    let reports: Vec<&MetricsReport> = solutions.iter().map(|s| &s.metrics).collect();
    let chosen_index = select_best(&reports, !config.prioritized.is_empty())?;
    Ok(BalancerResult {
        solutions,
        chosen_index,
        log,
        cap_fired,
    })
}
