//! File-based exchange with an external MILP solver.
//!
//! The command template is split on whitespace and run without a shell;
//! `{mps}`, `{sol}` and `{time_limit_s}` are substituted in every token.
//! The solver must write a solution file of `name value` lines, optionally
//! with `=obj= <value>` and `=status= optimal|time_limit|infeasible`.
//! Variables it omits are taken as zero.

use std::collections::HashMap;
use std::fs::File;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use super::{export_mps, Assignment, Backend, SolveStatus};
use crate::error::{Error, Result};
use crate::milp::MilpModel;

const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolutionFile {
    pub status: Option<String>,
    pub objective: Option<f64>,
    pub values: Vec<(String, f64)>,
}

pub fn parse_solution(text: &str) -> Result<SolutionFile> {
    let mut out = SolutionFile::default();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('*') {
            continue;
        }
        let here = || format!("solution line {}", i + 1);
        let mut fields = line.split_whitespace();
        let (Some(name), Some(value), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::parse(here(), format!("expected 'name value', got '{line}'")));
        };
        match name {
            "=status=" => out.status = Some(value.to_ascii_lowercase()),
            "=obj=" => {
                out.objective = Some(
                    value
                        .parse()
                        .map_err(|_| Error::parse(here(), format!("bad objective '{value}'")))?,
                )
            }
            _ => {
                let v: f64 = value
                    .parse()
                    .map_err(|_| Error::parse(here(), format!("bad value '{value}'")))?;
                if !v.is_finite() {
                    return Err(Error::parse(here(), "non-finite value"));
                }
                out.values.push((name.to_string(), v));
            }
        }
    }
    Ok(out)
}

fn backend_error(message: impl Into<String>, diagnostics: impl Into<String>) -> Error {
    Error::Backend {
        message: message.into(),
        diagnostics: diagnostics.into(),
    }
}

/// Maps a parsed solution onto the model and verifies it.
fn assignment_from_solution(model: &MilpModel, sol: &SolutionFile) -> Result<Assignment> {
    let status = match sol.status.as_deref() {
        Some("optimal") => SolveStatus::Optimal,
        Some("time_limit") | Some("feasible") | None => SolveStatus::FeasibleTimeLimit,
        Some("infeasible") => SolveStatus::Infeasible,
        Some(other) => return Err(backend_error(format!("solver reported status '{other}'"), "")),
    };
    if status == SolveStatus::Infeasible {
        return Ok(Assignment {
            values: Vec::new(),
            objective: 0.0,
            status,
        });
    }

    let index: HashMap<String, usize> = (0..model.vars.len())
        .map(|i| (model.vars.name(i), i))
        .collect();
    let mut values = vec![0u8; model.vars.len()];
    for (name, v) in &sol.values {
        let Some(&i) = index.get(name) else {
            return Err(backend_error(format!("solution names unknown variable {name}"), ""));
        };
        let r = v.round();
        if (v - r).abs() > INTEGRALITY_TOL || !(r == 0.0 || r == 1.0) {
            return Err(backend_error(format!("{name} = {v} is not binary"), ""));
        }
        values[i] = r as u8;
    }
    model.check_assignment(&values).map_err(|e| {
        backend_error("solver assignment violates the model", e.to_string())
    })?;
    let objective = model.objective_value(&values);
    if let Some(reported) = sol.objective {
        if (reported + objective).abs() > 1e-6 * (1.0 + objective.abs()) {
            log::warn!(
                "solver objective {reported} does not match recomputed {}",
                -objective
            );
        }
    }
    Ok(Assignment {
        values,
        objective,
        status,
    })
}

/// Runs `command_template` on an exported copy of `model`.
pub fn solve_external(
    model: &MilpModel,
    command_template: &str,
    time_limit: Duration,
) -> Result<Assignment> {
    ExternalSolver::new(command_template).solve(model, time_limit)
}

#[derive(Clone, Debug)]
pub struct ExternalSolver {
    pub template: String,
    /// Keep exchange files here instead of a temporary directory.
    pub work_dir: Option<PathBuf>,
    /// Extra wall time granted beyond the solver's own limit before the
    /// process is killed.
    pub grace: Duration,
}

impl ExternalSolver {
    pub fn new(template: impl Into<String>) -> Self {
        ExternalSolver {
            template: template.into(),
            work_dir: None,
            grace: Duration::from_secs(60),
        }
    }
}

impl Backend for ExternalSolver {
    fn id(&self) -> String {
        format!("external:{}", self.template)
    }

    fn solve(&mut self, model: &MilpModel, time_limit: Duration) -> Result<Assignment> {
        let tmp;
        let dir = match &self.work_dir {
            Some(d) => {
                std::fs::create_dir_all(d)?;
                d.clone()
            }
            None => {
                tmp = tempfile::tempdir()?;
                tmp.path().to_path_buf()
            }
        };
        let mps = dir.join("model.mps");
        let sol = dir.join("model.sol");
        let _ = std::fs::remove_file(&sol);
        std::fs::write(&mps, export_mps(model))?;

        let seconds = time_limit.as_secs_f64().ceil().max(1.0) as u64;
        let args: Vec<String> = self
            .template
            .split_whitespace()
            .map(|tok| {
                tok.replace("{mps}", &mps.to_string_lossy())
                    .replace("{sol}", &sol.to_string_lossy())
                    .replace("{time_limit_s}", &seconds.to_string())
            })
            .collect();
        let Some((program, rest)) = args.split_first() else {
            return Err(Error::Config("empty solver command".into()));
        };

        let out_path = dir.join("solver.log");
        let log_file = File::create(&out_path)?;
        let mut child = Command::new(program)
            .args(rest)
            .stdin(Stdio::null())
            .stdout(log_file.try_clone()?)
            .stderr(log_file)
            .spawn()
            .map_err(|e| backend_error(format!("cannot start '{program}': {e}"), ""))?;

        let deadline = Instant::now() + Duration::from_secs(seconds) + self.grace;
        let status = loop {
            if let Some(status) = child.try_wait()? {
                break status;
            }
            if Instant::now() > deadline {
                let _ = child.kill();
                let _ = child.wait();
                return Err(backend_error(
                    format!("solver exceeded {seconds} s plus grace and was killed"),
                    tail(&std::fs::read_to_string(&out_path).unwrap_or_default()),
                ));
            }
            std::thread::sleep(Duration::from_millis(20));
        };
        let diagnostics = tail(&std::fs::read_to_string(&out_path).unwrap_or_default());
        if !status.success() {
            return Err(backend_error(format!("solver exited with {status}"), diagnostics));
        }
        let text = std::fs::read_to_string(&sol)
            .map_err(|e| backend_error(format!("no solution file: {e}"), diagnostics.clone()))?;
        let parsed = parse_solution(&text).map_err(|e| backend_error(e.to_string(), diagnostics))?;
        assignment_from_solution(model, &parsed)
    }
}

fn tail(text: &str) -> String {
    let lines: Vec<&str> = text.lines().collect();
    lines[lines.len().saturating_sub(40)..].join("\n")
}
