//! Time-indexed 0/1 program over completion (`x`), on (`X`), start/stop
//! (`X↑`/`X↓`) and setup/teardown occupancy (`Y↑`/`Y↓`) variables.
//!
//! Variables are created only where a view period can actually be on; the
//! constraint checker in this module is shared by every backend and by the
//! decoder, so no assignment leaves the crate without being verified.

mod build;
mod decode;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use build::build_model;
pub use decode::extract_schedule;

/// Constraint families. The string form (`2b`..`2m`) is what appears in MPS
/// row names, logs and decode errors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConstraintTag {
    /// X may be on only where the view period is available.
    #[serde(rename = "2b")]
    Availability,
    /// Fixes a variable that lies outside the horizon-feasible region.
    #[serde(rename = "boundary")]
    Boundary,
    #[serde(rename = "2c")]
    Transition,
    /// A slot cannot both start and stop a run.
    #[serde(rename = "2c-link")]
    TransitionLink,
    #[serde(rename = "2d")]
    MinUp,
    #[serde(rename = "2e")]
    MinDown,
    #[serde(rename = "2f")]
    SetupWindow,
    #[serde(rename = "2g")]
    TeardownWindow,
    #[serde(rename = "2h")]
    ResourceCapacity,
    #[serde(rename = "2i")]
    DurationBounds,
    #[serde(rename = "2j")]
    MissionOverlap,
    #[serde(rename = "2k")]
    SplitForward,
    #[serde(rename = "2l")]
    SplitBackward,
    #[serde(rename = "2m")]
    SplitExclusive,
    #[serde(rename = "single")]
    SingleInterval,
}

impl ConstraintTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstraintTag::Availability => "2b",
            ConstraintTag::Boundary => "boundary",
            ConstraintTag::Transition => "2c",
            ConstraintTag::TransitionLink => "2c-link",
            ConstraintTag::MinUp => "2d",
            ConstraintTag::MinDown => "2e",
            ConstraintTag::SetupWindow => "2f",
            ConstraintTag::TeardownWindow => "2g",
            ConstraintTag::ResourceCapacity => "2h",
            ConstraintTag::DurationBounds => "2i",
            ConstraintTag::MissionOverlap => "2j",
            ConstraintTag::SplitForward => "2k",
            ConstraintTag::SplitBackward => "2l",
            ConstraintTag::SplitExclusive => "2m",
            ConstraintTag::SingleInterval => "single",
        }
    }

    /// Short identifier usable inside MPS row names.
    pub fn row_prefix(self) -> &'static str {
        match self {
            ConstraintTag::Availability => "c2b",
            ConstraintTag::Boundary => "bnd",
            ConstraintTag::Transition => "c2c",
            ConstraintTag::TransitionLink => "c2cl",
            ConstraintTag::MinUp => "c2d",
            ConstraintTag::MinDown => "c2e",
            ConstraintTag::SetupWindow => "c2f",
            ConstraintTag::TeardownWindow => "c2g",
            ConstraintTag::ResourceCapacity => "c2h",
            ConstraintTag::DurationBounds => "c2i",
            ConstraintTag::MissionOverlap => "c2j",
            ConstraintTag::SplitForward => "c2k",
            ConstraintTag::SplitBackward => "c2l",
            ConstraintTag::SplitExclusive => "c2m",
            ConstraintTag::SingleInterval => "sgl",
        }
    }
}

impl fmt::Display for ConstraintTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// `Σ coef·var  (≤ | ≥ | =)  rhs` with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearConstraint {
    pub tag: ConstraintTag,
    pub terms: Vec<(usize, i64)>,
    pub sense: Sense,
    pub rhs: i64,
}

impl LinearConstraint {
    pub fn new(tag: ConstraintTag, terms: Vec<(usize, i64)>, sense: Sense, rhs: i64) -> Self {
        LinearConstraint { tag, terms, sense, rhs }
    }

    pub fn lhs(&self, value: impl Fn(usize) -> i64) -> i64 {
        self.terms.iter().map(|&(i, c)| c * value(i)).sum()
    }

    pub fn is_satisfied(&self, value: impl Fn(usize) -> i64) -> bool {
        let lhs = self.lhs(value);
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    /// `x[a]`
    Complete,
    /// `X[v,t]`
    On,
    /// `X↑[v,t]`
    Start,
    /// `X↓[v,t]`
    Stop,
    /// `Y↑[v,t]`
    Setup,
    /// `Y↓[v,t]`
    Teardown,
}

/// `owner` is the activity for `Complete` and the view period otherwise;
/// `t` is zero for `Complete`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct VarKey {
    pub kind: VarKind,
    pub owner: u32,
    pub t: u32,
}

#[derive(Clone, Debug, Default)]
pub struct VariableSpace {
    keys: Vec<VarKey>,
    index: HashMap<VarKey, usize>,
}

impl VariableSpace {
    /// Adds a variable, or returns the index it already has.
    pub fn push(&mut self, key: VarKey) -> usize {
        let next = self.keys.len();
        *self.index.entry(key).or_insert_with(|| {
            self.keys.push(key);
            next
        })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, i: usize) -> VarKey {
        self.keys[i]
    }

    pub fn keys(&self) -> &[VarKey] {
        &self.keys
    }

    pub fn get(&self, kind: VarKind, owner: usize, t: u32) -> Option<usize> {
        self.index
            .get(&VarKey {
                kind,
                owner: owner as u32,
                t,
            })
            .copied()
    }

    pub fn complete(&self, activity: usize) -> Option<usize> {
        self.get(VarKind::Complete, activity, 0)
    }

    pub fn name(&self, i: usize) -> String {
        let k = self.keys[i];
        let prefix = match k.kind {
            VarKind::Complete => return format!("x_a{}", k.owner),
            VarKind::On => "X",
            VarKind::Start => "Xu",
            VarKind::Stop => "Xd",
            VarKind::Setup => "Yu",
            VarKind::Teardown => "Yd",
        };
        format!("{prefix}_v{}_t{}", k.owner, k.t)
    }
}

/// Objective weights: `c1` per activity, `c2` per view period.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
}

impl Weights {
    pub fn uniform(n_activities: usize, n_view_periods: usize) -> Self {
        Weights {
            c1: vec![1.0; n_activities],
            c2: vec![1.0; n_view_periods],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ablation {
    /// Drop mission non-overlap rows.
    pub mission_overlap: bool,
    /// Drop the split XOR rows.
    pub split_xor: bool,
}

impl Ablation {
    /// Parses a comma list such as `2j,2k-2m`.
    pub fn parse(list: &str) -> Result<Self> {
        let mut out = Ablation::default();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "2j" => out.mission_overlap = true,
                "2k-2m" | "2k" | "2l" | "2m" => out.split_xor = true,
                other => {
                    return Err(Error::Config(format!(
                        "unknown ablation '{other}' (expected 2j or 2k-2m)"
                    )))
                }
            }
        }
        Ok(out)
    }

    pub fn is_none(&self) -> bool {
        !self.mission_overlap && !self.split_xor
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelOptions {
    /// Create only variables that can be nonzero. When false every
    /// variable exists and explicit rows fix the unreachable ones to zero.
    pub prune: bool,
    /// Setup and teardown must also fall inside available slots.
    pub strict_containment: bool,
    /// At most one on-interval per view period.
    pub single_interval: bool,
    pub ablate: Ablation,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            prune: true,
            strict_containment: false,
            single_interval: false,
            ablate: Ablation::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MilpModel {
    pub vars: VariableSpace,
    pub constraints: Vec<LinearConstraint>,
    objective: Vec<f64>,
    weights: Weights,
    pub options: ModelOptions,
    pub horizon: u32,
    pub n_activities: usize,
    pub n_view_periods: usize,
    /// Activities that cannot fit in any of their view periods.
    pub warnings: Vec<String>,
}

impl MilpModel {
    /// Assembles a model from hand-written rows. `weights.c1` must cover
    /// every `Complete` variable owner and `weights.c2` every view period.
    pub fn from_parts(
        vars: VariableSpace,
        constraints: Vec<LinearConstraint>,
        weights: Weights,
        options: ModelOptions,
        horizon: u32,
    ) -> Result<Self> {
        for c in &constraints {
            if let Some(&(i, _)) = c.terms.iter().find(|&&(i, _)| i >= vars.len()) {
                return Err(Error::Model(format!("{} row refers to variable {i}", c.tag)));
            }
        }
        for k in vars.keys() {
            let bound = match k.kind {
                VarKind::Complete => weights.c1.len(),
                _ => weights.c2.len(),
            };
            if k.owner as usize >= bound || (k.kind != VarKind::Complete && k.t >= horizon) {
                return Err(Error::Model(format!("variable {k:?} outside the model dimensions")));
            }
        }
        let mut model = MilpModel {
            vars,
            constraints,
            objective: Vec::new(),
            weights: weights.clone(),
            options,
            horizon,
            n_activities: weights.c1.len(),
            n_view_periods: weights.c2.len(),
            warnings: Vec::new(),
        };
        model.set_weights(&weights)?;
        Ok(model)
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    /// Replaces the objective weights without rebuilding the constraints.
    pub fn set_weights(&mut self, weights: &Weights) -> Result<()> {
        if weights.c1.len() != self.n_activities || weights.c2.len() != self.n_view_periods {
            return Err(Error::Model(format!(
                "weights sized ({}, {}) for a model with {} activities and {} view periods",
                weights.c1.len(),
                weights.c2.len(),
                self.n_activities,
                self.n_view_periods
            )));
        }
        if weights.c1.iter().chain(&weights.c2).any(|w| !w.is_finite()) {
            return Err(Error::Model("objective weights must be finite".into()));
        }
        self.objective = self
            .vars
            .keys()
            .iter()
            .map(|k| match k.kind {
                VarKind::Complete => weights.c1[k.owner as usize],
                VarKind::On => weights.c2[k.owner as usize],
                _ => 0.0,
            })
            .collect();
        self.weights = weights.clone();
        Ok(())
    }

    pub fn objective_value(&self, values: &[u8]) -> f64 {
        self.objective
            .iter()
            .zip(values)
            .filter(|(_, &v)| v == 1)
            .map(|(c, _)| c)
            .sum()
    }

    /// First violated constraint, in model order, as a decode error.
    pub fn check_assignment(&self, values: &[u8]) -> Result<()> {
        if values.len() != self.vars.len() {
            return Err(Error::Model(format!(
                "assignment has {} values for {} variables",
                values.len(),
                self.vars.len()
            )));
        }
        if let Some(i) = values.iter().position(|&v| v > 1) {
            return Err(Error::Model(format!("{} is not binary", self.vars.name(i))));
        }
        for (row, c) in self.constraints.iter().enumerate() {
            if !c.is_satisfied(|i| i64::from(values[i])) {
                let names: Vec<String> = c.terms.iter().map(|&(i, _)| self.vars.name(i)).collect();
                return Err(Error::Decode {
                    tag: c.tag,
                    detail: format!("row {row} over {}", names.join(", ")),
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelCounts {
    pub n_binaries: usize,
    /// Count without pruning: `|A| + 5·|V|·|T|`.
    pub n_binaries_dense: usize,
    pub n_binaries_by_kind: BTreeMap<VarKind, usize>,
    pub n_constraints_by_tag: BTreeMap<ConstraintTag, usize>,
    pub n_nonzeros: usize,
}

pub fn count_model(model: &MilpModel) -> ModelCounts {
    let mut by_kind = BTreeMap::new();
    for k in model.vars.keys() {
        *by_kind.entry(k.kind).or_insert(0) += 1;
    }
    let mut by_tag = BTreeMap::new();
    for c in &model.constraints {
        *by_tag.entry(c.tag).or_insert(0) += 1;
    }
    ModelCounts {
        n_binaries: model.vars.len(),
        n_binaries_dense: model.n_activities
            + 5 * model.n_view_periods * model.horizon as usize,
        n_binaries_by_kind: by_kind,
        n_constraints_by_tag: by_tag,
        n_nonzeros: model.constraints.iter().map(|c| c.terms.len()).sum(),
    }
}
