//! Exhaustive search over every 0/1 vector of completion and on-slot
//! decisions, for instances small enough to enumerate.
//!
//! The oracle does not use the constraint rows of the program. It derives
//! tracks from each candidate vector and checks the scheduling rules on
//! them directly: runs fit in the horizon with their setup and teardown,
//! runs last long enough, resources and missions are never double-booked,
//! durations respect the request bounds, and split requests follow the XOR
//! rule. Only `x` and `X` are enumerated; the start, stop and occupancy
//! variables are determined by them.

use std::time::Duration;

use super::{Assignment, Backend, SolveStatus};
use crate::error::{Error, Result};
use crate::milp::{MilpModel, ModelOptions, VarKind, Weights};
use crate::splitter::{ExpandedInstance, SplitRegistry};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    /// Largest number of enumerated decisions accepted.
    pub max_vars: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_vars: 24 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSolution {
    pub objective: f64,
    pub completed: Vec<bool>,
    /// On-slots per view period, ascending.
    pub on: Vec<Vec<u32>>,
    /// Number of enumerated decisions.
    pub n_vars: usize,
    /// Number of vectors that passed every rule.
    pub n_feasible: u64,
}

struct VpInfo {
    activity: usize,
    mission: usize,
    resources: Vec<usize>,
    available: Vec<bool>,
    setup: u32,
    teardown: u32,
    min_up: u32,
    min_down: u32,
    /// Bits of this view period's cells, slot order.
    cells: Vec<(u32, u64)>,
}

fn available_slots(expanded: &ExpandedInstance, vp: usize) -> Vec<bool> {
    let inst = &expanded.instance;
    let horizon = inst.horizon() as usize;
    let mut out = vec![false; horizon];
    for w in &inst.view_periods[vp].windows {
        for t in w.start..w.end {
            out[t as usize] = true;
        }
    }
    for rid in &inst.view_periods[vp].resource_ids {
        let r = inst
            .resources
            .iter()
            .find(|r| &r.id == rid)
            .expect("instance is referentially consistent");
        for m in &r.maintenance {
            for t in m.start..m.end {
                out[t as usize] = false;
            }
        }
    }
    out
}

pub fn solve_exact_oracle(
    expanded: &ExpandedInstance,
    registry: &SplitRegistry,
    weights: &Weights,
    options: &ModelOptions,
    limits: OracleLimits,
) -> Result<OracleSolution> {
    let inst = &expanded.instance;
    let horizon = inst.horizon();
    let n_act = inst.activities.len();
    let n_vp = inst.view_periods.len();
    if weights.c1.len() != n_act || weights.c2.len() != n_vp {
        return Err(Error::Model("weights do not match the instance".into()));
    }

    // View period of each enumerated on-slot, in decision order.
    let mut cells: Vec<usize> = Vec::new();
    let mut vps: Vec<VpInfo> = Vec::with_capacity(n_vp);
    for (v, vp) in inst.view_periods.iter().enumerate() {
        let activity = inst
            .activities
            .iter()
            .position(|a| a.view_period_ids.contains(&vp.id))
            .expect("every view period has an owner");
        let act = &inst.activities[activity];
        let mission = inst
            .missions
            .iter()
            .position(|m| m.id == act.mission_id)
            .expect("every activity has a mission");
        let resources = vp
            .resource_ids
            .iter()
            .map(|rid| inst.resources.iter().position(|r| &r.id == rid).unwrap())
            .collect();
        let available = available_slots(expanded, v);
        let mut info = VpInfo {
            activity,
            mission,
            resources,
            setup: act.setup,
            teardown: act.teardown,
            min_up: act.min_up.unwrap_or(act.d_min),
            min_down: act.min_down.unwrap_or(0),
            cells: Vec::new(),
            available,
        };
        for t in 0..horizon {
            if info.available[t as usize] {
                info.cells.push((t, 0));
                cells.push(v);
            }
        }
        vps.push(info);
    }

    let n_vars = n_act + cells.len();
    if n_vars > limits.max_vars || n_vars > 40 {
        return Err(Error::OracleLimit(format!(
            "{n_vars} decisions exceed the limit of {}",
            limits.max_vars
        )));
    }
    // Decision i is bit (n_vars - 1 - i), so counting upward visits vectors
    // in lexicographic order with decision 0 most significant.
    let bit = |i: usize| 1u64 << (n_vars - 1 - i);
    let x_bit: Vec<u64> = (0..n_act).map(bit).collect();
    let mut cell_mask = vec![0u64; n_act];
    {
        let mut next = vec![0usize; n_vp];
        for (j, &v) in cells.iter().enumerate() {
            let b = bit(n_act + j);
            let info = &mut vps[v];
            info.cells[next[v]].1 = b;
            next[v] += 1;
            cell_mask[info.activity] |= b;
        }
    }

    let n_res = inst.resources.len();
    let n_mis = inst.missions.len();
    let h = horizon as usize;
    let mut res_load = vec![0u8; n_res * h];
    let mut mis_load = vec![0u8; n_mis * h];
    let mut runs: Vec<(u32, u32)> = Vec::new();

    let mut best: Option<(f64, u64)> = None;
    let mut n_feasible = 0u64;

    'vectors: for z in 0..(1u64 << n_vars) {
        for a in 0..n_act {
            let count = (z & cell_mask[a]).count_ones();
            let act = &inst.activities[a];
            let ok = if z & x_bit[a] != 0 {
                act.d_min <= count && count <= act.d_max
            } else {
                count == 0
            };
            if !ok {
                continue 'vectors;
            }
        }
        if !options.ablate.split_xor {
            for t in &registry.triples {
                let (p, f, s) = (
                    z & x_bit[t.parent] != 0,
                    z & x_bit[t.first] != 0,
                    z & x_bit[t.second] != 0,
                );
                if f != s || (p && f) {
                    continue 'vectors;
                }
            }
        }

        res_load.iter_mut().for_each(|c| *c = 0);
        mis_load.iter_mut().for_each(|c| *c = 0);
        for info in &vps {
            runs.clear();
            let mut open: Option<(u32, u32)> = None;
            for &(t, b) in &info.cells {
                if z & b == 0 {
                    continue;
                }
                open = match open {
                    Some((s, e)) if e == t => Some((s, t + 1)),
                    Some(run) => {
                        runs.push(run);
                        Some((t, t + 1))
                    }
                    None => Some((t, t + 1)),
                };
            }
            runs.extend(open);
            if options.single_interval && runs.len() > 1 {
                continue 'vectors;
            }
            for (k, &(s, e)) in runs.iter().enumerate() {
                if s < info.setup || e + info.teardown > horizon {
                    continue 'vectors;
                }
                if e - s < info.min_up.min(horizon - s) {
                    continue 'vectors;
                }
                if let Some(&(next, _)) = runs.get(k + 1) {
                    if next < e + info.min_down {
                        continue 'vectors;
                    }
                }
                let lo = s - info.setup;
                let hi = e + info.teardown;
                if options.strict_containment
                    && (lo..s).chain(e..hi).any(|t| !info.available[t as usize])
                {
                    continue 'vectors;
                }
                for t in lo..hi {
                    let t = t as usize;
                    for &r in &info.resources {
                        let c = &mut res_load[r * h + t];
                        *c += 1;
                        if *c > 1 {
                            continue 'vectors;
                        }
                    }
                    if !options.ablate.mission_overlap {
                        let c = &mut mis_load[info.mission * h + t];
                        *c += 1;
                        if *c > 1 {
                            continue 'vectors;
                        }
                    }
                }
            }
        }

        n_feasible += 1;
        let mut value = 0.0;
        for (bit, c1) in x_bit.iter().zip(&weights.c1) {
            if z & bit != 0 {
                value += c1;
            }
        }
        for (v, info) in vps.iter().enumerate() {
            let on = info.cells.iter().filter(|&&(_, b)| z & b != 0).count();
            value += weights.c2[v] * on as f64;
        }
        if best.is_none_or(|(b, _)| value > b) {
            best = Some((value, z));
        }
    }

    let (objective, z) = best.expect("the all-zero vector is always feasible");
    Ok(OracleSolution {
        objective,
        completed: x_bit.iter().map(|&b| z & b != 0).collect(),
        on: vps
            .iter()
            .map(|info| {
                info.cells
                    .iter()
                    .filter(|&&(_, b)| z & b != 0)
                    .map(|&(t, _)| t)
                    .collect()
            })
            .collect(),
        n_vars,
        n_feasible,
    })
}

impl OracleSolution {
    /// Expresses the solution in the model's variables and verifies it
    /// against the model's rows.
    pub fn to_assignment(&self, model: &MilpModel, expanded: &ExpandedInstance) -> Result<Assignment> {
        let inst = &expanded.instance;
        let mut values = vec![0u8; model.vars.len()];
        let mut set = |kind: VarKind, owner: usize, t: u32| -> Result<()> {
            let i = model.vars.get(kind, owner, t).ok_or_else(|| {
                Error::Model(format!("oracle uses {kind:?}[{owner},{t}] which the model lacks"))
            })?;
            values[i] = 1;
            Ok(())
        };
        for (a, &done) in self.completed.iter().enumerate() {
            if done {
                set(VarKind::Complete, a, 0)?;
            }
        }
        for (v, slots) in self.on.iter().enumerate() {
            let act = &inst.activities[inst.activity_of_vp(v)];
            let mut k = 0;
            while k < slots.len() {
                let s = slots[k];
                let mut e = s + 1;
                while k + 1 < slots.len() && slots[k + 1] == e {
                    k += 1;
                    e += 1;
                }
                k += 1;
                for t in s..e {
                    set(VarKind::On, v, t)?;
                }
                set(VarKind::Start, v, s)?;
                if e < model.horizon {
                    set(VarKind::Stop, v, e)?;
                }
                for t in s - act.setup..s {
                    set(VarKind::Setup, v, t)?;
                }
                for t in e..e + act.teardown {
                    set(VarKind::Teardown, v, t)?;
                }
            }
        }
        model.check_assignment(&values)?;
        Ok(Assignment {
            objective: model.objective_value(&values),
            values,
            status: SolveStatus::Optimal,
        })
    }
}

/// The oracle behind the common backend interface. Weights and options are
/// taken from the model it is asked to solve.
pub struct OracleBackend<'a> {
    pub expanded: &'a ExpandedInstance,
    pub registry: &'a SplitRegistry,
    pub limits: OracleLimits,
}

impl Backend for OracleBackend<'_> {
    fn id(&self) -> String {
        "oracle".into()
    }

    fn solve(&mut self, model: &MilpModel, _time_limit: Duration) -> Result<Assignment> {
        let sol = solve_exact_oracle(
            self.expanded,
            self.registry,
            model.weights(),
            &model.options,
            self.limits,
        )?;
        sol.to_assignment(model, self.expanded)
    }
}
