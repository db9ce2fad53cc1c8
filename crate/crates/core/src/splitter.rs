//! XOR splitting of long requests.
//!
//! Every request with a maximum duration of at least eight hours gets two
//! clones, each allowed half the maximum and at least
//! `max(4 h, d_min / 2)`. Three inequalities over the completion variables
//! then let the solver pick the whole request or both halves, never both.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Activity, ProblemInstance, ViewPeriod};
use crate::milp::{ConstraintTag, LinearConstraint, Sense};

/// How half-durations that fall between slots are handled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitRounding {
    /// Refuse to split when a half does not land on the grid.
    #[default]
    Exact,
    /// Round the clone maximum down and the clone minimum up, so the halves
    /// still sum within the parent's bounds.
    Conservative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SplitTriple {
    pub parent: usize,
    pub first: usize,
    pub second: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SplitRegistry {
    pub triples: Vec<SplitTriple>,
}

impl SplitRegistry {
    pub fn triple_of(&self, activity: usize) -> Option<&SplitTriple> {
        self.triples
            .iter()
            .find(|t| t.parent == activity || t.first == activity || t.second == activity)
    }
}

/// Instance after splitting. Original activities keep their indices;
/// clones are appended after them.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpandedInstance {
    pub instance: ProblemInstance,
    /// For each activity, the index of the original request it serves.
    pub request_of: Vec<usize>,
    pub n_requests: usize,
}

impl ExpandedInstance {
    /// An instance with no splitting applied.
    pub fn unsplit(instance: ProblemInstance) -> Self {
        let n = instance.activities.len();
        ExpandedInstance {
            instance,
            request_of: (0..n).collect(),
            n_requests: n,
        }
    }

    pub fn is_clone(&self, activity: usize) -> bool {
        activity >= self.n_requests
    }
}

pub fn expand_splits(
    instance: &ProblemInstance,
    rounding: SplitRounding,
) -> Result<(ExpandedInstance, SplitRegistry)> {
    let grid = &instance.grid;
    let threshold = grid.hours_to_slots(8.0)?;
    let floor4 = grid.hours_to_slots(4.0)?;

    let mut activities = instance.activities.clone();
    let mut view_periods = instance.view_periods.clone();
    let mut request_of: Vec<usize> = (0..activities.len()).collect();
    let mut pending = Vec::new();

    for (ai, a) in instance.activities.iter().enumerate() {
        if a.d_max < threshold {
            continue;
        }
        let half_max = match (a.d_max % 2, rounding) {
            (0, _) | (_, SplitRounding::Conservative) => a.d_max / 2,
            _ => {
                return Err(Error::Quantization(format!(
                    "activity {}: half of d_max ({} slots) is not a whole slot",
                    a.id, a.d_max
                )))
            }
        };
        let half_min = match (a.d_min % 2, rounding) {
            (0, _) => a.d_min / 2,
            (_, SplitRounding::Conservative) => a.d_min / 2 + 1,
            _ if a.d_min / 2 < floor4 => a.d_min / 2,
            _ => {
                return Err(Error::Quantization(format!(
                    "activity {}: half of d_min ({} slots) is not a whole slot",
                    a.id, a.d_min
                )))
            }
        };
        let clone_min = floor4.max(half_min);
        if clone_min > half_max {
            log::warn!(
                "activity {}: clones would need {clone_min} > {half_max} slots; not split",
                a.id
            );
            continue;
        }

        let mut ids = [0usize; 2];
        for (k, slot) in ids.iter_mut().enumerate() {
            let suffix = format!("#{}", k + 1);
            let mut vp_ids = Vec::with_capacity(a.view_period_ids.len());
            for vid in &a.view_period_ids {
                let v = instance
                    .view_period_index(vid)
                    .expect("instance is referentially consistent");
                let original = &instance.view_periods[v];
                let id = format!("{}{suffix}", original.id);
                view_periods.push(ViewPeriod {
                    id: id.clone(),
                    resource_ids: original.resource_ids.clone(),
                    windows: original.windows.clone(),
                });
                vp_ids.push(id);
            }
            *slot = activities.len();
            activities.push(Activity {
                id: format!("{}{suffix}", a.id),
                mission_id: a.mission_id.clone(),
                d_min: clone_min,
                d_max: half_max,
                setup: a.setup,
                teardown: a.teardown,
                min_up: a.min_up.map(|g| g.min(clone_min)),
                min_down: a.min_down,
                view_period_ids: vp_ids,
            });
            request_of.push(ai);
        }
        pending.push(SplitTriple {
            parent: ai,
            first: ids[0],
            second: ids[1],
        });
    }

    let expanded = ProblemInstance::new(
        instance.label.clone(),
        instance.grid.clone(),
        instance.resources.clone(),
        instance.missions.clone(),
        activities,
        view_periods,
    )?;
    Ok((
        ExpandedInstance {
            instance: expanded,
            request_of,
            n_requests: instance.activities.len(),
        },
        SplitRegistry { triples: pending },
    ))
}

/// The three XOR inequalities per split request. Term indices refer to
/// activities (their completion variables), not to model columns.
pub fn xor_constraints(registry: &SplitRegistry) -> Vec<LinearConstraint> {
    let mut out = Vec::with_capacity(3 * registry.triples.len());
    for t in &registry.triples {
        out.push(LinearConstraint::new(
            ConstraintTag::SplitForward,
            vec![(t.first, 1), (t.second, -1)],
            Sense::Le,
            0,
        ));
        out.push(LinearConstraint::new(
            ConstraintTag::SplitBackward,
            vec![(t.second, 1), (t.first, -1)],
            Sense::Le,
            0,
        ));
        out.push(LinearConstraint::new(
            ConstraintTag::SplitExclusive,
            vec![(t.parent, 1), (t.first, 1)],
            Sense::Le,
            1,
        ));
    }
    out
}
