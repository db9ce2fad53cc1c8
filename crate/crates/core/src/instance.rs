//! Domain objects of a scheduling week: antennas, missions, activities and
//! view periods, resolved into index form once at construction.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::grid::{Interval, TimeGrid};

#[derive(Clone, Debug, PartialEq)]
pub struct Resource {
    pub id: String,
    pub complex: String,
    pub diameter_m: u32,
    pub maintenance: Vec<Interval>,
}

impl Resource {
    pub fn maintenance_mask(&self, horizon: u32) -> Vec<bool> {
        let mut mask = vec![false; horizon as usize];
        for iv in &self.maintenance {
            for t in iv.start..iv.end.min(horizon) {
                mask[t as usize] = true;
            }
        }
        mask
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mission {
    pub id: String,
}

/// A weekly communication request. Durations are stored in slots.
#[derive(Clone, Debug, PartialEq)]
pub struct Activity {
    pub id: String,
    pub mission_id: String,
    pub d_min: u32,
    pub d_max: u32,
    pub setup: u32,
    pub teardown: u32,
    /// Explicit minimum on-interval, in slots. Defaults to `d_min`.
    pub min_up: Option<u32>,
    /// Explicit minimum idle time after an on-interval, in slots. Defaults to 0.
    pub min_down: Option<u32>,
    pub view_period_ids: Vec<String>,
}

impl Activity {
    pub fn min_up_slots(&self) -> u32 {
        self.min_up.unwrap_or(self.d_min)
    }

    pub fn min_down_slots(&self) -> u32 {
        self.min_down.unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ViewPeriod {
    pub id: String,
    /// More than one resource means an arrayed track.
    pub resource_ids: Vec<String>,
    pub windows: Vec<Interval>,
}

#[derive(Clone, Debug, Default, PartialEq)]
struct InstanceIndex {
    resource_by_id: HashMap<String, usize>,
    mission_by_id: HashMap<String, usize>,
    activity_by_id: HashMap<String, usize>,
    vp_by_id: HashMap<String, usize>,
    activity_mission: Vec<usize>,
    activity_vps: Vec<Vec<usize>>,
    mission_activities: Vec<Vec<usize>>,
    vp_activity: Vec<usize>,
    vp_resources: Vec<Vec<usize>>,
}

/// A referentially consistent scheduling instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    pub label: String,
    pub grid: TimeGrid,
    pub resources: Vec<Resource>,
    pub missions: Vec<Mission>,
    pub activities: Vec<Activity>,
    pub view_periods: Vec<ViewPeriod>,
    index: InstanceIndex,
}

impl ProblemInstance {
    /// Checks referential integrity and builds the lookup tables. Every
    /// offending reference is reported, not just the first.
    pub fn new(
        label: impl Into<String>,
        grid: TimeGrid,
        resources: Vec<Resource>,
        missions: Vec<Mission>,
        activities: Vec<Activity>,
        view_periods: Vec<ViewPeriod>,
    ) -> Result<Self> {
        let mut problems = Vec::new();
        let horizon = grid.horizon_slots;

        let resource_by_id = unique_ids("resource", resources.iter().map(|r| &r.id), &mut problems);
        let mission_by_id = unique_ids("mission", missions.iter().map(|m| &m.id), &mut problems);
        let activity_by_id =
            unique_ids("activity", activities.iter().map(|a| &a.id), &mut problems);
        let vp_by_id = unique_ids("view period", view_periods.iter().map(|v| &v.id), &mut problems);

        for r in &resources {
            for iv in &r.maintenance {
                if iv.is_empty() || iv.end > horizon {
                    problems.push(format!(
                        "resource {}: maintenance interval {iv} outside horizon {horizon}",
                        r.id
                    ));
                }
            }
        }

        let mut vp_resources = Vec::with_capacity(view_periods.len());
        for vp in &view_periods {
            if vp.resource_ids.is_empty() {
                problems.push(format!("view period {} has no resources", vp.id));
            }
            let mut res = Vec::with_capacity(vp.resource_ids.len());
            for rid in &vp.resource_ids {
                match resource_by_id.get(rid) {
                    Some(&r) if res.contains(&r) => {
                        problems.push(format!("view period {} lists resource {rid} twice", vp.id))
                    }
                    Some(&r) => res.push(r),
                    None => problems.push(format!(
                        "view period {} references unknown resource {rid}",
                        vp.id
                    )),
                }
            }
            vp_resources.push(res);
            let mut prev_end = 0;
            for (i, iv) in vp.windows.iter().enumerate() {
                if iv.is_empty() || iv.end > horizon || (i > 0 && iv.start < prev_end) {
                    problems.push(format!(
                        "view period {}: window {iv} is empty, unsorted, overlapping or outside horizon {horizon}",
                        vp.id
                    ));
                }
                prev_end = iv.end;
            }
        }

        let mut activity_mission = Vec::with_capacity(activities.len());
        let mut activity_vps = Vec::with_capacity(activities.len());
        let mut mission_activities = vec![Vec::new(); missions.len()];
        let mut vp_activity = vec![usize::MAX; view_periods.len()];
        for (ai, a) in activities.iter().enumerate() {
            if a.d_min == 0 || a.d_min > a.d_max {
                problems.push(format!(
                    "activity {}: need 0 < d_min ({}) <= d_max ({}) slots",
                    a.id, a.d_min, a.d_max
                ));
            }
            let m = match mission_by_id.get(&a.mission_id) {
                Some(&m) => {
                    mission_activities[m].push(ai);
                    m
                }
                None => {
                    problems.push(format!(
                        "activity {} references unknown mission {}",
                        a.id, a.mission_id
                    ));
                    usize::MAX
                }
            };
            activity_mission.push(m);
            if a.view_period_ids.is_empty() {
                problems.push(format!("activity {} has no view periods", a.id));
            }
            let mut vps = Vec::with_capacity(a.view_period_ids.len());
            for vid in &a.view_period_ids {
                match vp_by_id.get(vid) {
                    Some(&v) if vp_activity[v] != usize::MAX => problems.push(format!(
                        "view period {vid} is claimed by more than one activity ({} and {})",
                        activities[vp_activity[v]].id, a.id
                    )),
                    Some(&v) => {
                        vp_activity[v] = ai;
                        vps.push(v);
                    }
                    None => problems.push(format!(
                        "activity {} references unknown view period {vid}",
                        a.id
                    )),
                }
            }
            activity_vps.push(vps);
        }
        for (v, owner) in vp_activity.iter().enumerate() {
            if *owner == usize::MAX {
                problems.push(format!(
                    "view period {} is not used by any activity",
                    view_periods[v].id
                ));
            }
        }

        if !problems.is_empty() {
            return Err(Error::Integrity(problems));
        }

        Ok(ProblemInstance {
            label: label.into(),
            grid,
            resources,
            missions,
            activities,
            view_periods,
            index: InstanceIndex {
                resource_by_id,
                mission_by_id,
                activity_by_id,
                vp_by_id,
                activity_mission,
                activity_vps,
                mission_activities,
                vp_activity,
                vp_resources,
            },
        })
    }

    pub fn horizon(&self) -> u32 {
        self.grid.horizon_slots
    }

    pub fn resource_index(&self, id: &str) -> Option<usize> {
        self.index.resource_by_id.get(id).copied()
    }

    pub fn mission_index(&self, id: &str) -> Option<usize> {
        self.index.mission_by_id.get(id).copied()
    }

    pub fn activity_index(&self, id: &str) -> Option<usize> {
        self.index.activity_by_id.get(id).copied()
    }

    pub fn view_period_index(&self, id: &str) -> Option<usize> {
        self.index.vp_by_id.get(id).copied()
    }

    pub fn mission_of(&self, activity: usize) -> usize {
        self.index.activity_mission[activity]
    }

    pub fn view_periods_of(&self, activity: usize) -> &[usize] {
        &self.index.activity_vps[activity]
    }

    pub fn activities_of(&self, mission: usize) -> &[usize] {
        &self.index.mission_activities[mission]
    }

    pub fn activity_of_vp(&self, vp: usize) -> usize {
        self.index.vp_activity[vp]
    }

    pub fn resources_of(&self, vp: usize) -> &[usize] {
        &self.index.vp_resources[vp]
    }

    /// Requested tracking time in slots (sum of `d_max`).
    pub fn requested_slots(&self) -> u64 {
        self.activities.iter().map(|a| u64::from(a.d_max)).sum()
    }

    /// Slots of view period `vp` that are inside one of its windows and not
    /// blocked by maintenance on any of its resources.
    pub fn availability_mask(&self, vp: usize) -> Vec<bool> {
        let horizon = self.horizon();
        let mut mask = vec![false; horizon as usize];
        for iv in &self.view_periods[vp].windows {
            for t in iv.slots() {
                mask[t as usize] = true;
            }
        }
        for &r in self.resources_of(vp) {
            for iv in &self.resources[r].maintenance {
                for t in iv.start..iv.end.min(horizon) {
                    mask[t as usize] = false;
                }
            }
        }
        mask
    }
}

fn unique_ids<'a>(
    kind: &str,
    ids: impl Iterator<Item = &'a String>,
    problems: &mut Vec<String>,
) -> HashMap<String, usize> {
    let mut map = HashMap::new();
    for (i, id) in ids.enumerate() {
        if id.is_empty() {
            problems.push(format!("{kind} #{i} has an empty id"));
        }
        if map.insert(id.clone(), i).is_some() {
            problems.push(format!("duplicate {kind} id {id}"));
        }
    }
    map
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn resolves_indices() {
        let inst = ProblemInstance::new(
            "t",
            grid(48),
            vec![resource("DSS-14"), resource("DSS-43")],
            vec![mission("M")],
            vec![activity("a", "M", (2, 4), (1, 1), &["v1", "v2"])],
            vec![vp("v1", &["DSS-14"], &[(0, 8)]), vp("v2", &["DSS-43", "DSS-14"], &[(10, 20)])],
        )
        .unwrap();
        assert_eq!(inst.view_periods_of(0), &[0, 1]);
        assert_eq!(inst.resources_of(1), &[1, 0]);
        assert_eq!(inst.activity_of_vp(1), 0);
        assert_eq!(inst.activities_of(0), &[0]);
        assert_eq!(inst.requested_slots(), 4);
    }

    #[test]
    fn dangling_references_are_all_listed() {
        let err = ProblemInstance::new(
            "t",
            grid(48),
            vec![resource("DSS-14")],
            vec![mission("M")],
            vec![
                activity("a", "M", (2, 4), (1, 1), &["v1", "missing-vp"]),
                activity("b", "NOPE", (2, 4), (1, 1), &["v2"]),
            ],
            vec![vp("v1", &["DSS-14"], &[(0, 8)]), vp("v2", &["DSS-99"], &[(0, 8)])],
        )
        .unwrap_err();
        let Error::Integrity(problems) = err else {
            panic!("expected integrity error")
        };
        let joined = problems.join("\n");
        assert!(joined.contains("missing-vp"));
        assert!(joined.contains("NOPE"));
        assert!(joined.contains("DSS-99"));
    }

    #[test]
    fn rejects_bad_windows_and_durations() {
        let err = ProblemInstance::new(
            "t",
            grid(48),
            vec![resource("R")],
            vec![mission("M")],
            vec![activity("a", "M", (5, 4), (1, 1), &["v"])],
            vec![vp("v", &["R"], &[(10, 20), (15, 30), (40, 60)])],
        )
        .unwrap_err();
        let Error::Integrity(problems) = err else {
            panic!()
        };
        assert_eq!(problems.len(), 3, "{problems:?}");
    }

    #[test]
    fn maintenance_removes_availability() {
        let mut r = resource("R");
        r.maintenance = vec![Interval::new(4, 6)];
        let inst = ProblemInstance::new(
            "t",
            grid(12),
            vec![r],
            vec![mission("M")],
            vec![activity("a", "M", (1, 1), (0, 0), &["v"])],
            vec![vp("v", &["R"], &[(2, 8)])],
        )
        .unwrap();
        let mask = inst.availability_mask(0);
        let on: Vec<usize> = mask.iter().enumerate().filter(|(_, b)| **b).map(|(t, _)| t).collect();
        assert_eq!(on, vec![2, 3, 6, 7]);
    }
}
