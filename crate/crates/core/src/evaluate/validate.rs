use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::{Schedule, Track};
use crate::splitter::{ExpandedInstance, SplitRegistry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    InViewPeriod,
    DurationBounds,
    SetupTeardownShape,
    ResourceOverlap,
    MissionOverlap,
    SplitRules,
    MinUpDown,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidateOptions {
    /// Setup and teardown must lie in available slots too.
    pub strict_containment: bool,
    /// At most one track per view period.
    pub single_interval: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrackVerdict {
    pub activity_id: String,
    pub view_period_id: String,
    pub violations: BTreeSet<Rule>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub tracks: Vec<TrackVerdict>,
    /// Problems not tied to a single track, such as a completed activity
    /// with too little tracking time.
    pub global: Vec<String>,
    pub n_tracks: usize,
    pub n_valid: usize,
    /// Percentage of tracks without violations; 100 for an empty schedule.
    pub valid_fraction: f64,
    pub empty_schedule: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.n_valid == self.n_tracks && self.global.is_empty()
    }

    pub fn violation_counts(&self) -> BTreeMap<Rule, usize> {
        let mut out = BTreeMap::new();
        for t in &self.tracks {
            for &r in &t.violations {
                *out.entry(r).or_insert(0) += 1;
            }
        }
        out
    }
}

struct Resolved {
    activity: usize,
    vp: usize,
}

/// Checks every track against the scheduling rules using interval
/// arithmetic on the expanded instance.
pub fn validate_schedule(
    expanded: &ExpandedInstance,
    registry: &SplitRegistry,
    schedule: &Schedule,
    options: &ValidateOptions,
) -> Result<ValidationReport> {
    let inst = &expanded.instance;
    let horizon = inst.horizon();
    let mut problems = Vec::new();
    let mut resolved = Vec::with_capacity(schedule.tracks.len());
    for (i, t) in schedule.tracks.iter().enumerate() {
        let Some(a) = inst.activity_index(&t.activity_id) else {
            problems.push(format!("track {i}: unknown activity {}", t.activity_id));
            continue;
        };
        let Some(v) = inst.view_period_index(&t.view_period_id) else {
            problems.push(format!("track {i}: unknown view period {}", t.view_period_id));
            continue;
        };
        if inst.activity_of_vp(v) != a {
            problems.push(format!(
                "track {i}: view period {} does not belong to {}",
                t.view_period_id, t.activity_id
            ));
        }
        if inst.activities[a].mission_id != t.mission_id
            || inst.activities[expanded.request_of[a]].id != t.parent_id
            || inst.view_periods[v].resource_ids != t.resource_ids
        {
            problems.push(format!("track {i}: mission, parent or resources do not match"));
        }
        resolved.push(Resolved { activity: a, vp: v });
    }
    let mut completed = BTreeSet::new();
    for id in &schedule.completed {
        match inst.activity_index(id) {
            Some(a) => {
                completed.insert(a);
            }
            None => problems.push(format!("completed set names unknown activity {id}")),
        }
    }
    if !problems.is_empty() {
        return Err(Error::Integrity(problems));
    }

    let tracks = &schedule.tracks;
    let mut verdicts: Vec<BTreeSet<Rule>> = vec![BTreeSet::new(); tracks.len()];
    let mut global = Vec::new();
    let masks: BTreeMap<usize, Vec<bool>> = resolved
        .iter()
        .map(|r| (r.vp, inst.availability_mask(r.vp)))
        .collect();

    for (i, (t, r)) in tracks.iter().zip(&resolved).enumerate() {
        let act = &inst.activities[r.activity];
        let mask = &masks[&r.vp];
        let inside = |iv: &crate::grid::Interval| {
            iv.end <= horizon && iv.slots().all(|s| mask[s as usize])
        };
        if t.track.is_empty() || !inside(&t.track) {
            verdicts[i].insert(Rule::InViewPeriod);
        }
        if options.strict_containment && !(inside(&t.setup) && inside(&t.teardown)) {
            verdicts[i].insert(Rule::InViewPeriod);
        }
        if t.setup.len() != act.setup
            || t.teardown.len() != act.teardown
            || !t.is_contiguous()
            || t.teardown.end > horizon
        {
            verdicts[i].insert(Rule::SetupTeardownShape);
        }
        if t.track.len() < act.min_up_slots().min(horizon.saturating_sub(t.track.start)) {
            verdicts[i].insert(Rule::MinUpDown);
        }
    }

    // Per-view-period ordering: minimum idle time and single-interval mode.
    let mut by_vp: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, r) in resolved.iter().enumerate() {
        by_vp.entry(r.vp).or_default().push(i);
    }
    for (&v, idx) in &mut by_vp {
        idx.sort_by_key(|&i| tracks[i].track.start);
        let gap = inst.activities[inst.activity_of_vp(v)].min_down_slots();
        for w in idx.windows(2) {
            let (a, b) = (&tracks[w[0]], &tracks[w[1]]);
            if b.track.start < a.track.end + gap {
                verdicts[w[0]].insert(Rule::MinUpDown);
                verdicts[w[1]].insert(Rule::MinUpDown);
            }
        }
        if options.single_interval && idx.len() > 1 {
            for &i in idx.iter() {
                verdicts[i].insert(Rule::MinUpDown);
            }
        }
    }

    // Durations per activity, against the completion flag.
    let mut slots_of: BTreeMap<usize, u32> = BTreeMap::new();
    let mut tracks_of: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, r) in resolved.iter().enumerate() {
        *slots_of.entry(r.activity).or_insert(0) += tracks[i].track.len();
        tracks_of.entry(r.activity).or_default().push(i);
    }
    for (a, act) in inst.activities.iter().enumerate() {
        let total = slots_of.get(&a).copied().unwrap_or(0);
        let ok = if completed.contains(&a) {
            act.d_min <= total && total <= act.d_max
        } else {
            total == 0
        };
        if !ok {
            match tracks_of.get(&a) {
                Some(idx) => idx.iter().for_each(|&i| {
                    verdicts[i].insert(Rule::DurationBounds);
                }),
                None => global.push(format!(
                    "activity {} is marked completed with no tracking time",
                    act.id
                )),
            }
        }
    }

    // Split requests: whole request or both halves, never a mix.
    for tri in &registry.triples {
        let (p, f, s) = (
            completed.contains(&tri.parent),
            completed.contains(&tri.first),
            completed.contains(&tri.second),
        );
        let clone_sum = slots_of.get(&tri.first).copied().unwrap_or(0)
            + slots_of.get(&tri.second).copied().unwrap_or(0);
        let parent = &inst.activities[tri.parent];
        let sum_ok = !(f && s) || clone_sum <= parent.d_max;
        if f != s || (p && f) || !sum_ok {
            let mut tagged = false;
            for a in [tri.parent, tri.first, tri.second] {
                for &i in tracks_of.get(&a).into_iter().flatten() {
                    verdicts[i].insert(Rule::SplitRules);
                    tagged = true;
                }
            }
            if !tagged {
                global.push(format!("split request {} violates the XOR rule", parent.id));
            }
        }
    }

    // Occupancy: spans may not intersect on a shared resource, nor within a
    // mission across resources.
    let mut by_resource: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut by_mission: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, r) in resolved.iter().enumerate() {
        for &res in inst.resources_of(r.vp) {
            by_resource.entry(res).or_default().push(i);
        }
        by_mission
            .entry(inst.mission_of(r.activity))
            .or_default()
            .push(i);
    }
    mark_overlaps(tracks, &by_resource, Rule::ResourceOverlap, &mut verdicts);
    mark_overlaps(tracks, &by_mission, Rule::MissionOverlap, &mut verdicts);

    let n_tracks = tracks.len();
    let n_valid = verdicts.iter().filter(|v| v.is_empty()).count();
    Ok(ValidationReport {
        tracks: tracks
            .iter()
            .zip(verdicts)
            .map(|(t, violations)| TrackVerdict {
                activity_id: t.activity_id.clone(),
                view_period_id: t.view_period_id.clone(),
                violations,
            })
            .collect(),
        global,
        n_tracks,
        n_valid,
        valid_fraction: if n_tracks == 0 {
            100.0
        } else {
            100.0 * n_valid as f64 / n_tracks as f64
        },
        empty_schedule: n_tracks == 0,
    })
}

fn mark_overlaps(
    tracks: &[Track],
    groups: &BTreeMap<usize, Vec<usize>>,
    rule: Rule,
    verdicts: &mut [BTreeSet<Rule>],
) {
    for idx in groups.values() {
        let mut sorted = idx.clone();
        sorted.sort_by_key(|&i| tracks[i].span().start);
        for (k, &i) in sorted.iter().enumerate() {
            let a = tracks[i].span();
            for &j in &sorted[k + 1..] {
                let b = tracks[j].span();
                if b.start >= a.end {
                    break;
                }
                if a.intersects(&b) {
                    verdicts[i].insert(rule);
                    verdicts[j].insert(rule);
                }
            }
        }
    }
}
