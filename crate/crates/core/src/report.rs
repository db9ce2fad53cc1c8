//! Plot-ready tables: Gantt rows, a mission × antenna heatmap of tracked
//! hours and per-antenna usage.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::ProblemInstance;
use crate::schedule::Schedule;

pub fn gantt_csv(schedule: &Schedule) -> String {
    let mut rows: Vec<(&str, &crate::schedule::Track)> = schedule
        .tracks
        .iter()
        .flat_map(|t| t.resource_ids.iter().map(move |r| (r.as_str(), t)))
        .collect();
    rows.sort_by(|a, b| (a.0, a.1.setup.start).cmp(&(b.0, b.1.setup.start)));
    let mut s =
        String::from("resource,mission,activity,setup_start,track_start,track_end,teardown_end\n");
    for (r, t) in rows {
        let _ = writeln!(
            s,
            "{r},{},{},{},{},{},{}",
            t.mission_id,
            t.activity_id,
            t.setup.start,
            t.track.start,
            t.track.end,
            t.teardown.end
        );
    }
    s
}

/// Tracked hours per mission (rows) and antenna (columns). An arrayed
/// track counts in full on each of its antennas.
pub fn heatmap(instance: &ProblemInstance, schedule: &Schedule) -> Result<Vec<Vec<f64>>> {
    let mut cells = vec![vec![0.0; instance.resources.len()]; instance.missions.len()];
    for t in &schedule.tracks {
        let m = instance
            .mission_index(&t.mission_id)
            .ok_or_else(|| Error::Report(format!("unknown mission {}", t.mission_id)))?;
        let hours = instance.grid.slots_to_hours(t.track.len());
        for rid in &t.resource_ids {
            let r = instance
                .resource_index(rid)
                .ok_or_else(|| Error::Report(format!("unknown resource {rid}")))?;
            cells[m][r] += hours;
        }
    }
    Ok(cells)
}

pub fn heatmap_csv(instance: &ProblemInstance, schedule: &Schedule) -> Result<String> {
    let cells = heatmap(instance, schedule)?;
    let mut s = String::from("mission");
    for r in &instance.resources {
        s.push(',');
        s.push_str(&r.id);
    }
    s.push('\n');
    for (m, row) in instance.missions.iter().zip(cells) {
        s.push_str(&m.id);
        for v in row {
            let _ = write!(s, ",{v:.2}");
        }
        s.push('\n');
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UsageRow {
    pub resource_id: String,
    pub communication_h: f64,
    pub available_h: f64,
    pub maintenance_h: f64,
}

/// Classifies every slot of every antenna exactly once: maintenance first,
/// then tracking, otherwise available. Setup and teardown count as
/// available.
pub fn usage(instance: &ProblemInstance, schedule: &Schedule) -> Result<Vec<UsageRow>> {
    let horizon = instance.horizon();
    let mut tracking = vec![vec![false; horizon as usize]; instance.resources.len()];
    for t in &schedule.tracks {
        if t.track.end > horizon {
            return Err(Error::Report(format!("track {} ends past the horizon", t.activity_id)));
        }
        for rid in &t.resource_ids {
            let r = instance
                .resource_index(rid)
                .ok_or_else(|| Error::Report(format!("unknown resource {rid}")))?;
            for s in t.track.slots() {
                tracking[r][s as usize] = true;
            }
        }
    }
    Ok(instance
        .resources
        .iter()
        .zip(tracking)
        .map(|(r, busy)| {
            let maint = r.maintenance_mask(horizon);
            let (mut m, mut c, mut a) = (0u32, 0u32, 0u32);
            for (down, on) in maint.into_iter().zip(busy) {
                match (down, on) {
                    (true, _) => m += 1,
                    (false, true) => c += 1,
                    (false, false) => a += 1,
                }
            }
            let g = &instance.grid;
            UsageRow {
                resource_id: r.id.clone(),
                communication_h: g.slots_to_hours(c),
                available_h: g.slots_to_hours(a),
                maintenance_h: g.slots_to_hours(m),
            }
        })
        .collect())
}

pub fn usage_csv(rows: &[UsageRow]) -> String {
    let mut s = String::from("resource,communication_h,available_h,maintenance_h\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{:.2},{:.2},{:.2}",
            r.resource_id, r.communication_h, r.available_h, r.maintenance_h
        );
    }
    s
}
