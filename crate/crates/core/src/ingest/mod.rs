//! Reading and writing instance documents, synthetic week generation and
//! instance summaries.
//!
//! The instance document is a single JSON object. Slot-valued fields
//! (windows, maintenance, `min_up_slots`, `min_down_slots`) are integers;
//! request durations are decimal hours and setup/teardown are minutes, all
//! of which must land exactly on the slot grid.

mod summary;
mod synthetic;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{build_time_grid, Interval, TimeGrid};
use crate::instance::{Activity, Mission, ProblemInstance, Resource, ViewPeriod};

pub use summary::{summarize, InstanceSummary};
pub use synthetic::{
    desk_network, desk_profiles, generate_synthetic, parse_profiles_csv, w44_2016_network,
    w44_2016_profiles, MissionProfile, NetworkSpec, ResourceSpec,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub slot_minutes: u32,
    pub week_start: DateTime<Utc>,
    /// Only present for non-week horizons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon_slots: Option<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceDoc {
    pub id: String,
    #[serde(default)]
    pub complex: String,
    #[serde(default)]
    pub diameter_m: u32,
    #[serde(default)]
    pub maintenance: Vec<Interval>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MissionDoc {
    pub id: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActivityDoc {
    pub id: String,
    pub mission: String,
    pub d_min_h: f64,
    pub d_max_h: f64,
    pub setup_min: u32,
    pub teardown_min: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_up_slots: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_down_slots: Option<u32>,
    pub view_periods: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViewPeriodDoc {
    pub id: String,
    pub resources: Vec<String>,
    pub windows: Vec<Interval>,
}

/// On-disk instance document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub label: String,
    pub grid: GridDoc,
    pub resources: Vec<ResourceDoc>,
    pub missions: Vec<MissionDoc>,
    pub activities: Vec<ActivityDoc>,
    pub view_periods: Vec<ViewPeriodDoc>,
}

pub fn parse_instance(bytes: &[u8]) -> Result<ProblemInstance> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let doc: InstanceDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::parse(path, e.into_inner().to_string())
    })?;
    instance_from_doc(doc)
}

pub fn instance_from_doc(doc: InstanceDoc) -> Result<ProblemInstance> {
    let grid = match doc.grid.horizon_slots {
        None => build_time_grid(doc.grid.week_start, doc.grid.slot_minutes),
        Some(h) => TimeGrid::with_horizon(doc.grid.slot_minutes, h, doc.grid.week_start),
    }
    .map_err(|e| Error::parse("grid", e.to_string()))?;

    let resources = doc
        .resources
        .into_iter()
        .map(|r| Resource {
            id: r.id,
            complex: r.complex,
            diameter_m: r.diameter_m,
            maintenance: r.maintenance,
        })
        .collect();
    let missions = doc.missions.into_iter().map(|m| Mission { id: m.id }).collect();

    let mut activities = Vec::with_capacity(doc.activities.len());
    for (i, a) in doc.activities.into_iter().enumerate() {
        let field = |name: &str| format!("activities[{i}].{name}");
        let slots_h = |h: f64, name: &str| {
            grid.hours_to_slots(h)
                .map_err(|e| Error::parse(field(name), e.to_string()))
        };
        let slots_m = |m: u32, name: &str| {
            grid.minutes_to_slots(m)
                .map_err(|e| Error::parse(field(name), e.to_string()))
        };
        activities.push(Activity {
            d_min: slots_h(a.d_min_h, "d_min_h")?,
            d_max: slots_h(a.d_max_h, "d_max_h")?,
            setup: slots_m(a.setup_min, "setup_min")?,
            teardown: slots_m(a.teardown_min, "teardown_min")?,
            id: a.id,
            mission_id: a.mission,
            min_up: a.min_up_slots,
            min_down: a.min_down_slots,
            view_period_ids: a.view_periods,
        });
    }

    let view_periods = doc
        .view_periods
        .into_iter()
        .map(|v| ViewPeriod {
            id: v.id,
            resource_ids: v.resources,
            windows: v.windows,
        })
        .collect();

    let instance = ProblemInstance::new(
        doc.label,
        grid,
        resources,
        missions,
        activities,
        view_periods,
    )?;
    if instance.requested_slots() == 0 {
        return Err(Error::Integrity(vec![
            "instance requests no tracking time".to_string(),
        ]));
    }
    Ok(instance)
}

pub fn instance_to_doc(instance: &ProblemInstance) -> InstanceDoc {
    let grid = &instance.grid;
    InstanceDoc {
        label: instance.label.clone(),
        grid: GridDoc {
            slot_minutes: grid.slot_minutes,
            week_start: grid.origin,
            horizon_slots: (!grid.is_standard_week()).then_some(grid.horizon_slots),
        },
        resources: instance
            .resources
            .iter()
            .map(|r| ResourceDoc {
                id: r.id.clone(),
                complex: r.complex.clone(),
                diameter_m: r.diameter_m,
                maintenance: r.maintenance.clone(),
            })
            .collect(),
        missions: instance
            .missions
            .iter()
            .map(|m| MissionDoc { id: m.id.clone() })
            .collect(),
        activities: instance
            .activities
            .iter()
            .map(|a| ActivityDoc {
                id: a.id.clone(),
                mission: a.mission_id.clone(),
                d_min_h: grid.slots_to_hours(a.d_min),
                d_max_h: grid.slots_to_hours(a.d_max),
                setup_min: grid.slots_to_minutes(a.setup),
                teardown_min: grid.slots_to_minutes(a.teardown),
                min_up_slots: a.min_up,
                min_down_slots: a.min_down,
                view_periods: a.view_period_ids.clone(),
            })
            .collect(),
        view_periods: instance
            .view_periods
            .iter()
            .map(|v| ViewPeriodDoc {
                id: v.id.clone(),
                resources: v.resource_ids.clone(),
                windows: v.windows.clone(),
            })
            .collect(),
    }
}

/// Canonical pretty-printed JSON; identical instances give identical bytes.
pub fn serialize_instance(instance: &ProblemInstance) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&instance_to_doc(instance))
        .expect("instance documents always serialize");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::assemble_matrices;

    const MINIMAL: &str = r#"{
        "label": "minimal",
        "grid": {"slot_minutes": 15, "week_start": "2016-10-31T00:00:00Z"},
        "resources": [{"id": "DSS-14", "complex": "GDSCC", "diameter_m": 70, "maintenance": []}],
        "missions": [{"id": "DSCO"}],
        "activities": [{"id": "a1", "mission": "DSCO", "d_min_h": 1.0, "d_max_h": 1.0,
                        "setup_min": 60, "teardown_min": 15, "view_periods": ["vp1"]}],
        "view_periods": [{"id": "vp1", "resources": ["DSS-14"], "windows": [[0, 8]]}]
    }"#;

    #[test]
    fn parses_minimal_document() {
        let inst = parse_instance(MINIMAL.as_bytes()).unwrap();
        assert_eq!(inst.activities.len(), 1);
        assert_eq!(inst.horizon(), 672);
        let a = &inst.activities[0];
        assert_eq!((a.d_min, a.d_max, a.setup, a.teardown), (4, 4, 4, 1));
        assert_eq!(a.min_up_slots(), 4);
        assert_eq!(a.min_down_slots(), 0);
    }

    #[test]
    fn missing_view_period_is_an_integrity_error_naming_it() {
        let doc = MINIMAL.replace(r#""view_periods": ["vp1"]"#, r#""view_periods": ["vp1", "ghost"]"#);
        match parse_instance(doc.as_bytes()) {
            Err(Error::Integrity(p)) => assert!(p.iter().any(|s| s.contains("ghost"))),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn schema_errors_carry_a_path() {
        let doc = MINIMAL.replace(r#""d_max_h": 1.0"#, r#""d_max_h": "one""#);
        match parse_instance(doc.as_bytes()) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "activities[0].d_max_h"),
            other => panic!("unexpected {other:?}"),
        }
        let doc = MINIMAL.replace(r#""setup_min": 60"#, r#""setup_min": 50"#);
        match parse_instance(doc.as_bytes()) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "activities[0].setup_min"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn serialization_round_trips_matrices() {
        let inst = parse_instance(MINIMAL.as_bytes()).unwrap();
        let bytes = serialize_instance(&inst);
        let again = parse_instance(&bytes).unwrap();
        assert_eq!(inst, again);
        assert_eq!(assemble_matrices(&inst), assemble_matrices(&again));
        assert_eq!(bytes, serialize_instance(&again));
    }
}
