//! Seeded synthetic weeks built from per-mission average profiles.
//!
//! Durations are spread as evenly as the slot grid allows: each mission's
//! total is rounded to whole slots once, every activity gets the floor of
//! the average and the remainder goes one slot at a time to the trailing
//! activities. Means therefore match the profile to within one slot.
//!
//! View periods are drawn per resource and per day from an availability
//! table; each window is long enough for the activity's longest track plus
//! setup and teardown, so scarcity comes from contention rather than from
//! window length.

use std::collections::BTreeMap;

use chrono::{DateTime, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{build_time_grid, Interval};
use crate::instance::{Activity, Mission, ProblemInstance, Resource, ViewPeriod};

const W44_2016_PROFILES: &str = include_str!("../../data/w44_2016_profiles.csv");
const DESK_PROFILES: &str = include_str!("../../data/desk_profiles.csv");

/// One row of a per-mission average-parameter table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionProfile {
    #[serde(rename = "Mission")]
    pub mission_id: String,
    /// Total requested hours.
    #[serde(rename = "T_R")]
    pub requested_hours: f64,
    #[serde(rename = "n_a")]
    pub n_activities: u32,
    #[serde(rename = "d_min")]
    pub d_min_avg_h: f64,
    #[serde(rename = "d_max")]
    pub d_max_avg_h: f64,
    #[serde(rename = "setup")]
    pub setup_avg_min: f64,
    #[serde(rename = "teardown")]
    pub teardown_avg_min: f64,
}

pub fn parse_profiles_csv(text: &str) -> Result<Vec<MissionProfile>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, row) in reader.deserialize().enumerate() {
        let profile: MissionProfile =
            row.map_err(|e| Error::parse(format!("profiles row {}", i + 1), e.to_string()))?;
        out.push(profile);
    }
    Ok(out)
}

pub fn w44_2016_profiles() -> Vec<MissionProfile> {
    parse_profiles_csv(W44_2016_PROFILES).expect("bundled profile table parses")
}

pub fn desk_profiles() -> Vec<MissionProfile> {
    parse_profiles_csv(DESK_PROFILES).expect("bundled profile table parses")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceSpec {
    pub id: String,
    pub complex: String,
    pub diameter_m: u32,
    /// View periods to draw on this antenna for each day of the week.
    pub daily_view_periods: [u32; 7],
    #[serde(default)]
    pub maintenance: Vec<Interval>,
}

/// Antenna network, availability table and per-mission antenna
/// restrictions for the generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub label: String,
    pub week_start: DateTime<Utc>,
    pub slot_minutes: u32,
    pub resources: Vec<ResourceSpec>,
    /// Missions that may only use antennas of at least this diameter.
    #[serde(default)]
    pub min_diameter_m: BTreeMap<String, u32>,
    /// Upper bound on the random slack added to each window, in slots.
    #[serde(default = "default_window_slack")]
    pub max_window_slack: u32,
}

fn default_window_slack() -> u32 {
    24
}

fn antenna(id: &str, complex: &str, diameter_m: u32, daily: [u32; 7]) -> ResourceSpec {
    ResourceSpec {
        id: id.into(),
        complex: complex.into(),
        diameter_m,
        daily_view_periods: daily,
        maintenance: vec![],
    }
}

/// Fourteen-antenna network shaped like the week-44 2016 setting: three
/// complexes, two antennas shut down for the whole week, uneven daily
/// availability, and NHPC restricted to 70-m dishes.
pub fn w44_2016_network() -> NetworkSpec {
    let week = Interval::new(0, 672);
    let mut resources = vec![
        antenna("DSS-14", "GDSCC", 70, [3, 4, 2, 0, 3, 4, 3]),
        antenna("DSS-15", "GDSCC", 34, [9, 10, 8, 9, 11, 10, 9]),
        antenna("DSS-24", "GDSCC", 34, [12, 11, 12, 10, 13, 12, 11]),
        antenna("DSS-25", "GDSCC", 34, [10, 9, 11, 10, 9, 10, 12]),
        antenna("DSS-26", "GDSCC", 34, [11, 12, 10, 11, 12, 9, 10]),
        antenna("DSS-34", "CDSCC", 34, [0; 7]),
        antenna("DSS-35", "CDSCC", 34, [12, 13, 11, 12, 12, 13, 12]),
        antenna("DSS-36", "CDSCC", 34, [11, 12, 12, 10, 11, 12, 13]),
        antenna("DSS-43", "CDSCC", 70, [8, 9, 8, 9, 8, 9, 8]),
        antenna("DSS-45", "CDSCC", 34, [0; 7]),
        antenna("DSS-54", "MDSCC", 34, [10, 11, 10, 12, 11, 10, 11]),
        antenna("DSS-55", "MDSCC", 34, [11, 10, 12, 11, 10, 12, 11]),
        antenna("DSS-63", "MDSCC", 70, [0, 2, 3, 0, 2, 3, 0]),
        antenna("DSS-65", "MDSCC", 34, [9, 10, 9, 11, 10, 9, 10]),
    ];
    for r in &mut resources {
        if r.daily_view_periods.iter().all(|&c| c == 0) {
            r.maintenance = vec![week];
        }
    }
    NetworkSpec {
        label: "W44-2016-synthetic".into(),
        week_start: Utc.with_ymd_and_hms(2016, 10, 31, 0, 0, 0).unwrap(),
        slot_minutes: 15,
        resources,
        min_diameter_m: BTreeMap::from([("NHPC".to_string(), 70)]),
        max_window_slack: default_window_slack(),
    }
}

/// Three-antenna network for desk-scale end-to-end runs.
pub fn desk_network() -> NetworkSpec {
    let mut dss14 = antenna("DSS-14", "GDSCC", 70, [2, 1, 2, 1, 2, 1, 2]);
    dss14.maintenance = vec![Interval::new(288, 320)];
    NetworkSpec {
        label: "desk-week".into(),
        week_start: Utc.with_ymd_and_hms(2016, 10, 31, 0, 0, 0).unwrap(),
        slot_minutes: 15,
        resources: vec![
            dss14,
            antenna("DSS-43", "CDSCC", 70, [1, 2, 1, 2, 1, 2, 1]),
            antenna("DSS-54", "MDSCC", 34, [2, 2, 1, 1, 2, 2, 1]),
        ],
        min_diameter_m: BTreeMap::new(),
        max_window_slack: 8,
    }
}

/// Splits `total` into `n` parts that differ by at most one, larger parts last.
fn spread(total: u64, n: u32) -> Vec<u32> {
    let n64 = u64::from(n);
    let base = (total / n64) as u32;
    let extra = (total % n64) as u32;
    (0..n).map(|i| base + u32::from(i >= n - extra)).collect()
}

fn total_slots(avg: f64, count: u32, unit_per_slot: f64) -> u64 {
    (avg * f64::from(count) / unit_per_slot).round().max(0.0) as u64
}

pub fn generate_synthetic(
    profiles: &[MissionProfile],
    network: &NetworkSpec,
    seed: u64,
) -> Result<ProblemInstance> {
    if profiles.is_empty() {
        return Err(Error::Generation("no mission profiles".into()));
    }
    let grid = build_time_grid(network.week_start, network.slot_minutes)?;
    let slot_h = f64::from(grid.slot_minutes) / 60.0;
    let slot_min = f64::from(grid.slot_minutes);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut missions = Vec::with_capacity(profiles.len());
    let mut activities: Vec<Activity> = Vec::new();
    let mut activity_limit = Vec::new();
    for p in profiles {
        let n = p.n_activities;
        if n == 0 {
            return Err(Error::Generation(format!("{}: n_a must be >= 1", p.mission_id)));
        }
        if p.d_min_avg_h > p.d_max_avg_h {
            return Err(Error::Generation(format!(
                "{}: average d_min exceeds average d_max",
                p.mission_id
            )));
        }
        let d_max_total = (p.requested_hours / slot_h).round().max(0.0) as u64;
        let d_min_total = total_slots(p.d_min_avg_h, n, slot_h);
        if d_min_total < u64::from(n) || d_max_total < d_min_total {
            return Err(Error::Generation(format!(
                "{}: T_R = {} h cannot hold {n} activities of average minimum {} h",
                p.mission_id, p.requested_hours, p.d_min_avg_h
            )));
        }
        let d_min = spread(d_min_total, n);
        let d_max = spread(d_max_total, n);
        let setup = spread(total_slots(p.setup_avg_min, n, slot_min), n);
        let teardown = spread(total_slots(p.teardown_avg_min, n, slot_min), n);
        let min_diameter = network.min_diameter_m.get(&p.mission_id).copied().unwrap_or(0);
        for i in 0..n as usize {
            if d_max[i] + setup[i] + teardown[i] > grid.slots_per_day() {
                return Err(Error::Generation(format!(
                    "{}: a request with setup and teardown does not fit in one day",
                    p.mission_id
                )));
            }
            activities.push(Activity {
                id: format!("{}-{:02}", p.mission_id, i + 1),
                mission_id: p.mission_id.clone(),
                d_min: d_min[i],
                d_max: d_max[i],
                setup: setup[i],
                teardown: teardown[i],
                min_up: None,
                min_down: None,
                view_period_ids: Vec::new(),
            });
            activity_limit.push(min_diameter);
        }
        missions.push(Mission {
            id: p.mission_id.clone(),
        });
    }

    let spd = grid.slots_per_day();
    let mut view_periods = Vec::new();
    let mut place = |rng: &mut ChaCha8Rng, act: &mut Activity, resource: &ResourceSpec, day: u32| {
        let need = act.d_max + act.setup + act.teardown;
        let slack = rng.gen_range(0..=network.max_window_slack);
        let len = (need + slack).min(spd);
        let start = day * spd + rng.gen_range(0..=spd - len);
        let id = format!("vp{:04}", view_periods.len() + 1);
        view_periods.push(ViewPeriod {
            id: id.clone(),
            resource_ids: vec![resource.id.clone()],
            windows: vec![Interval::new(start, start + len)],
        });
        act.view_period_ids.push(id);
    };

    for resource in &network.resources {
        let eligible: Vec<usize> = (0..activities.len())
            .filter(|&a| resource.diameter_m >= activity_limit[a])
            .collect();
        if eligible.is_empty() {
            continue;
        }
        for (day, &count) in resource.daily_view_periods.iter().enumerate() {
            for _ in 0..count {
                let a = eligible[rng.gen_range(0..eligible.len())];
                place(&mut rng, &mut activities[a], resource, day as u32);
            }
        }
    }

    // Activities the draw missed get one window on a random eligible antenna.
    for a in 0..activities.len() {
        if !activities[a].view_period_ids.is_empty() {
            continue;
        }
        let usable: Vec<&ResourceSpec> = network
            .resources
            .iter()
            .filter(|r| r.diameter_m >= activity_limit[a] && r.daily_view_periods.iter().any(|&c| c > 0))
            .collect();
        if usable.is_empty() {
            return Err(Error::Generation(format!(
                "activity {} has no eligible antenna",
                activities[a].id
            )));
        }
        let resource = usable[rng.gen_range(0..usable.len())];
        let day = rng.gen_range(0..7);
        place(&mut rng, &mut activities[a], resource, day);
    }

    let resources = network
        .resources
        .iter()
        .map(|r| Resource {
            id: r.id.clone(),
            complex: r.complex.clone(),
            diameter_m: r.diameter_m,
            maintenance: r.maintenance.clone(),
        })
        .collect();

    ProblemInstance::new(
        network.label.clone(),
        grid,
        resources,
        missions,
        activities,
        view_periods,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_instance, serialize_instance};

    fn profile(id: &str, tr: f64, n: u32, dmin: f64, dmax: f64, up: f64, down: f64) -> MissionProfile {
        MissionProfile {
            mission_id: id.into(),
            requested_hours: tr,
            n_activities: n,
            d_min_avg_h: dmin,
            d_max_avg_h: dmax,
            setup_avg_min: up,
            teardown_avg_min: down,
        }
    }

    #[test]
    fn spread_puts_remainder_last() {
        assert_eq!(spread(10, 4), vec![2, 2, 3, 3]);
        assert_eq!(spread(8, 4), vec![2, 2, 2, 2]);
    }

    #[test]
    fn ace_profile_gives_ten_identical_requests() {
        let inst = generate_synthetic(
            &[profile("ACE", 27.5, 10, 2.75, 2.75, 60.0, 15.0)],
            &desk_network(),
            1,
        )
        .unwrap();
        assert_eq!(inst.activities.len(), 10);
        for a in &inst.activities {
            assert_eq!(inst.grid.slots_to_hours(a.d_max), 2.75);
            assert_eq!(inst.grid.slots_to_hours(a.d_min), 2.75);
            assert_eq!(inst.grid.slots_to_minutes(a.setup), 60);
            assert_eq!(inst.grid.slots_to_minutes(a.teardown), 15);
        }
    }

    #[test]
    fn dsco_profile_gives_one_hour_request() {
        let inst =
            generate_synthetic(&[profile("DSCO", 1.0, 1, 1.0, 1.0, 60.0, 15.0)], &desk_network(), 3)
                .unwrap();
        assert_eq!(inst.activities.len(), 1);
        assert_eq!(inst.activities[0].d_max, 4);
        assert!(!inst.activities[0].view_period_ids.is_empty());
    }

    #[test]
    fn nhpc_only_sees_seventy_metre_antennas() {
        let inst = generate_synthetic(&w44_2016_profiles(), &w44_2016_network(), 44).unwrap();
        let m = inst.mission_index("NHPC").unwrap();
        for &a in inst.activities_of(m) {
            for &v in inst.view_periods_of(a) {
                for &r in inst.resources_of(v) {
                    assert_eq!(inst.resources[r].diameter_m, 70, "{}", inst.resources[r].id);
                }
            }
        }
    }

    #[test]
    fn infeasible_profile_is_rejected() {
        let err = generate_synthetic(&[profile("X", 2.0, 4, 1.0, 1.0, 60.0, 15.0)], &desk_network(), 0);
        assert!(matches!(err, Err(Error::Generation(_))));
    }

    #[test]
    fn windows_fit_the_longest_track() {
        let inst = generate_synthetic(&w44_2016_profiles(), &w44_2016_network(), 7).unwrap();
        for (ai, a) in inst.activities.iter().enumerate() {
            for &v in inst.view_periods_of(ai) {
                let w = inst.view_periods[v].windows[0];
                assert!(w.len() >= a.d_max + a.setup + a.teardown);
                assert_eq!(w.start / 96, (w.end - 1) / 96, "window crosses a day");
            }
        }
    }

    #[test]
    fn profile_means_match_within_one_slot() {
        let profiles = w44_2016_profiles();
        let inst = generate_synthetic(&profiles, &w44_2016_network(), 11).unwrap();
        for p in &profiles {
            let m = inst.mission_index(&p.mission_id).unwrap();
            let acts = inst.activities_of(m);
            assert_eq!(acts.len() as u32, p.n_activities);
            let n = acts.len() as f64;
            let mean = |f: &dyn Fn(&Activity) -> u32| {
                acts.iter().map(|&a| f64::from(f(&inst.activities[a]))).sum::<f64>() / n
            };
            assert!((mean(&|a| a.d_min) * 0.25 - p.d_min_avg_h).abs() <= 0.25);
            assert!((mean(&|a| a.d_max) * 0.25 - p.d_max_avg_h).abs() <= 0.25);
            assert!((mean(&|a| a.setup) * 15.0 - p.setup_avg_min).abs() <= 15.0);
            assert!((mean(&|a| a.teardown) * 15.0 - p.teardown_avg_min).abs() <= 15.0);
            let total: u32 = acts.iter().map(|&a| inst.activities[a].d_max).sum();
            assert!((f64::from(total) * 0.25 - p.requested_hours).abs() <= 0.125);
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = generate_synthetic(&w44_2016_profiles(), &w44_2016_network(), 5).unwrap();
        let b = generate_synthetic(&w44_2016_profiles(), &w44_2016_network(), 5).unwrap();
        let c = generate_synthetic(&w44_2016_profiles(), &w44_2016_network(), 6).unwrap();
        assert_eq!(serialize_instance(&a), serialize_instance(&b));
        assert_ne!(serialize_instance(&a), serialize_instance(&c));
        assert_eq!(parse_instance(&serialize_instance(&a)).unwrap(), a);
    }
}
