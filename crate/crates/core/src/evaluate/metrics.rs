use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::schedule::Schedule;
use crate::splitter::{ExpandedInstance, SplitRegistry};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MissionSatisfaction {
    pub mission_id: String,
    /// Scheduled tracking hours, setup and teardown excluded.
    pub t_s: f64,
    /// Requested hours (sum of maximum durations).
    pub t_r: f64,
    /// `t_s / t_r`, capped at 1.
    pub ratio: f64,
}

/// Satisfaction figures for one schedule. `u_*` values are fractions in
/// `[0, 1]`; `*_pct` values are percentages.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    pub hours_satisfied: f64,
    pub hours_requested: f64,
    pub satisfied_time_pct: f64,
    pub n_satisfied_requests: usize,
    pub n_requests: usize,
    pub satisfied_request_pct: f64,
    pub missions: Vec<MissionSatisfaction>,
    /// Missions without requested time; left out of every `u_*` value.
    pub excluded_missions: Vec<String>,
    pub u_rms: f64,
    pub u_max: f64,
    pub u_avg: f64,
    pub u_prio: Option<f64>,
    pub d: f64,
}

impl MetricsReport {
    pub fn satisfaction(&self, mission_id: &str) -> Option<f64> {
        self.missions
            .iter()
            .find(|m| m.mission_id == mission_id)
            .map(|m| m.ratio)
    }

    pub fn min_satisfaction(&self) -> Option<f64> {
        self.missions.iter().map(|m| m.ratio).reduce(f64::min)
    }

    /// Plain-text summary in the layout of a results table.
    pub fn table(&self, valid_pct: Option<f64>) -> String {
        let mut s = String::new();
        if let Some(v) = valid_pct {
            let _ = writeln!(s, "{:<40}{:>10.1}", "Valid tracks (%)", v);
        }
        let rows: [(&str, String); 8] = [
            ("Hours satisfied", format!("{:.1}", self.hours_satisfied)),
            ("Overall satisfied time fraction (%)", format!("{:.1}", self.satisfied_time_pct)),
            ("# of satisfied requests", self.n_satisfied_requests.to_string()),
            ("Overall satisfied request fraction (%)", format!("{:.1}", self.satisfied_request_pct)),
            ("Avg. satisfied ratio (%), U_AVG", format!("{:.1}", 100.0 * self.u_avg)),
            ("RMS unsatisfied fraction, U_RMS", format!("{:.2}", self.u_rms)),
            ("Max. unsatisfied fraction (%), U_MAX", format!("{:.1}", 100.0 * self.u_max)),
            ("Distance d", format!("{:.4}", self.d)),
        ];
        for (label, value) in rows {
            let _ = writeln!(s, "{label:<40}{value:>10}");
        }
        if let Some(p) = self.u_prio {
            let _ = writeln!(s, "{:<40}{:>10.1}", "Prioritized satisfaction (%), U_PRIO", 100.0 * p);
        }
        s
    }
}

/// `sqrt(U_RMS² + U_MAX² + 1/U_AVG² [+ 1/U_PRIO²])`, infinite when a
/// reciprocal term is undefined.
pub fn distance(u_rms: f64, u_max: f64, u_avg: f64, u_prio: Option<f64>) -> f64 {
    if u_avg <= 0.0 || u_prio.is_some_and(|p| p <= 0.0) {
        return f64::INFINITY;
    }
    let mut sum = u_rms * u_rms + u_max * u_max + 1.0 / (u_avg * u_avg);
    if let Some(p) = u_prio {
        sum += 1.0 / (p * p);
    }
    sum.sqrt()
}

/// Residual statistics over per-mission ratios: `(U_RMS, U_MAX, U_AVG)`.
pub fn u_metrics(ratios: &[f64]) -> (f64, f64, f64) {
    if ratios.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let n = ratios.len() as f64;
    let rms = (ratios.iter().map(|r| (1.0 - r).powi(2)).sum::<f64>() / n).sqrt();
    let max = ratios.iter().map(|r| 1.0 - r).fold(0.0, f64::max);
    let avg = ratios.iter().sum::<f64>() / n;
    (rms, max, avg)
}

pub fn compute_metrics(
    expanded: &ExpandedInstance,
    registry: &SplitRegistry,
    schedule: &Schedule,
    prioritized: &BTreeSet<String>,
) -> Result<MetricsReport> {
    let inst = &expanded.instance;
    let grid = &inst.grid;
    for p in prioritized {
        if inst.mission_index(p).is_none() {
            return Err(Error::Config(format!("prioritized mission {p} is not in the instance")));
        }
    }

    let n_mis = inst.missions.len();
    let mut requested = vec![0u64; n_mis];
    for a in 0..expanded.n_requests {
        requested[inst.mission_of(a)] += u64::from(inst.activities[a].d_max);
    }
    let mut scheduled = vec![0u64; n_mis];
    for t in &schedule.tracks {
        let a = inst
            .activity_index(&t.activity_id)
            .ok_or_else(|| Error::Integrity(vec![format!("unknown activity {}", t.activity_id)]))?;
        scheduled[inst.mission_of(a)] += u64::from(t.track.len());
    }

    let hours = |slots: u64| slots as f64 * f64::from(grid.slot_minutes) / 60.0;
    let mut missions = Vec::new();
    let mut excluded = Vec::new();
    for (m, mission) in inst.missions.iter().enumerate() {
        if requested[m] == 0 {
            excluded.push(mission.id.clone());
            continue;
        }
        let (t_s, t_r) = (hours(scheduled[m]), hours(requested[m]));
        missions.push(MissionSatisfaction {
            mission_id: mission.id.clone(),
            t_s,
            t_r,
            ratio: (t_s / t_r).min(1.0),
        });
    }

    let ratios: Vec<f64> = missions.iter().map(|m| m.ratio).collect();
    let (u_rms, u_max, u_avg) = u_metrics(&ratios);
    let prio: Vec<f64> = missions
        .iter()
        .filter(|m| prioritized.contains(&m.mission_id))
        .map(|m| m.ratio)
        .collect();
    let u_prio = (!prio.is_empty()).then(|| prio.iter().sum::<f64>() / prio.len() as f64);

    let done = |a: usize| schedule.completed.contains(&inst.activities[a].id);
    let n_satisfied = (0..expanded.n_requests)
        .filter(|&a| {
            done(a)
                || registry
                    .triples
                    .iter()
                    .find(|t| t.parent == a)
                    .is_some_and(|t| done(t.first) && done(t.second))
        })
        .count();

    let hours_satisfied: f64 = missions.iter().map(|m| m.t_s).sum();
    let hours_requested: f64 = missions.iter().map(|m| m.t_r).sum();
    let pct = |num: f64, den: f64| if den > 0.0 { 100.0 * num / den } else { 0.0 };
    Ok(MetricsReport {
        hours_satisfied,
        hours_requested,
        satisfied_time_pct: pct(hours_satisfied, hours_requested),
        n_satisfied_requests: n_satisfied,
        n_requests: expanded.n_requests,
        satisfied_request_pct: pct(n_satisfied as f64, expanded.n_requests as f64),
        missions,
        excluded_missions: excluded,
        u_rms,
        u_max,
        u_avg,
        u_prio,
        d: distance(u_rms, u_max, u_avg, u_prio),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_mission_residuals() {
        let (rms, max, avg) = u_metrics(&[1.0, 0.5]);
        assert!((avg - 0.75).abs() < 1e-12);
        assert!((max - 0.5).abs() < 1e-12);
        assert!((rms - 0.125f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn boundary_cases() {
        assert_eq!(u_metrics(&[1.0, 1.0, 1.0]), (0.0, 0.0, 1.0));
        assert_eq!(u_metrics(&[0.0, 0.0, 0.0]), (1.0, 1.0, 0.0));
        assert_eq!(distance(1.0, 1.0, 0.0, None), f64::INFINITY);
        assert_eq!(distance(0.1, 0.1, 0.5, Some(0.0)), f64::INFINITY);
    }
}
