use serde::Serialize;

use crate::instance::ProblemInstance;

/// Headline numbers of an instance: antennas, requests, requested hours and
/// missions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub resources: usize,
    pub requested_activities: usize,
    /// Sum of maximum requested durations, exact.
    pub requested_hours: f64,
    pub missions: usize,
}

impl InstanceSummary {
    /// Requested hours as printed in a whole-hour summary table.
    pub fn requested_hours_rounded(&self) -> u64 {
        self.requested_hours.round() as u64
    }

    /// `(resources, activities, whole hours, missions)`.
    pub fn table_row(&self) -> (usize, usize, u64, usize) {
        (
            self.resources,
            self.requested_activities,
            self.requested_hours_rounded(),
            self.missions,
        )
    }
}

pub fn summarize(instance: &ProblemInstance) -> InstanceSummary {
    InstanceSummary {
        resources: instance.resources.len(),
        requested_activities: instance.activities.len(),
        requested_hours: instance.requested_slots() as f64 * f64::from(instance.grid.slot_minutes)
            / 60.0,
        missions: instance.missions.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{generate_synthetic, w44_2016_network, w44_2016_profiles, MissionProfile};
    use crate::instance::fixtures::*;

    #[test]
    fn w44_synthetic_matches_published_row() {
        let inst = generate_synthetic(&w44_2016_profiles(), &w44_2016_network(), 2016).unwrap();
        let s = summarize(&inst);
        assert_eq!(s.table_row(), (14, 284, 1418, 29));
    }

    #[test]
    fn w40_shaped_aggregate() {
        // 33 missions, 333 activities, 1737 h on 12 antennas.
        let mut profiles: Vec<MissionProfile> = (0..33)
            .map(|i| MissionProfile {
                mission_id: format!("M{i:02}"),
                requested_hours: 52.0,
                n_activities: 10,
                d_min_avg_h: 4.0,
                d_max_avg_h: 5.2,
                setup_avg_min: 60.0,
                teardown_avg_min: 15.0,
            })
            .collect();
        profiles[0].n_activities = 13;
        profiles[0].requested_hours = 52.0 + 21.0;
        let mut net = w44_2016_network();
        net.resources.truncate(12);
        let s = summarize(&generate_synthetic(&profiles, &net, 40).unwrap());
        assert_eq!(s.table_row(), (12, 333, 1737, 33));
    }

    #[test]
    fn single_activity_instance() {
        let inst = crate::instance::ProblemInstance::new(
            "one",
            grid(96),
            vec![resource("R")],
            vec![mission("M")],
            vec![activity("a", "M", (4, 6), (1, 1), &["v"])],
            vec![vp("v", &["R"], &[(0, 20)])],
        )
        .unwrap();
        let s = summarize(&inst);
        assert_eq!((s.resources, s.requested_activities, s.requested_hours, s.missions), (1, 1, 1.5, 1));
    }
}
