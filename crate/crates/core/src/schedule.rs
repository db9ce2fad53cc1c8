use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::grid::Interval;

/// One scheduled pass: setup, tracking and teardown back to back on the
/// view period's antennas.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Track {
    pub activity_id: String,
    /// The original request; differs from `activity_id` for split clones.
    pub parent_id: String,
    pub mission_id: String,
    pub view_period_id: String,
    pub resource_ids: Vec<String>,
    pub setup: Interval,
    pub track: Interval,
    pub teardown: Interval,
}

impl Track {
    /// Full resource occupancy, setup start to teardown end.
    pub fn span(&self) -> Interval {
        Interval::new(self.setup.start, self.teardown.end)
    }

    pub fn is_contiguous(&self) -> bool {
        self.setup.end == self.track.start && self.track.end == self.teardown.start
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub tracks: Vec<Track>,
    /// Activities whose completion variable is set.
    pub completed: BTreeSet<String>,
}

impl Schedule {
    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty()
    }

    /// Sorts tracks by start slot, then view period, so equal track sets
    /// compare equal.
    pub fn normalize(&mut self) {
        self.tracks.sort_by(|a, b| {
            (a.track.start, &a.view_period_id, a.track.end).cmp(&(
                b.track.start,
                &b.view_period_id,
                b.track.end,
            ))
        });
    }

    pub fn tracked_slots(&self) -> u64 {
        self.tracks.iter().map(|t| u64::from(t.track.len())).sum()
    }
}
