//! Discrete time axis of a scheduling week.
//!
//! All scheduling arithmetic is done on integer slot indices; wall-clock
//! time only shows up when reading or writing files.

use std::fmt;

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MINUTES_PER_WEEK: u32 = 7 * 24 * 60;

/// Half-open slot interval `[start, end)`, serialized as a two-element array.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct Interval {
    pub start: u32,
    pub end: u32,
}

impl Interval {
    pub const fn new(start: u32, end: u32) -> Self {
        Interval { start, end }
    }

    pub fn len(&self) -> u32 {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains_slot(&self, t: u32) -> bool {
        self.start <= t && t < self.end
    }

    pub fn contains(&self, other: &Interval) -> bool {
        other.is_empty() || (self.start <= other.start && other.end <= self.end)
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        !self.is_empty() && !other.is_empty() && self.start < other.end && other.start < self.end
    }

    pub fn slots(&self) -> std::ops::Range<u32> {
        self.start..self.end
    }
}

impl From<[u32; 2]> for Interval {
    fn from([start, end]: [u32; 2]) -> Self {
        Interval { start, end }
    }
}

impl From<Interval> for [u32; 2] {
    fn from(iv: Interval) -> Self {
        [iv.start, iv.end]
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeGrid {
    pub slot_minutes: u32,
    pub horizon_slots: u32,
    pub origin: DateTime<Utc>,
}

/// Builds the standard one-week grid starting at `week_start`.
pub fn build_time_grid(week_start: DateTime<Utc>, slot_minutes: u32) -> Result<TimeGrid> {
    check_slot_minutes(slot_minutes)?;
    Ok(TimeGrid {
        slot_minutes,
        horizon_slots: MINUTES_PER_WEEK / slot_minutes,
        origin: week_start,
    })
}

fn check_slot_minutes(slot_minutes: u32) -> Result<()> {
    if slot_minutes == 0 || 60 % slot_minutes != 0 {
        return Err(Error::Config(format!(
            "slot length of {slot_minutes} min does not divide 60"
        )));
    }
    Ok(())
}

/// Converts a whole number of minutes into slots, refusing to round.
pub fn to_slots(duration_minutes: u32, grid: &TimeGrid) -> Result<u32> {
    if !duration_minutes.is_multiple_of(grid.slot_minutes) {
        return Err(Error::Quantization(format!(
            "{duration_minutes} min is not a multiple of the {}-min slot",
            grid.slot_minutes
        )));
    }
    Ok(duration_minutes / grid.slot_minutes)
}

impl TimeGrid {
    /// A grid with an arbitrary horizon, used for desk-scale test instances.
    pub fn with_horizon(
        slot_minutes: u32,
        horizon_slots: u32,
        origin: DateTime<Utc>,
    ) -> Result<TimeGrid> {
        check_slot_minutes(slot_minutes)?;
        if horizon_slots == 0 {
            return Err(Error::Config("horizon must contain at least one slot".into()));
        }
        Ok(TimeGrid {
            slot_minutes,
            horizon_slots,
            origin,
        })
    }

    pub fn is_standard_week(&self) -> bool {
        self.horizon_slots * self.slot_minutes == MINUTES_PER_WEEK
    }

    pub fn slots_per_hour(&self) -> u32 {
        60 / self.slot_minutes
    }

    pub fn slots_per_day(&self) -> u32 {
        24 * self.slots_per_hour()
    }

    pub fn minutes_to_slots(&self, minutes: u32) -> Result<u32> {
        to_slots(minutes, self)
    }

    /// Decimal hours to slots. The value must land on a whole minute and a
    /// whole slot.
    pub fn hours_to_slots(&self, hours: f64) -> Result<u32> {
        if !hours.is_finite() || hours < 0.0 {
            return Err(Error::Quantization(format!("invalid duration {hours} h")));
        }
        let minutes = hours * 60.0;
        let whole = minutes.round();
        if (minutes - whole).abs() > 1e-6 {
            return Err(Error::Quantization(format!(
                "{hours} h is not a whole number of minutes"
            )));
        }
        to_slots(whole as u32, self)
    }

    pub fn slots_to_hours(&self, slots: u32) -> f64 {
        f64::from(slots) * f64::from(self.slot_minutes) / 60.0
    }

    pub fn slots_to_minutes(&self, slots: u32) -> u32 {
        slots * self.slot_minutes
    }

    pub fn horizon_hours(&self) -> f64 {
        self.slots_to_hours(self.horizon_slots)
    }

    pub fn slot_time(&self, slot: u32) -> DateTime<Utc> {
        self.origin + Duration::minutes(i64::from(self.slots_to_minutes(slot)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn week44() -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2016, 10, 31, 0, 0, 0).unwrap()
    }

    #[test]
    fn fifteen_minute_week_has_672_slots() {
        let grid = build_time_grid(week44(), 15).unwrap();
        assert_eq!(grid.horizon_slots, 672);
        assert_eq!(grid.origin, week44());
        assert!(grid.is_standard_week());
    }

    #[test]
    fn hourly_week_has_168_slots() {
        assert_eq!(build_time_grid(week44(), 60).unwrap().horizon_slots, 168);
    }

    #[test]
    fn non_divisor_slot_is_rejected() {
        assert!(matches!(build_time_grid(week44(), 7), Err(Error::Config(_))));
        assert!(matches!(build_time_grid(week44(), 0), Err(Error::Config(_))));
    }

    #[test]
    fn to_slots_never_rounds() {
        let grid = build_time_grid(week44(), 15).unwrap();
        assert_eq!(to_slots(60, &grid).unwrap(), 4);
        assert_eq!(to_slots(15, &grid).unwrap(), 1);
        assert!(matches!(to_slots(50, &grid), Err(Error::Quantization(_))));
    }

    #[test]
    fn hours_convert_exactly() {
        let grid = build_time_grid(week44(), 15).unwrap();
        assert_eq!(grid.hours_to_slots(2.75).unwrap(), 11);
        assert_eq!(grid.hours_to_slots(8.0).unwrap(), 32);
        assert!(grid.hours_to_slots(1.1).is_err());
        assert_eq!(grid.slots_to_hours(11), 2.75);
        assert_eq!(grid.slot_time(4), week44() + Duration::hours(1));
    }

    #[test]
    fn interval_predicates() {
        let a = Interval::new(2, 6);
        assert!(a.intersects(&Interval::new(5, 9)));
        assert!(!a.intersects(&Interval::new(6, 9)));
        assert!(a.contains(&Interval::new(2, 6)));
        assert!(a.contains(&Interval::new(4, 4)));
        assert!(!a.contains(&Interval::new(1, 3)));
        assert_eq!(serde_json::to_string(&a).unwrap(), "[2,6]");
    }
}
