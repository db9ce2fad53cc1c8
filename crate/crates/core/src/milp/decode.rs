use std::collections::BTreeSet;

use super::{MilpModel, VarKind};
use crate::error::{Error, Result};
use crate::grid::Interval;
use crate::schedule::{Schedule, Track};
use crate::splitter::ExpandedInstance;

/// Turns a verified assignment into tracks. Each maximal run of on-slots in
/// a view period becomes one track.
pub fn extract_schedule(
    model: &MilpModel,
    expanded: &ExpandedInstance,
    values: &[u8],
) -> Result<Schedule> {
    let inst = &expanded.instance;
    if inst.activities.len() != model.n_activities
        || inst.view_periods.len() != model.n_view_periods
        || inst.horizon() != model.horizon
    {
        return Err(Error::Model("model was built for a different instance".into()));
    }
    model.check_assignment(values)?;

    let on = |v: usize, t: u32| {
        model
            .vars
            .get(VarKind::On, v, t)
            .is_some_and(|i| values[i] == 1)
    };

    let mut tracks = Vec::new();
    for (v, vp) in inst.view_periods.iter().enumerate() {
        let a = inst.activity_of_vp(v);
        let act = &inst.activities[a];
        let parent = &inst.activities[expanded.request_of[a]];
        let mut t = 0;
        while t < model.horizon {
            if !on(v, t) {
                t += 1;
                continue;
            }
            let start = t;
            while t < model.horizon && on(v, t) {
                t += 1;
            }
            tracks.push(Track {
                activity_id: act.id.clone(),
                parent_id: parent.id.clone(),
                mission_id: act.mission_id.clone(),
                view_period_id: vp.id.clone(),
                resource_ids: vp.resource_ids.clone(),
                setup: Interval::new(start.saturating_sub(act.setup), start),
                track: Interval::new(start, t),
                teardown: Interval::new(t, t + act.teardown),
            });
        }
    }

    let completed: BTreeSet<String> = (0..model.n_activities)
        .filter(|&a| model.vars.complete(a).is_some_and(|i| values[i] == 1))
        .map(|a| inst.activities[a].id.clone())
        .collect();

    let mut schedule = Schedule { tracks, completed };
    schedule.normalize();
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::*;
    use crate::instance::ProblemInstance;
    use crate::milp::{build_model, ConstraintTag, ModelOptions, Weights};
    use crate::splitter::SplitRegistry;

    /// Sets a run of X on `[s, e)` in view period `v` and derives the
    /// remaining variables from their definitions.
    fn place(model: &MilpModel, values: &mut [u8], v: usize, s: u32, e: u32, du: u32, dd: u32) {
        let mut set = |kind, t| {
            let i = model.vars.get(kind, v, t).unwrap_or_else(|| panic!("{kind:?} {t}"));
            values[i] = 1;
        };
        for t in s..e {
            set(VarKind::On, t);
        }
        set(VarKind::Start, s);
        set(VarKind::Stop, e);
        for t in s - du..s {
            set(VarKind::Setup, t);
        }
        for t in e..e + dd {
            set(VarKind::Teardown, t);
        }
    }

    fn fixture() -> (ExpandedInstance, MilpModel) {
        let exp = ExpandedInstance::unsplit(
            ProblemInstance::new(
                "t",
                grid(48),
                vec![resource("R")],
                vec![mission("M"), mission("N")],
                vec![
                    activity("a", "M", (16, 16), (4, 1), &["va"]),
                    activity("b", "N", (4, 4), (1, 1), &["vb"]),
                ],
                vec![vp("va", &["R"], &[(0, 40)]), vp("vb", &["R"], &[(0, 40)])],
            )
            .unwrap(),
        );
        let model = build_model(
            &exp,
            &SplitRegistry::default(),
            &Weights::uniform(2, 2),
            &ModelOptions::default(),
        )
        .unwrap();
        (exp, model)
    }

    #[test]
    fn run_becomes_track_with_setup_and_teardown() {
        let (exp, model) = fixture();
        let mut values = vec![0u8; model.vars.len()];
        place(&model, &mut values, 0, 10, 26, 4, 1);
        values[model.vars.complete(0).unwrap()] = 1;
        let s = extract_schedule(&model, &exp, &values).unwrap();
        assert_eq!(s.tracks.len(), 1);
        let t = &s.tracks[0];
        assert_eq!(
            (t.setup, t.track, t.teardown),
            (Interval::new(6, 10), Interval::new(10, 26), Interval::new(26, 27))
        );
        assert!(t.is_contiguous());
        assert_eq!(s.completed, BTreeSet::from(["a".to_string()]));
        assert_eq!(model.objective_value(&values), 1.0 + 16.0);
    }

    #[test]
    fn all_zero_is_empty() {
        let (exp, model) = fixture();
        let s = extract_schedule(&model, &exp, &vec![0; model.vars.len()]).unwrap();
        assert!(s.is_empty() && s.completed.is_empty());
    }

    #[test]
    fn overlapping_view_periods_on_one_resource_fail_2h() {
        let (exp, model) = fixture();
        let mut values = vec![0u8; model.vars.len()];
        place(&model, &mut values, 0, 10, 26, 4, 1);
        place(&model, &mut values, 1, 12, 16, 1, 1);
        values[model.vars.complete(0).unwrap()] = 1;
        values[model.vars.complete(1).unwrap()] = 1;
        match extract_schedule(&model, &exp, &values) {
            Err(Error::Decode { tag, .. }) => assert_eq!(tag, ConstraintTag::ResourceCapacity),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn setup_without_start_is_rejected() {
        let (exp, model) = fixture();
        let mut values = vec![0u8; model.vars.len()];
        values[model.vars.get(VarKind::Setup, 0, 3).unwrap()] = 1;
        assert!(matches!(
            extract_schedule(&model, &exp, &values),
            Err(Error::Decode { tag: ConstraintTag::SetupWindow, .. })
        ));
    }
}
