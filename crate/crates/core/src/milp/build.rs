use super::{
    ConstraintTag, LinearConstraint, MilpModel, ModelOptions, Sense, VarKey, VarKind, VariableSpace,
    Weights,
};
use crate::error::{Error, Result};
use crate::splitter::{xor_constraints, ExpandedInstance, SplitRegistry};

/// Which cells of one view period may carry each variable kind.
struct Reach {
    on: Vec<bool>,
    start: Vec<bool>,
    stop: Vec<bool>,
    setup: Vec<bool>,
    teardown: Vec<bool>,
}

fn reach(mask: &[bool], setup: u32, teardown: u32, strict: bool) -> Reach {
    let horizon = mask.len();
    let (du, dd) = (setup as usize, teardown as usize);
    let all_free = |range: std::ops::Range<usize>| mask[range].iter().all(|&b| b);

    // A run ending at the horizon has nowhere to put its teardown.
    let on: Vec<bool> = (0..horizon)
        .map(|t| mask[t] && !(dd > 0 && t + 1 == horizon))
        .collect();
    let start: Vec<bool> = (0..horizon)
        .map(|t| on[t] && t >= du && (!strict || all_free(t - du..t)))
        .collect();
    let stop: Vec<bool> = (0..horizon)
        .map(|t| t >= 1 && on[t - 1] && t + dd <= horizon && (!strict || all_free(t..t + dd)))
        .collect();
    let setup_cells = (0..horizon)
        .map(|t| (t + 1..=(t + du).min(horizon - 1)).any(|tau| start[tau]))
        .collect();
    let teardown_cells = (0..horizon)
        .map(|t| ((t + 1).saturating_sub(dd)..=t).any(|tau| stop[tau]))
        .collect();
    Reach {
        on,
        start,
        stop,
        setup: setup_cells,
        teardown: teardown_cells,
    }
}

struct Builder {
    rows: Vec<LinearConstraint>,
}

impl Builder {
    /// Adds a row over the variables that exist. Rows left with no terms
    /// are dropped when zero satisfies them and rejected otherwise.
    fn row<I>(&mut self, tag: ConstraintTag, terms: I, sense: Sense, rhs: i64) -> Result<()>
    where
        I: IntoIterator<Item = (Option<usize>, i64)>,
    {
        let terms: Vec<(usize, i64)> = terms
            .into_iter()
            .filter_map(|(v, c)| v.map(|v| (v, c)))
            .collect();
        let row = LinearConstraint::new(tag, terms, sense, rhs);
        if row.terms.is_empty() {
            if row.is_satisfied(|_| 0) {
                return Ok(());
            }
            return Err(Error::Model(format!("{tag} row with no variables is infeasible")));
        }
        self.rows.push(row);
        Ok(())
    }
}

/// Builds the full program for an expanded instance.
pub fn build_model(
    expanded: &ExpandedInstance,
    registry: &SplitRegistry,
    weights: &Weights,
    options: &ModelOptions,
) -> Result<MilpModel> {
    let inst = &expanded.instance;
    let horizon = inst.horizon();
    let n_act = inst.activities.len();
    let n_vp = inst.view_periods.len();
    if weights.c1.len() != n_act || weights.c2.len() != n_vp {
        return Err(Error::Model(format!(
            "weights sized ({}, {}) but instance has {n_act} activities and {n_vp} view periods",
            weights.c1.len(),
            weights.c2.len()
        )));
    }
    for t in &registry.triples {
        if t.parent.max(t.first).max(t.second) >= n_act {
            return Err(Error::Model("split registry refers to unknown activities".into()));
        }
    }

    let masks: Vec<Vec<bool>> = (0..n_vp).map(|v| inst.availability_mask(v)).collect();
    let reaches: Vec<Reach> = (0..n_vp)
        .map(|v| {
            let a = &inst.activities[inst.activity_of_vp(v)];
            reach(&masks[v], a.setup, a.teardown, options.strict_containment)
        })
        .collect();

    let mut vars = VariableSpace::default();
    for a in 0..n_act {
        vars.push(VarKey {
            kind: VarKind::Complete,
            owner: a as u32,
            t: 0,
        });
    }
    for (v, r) in reaches.iter().enumerate() {
        let kinds: [(VarKind, &Vec<bool>); 5] = [
            (VarKind::On, &r.on),
            (VarKind::Start, &r.start),
            (VarKind::Stop, &r.stop),
            (VarKind::Setup, &r.setup),
            (VarKind::Teardown, &r.teardown),
        ];
        for (kind, cells) in kinds {
            for t in 0..horizon {
                if !options.prune || cells[t as usize] {
                    vars.push(VarKey {
                        kind,
                        owner: v as u32,
                        t,
                    });
                }
            }
        }
    }

    let space = &vars;
    let var = |kind: VarKind, owner: usize, t: i64| {
        u32::try_from(t).ok().and_then(|t| space.get(kind, owner, t))
    };
    let mut b = Builder { rows: Vec::new() };

    if !options.prune {
        for (v, (r, mask)) in reaches.iter().zip(&masks).enumerate() {
            for (t, &available) in mask.iter().enumerate() {
                let fixes = [
                    (VarKind::On, r.on[t]),
                    (VarKind::Start, r.start[t]),
                    (VarKind::Stop, r.stop[t]),
                    (VarKind::Setup, r.setup[t]),
                    (VarKind::Teardown, r.teardown[t]),
                ];
                for (kind, allowed) in fixes {
                    if allowed {
                        continue;
                    }
                    let tag = if kind == VarKind::On && !available {
                        ConstraintTag::Availability
                    } else {
                        ConstraintTag::Boundary
                    };
                    b.row(tag, [(var(kind, v, t as i64), 1)], Sense::Eq, 0)?;
                }
            }
        }
    }

    for v in 0..n_vp {
        let a = &inst.activities[inst.activity_of_vp(v)];
        let (du, dd) = (i64::from(a.setup), i64::from(a.teardown));
        let (gu, gd) = (i64::from(a.min_up_slots()), i64::from(a.min_down_slots()));
        for t in 0..i64::from(horizon) {
            b.row(
                ConstraintTag::Transition,
                [
                    (var(VarKind::On, v, t), 1),
                    (var(VarKind::On, v, t - 1), -1),
                    (var(VarKind::Start, v, t), -1),
                    (var(VarKind::Stop, v, t), 1),
                ],
                Sense::Eq,
                0,
            )?;
        }
        for t in 0..i64::from(horizon) {
            let pair = [(var(VarKind::Start, v, t), 1), (var(VarKind::Stop, v, t), 1)];
            if pair.iter().all(|(x, _)| x.is_some()) {
                b.row(ConstraintTag::TransitionLink, pair, Sense::Le, 1)?;
            }
        }
        if gu > 0 {
            for t in 0..i64::from(horizon) {
                let starts: Vec<_> = (t - gu + 1..=t)
                    .filter_map(|tau| var(VarKind::Start, v, tau))
                    .map(|i| (Some(i), 1))
                    .collect();
                if starts.is_empty() {
                    continue;
                }
                let terms = starts.into_iter().chain([(var(VarKind::On, v, t), -1)]);
                b.row(ConstraintTag::MinUp, terms, Sense::Le, 0)?;
            }
        }
        if gd > 0 {
            for t in 0..i64::from(horizon) {
                let stops: Vec<_> = (t - gd + 1..=t)
                    .filter_map(|tau| var(VarKind::Stop, v, tau))
                    .map(|i| (Some(i), 1))
                    .collect();
                if stops.is_empty() {
                    continue;
                }
                let terms = stops.into_iter().chain([(var(VarKind::On, v, t), 1)]);
                b.row(ConstraintTag::MinDown, terms, Sense::Le, 1)?;
            }
        }
        for t in 0..i64::from(horizon) {
            let terms = [(var(VarKind::Setup, v, t), 1)]
                .into_iter()
                .chain((t + 1..=t + du).map(|tau| (var(VarKind::Start, v, tau), -1)));
            b.row(ConstraintTag::SetupWindow, terms, Sense::Eq, 0)?;
        }
        for t in 0..i64::from(horizon) {
            let terms = [(var(VarKind::Teardown, v, t), 1)]
                .into_iter()
                .chain((t + 1 - dd..=t).map(|tau| (var(VarKind::Stop, v, tau), -1)));
            b.row(ConstraintTag::TeardownWindow, terms, Sense::Eq, 0)?;
        }
    }

    // Occupancy rows: one per (resource, slot) and, unless ablated, one per
    // (mission, slot). Single-term rows are implied by the binary bounds.
    let occupancy = |v: usize, t: u32| {
        [VarKind::Teardown, VarKind::On, VarKind::Setup]
            .into_iter()
            .filter_map(move |k| space.get(k, v, t))
    };
    let mut per_resource: Vec<Vec<usize>> = vec![Vec::new(); inst.resources.len()];
    for v in 0..n_vp {
        for &r in inst.resources_of(v) {
            per_resource[r].push(v);
        }
    }
    for vps in &per_resource {
        for t in 0..horizon {
            let terms: Vec<_> = vps.iter().flat_map(|&v| occupancy(v, t)).collect();
            if terms.len() >= 2 {
                b.row(
                    ConstraintTag::ResourceCapacity,
                    terms.into_iter().map(|i| (Some(i), 1)),
                    Sense::Le,
                    1,
                )?;
            }
        }
    }

    for a in 0..n_act {
        let act = &inst.activities[a];
        let on: Vec<usize> = inst
            .view_periods_of(a)
            .iter()
            .flat_map(|&v| (0..horizon).filter_map(move |t| space.get(VarKind::On, v, t)))
            .collect();
        let x = var(VarKind::Complete, a, 0);
        let sum = || on.iter().map(|&i| (Some(i), 1));
        b.row(
            ConstraintTag::DurationBounds,
            sum().chain([(x, -i64::from(act.d_min))]),
            Sense::Ge,
            0,
        )?;
        b.row(
            ConstraintTag::DurationBounds,
            sum().chain([(x, -i64::from(act.d_max))]),
            Sense::Le,
            0,
        )?;
    }

    if !options.ablate.mission_overlap {
        for m in 0..inst.missions.len() {
            let vps: Vec<usize> = inst
                .activities_of(m)
                .iter()
                .flat_map(|&a| inst.view_periods_of(a).iter().copied())
                .collect();
            for t in 0..horizon {
                let terms: Vec<_> = vps.iter().flat_map(|&v| occupancy(v, t)).collect();
                if terms.len() >= 2 {
                    b.row(
                        ConstraintTag::MissionOverlap,
                        terms.into_iter().map(|i| (Some(i), 1)),
                        Sense::Le,
                        1,
                    )?;
                }
            }
        }
    }

    if !options.ablate.split_xor {
        for c in xor_constraints(registry) {
            let terms = c
                .terms
                .iter()
                .map(|&(a, coef)| (var(VarKind::Complete, a, 0), coef));
            b.row(c.tag, terms, c.sense, c.rhs)?;
        }
    }

    if options.single_interval {
        for v in 0..n_vp {
            let terms: Vec<_> = (0..horizon)
                .filter_map(|t| space.get(VarKind::Start, v, t))
                .map(|i| (Some(i), 1))
                .collect();
            if terms.len() >= 2 {
                b.row(ConstraintTag::SingleInterval, terms, Sense::Le, 1)?;
            }
        }
    }

    let rows = b.rows;

    let mut warnings = Vec::new();
    for (a, act) in inst.activities.iter().enumerate() {
        let need = act.d_min + act.setup + act.teardown;
        let fits = inst
            .view_periods_of(a)
            .iter()
            .any(|&v| longest_run(&masks[v]) >= need);
        if !fits {
            let msg = format!(
                "activity {} is structurally unschedulable: no view period has {need} consecutive available slots",
                act.id
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }
    }

    let mut model = MilpModel {
        vars,
        constraints: rows,
        objective: Vec::new(),
        weights: weights.clone(),
        options: *options,
        horizon,
        n_activities: n_act,
        n_view_periods: n_vp,
        warnings,
    };
    model.set_weights(weights)?;
    Ok(model)
}

fn longest_run(mask: &[bool]) -> u32 {
    let (mut best, mut cur) = (0, 0);
    for &b in mask {
        cur = if b { cur + 1 } else { 0 };
        best = best.max(cur);
    }
    best
}
