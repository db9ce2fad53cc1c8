mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Duration;

use dsnsched::balance::{run_balancer, select_best, update_weights, BalancerConfig};
use dsnsched::evaluate::{compute_metrics, distance, MetricsReport};
use dsnsched::milp::Weights;
use dsnsched::splitter::{expand_splits, SplitRounding};

use common::*;

fn report(u_rms: f64, u_max: f64, u_avg: f64, u_prio: Option<f64>) -> MetricsReport {
    MetricsReport {
        hours_satisfied: 0.0,
        hours_requested: 0.0,
        satisfied_time_pct: 0.0,
        n_satisfied_requests: 0,
        n_requests: 0,
        satisfied_request_pct: 0.0,
        missions: vec![],
        excluded_missions: vec![],
        u_rms,
        u_max,
        u_avg,
        u_prio,
        d: distance(u_rms, u_max, u_avg, u_prio),
    }
}

#[derive(Debug, PartialEq)]
struct Step {
    k: u32,
    threshold: f64,
    k_time_s: f64,
    doubled: Vec<&'static str>,
    raised: u32,
    k_time_doubled: bool,
}

fn step(k: u32, threshold: f64, k_time_s: f64, doubled: &[&'static str], raised: u32, k_time_doubled: bool) -> Step {
    Step {
        k,
        threshold,
        k_time_s,
        doubled: doubled.to_vec(),
        raised,
        k_time_doubled,
    }
}

#[test]
fn replayed_trace_matches_hand_simulation() {
    let inst = balancer_instance();
    let (e, reg) = expand_splits(&inst, SplitRounding::Exact).unwrap();
    // Satisfactions (A, B) per solve: (1, 1/8) (1, 3/8) (1, 3/8) (5/8, 5/8) (1, 2/8).
    let mut solver = ScriptedSolver::new(vec![
        two_mission_schedule(8, 1),
        two_mission_schedule(8, 3),
        two_mission_schedule(8, 3),
        two_mission_schedule(5, 5),
        two_mission_schedule(8, 2),
    ]);
    let config = BalancerConfig {
        k_max: 2,
        k_time: Duration::from_secs(10),
        ..BalancerConfig::default()
    };
    let mut seen = 0;
    let result = run_balancer(&e, &reg, &mut solver, &config, &mut |_| seen += 1).unwrap();
    assert_eq!(seen, 5);
    assert!(!result.cap_fired);

    let got: Vec<Step> = result
        .log
        .iter()
        .map(|r| Step {
            k: r.k,
            threshold: (r.threshold * 100.0).round() / 100.0,
            k_time_s: r.k_time_s,
            doubled: r
                .doubled
                .iter()
                .map(|m| if m == "A" { "A" } else { "B" })
                .collect(),
            raised: r.threshold_raised,
            k_time_doubled: r.k_time_doubled,
        })
        .collect();
    let want = vec![
        step(0, 0.15, 10.0, &["B"], 0, false),
        step(1, 0.15, 10.0, &[], 5, false),
        step(1, 0.40, 10.0, &["B"], 0, true),
        step(1, 0.40, 20.0, &[], 5, false),
        step(1, 0.65, 20.0, &["B"], 0, false),
    ];
    assert_eq!(got, want);

    // Weights handed to the solver: B doubles after solves 0 and 2.
    let b_c1: Vec<f64> = solver.calls.iter().map(|(w, _)| w.c1[1]).collect();
    let b_c2: Vec<f64> = solver.calls.iter().map(|(w, _)| w.c2[1]).collect();
    assert_eq!(b_c1, [1.0, 2.0, 2.0, 4.0, 4.0]);
    assert_eq!(b_c2, [1.0, 2.0, 2.0, 4.0, 4.0]);
    assert!(solver.calls.iter().all(|(w, _)| w.c1[0] == 1.0 && w.c2[0] == 1.0));
    let limits: Vec<u64> = solver.calls.iter().map(|(_, t)| t.as_secs()).collect();
    assert_eq!(limits, [10, 10, 10, 20, 20]);

    // d per solve: 2.0758, 1.6437, 1.6437, 1.6856, 1.8449. The tie between
    // the two (1, 3/8) solves goes to the earlier one.
    let d: Vec<f64> = result.solutions.iter().map(|s| (s.metrics.d * 1e4).round() / 1e4).collect();
    assert_eq!(d, [2.0758, 1.6437, 1.6437, 1.6856, 1.8449]);
    assert_eq!(result.chosen_index, 1);
    for s in &result.solutions {
        assert!(result.chosen().metrics.d <= s.metrics.d);
    }
}

#[test]
fn solve_cap_stops_the_loop_and_is_reported() {
    let inst = balancer_instance();
    let (e, reg) = expand_splits(&inst, SplitRounding::Exact).unwrap();
    // A constant schedule keeps doubling the time limit and resetting k.
    let mut solver = ScriptedSolver::new(vec![two_mission_schedule(8, 1)]);
    let config = BalancerConfig {
        k_max: 3,
        k_time: Duration::from_secs(1),
        max_solves: 7,
        ..BalancerConfig::default()
    };
    let r = run_balancer(&e, &reg, &mut solver, &config, &mut |_| {}).unwrap();
    assert!(r.cap_fired);
    assert_eq!(r.solutions.len(), 7);
    let limits: Vec<u64> = solver.calls.iter().map(|(_, t)| t.as_secs()).collect();
    assert_eq!(limits, [1, 1, 2, 4, 8, 16, 32]);
}

#[test]
fn update_weights_doubles_only_missions_below_threshold() {
    let inst = balancer_instance();
    let (e, _) = expand_splits(&inst, SplitRounding::Exact).unwrap();
    let w = Weights::uniform(2, 2);
    let sats = BTreeMap::from([("A".to_string(), 0.10), ("B".to_string(), 0.90)]);
    let (next, doubled) = update_weights(&e, &w, &sats, 0.15);
    assert_eq!(doubled, ["A"]);
    assert_eq!(next.c1, [2.0, 1.0]);
    assert_eq!(next.c2, [2.0, 1.0]);
    // Exactly at the threshold is not below it.
    let sats = BTreeMap::from([("A".to_string(), 0.15), ("B".to_string(), 0.90)]);
    assert!(update_weights(&e, &w, &sats, 0.15).1.is_empty());
}

#[test]
fn select_best_examples() {
    let a = report(0.3, 0.5, 0.8, None);
    let b = report(0.2, 0.4, 0.9, None);
    assert!((a.d - 1.3793).abs() < 5e-5);
    assert!((b.d - 1.19774).abs() < 1e-5);
    assert_eq!(select_best(&[&a], false).unwrap(), 0);
    assert_eq!(select_best(&[&a, &b], false).unwrap(), 1);
    assert_eq!(select_best(&[&b, &a], false).unwrap(), 0);
    // Ties keep the earliest.
    assert_eq!(select_best(&[&a, &b, &b], false).unwrap(), 1);
    assert!(select_best(&[], false).is_err());

    let zero = report(1.0, 1.0, 0.0, None);
    assert_eq!(zero.d, f64::INFINITY);
    assert_eq!(select_best(&[&zero, &a], false).unwrap(), 1);

    // With priorities, a missing or zero U_PRIO is infinitely far.
    let p0 = report(0.0, 0.0, 1.0, Some(0.0));
    let p1 = report(0.3, 0.5, 0.8, Some(0.5));
    assert_eq!(select_best(&[&p0, &p1], true).unwrap(), 1);
}

#[test]
fn prioritized_missions_start_at_the_multiplier() {
    let inst = balancer_instance();
    let (e, reg) = expand_splits(&inst, SplitRounding::Exact).unwrap();
    let mut solver = ScriptedSolver::new(vec![two_mission_schedule(8, 8)]);
    let config = BalancerConfig {
        k_max: 1,
        prioritized: BTreeSet::from(["B".to_string()]),
        ..BalancerConfig::default()
    };
    let r = run_balancer(&e, &reg, &mut solver, &config, &mut |_| {}).unwrap();
    assert_eq!(solver.calls[0].0.c1, [1.0, 5.0]);
    assert_eq!(solver.calls[0].0.c2, [1.0, 1.0]);
    assert_eq!(r.chosen().metrics.u_prio, Some(1.0));

    let unknown = BalancerConfig {
        prioritized: BTreeSet::from(["Z".to_string()]),
        ..BalancerConfig::default()
    };
    assert!(run_balancer(&e, &reg, &mut solver, &unknown, &mut |_| {}).is_err());
    assert!(compute_metrics(&e, &reg, &two_mission_schedule(1, 1), &unknown.prioritized).is_err());
}
