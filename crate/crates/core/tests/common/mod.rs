#![allow(dead_code, clippy::type_complexity, clippy::too_many_arguments)]

use std::path::PathBuf;
use std::process::Command;
use std::time::Duration;

use chrono::{TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dsnsched::balance::{ScheduleSolver, SolvedSchedule};
use dsnsched::grid::Interval;
use dsnsched::ingest::{instance_from_doc, ActivityDoc, GridDoc, InstanceDoc, MissionDoc, ResourceDoc, ViewPeriodDoc};
use dsnsched::instance::ProblemInstance;
use dsnsched::milp::{build_model, count_model, ModelOptions, Weights};
use dsnsched::schedule::{Schedule, Track};
use dsnsched::solve::SolveStatus;
use dsnsched::splitter::{expand_splits, SplitRounding};
use dsnsched::Result;

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Command template for the bundled scipy backend, if python3 with scipy
/// is available.
pub fn scipy_template() -> Option<String> {
    let ok = Command::new("python3")
        .args(["-c", "import scipy.optimize; scipy.optimize.milp"])
        .status()
        .map(|s| s.success())
        .unwrap_or(false);
    let script = workspace_root().join("scripts/scipy_milp.py");
    ok.then(|| format!("python3 {} {{mps}} {{sol}} {{time_limit_s}}", script.display()))
}

/// Activity described in slots.
#[derive(Clone, Debug)]
pub struct Act {
    pub id: String,
    pub mission: String,
    pub d: (u32, u32),
    pub setup: u32,
    pub teardown: u32,
    pub min_up: Option<u32>,
    pub min_down: Option<u32>,
    pub vps: Vec<String>,
}

pub fn act(id: &str, mission: &str, d: (u32, u32), st: (u32, u32), vps: &[&str]) -> Act {
    Act {
        id: id.into(),
        mission: mission.into(),
        d,
        setup: st.0,
        teardown: st.1,
        min_up: None,
        min_down: None,
        vps: vps.iter().map(|s| s.to_string()).collect(),
    }
}

#[derive(Clone, Debug, Default)]
pub struct Micro {
    pub horizon: u32,
    pub resources: Vec<(String, Vec<(u32, u32)>)>,
    pub activities: Vec<Act>,
    pub vps: Vec<(String, Vec<String>, Vec<(u32, u32)>)>,
}

impl Micro {
    pub fn new(horizon: u32, resources: &[&str]) -> Self {
        Micro {
            horizon,
            resources: resources.iter().map(|r| (r.to_string(), vec![])).collect(),
            ..Micro::default()
        }
    }

    pub fn vp(mut self, id: &str, resources: &[&str], windows: &[(u32, u32)]) -> Self {
        self.vps.push((
            id.into(),
            resources.iter().map(|s| s.to_string()).collect(),
            windows.to_vec(),
        ));
        self
    }

    pub fn activity(mut self, a: Act) -> Self {
        self.activities.push(a);
        self
    }

    pub fn maintenance(mut self, resource: &str, iv: (u32, u32)) -> Self {
        for r in &mut self.resources {
            if r.0 == resource {
                r.1.push(iv);
            }
        }
        self
    }

    pub fn doc(&self) -> InstanceDoc {
        let mut missions: Vec<String> = self.activities.iter().map(|a| a.mission.clone()).collect();
        missions.sort();
        missions.dedup();
        let iv = |(s, e): (u32, u32)| Interval::new(s, e);
        InstanceDoc {
            label: "micro".into(),
            grid: GridDoc {
                slot_minutes: 15,
                week_start: Utc.with_ymd_and_hms(2016, 10, 31, 0, 0, 0).unwrap(),
                horizon_slots: Some(self.horizon),
            },
            resources: self
                .resources
                .iter()
                .map(|(id, m)| ResourceDoc {
                    id: id.clone(),
                    complex: String::new(),
                    diameter_m: 34,
                    maintenance: m.iter().copied().map(iv).collect(),
                })
                .collect(),
            missions: missions.into_iter().map(|id| MissionDoc { id }).collect(),
            activities: self
                .activities
                .iter()
                .map(|a| ActivityDoc {
                    id: a.id.clone(),
                    mission: a.mission.clone(),
                    d_min_h: f64::from(a.d.0) * 0.25,
                    d_max_h: f64::from(a.d.1) * 0.25,
                    setup_min: a.setup * 15,
                    teardown_min: a.teardown * 15,
                    min_up_slots: a.min_up,
                    min_down_slots: a.min_down,
                    view_periods: a.vps.clone(),
                })
                .collect(),
            view_periods: self
                .vps
                .iter()
                .map(|(id, r, w)| ViewPeriodDoc {
                    id: id.clone(),
                    resources: r.clone(),
                    windows: w.iter().copied().map(iv).collect(),
                })
                .collect(),
        }
    }

    pub fn build(&self) -> ProblemInstance {
        instance_from_doc(self.doc()).expect("micro instance is consistent")
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(&self.doc()).unwrap()
    }
}

/// A random instance with 1–2 antennas, 1–3 activities and at most 48 slots.
/// `tight` keeps windows short and clustered so that several activities
/// fit in very small programs and still contend.
pub fn random_micro(rng: &mut ChaCha8Rng, tight: bool) -> Micro {
    let horizon = [16, 24, 32, 48][rng.gen_range(0..4)];
    let n_res = rng.gen_range(1..=2);
    let res: Vec<String> = (0..n_res).map(|i| format!("R{i}")).collect();
    let mut m = Micro {
        horizon,
        resources: res.iter().map(|r| (r.clone(), vec![])).collect(),
        ..Micro::default()
    };
    if rng.gen_bool(0.2) {
        let s = rng.gen_range(0..horizon - 2);
        m.resources[0].1.push((s, s + rng.gen_range(1..=2)));
    }
    let n_act = rng.gen_range(1..=3);
    let n_mis = rng.gen_range(1..=2.min(n_act));
    for i in 0..n_act {
        let (d_min, d_max, setup, teardown) = if tight {
            let d = rng.gen_range(1..=2);
            (d, d + rng.gen_range(0..=1), rng.gen_range(0..=1), u32::from(rng.gen_bool(0.3)))
        } else {
            let d = rng.gen_range(1..=3);
            (d, d + rng.gen_range(0..=2), rng.gen_range(0..=2), rng.gen_range(0..=1))
        };
        let mut a = act(
            &format!("a{i}"),
            &format!("M{}", i % n_mis),
            (d_min, d_max),
            (setup, teardown),
            &[],
        );
        if rng.gen_bool(0.25) {
            a.min_down = Some(rng.gen_range(1..=2));
        }
        if rng.gen_bool(0.15) {
            a.min_up = Some(rng.gen_range(1..=d_min));
        }
        let n_vp = if !tight && rng.gen_bool(0.25) { 2 } else { 1 };
        for j in 0..n_vp {
            let id = format!("v{i}{j}");
            let slack = if tight { rng.gen_range(0..=1) } else { rng.gen_range(0..=3) };
            let len = (d_min + setup + teardown + slack).min(horizon);
            let spread = if tight { 3 } else { 10 };
            let start = rng.gen_range(0..=(horizon - len).min(spread));
            let mut windows = vec![(start, start + len)];
            if rng.gen_bool(0.15) && start + len + 3 < horizon {
                let s2 = start + len + 2;
                windows.push((s2, (s2 + 2).min(horizon)));
            }
            let r: Vec<&str> = if n_res == 2 && rng.gen_bool(0.2) {
                vec!["R0", "R1"]
            } else {
                vec![res[rng.gen_range(0..n_res)].as_str()]
            };
            m = m.vp(&id, &r, &windows);
            a.vps.push(id);
        }
        m.activities.push(a);
    }
    m
}

/// Number of binaries in the pruned program with default options.
pub fn pruned_binaries(instance: &ProblemInstance) -> usize {
    let (e, reg) = expand_splits(instance, SplitRounding::Exact).unwrap();
    let w = Weights::uniform(e.instance.activities.len(), e.instance.view_periods.len());
    count_model(&build_model(&e, &reg, &w, &ModelOptions::default()).unwrap()).n_binaries
}

/// Seeded corpus of micro instances whose pruned program has at most
/// `max_binaries` binaries.
pub fn micro_corpus(n: usize, max_binaries: usize, seed: u64) -> Vec<(Micro, ProblemInstance)> {
    let tight = max_binaries <= 32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < n {
        tries += 1;
        assert!(tries < 200_000, "corpus generator stalled");
        let m = random_micro(&mut rng, tight);
        let Ok(inst) = instance_from_doc(m.doc()) else {
            continue;
        };
        let nb = pruned_binaries(&inst);
        if nb == 0 || nb > max_binaries {
            continue;
        }
        out.push((m, inst));
    }
    out
}

pub fn track(activity: &str, mission: &str, vp: &str, resource: &str, setup: u32, start: u32, end: u32, teardown: u32) -> Track {
    Track {
        activity_id: activity.into(),
        parent_id: activity.split('#').next().unwrap().into(),
        mission_id: mission.into(),
        view_period_id: vp.into(),
        resource_ids: vec![resource.into()],
        setup: Interval::new(start - setup, start),
        track: Interval::new(start, end),
        teardown: Interval::new(end, end + teardown),
    }
}

/// Replays fixed schedules and records what it was asked to do.
pub struct ScriptedSolver {
    pub script: Vec<Schedule>,
    pub calls: Vec<(Weights, Duration)>,
}

impl ScriptedSolver {
    pub fn new(script: Vec<Schedule>) -> Self {
        ScriptedSolver {
            script,
            calls: Vec::new(),
        }
    }
}

impl ScheduleSolver for ScriptedSolver {
    fn id(&self) -> String {
        "scripted".into()
    }

    fn solve(&mut self, weights: &Weights, time_limit: Duration) -> Result<SolvedSchedule> {
        let i = self.calls.len().min(self.script.len() - 1);
        self.calls.push((weights.clone(), time_limit));
        Ok(SolvedSchedule {
            schedule: self.script[i].clone(),
            objective: i as f64,
            status: SolveStatus::Optimal,
        })
    }
}

/// Two missions with one 8-slot request each on a shared antenna.
pub fn balancer_instance() -> ProblemInstance {
    Micro::new(48, &["R"])
        .vp("va", &["R"], &[(0, 48)])
        .vp("vb", &["R"], &[(0, 48)])
        .activity(act("a", "A", (1, 8), (0, 0), &["va"]))
        .activity(act("b", "B", (1, 8), (0, 0), &["vb"]))
        .build()
}

/// Schedule giving mission A `sa` and mission B `sb` tracked slots.
pub fn two_mission_schedule(sa: u32, sb: u32) -> Schedule {
    let mut s = Schedule::default();
    if sa > 0 {
        s.tracks.push(track("a", "A", "va", "R", 0, 0, sa, 0));
        s.completed.insert("a".into());
    }
    if sb > 0 {
        s.tracks.push(track("b", "B", "vb", "R", 0, 24, 24 + sb, 0));
        s.completed.insert("b".into());
    }
    s
}
