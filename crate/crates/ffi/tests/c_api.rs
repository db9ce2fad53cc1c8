use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use dsnsched_ffi::*;

const MICRO: &str = r#"{
    "label": "ffi-micro",
    "grid": {"slot_minutes": 15, "week_start": "2016-10-31T00:00:00Z", "horizon_slots": 16},
    "resources": [{"id": "DSS-43"}],
    "missions": [{"id": "VGR1"}],
    "activities": [{"id": "a1", "mission": "VGR1", "d_min_h": 1.0, "d_max_h": 1.0,
                    "setup_min": 15, "teardown_min": 15, "view_periods": ["vp1"]}],
    "view_periods": [{"id": "vp1", "resources": ["DSS-43"], "windows": [[0, 10]]}]
}"#;

fn load(json: &str) -> (DsnStatus, *mut DsnInstance) {
    let c = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    let s = unsafe { dsn_instance_load_json(c.as_ptr(), &mut out) };
    (s, out)
}

fn last_error() -> String {
    let p = dsn_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn oracle_run_round_trips_through_validation() {
    let (s, inst) = load(MICRO);
    assert_eq!(s, DsnStatus::Ok);
    assert_eq!(unsafe { dsn_instance_activity_count(inst) }, 1);

    let solver = CString::new("oracle").unwrap();
    let mut run = ptr::null_mut();
    let s = unsafe { dsn_schedule(inst, solver.as_ptr(), 5.0, 2, &mut run) };
    assert_eq!(s, DsnStatus::Ok, "{}", last_error());
    unsafe {
        assert_eq!(dsn_run_valid_fraction(run), 100.0);
        assert_eq!(dsn_run_track_count(run), 1);
        assert_eq!(dsn_run_u_avg(run), 1.0);
        assert_eq!(dsn_run_u_max(run), 0.0);
    }

    let json = unsafe { CStr::from_ptr(dsn_run_solution_json(run)) }.to_owned();
    let mut valid = 0.0;
    let s = unsafe { dsn_validate_json(inst, json.as_ptr(), &mut valid) };
    assert_eq!(s, DsnStatus::Ok);
    assert_eq!(valid, 100.0);

    // Push the track past the window.
    let mut doc: serde_json::Value = serde_json::from_slice(json.as_bytes()).unwrap();
    let t = &mut doc["schedule"]["tracks"][0];
    t["setup"] = serde_json::json!([10, 11]);
    t["track"] = serde_json::json!([11, 15]);
    t["teardown"] = serde_json::json!([15, 16]);
    let bad = CString::new(doc.to_string()).unwrap();
    let s = unsafe { dsn_validate_json(inst, bad.as_ptr(), &mut valid) };
    assert_eq!(s, DsnStatus::Invalid);
    assert_eq!(valid, 0.0);

    unsafe {
        dsn_run_free(run);
        dsn_instance_free(inst);
    }
}

#[test]
fn solution_for_another_instance_is_refused() {
    let (_, inst) = load(MICRO);
    let solver = CString::new("oracle").unwrap();
    let mut run = ptr::null_mut();
    unsafe { dsn_schedule(inst, solver.as_ptr(), 5.0, 1, &mut run) };
    let json = unsafe { CStr::from_ptr(dsn_run_solution_json(run)) }.to_owned();

    let (_, other) = load(&MICRO.replace("[[0, 10]]", "[[0, 12]]"));
    let s = unsafe { dsn_validate_json(other, json.as_ptr(), ptr::null_mut()) };
    assert_eq!(s, DsnStatus::Input);
    assert!(last_error().contains("instance"));
    unsafe {
        dsn_run_free(run);
        dsn_instance_free(inst);
        dsn_instance_free(other);
    }
}

#[test]
fn bad_input_sets_status_and_message() {
    let (s, inst) = load("{\"label\": 3}");
    assert_eq!(s, DsnStatus::Input);
    assert!(inst.is_null());
    assert!(last_error().contains("label"));

    let mut out = ptr::null_mut();
    let s = unsafe { dsn_instance_load_json(ptr::null(), &mut out) };
    assert_eq!(s, DsnStatus::NullArgument);

    let (_, inst) = load(MICRO);
    let mut run = ptr::null_mut();
    let solver = CString::new("oracle").unwrap();
    let s = unsafe { dsn_schedule(inst, solver.as_ptr(), -1.0, 1, &mut run) };
    assert_eq!(s, DsnStatus::Config);
    let s = unsafe { dsn_schedule(inst, solver.as_ptr(), 1.0, 0, &mut run) };
    assert_eq!(s, DsnStatus::Config);
    assert!(run.is_null());
    unsafe {
        dsn_instance_free(inst);
        dsn_instance_free(ptr::null_mut());
        dsn_run_free(ptr::null_mut());
        assert!(dsn_run_solution_json(ptr::null()).is_null());
    }
}

#[test]
fn failing_external_solver_maps_to_backend() {
    let (_, inst) = load(MICRO);
    let solver = CString::new("false {mps} {sol}").unwrap();
    let mut run = ptr::null_mut();
    let s = unsafe { dsn_schedule(inst, solver.as_ptr(), 5.0, 1, &mut run) };
    assert_eq!(s, DsnStatus::Backend);
    unsafe { dsn_instance_free(inst) };
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/dsnsched.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["dsn_instance_load_json", "dsn_schedule", "dsn_validate_json", "dsn_last_error", "dsn_run_free"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-std=c99", "-Wall", "-Werror"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(status.success());
}
