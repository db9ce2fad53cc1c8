//! C interface to the scheduler.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free` function. Every fallible call returns a
//! [`DsnStatus`] and, on failure, leaves a message retrievable with
//! [`dsn_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use dsnsched::balance::BalancerConfig;
use dsnsched::evaluate::validate_schedule;
use dsnsched::ingest::parse_instance;
use dsnsched::instance::ProblemInstance;
use dsnsched::manifest::{instance_hash, RunManifest, SolutionDoc};
use dsnsched::milp::ModelOptions;
use dsnsched::pipeline::{run_schedule, validate_options, RunOptions, SolverChoice};
use dsnsched::splitter::{expand_splits, SplitRounding};
use dsnsched::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DsnStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Malformed or inconsistent input document.
    Input = 3,
    Config = 4,
    Model = 5,
    /// Solver failure, including the oracle refusing a large instance.
    Backend = 6,
    /// The schedule violates at least one rule.
    Invalid = 7,
    Panic = 8,
}

/// A parsed problem instance.
pub struct DsnInstance {
    inner: ProblemInstance,
}

/// The result of a schedule run.
pub struct DsnRun {
    valid_fraction: f64,
    u_avg: f64,
    u_max: f64,
    n_tracks: usize,
    solution_json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DsnStatus {
    match e {
        Error::Config(_) => DsnStatus::Config,
        Error::Model(_) => DsnStatus::Model,
        Error::Backend { .. } | Error::OracleLimit(_) | Error::Decode { .. } | Error::Balance(_) => {
            DsnStatus::Backend
        }
        _ => DsnStatus::Input,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (DsnStatus, String)>) -> DsnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DsnStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            DsnStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (DsnStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, (DsnStatus, String)> {
    if p.is_null() {
        return Err((DsnStatus::NullArgument, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (DsnStatus::InvalidUtf8, "string argument is not UTF-8".into()))
}

/// Message for the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dsn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses an instance document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dsn_instance_load_json(
    json: *const c_char,
    out: *mut *mut DsnInstance,
) -> DsnStatus {
    guard(|| {
        if out.is_null() {
            return Err((DsnStatus::NullArgument, "null output pointer".into()));
        }
        let text = read_str(json)?;
        let inner = parse_instance(text.as_bytes()).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DsnInstance { inner }));
        Ok(())
    })
}

/// Number of activities before splitting, or 0 for a null handle.
///
/// # Safety
/// `instance` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsn_instance_activity_count(instance: *const DsnInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.activities.len())
}

/// # Safety
/// `instance` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dsn_instance_free(instance: *mut DsnInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Runs the balancer with default thresholds.
///
/// `solver` is `oracle` or an external command template. A run whose
/// chosen schedule breaks a rule still produces a handle and returns
/// `DSN_STATUS_INVALID`.
///
/// # Safety
/// `instance` must be a live handle, `solver` a NUL-terminated string and
/// `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dsn_schedule(
    instance: *const DsnInstance,
    solver: *const c_char,
    time_limit_s: f64,
    iterations: u32,
    out: *mut *mut DsnRun,
) -> DsnStatus {
    let mut invalid = false;
    let status = guard(|| {
        let Some(inst) = instance.as_ref() else {
            return Err((DsnStatus::NullArgument, "null instance".into()));
        };
        if out.is_null() {
            return Err((DsnStatus::NullArgument, "null output pointer".into()));
        }
        let solver = read_str(solver)?;
        if !(time_limit_s > 0.0 && time_limit_s.is_finite()) {
            return Err((DsnStatus::Config, "time limit must be positive".into()));
        }
        let started_at = chrono::Utc::now();
        let options = RunOptions {
            model: ModelOptions::default(),
            split_rounding: SplitRounding::Exact,
            balancer: BalancerConfig {
                k_max: iterations,
                k_time: Duration::from_secs_f64(time_limit_s),
                ..BalancerConfig::default()
            },
            solver: SolverChoice::parse(solver),
        };
        let outcome = run_schedule(&inst.inner, &options, &mut |_| {}).map_err(lib_err)?;
        let chosen = outcome.balance.chosen();
        let config = serde_json::json!({
            "time_limit_s": time_limit_s,
            "iterations": iterations,
        });
        let manifest = RunManifest::new(&inst.inner, config, outcome.backend_id.clone(), None, started_at);
        let doc = SolutionDoc::new(
            manifest,
            options.split_rounding,
            options.model,
            chosen.objective,
            chosen.schedule.clone(),
        );
        let json = serde_json::to_string(&doc).map_err(|e| (DsnStatus::Input, e.to_string()))?;
        invalid = !outcome.validation.is_valid();
        *out = Box::into_raw(Box::new(DsnRun {
            valid_fraction: outcome.validation.valid_fraction,
            u_avg: chosen.metrics.u_avg,
            u_max: chosen.metrics.u_max,
            n_tracks: chosen.schedule.tracks.len(),
            solution_json: CString::new(json).unwrap_or_default(),
        }));
        Ok(())
    });
    if status == DsnStatus::Ok && invalid {
        set_error("chosen schedule breaks at least one rule".into());
        return DsnStatus::Invalid;
    }
    status
}

/// Percentage of valid tracks in the chosen schedule.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsn_run_valid_fraction(run: *const DsnRun) -> f64 {
    run.as_ref().map_or(f64::NAN, |r| r.valid_fraction)
}

/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsn_run_u_avg(run: *const DsnRun) -> f64 {
    run.as_ref().map_or(f64::NAN, |r| r.u_avg)
}

/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsn_run_u_max(run: *const DsnRun) -> f64 {
    run.as_ref().map_or(f64::NAN, |r| r.u_max)
}

/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsn_run_track_count(run: *const DsnRun) -> usize {
    run.as_ref().map_or(0, |r| r.n_tracks)
}

/// Solution document as JSON, borrowed from the handle.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsn_run_solution_json(run: *const DsnRun) -> *const c_char {
    run.as_ref().map_or(ptr::null(), |r| r.solution_json.as_ptr())
}

/// # Safety
/// `run` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dsn_run_free(run: *mut DsnRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Validates a solution document against `instance` and writes the
/// percentage of valid tracks. Returns `DSN_STATUS_INVALID` when any rule
/// is broken.
///
/// # Safety
/// `instance` must be a live handle, `solution_json` a NUL-terminated
/// string and `valid_fraction` null or writable.
#[no_mangle]
pub unsafe extern "C" fn dsn_validate_json(
    instance: *const DsnInstance,
    solution_json: *const c_char,
    valid_fraction: *mut f64,
) -> DsnStatus {
    let mut invalid = false;
    let status = guard(|| {
        let Some(inst) = instance.as_ref() else {
            return Err((DsnStatus::NullArgument, "null instance".into()));
        };
        let text = read_str(solution_json)?;
        let doc = SolutionDoc::parse(text.as_bytes()).map_err(lib_err)?;
        doc.check_instance(&instance_hash(&inst.inner)).map_err(lib_err)?;
        let (expanded, registry) = expand_splits(&inst.inner, doc.split_rounding).map_err(lib_err)?;
        let report = validate_schedule(&expanded, &registry, &doc.schedule, &validate_options(&doc.options))
            .map_err(lib_err)?;
        if let Some(v) = valid_fraction.as_mut() {
            *v = report.valid_fraction;
        }
        invalid = !report.is_valid();
        Ok(())
    });
    if status == DsnStatus::Ok && invalid {
        set_error("solution breaks at least one rule".into());
        return DsnStatus::Invalid;
    }
    status
}
