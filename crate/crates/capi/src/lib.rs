//! C ABI over the encumbrance model. Everything crosses the boundary as
//! JSON in UTF-8 C strings; handles are opaque; every entry point returns
//! an `EnvlockStatus`.
//!
//! Ownership: strings returned through `out` parameters belong to the
//! caller and must be released with `envlock_string_free`. Handles must be
//! released with their matching `_free` function. Passing a pointer not
//! produced by this library is undefined behavior, same as with `free`.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use envlock::conditions::{self, ConditionTree, OracleSnapshot};
use envlock::economics::{economics_table, reference_environments, CostModel, CostedOp};
use envlock::ledger::{
    ks_escape, ncee_audit_ablm, ncee_audit_pslm, restricted_state, AccountClass, KeyId,
};
use envlock::economics::rational;
use envlock::scenario::{run, RunStatus, Scenario};
use envlock::types::Address;

/// Status of a call. Mirrors the CLI exit codes, with 4 reserved for
/// boundary misuse (null pointers, non-UTF-8 input).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvlockStatus {
    Ok = 0,
    ProtocolRejection = 1,
    InvariantViolation = 2,
    InputError = 3,
    BoundaryMisuse = 4,
}

/// An opaque parsed scenario.
pub struct EnvlockScenario {
    inner: Scenario,
}

fn read_cstr<'a>(ptr: *const c_char) -> Result<&'a str, EnvlockStatus> {
    if ptr.is_null() {
        return Err(EnvlockStatus::BoundaryMisuse);
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| EnvlockStatus::BoundaryMisuse)
}

fn write_out(out: *mut *mut c_char, text: String) -> Result<(), EnvlockStatus> {
    if out.is_null() {
        return Err(EnvlockStatus::BoundaryMisuse);
    }
    // interior NULs cannot occur in serde_json output
    let c = CString::new(text).map_err(|_| EnvlockStatus::BoundaryMisuse)?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn status_of(run: RunStatus) -> EnvlockStatus {
    match run {
        RunStatus::Success => EnvlockStatus::Ok,
        RunStatus::ProtocolRejection => EnvlockStatus::ProtocolRejection,
        RunStatus::InvariantViolation => EnvlockStatus::InvariantViolation,
    }
}

/// Release a string returned by any `out` parameter.
#[no_mangle]
pub extern "C" fn envlock_string_free(ptr: *mut c_char) {
    if !ptr.is_null() {
        unsafe { drop(CString::from_raw(ptr)) };
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn envlock_version() -> *const c_char {
    static VERSION: &[u8] = concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes();
    VERSION.as_ptr() as *const c_char
}

/// Parse and validate a scenario JSON document. Returns null on failure
/// and, when `out_error` is non-null, a diagnostic string.
#[no_mangle]
pub extern "C" fn envlock_scenario_parse(
    json: *const c_char,
    out_error: *mut *mut c_char,
) -> *mut EnvlockScenario {
    let text = match read_cstr(json) {
        Ok(t) => t,
        Err(_) => return ptr::null_mut(),
    };
    match Scenario::from_json(text) {
        Ok(inner) => Box::into_raw(Box::new(EnvlockScenario { inner })),
        Err(e) => {
            if !out_error.is_null() {
                let _ = write_out(out_error, e.to_string());
            }
            ptr::null_mut()
        }
    }
}

#[no_mangle]
pub extern "C" fn envlock_scenario_free(handle: *mut EnvlockScenario) {
    if !handle.is_null() {
        unsafe { drop(Box::from_raw(handle)) };
    }
}

/// Override the seed of a parsed scenario.
#[no_mangle]
pub extern "C" fn envlock_scenario_set_seed(
    handle: *mut EnvlockScenario,
    seed: u64,
) -> EnvlockStatus {
    match unsafe { handle.as_mut() } {
        Some(s) => {
            s.inner.seed = seed;
            EnvlockStatus::Ok
        }
        None => EnvlockStatus::BoundaryMisuse,
    }
}

/// Run a parsed scenario; `out_report` receives the report JSON.
#[no_mangle]
pub extern "C" fn envlock_scenario_run(
    handle: *const EnvlockScenario,
    out_report: *mut *mut c_char,
) -> EnvlockStatus {
    let scenario = match unsafe { handle.as_ref() } {
        Some(s) => &s.inner,
        None => return EnvlockStatus::BoundaryMisuse,
    };
    let (report, status) = run(scenario);
    let json = serde_json::to_string(&report).expect("report serializes");
    if let Err(e) = write_out(out_report, json) {
        return e;
    }
    status_of(status)
}

/// One-shot convenience: parse and run in a single call.
#[no_mangle]
pub extern "C" fn envlock_run_scenario_json(
    json: *const c_char,
    out_report: *mut *mut c_char,
) -> EnvlockStatus {
    let text = match read_cstr(json) {
        Ok(t) => t,
        Err(e) => return e,
    };
    let scenario = match Scenario::from_json(text) {
        Ok(s) => s,
        Err(e) => {
            let _ = write_out(out_report, format!("{{\"error\":{:?}}}", e.to_string()));
            return EnvlockStatus::InputError;
        }
    };
    let (report, status) = run(&scenario);
    let jout = serde_json::to_string(&report).expect("report serializes");
    if let Err(e) = write_out(out_report, jout) {
        return e;
    }
    status_of(status)
}

fn parse_class(s: &str) -> Result<AccountClass, EnvlockStatus> {
    AccountClass::parse(s).ok_or(EnvlockStatus::InputError)
}

/// Four-property audit of the account-based model for one account class
/// ("eoa" | "erc4337" | "eip7702"); `out_verdict` receives the verdict JSON.
#[no_mangle]
pub extern "C" fn envlock_audit_ablm(
    class: *const c_char,
    out_verdict: *mut *mut c_char,
) -> EnvlockStatus {
    let class = match read_cstr(class).and_then(|s| parse_class(s)) {
        Ok(c) => c,
        Err(e) => return e,
    };
    let verdict = ncee_audit_ablm(class);
    match write_out(out_verdict, serde_json::to_string(&verdict).unwrap()) {
        Ok(()) => EnvlockStatus::Ok,
        Err(e) => e,
    }
}

/// Four-property audit of the envelope registry; bounded adversarial
/// search to `depth` operations, optionally against the build with an
/// unrestricted admin.
#[no_mangle]
pub extern "C" fn envlock_audit_pslm(
    depth: usize,
    violate_as7: bool,
    out_verdict: *mut *mut c_char,
) -> EnvlockStatus {
    let verdict = ncee_audit_pslm(depth, violate_as7);
    match write_out(out_verdict, serde_json::to_string(&verdict).unwrap()) {
        Ok(()) => EnvlockStatus::Ok,
        Err(e) => e,
    }
}

/// Owner-only escape trace against an active restriction for one account
/// class; `out_trace` receives the trace JSON.
#[no_mangle]
pub extern "C" fn envlock_ks_escape(
    class: *const c_char,
    out_trace: *mut *mut c_char,
) -> EnvlockStatus {
    let class = match read_cstr(class).and_then(|s| parse_class(s)) {
        Ok(c) => c,
        Err(e) => return e,
    };
    let owner = KeyId(1);
    let state = restricted_state(class, owner, Address(0xa11ce), Address(0x70ce), 1_000);
    let trace = ks_escape(class, &state, owner);
    let ok = trace.owner_only() && trace.assertion.outside_restriction_scope;
    if let Err(e) = write_out(out_trace, serde_json::to_string(&trace).unwrap()) {
        return e;
    }
    if ok {
        EnvlockStatus::Ok
    } else {
        EnvlockStatus::InvariantViolation
    }
}

/// Evaluate a condition tree JSON against an oracle snapshot JSON.
/// `out_result` receives `{"result": bool, "cond_hash": hex}` on success.
#[no_mangle]
pub extern "C" fn envlock_eval_tree(
    tree_json: *const c_char,
    snapshot_json: *const c_char,
    out_result: *mut *mut c_char,
) -> EnvlockStatus {
    let (tree_text, snap_text) = match (read_cstr(tree_json), read_cstr(snapshot_json)) {
        (Ok(t), Ok(s)) => (t, s),
        (Err(e), _) | (_, Err(e)) => return e,
    };
    let tree: ConditionTree = match serde_json::from_str(tree_text) {
        Ok(t) => t,
        Err(_) => return EnvlockStatus::InputError,
    };
    let snapshot: OracleSnapshot = match serde_json::from_str(snap_text) {
        Ok(s) => s,
        Err(_) => return EnvlockStatus::InputError,
    };
    let hash = match conditions::cond_hash(&tree) {
        Ok(h) => h,
        Err(_) => return EnvlockStatus::InputError,
    };
    match conditions::evaluate(&tree, &snapshot) {
        Ok(value) => {
            let out = serde_json::json!({ "result": value, "cond_hash": hash.to_hex() });
            match write_out(out_result, out.to_string()) {
                Ok(()) => EnvlockStatus::Ok,
                Err(e) => e,
            }
        }
        Err(_) => EnvlockStatus::ProtocolRejection,
    }
}

/// Per-environment cost and break-even table at an annual custody rate in
/// parts per million; `out_table` receives the rows as JSON.
#[no_mangle]
pub extern "C" fn envlock_econ_table(
    r_custody_ppm: u64,
    aggregated: bool,
    out_table: *mut *mut c_char,
) -> EnvlockStatus {
    if r_custody_ppm == 0 {
        return EnvlockStatus::InputError;
    }
    let basis = if aggregated {
        CostedOp::Aggregated
    } else {
        CostedOp::Create
    };
    let rows = match economics_table(
        &CostModel::default(),
        &reference_environments(),
        &rational(r_custody_ppm as i64, 1_000_000),
        basis,
    ) {
        Ok(r) => r,
        Err(_) => return EnvlockStatus::InputError,
    };
    match write_out(out_table, serde_json::to_string(&rows).unwrap()) {
        Ok(()) => EnvlockStatus::Ok,
        Err(e) => e,
    }
}
