//! Round-trips through the C boundary from Rust, standing in for a C
//! caller: string ownership, handle lifecycle, and status mapping.

use std::ffi::{CStr, CString};
use std::ptr;

use envlock_capi::*;

fn take_string(ptr: *mut std::ffi::c_char) -> String {
    assert!(!ptr.is_null());
    let s = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string();
    envlock_string_free(ptr);
    s
}

#[test]
fn version_is_static_and_nonempty() {
    let v = unsafe { CStr::from_ptr(envlock_version()) }.to_str().unwrap();
    assert!(!v.is_empty());
}

#[test]
fn scenario_handle_lifecycle() {
    let json = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../scenarios/lend-settle.json"
    ))
    .unwrap();
    let c = CString::new(json).unwrap();
    let mut err: *mut std::ffi::c_char = ptr::null_mut();
    let handle = envlock_scenario_parse(c.as_ptr(), &mut err);
    assert!(!handle.is_null());
    assert_eq!(envlock_scenario_set_seed(handle, 1001), EnvlockStatus::Ok);
    let mut report: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(envlock_scenario_run(handle, &mut report), EnvlockStatus::Ok);
    let report = take_string(report);
    assert!(report.contains("\"invariants_ok\":true"));
    envlock_scenario_free(handle);
}

#[test]
fn parse_failure_reports_and_returns_null() {
    let c = CString::new("{\"schema\":\"wrong\"}").unwrap();
    let mut err: *mut std::ffi::c_char = ptr::null_mut();
    let handle = envlock_scenario_parse(c.as_ptr(), &mut err);
    assert!(handle.is_null());
    assert!(!err.is_null());
    let msg = take_string(err);
    assert!(!msg.is_empty());
}

#[test]
fn one_shot_runner_maps_status() {
    let c = CString::new("not json").unwrap();
    let mut out: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(
        envlock_run_scenario_json(c.as_ptr(), &mut out),
        EnvlockStatus::InputError
    );
    take_string(out);
    assert_eq!(
        envlock_run_scenario_json(ptr::null(), &mut out),
        EnvlockStatus::BoundaryMisuse
    );
}

#[test]
fn audits_and_escape_cross_the_boundary() {
    let mut out: *mut std::ffi::c_char = ptr::null_mut();
    let class = CString::new("eip7702").unwrap();
    assert_eq!(envlock_audit_ablm(class.as_ptr(), &mut out), EnvlockStatus::Ok);
    let verdict = take_string(out);
    assert!(verdict.contains("\"verdict\":\"fails\""));

    assert_eq!(envlock_audit_pslm(2, false, &mut out), EnvlockStatus::Ok);
    let verdict = take_string(out);
    assert!(!verdict.contains("\"verdict\":\"fails\""));

    assert_eq!(envlock_ks_escape(class.as_ptr(), &mut out), EnvlockStatus::Ok);
    let trace = take_string(out);
    assert!(trace.contains("\"outside_restriction_scope\":true"));

    let bad = CString::new("multisig").unwrap();
    assert_eq!(
        envlock_ks_escape(bad.as_ptr(), &mut out),
        EnvlockStatus::InputError
    );
}

#[test]
fn tree_evaluation_over_json() {
    let tree = CString::new(
        r#"{"node":"leaf","leaf":{"kind":"time","timestamp":100,"op":"ge"}}"#,
    )
    .unwrap();
    let snap = CString::new(r#"{"block_timestamp":150}"#).unwrap();
    let mut out: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(
        envlock_eval_tree(tree.as_ptr(), snap.as_ptr(), &mut out),
        EnvlockStatus::Ok
    );
    let result = take_string(out);
    assert!(result.contains("\"result\":true"));

    // missing oracle key: rejection, not misuse
    let tree = CString::new(
        r#"{"node":"leaf","leaf":{"kind":"price","oracle_addr":"0xa","asset_pair":"ETH/USD","op":"le","threshold":10}}"#,
    )
    .unwrap();
    assert_eq!(
        envlock_eval_tree(tree.as_ptr(), snap.as_ptr(), &mut out),
        EnvlockStatus::ProtocolRejection
    );
}

#[test]
fn econ_table_rows() {
    let mut out: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(envlock_econ_table(10_000, false, &mut out), EnvlockStatus::Ok);
    let rows = take_string(out);
    assert!(rows.contains("70000.00"));
    assert_eq!(
        envlock_econ_table(0, false, &mut out),
        EnvlockStatus::InputError
    );
}
