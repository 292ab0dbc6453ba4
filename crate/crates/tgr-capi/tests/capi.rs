//! Exercise the C ABI from Rust: status codes, payload contents, error
//! reporting, and allocation discipline.

use std::ffi::{CStr, CString};
use std::ptr;

use tgr_capi::*;

fn parse(text: &str) -> *mut TgrWorkspace {
    let c = CString::new(text).unwrap();
    let mut ws: *mut TgrWorkspace = ptr::null_mut();
    let status = unsafe { tgr_workspace_parse(c.as_ptr(), &mut ws) };
    assert_eq!(status, TgrStatus::Ok);
    assert!(!ws.is_null());
    ws
}

fn take_string(ptr: *mut std::ffi::c_char) -> String {
    assert!(!ptr.is_null());
    let s = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string();
    unsafe { tgr_string_free(ptr) };
    s
}

fn fixtures_text() -> String {
    take_string(tgr_fixtures())
}

#[test]
fn parse_and_print_workspace() {
    let ws = parse(&fixtures_text());
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { tgr_workspace_print(ws, &mut out) }, TgrStatus::Ok);
    let printed = take_string(out);
    assert!(printed.contains("graph G1"));
    unsafe { tgr_workspace_free(ws) };
}

#[test]
fn parse_error_reports_message() {
    let c = CString::new("graph G { 1: f(2 root: 1 }").unwrap();
    let mut ws: *mut TgrWorkspace = ptr::null_mut();
    let status = unsafe { tgr_workspace_parse(c.as_ptr(), &mut ws) };
    assert_eq!(status, TgrStatus::ParseError);
    assert!(ws.is_null());
    let err = take_string(tgr_last_error());
    assert!(err.contains("expected"), "{err}");
}

#[test]
fn embed_status_both_ways() {
    let ws = parse(&fixtures_text());
    let prec = CString::new("chain").unwrap();
    let larger = CString::new("G1").unwrap();
    let smaller = CString::new("G2").unwrap();
    let variant = CString::new("final").unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe {
        tgr_embed(ws, prec.as_ptr(), larger.as_ptr(), smaller.as_ptr(), variant.as_ptr(), &mut out)
    };
    assert_eq!(status, TgrStatus::Ok);
    let payload = take_string(out);
    assert!(payload.contains("\"embedded\":true"));

    // The reverse direction fails the property.
    let mut out2 = ptr::null_mut();
    let status2 = unsafe {
        tgr_embed(ws, prec.as_ptr(), smaller.as_ptr(), larger.as_ptr(), variant.as_ptr(), &mut out2)
    };
    assert_eq!(status2, TgrStatus::PropertyFails);
    let payload2 = take_string(out2);
    assert!(payload2.contains("\"embedded\":false"));
    unsafe { tgr_workspace_free(ws) };
}

#[test]
fn unknown_names_and_bad_variant() {
    let ws = parse(&fixtures_text());
    let prec = CString::new("chain").unwrap();
    let nope = CString::new("NOPE").unwrap();
    let smaller = CString::new("G2").unwrap();
    let variant = CString::new("final").unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe {
        tgr_embed(ws, prec.as_ptr(), nope.as_ptr(), smaller.as_ptr(), variant.as_ptr(), &mut out)
    };
    assert_eq!(status, TgrStatus::UnknownName);
    let err = take_string(tgr_last_error());
    assert!(err.contains("NOPE"));

    let bad = CString::new("middle").unwrap();
    let larger = CString::new("G1").unwrap();
    let status = unsafe {
        tgr_embed(ws, prec.as_ptr(), larger.as_ptr(), smaller.as_ptr(), bad.as_ptr(), &mut out)
    };
    assert_eq!(status, TgrStatus::InvalidArgument);
    unsafe { tgr_workspace_free(ws) };
}

#[test]
fn lpo_and_collapse_and_iso() {
    let ws = parse(&fixtures_text());
    let ab = CString::new("ab").unwrap();
    let fab = CString::new("FAB").unwrap();
    let fba = CString::new("FBA").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { tgr_lpo(ws, ab.as_ptr(), fab.as_ptr(), fba.as_ptr(), &mut out) },
        TgrStatus::Ok
    );
    take_string(out);
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { tgr_lpo(ws, ab.as_ptr(), fba.as_ptr(), fab.as_ptr(), &mut out) },
        TgrStatus::PropertyFails
    );
    take_string(out);

    let g1 = CString::new("G1").unwrap();
    let g3 = CString::new("G3").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { tgr_collapse(ws, g1.as_ptr(), g3.as_ptr(), &mut out) },
        TgrStatus::Ok
    );
    assert!(take_string(out).contains("\"collapses\":true"));

    let fs1 = CString::new("Fshared").unwrap();
    let fs2 = CString::new("Fshared2").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { tgr_iso(ws, fs1.as_ptr(), fs2.as_ptr(), &mut out) }, TgrStatus::Ok);
    take_string(out);
    unsafe { tgr_workspace_free(ws) };
}

#[test]
fn orient_rewrite_certify_good_pair() {
    let ws = parse(&fixtures_text());
    let sharing = CString::new("share-aware").unwrap();
    let embedding = CString::new("embedding").unwrap();
    let mut out = ptr::null_mut();
    // The swap rule is incomparable under the sharing precedence, so not
    // every rule decreases.
    let status = unsafe {
        tgr_orient(ws, sharing.as_ptr(), embedding.as_ptr(), false, &mut out)
    };
    assert_eq!(status, TgrStatus::PropertyFails);
    let payload = take_string(out);
    assert!(payload.contains("\"rule\":\"share\",\"verdict\":\"decreasing\""));
    assert!(payload.contains("caveat"));

    let ftree = CString::new("Ftree").unwrap();
    let leftmost = CString::new("leftmost-first").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { tgr_rewrite(ws, ftree.as_ptr(), leftmost.as_ptr(), 10, &mut out) },
        TgrStatus::Ok
    );
    let payload = take_string(out);
    assert!(payload.contains("\"kind\":\"cycle-detected\""));
    assert!(payload.contains("\"first\":1"));

    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe {
            tgr_certify(ws, ftree.as_ptr(), sharing.as_ptr(), embedding.as_ptr(), 10, &mut out)
        },
        TgrStatus::PropertyFails
    );
    assert!(take_string(out).contains("\"descending\":false"));

    let seq = CString::new("loop").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { tgr_good_pair(ws, seq.as_ptr(), sharing.as_ptr(), &mut out) },
        TgrStatus::Ok
    );
    let payload = take_string(out);
    assert!(payload.contains("\"i\":2"));
    assert!(payload.contains("\"j\":3"));
    unsafe { tgr_workspace_free(ws) };
}

#[test]
fn version_and_null_handling() {
    let version = unsafe { CStr::from_ptr(tgr_version()) }.to_str().unwrap();
    assert!(!version.is_empty());
    // Null frees are ignored.
    unsafe {
        tgr_string_free(ptr::null_mut());
        tgr_workspace_free(ptr::null_mut());
    }
    // Null inputs are rejected, not dereferenced.
    let mut ws: *mut TgrWorkspace = ptr::null_mut();
    assert_eq!(
        unsafe { tgr_workspace_parse(ptr::null(), &mut ws) },
        TgrStatus::InvalidArgument
    );
}

#[test]
fn generated_header_exists_and_declares_the_surface() {
    let header = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("tgr.h");
    let text = std::fs::read_to_string(header).expect("cbindgen header generated at build time");
    for needle in [
        "typedef struct TgrWorkspace TgrWorkspace;",
        "tgr_workspace_parse",
        "tgr_embed",
        "tgr_lpo",
        "tgr_good_pair",
        "tgr_string_free",
        "TgrStatus",
    ] {
        assert!(text.contains(needle), "header misses {needle}");
    }
}
