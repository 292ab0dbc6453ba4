//! C ABI over the term-graph library.
//!
//! The interface works on an opaque workspace handle parsed from the text
//! format. Queries return a status code and, where meaningful, a
//! heap-allocated JSON string (the same payload shapes the `tgr` command
//! prints with `--json`). Strings returned by this library must be released
//! with [`tgr_string_free`]; workspaces with [`tgr_workspace_free`].
//!
//! Status convention mirrors the command-line exit codes: `Ok` when the
//! queried property holds, `PropertyFails` when the query ran but the
//! property does not hold, and specific error codes otherwise. After any
//! error, [`tgr_last_error`] returns a fresh copy of the message.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use serde_json::{json, Value};

use tgr::embedding::{embeds, Variant};
use tgr::morphism::{collapses, isomorphic, Morphism};
use tgr::orders::{
    certify_derivation, good_pair, lpo_compare, orient_grs, LpoOutcome, OrderKind, Orientation,
    ORIENTATION_CAVEAT,
};
use tgr::graph::TermGraph;
use tgr::parse::{parse_workspace, print_workspace, Workspace};
use tgr::rewriting::{derive, DerivationStatus, Strategy};

/// Result of a call across the C boundary.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TgrStatus {
    /// The call succeeded and the queried property holds.
    Ok = 0,
    /// The call succeeded but the queried property does not hold.
    PropertyFails = 1,
    /// The input text did not parse or validate.
    ParseError = 2,
    /// A graph, rule, precedence, or sequence name is not defined.
    UnknownName = 3,
    /// An argument value (variant, order, strategy, null pointer) is invalid.
    InvalidArgument = 4,
    /// The underlying analysis reported an error.
    EvaluationError = 5,
}

/// Opaque handle to a parsed workspace.
pub struct TgrWorkspace(Workspace);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).ok();
    });
}

fn out_string(out: *mut *mut c_char, value: &str) {
    if !out.is_null() {
        let cstring = CString::new(value).unwrap_or_default();
        unsafe { *out = cstring.into_raw() };
    }
}

unsafe fn required_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, TgrStatus> {
    if ptr.is_null() {
        set_error(format!("{what} must not be null"));
        return Err(TgrStatus::InvalidArgument);
    }
    match unsafe { CStr::from_ptr(ptr) }.to_str() {
        Ok(s) => Ok(s),
        Err(_) => {
            set_error(format!("{what} is not valid UTF-8"));
            Err(TgrStatus::InvalidArgument)
        }
    }
}

fn lookup_graph<'w>(ws: &'w Workspace, name: &str) -> Result<&'w TermGraph, TgrStatus> {
    ws.graphs.get(name).ok_or_else(|| {
        set_error(format!("graph {name} is not defined"));
        TgrStatus::UnknownName
    })
}

fn lookup_precedence(ws: &Workspace, name: &str) -> Result<tgr::tops::Precedence, TgrStatus> {
    ws.precedence(name).map_err(|e| {
        set_error(e.to_string());
        TgrStatus::UnknownName
    })
}

fn witness_value(from: &TermGraph, to: &TermGraph, m: &Morphism) -> Value {
    Value::Array(
        m.map
            .iter()
            .map(|(a, b)| json!([from.name(*a), to.name(*b)]))
            .collect(),
    )
}

/// The most recent error message on this thread, or null. The caller owns
/// the returned string and must release it with [`tgr_string_free`].
#[no_mangle]
pub extern "C" fn tgr_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Release a string allocated by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by a `tgr_*` function and not
/// yet freed; null is accepted and ignored.
#[no_mangle]
pub unsafe extern "C" fn tgr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parse workspace text. On success stores a fresh handle in `out` and
/// returns `Ok`.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be a valid
/// location to store a pointer.
#[no_mangle]
pub unsafe extern "C" fn tgr_workspace_parse(
    text: *const c_char,
    out: *mut *mut TgrWorkspace,
) -> TgrStatus {
    if out.is_null() {
        set_error("out must not be null");
        return TgrStatus::InvalidArgument;
    }
    let text = match unsafe { required_str(text, "text") } {
        Ok(t) => t,
        Err(status) => return status,
    };
    match parse_workspace(text) {
        Ok(ws) => {
            unsafe { *out = Box::into_raw(Box::new(TgrWorkspace(ws))) };
            TgrStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            TgrStatus::ParseError
        }
    }
}

/// Release a workspace handle.
///
/// # Safety
/// `ws` must be a handle from [`tgr_workspace_parse`] not yet freed; null is
/// accepted and ignored.
#[no_mangle]
pub unsafe extern "C" fn tgr_workspace_free(ws: *mut TgrWorkspace) {
    if !ws.is_null() {
        drop(unsafe { Box::from_raw(ws) });
    }
}

/// Canonical text of the workspace.
///
/// # Safety
/// `ws` must be a live workspace handle; `out` a valid store location.
#[no_mangle]
pub unsafe extern "C" fn tgr_workspace_print(
    ws: *const TgrWorkspace,
    out: *mut *mut c_char,
) -> TgrStatus {
    let Some(ws) = (unsafe { ws.as_ref() }) else {
        set_error("workspace must not be null");
        return TgrStatus::InvalidArgument;
    };
    out_string(out, &print_workspace(&ws.0));
    TgrStatus::Ok
}

/// Does `larger` embed `smaller` under the named precedence and variant
/// (`final`, `attempt1`, `attempt2`)? JSON result in `out`.
///
/// # Safety
/// All pointers must be valid as described on [`tgr_workspace_parse`].
#[no_mangle]
pub unsafe extern "C" fn tgr_embed(
    ws: *const TgrWorkspace,
    prec: *const c_char,
    larger: *const c_char,
    smaller: *const c_char,
    variant: *const c_char,
    out: *mut *mut c_char,
) -> TgrStatus {
    let Some(ws) = (unsafe { ws.as_ref() }) else {
        set_error("workspace must not be null");
        return TgrStatus::InvalidArgument;
    };
    let (prec, larger, smaller, variant) = unsafe {
        match (
            required_str(prec, "prec"),
            required_str(larger, "larger"),
            required_str(smaller, "smaller"),
            required_str(variant, "variant"),
        ) {
            (Ok(a), Ok(b), Ok(c), Ok(d)) => (a, b, c, d),
            (Err(s), _, _, _) | (_, Err(s), _, _) | (_, _, Err(s), _) | (_, _, _, Err(s)) => {
                return s
            }
        }
    };
    let v = match variant {
        "final" => Variant::Final,
        "attempt1" => Variant::Attempt1,
        "attempt2" => Variant::Attempt2,
        other => {
            set_error(format!("unknown variant {other}"));
            return TgrStatus::InvalidArgument;
        }
    };
    let p = match lookup_precedence(&ws.0, prec) {
        Ok(p) => p,
        Err(s) => return s,
    };
    let (s, t) = match (lookup_graph(&ws.0, larger), lookup_graph(&ws.0, smaller)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return e,
    };
    match embeds(s, t, &p, v) {
        Ok(witness) => {
            let map = match (&witness, v) {
                (Some(w), Variant::Attempt1) => witness_value(t, s, &w.morphism),
                (Some(w), _) => witness_value(s, t, &w.morphism),
                (None, _) => json!([]),
            };
            let embedded = witness.is_some();
            out_string(
                out,
                &json!({
                    "command": "embed",
                    "larger": larger,
                    "smaller": smaller,
                    "variant": v.as_str(),
                    "precedence": prec,
                    "embedded": embedded,
                    "witness": map,
                })
                .to_string(),
            );
            if embedded {
                TgrStatus::Ok
            } else {
                TgrStatus::PropertyFails
            }
        }
        Err(e) => {
            set_error(e.to_string());
            TgrStatus::EvaluationError
        }
    }
}

/// Does `from` collapse to `to`? JSON result in `out`.
///
/// # Safety
/// All pointers must be valid as described on [`tgr_workspace_parse`].
#[no_mangle]
pub unsafe extern "C" fn tgr_collapse(
    ws: *const TgrWorkspace,
    from: *const c_char,
    to: *const c_char,
    out: *mut *mut c_char,
) -> TgrStatus {
    let Some(ws) = (unsafe { ws.as_ref() }) else {
        set_error("workspace must not be null");
        return TgrStatus::InvalidArgument;
    };
    let (from, to) = unsafe {
        match (required_str(from, "from"), required_str(to, "to")) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        }
    };
    let (g, h) = match (lookup_graph(&ws.0, from), lookup_graph(&ws.0, to)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return e,
    };
    let witness = collapses(g, h);
    out_string(
        out,
        &json!({
            "command": "collapse",
            "from": from,
            "to": to,
            "collapses": witness.is_some(),
            "witness": witness.as_ref().map(|m| witness_value(g, h, m)).unwrap_or(json!([])),
        })
        .to_string(),
    );
    if witness.is_some() {
        TgrStatus::Ok
    } else {
        TgrStatus::PropertyFails
    }
}

/// Are two graphs isomorphic?
///
/// # Safety
/// All pointers must be valid as described on [`tgr_workspace_parse`].
#[no_mangle]
pub unsafe extern "C" fn tgr_iso(
    ws: *const TgrWorkspace,
    left: *const c_char,
    right: *const c_char,
    out: *mut *mut c_char,
) -> TgrStatus {
    let Some(ws) = (unsafe { ws.as_ref() }) else {
        set_error("workspace must not be null");
        return TgrStatus::InvalidArgument;
    };
    let (left, right) = unsafe {
        match (required_str(left, "left"), required_str(right, "right")) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        }
    };
    let (g, h) = match (lookup_graph(&ws.0, left), lookup_graph(&ws.0, right)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return e,
    };
    let iso = isomorphic(g, h);
    out_string(
        out,
        &json!({ "command": "iso", "left": left, "right": right, "isomorphic": iso })
            .to_string(),
    );
    if iso {
        TgrStatus::Ok
    } else {
        TgrStatus::PropertyFails
    }
}

/// Is `smaller` strictly below `larger` in the path order?
///
/// # Safety
/// All pointers must be valid as described on [`tgr_workspace_parse`].
#[no_mangle]
pub unsafe extern "C" fn tgr_lpo(
    ws: *const TgrWorkspace,
    prec: *const c_char,
    smaller: *const c_char,
    larger: *const c_char,
    out: *mut *mut c_char,
) -> TgrStatus {
    let Some(ws) = (unsafe { ws.as_ref() }) else {
        set_error("workspace must not be null");
        return TgrStatus::InvalidArgument;
    };
    let (prec, smaller, larger) = unsafe {
        match (
            required_str(prec, "prec"),
            required_str(smaller, "smaller"),
            required_str(larger, "larger"),
        ) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            (Err(s), _, _) | (_, Err(s), _) | (_, _, Err(s)) => return s,
        }
    };
    let p = match lookup_precedence(&ws.0, prec) {
        Ok(p) => p,
        Err(s) => return s,
    };
    let (t, s) = match (lookup_graph(&ws.0, smaller), lookup_graph(&ws.0, larger)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return e,
    };
    match lpo_compare(t.dag(), s.dag(), &p) {
        Ok(outcome) => {
            let (word, reason) = match &outcome {
                LpoOutcome::Holds => ("holds", None),
                LpoOutcome::Fails => ("fails", None),
                LpoOutcome::Inapplicable(r) => ("inapplicable", Some(r.clone())),
            };
            out_string(
                out,
                &json!({
                    "command": "lpo",
                    "smaller": smaller,
                    "larger": larger,
                    "precedence": prec,
                    "outcome": word,
                    "reason": reason,
                })
                .to_string(),
            );
            if outcome.holds() {
                TgrStatus::Ok
            } else {
                TgrStatus::PropertyFails
            }
        }
        Err(e) => {
            set_error(e.to_string());
            TgrStatus::EvaluationError
        }
    }
}

/// Orient all rules of the workspace; `order` is `lpo` or `embedding`.
/// Returns `Ok` when every rule is decreasing.
///
/// # Safety
/// All pointers must be valid as described on [`tgr_workspace_parse`].
#[no_mangle]
pub unsafe extern "C" fn tgr_orient(
    ws: *const TgrWorkspace,
    prec: *const c_char,
    order: *const c_char,
    vars_as_constants: bool,
    out: *mut *mut c_char,
) -> TgrStatus {
    let Some(ws) = (unsafe { ws.as_ref() }) else {
        set_error("workspace must not be null");
        return TgrStatus::InvalidArgument;
    };
    let (prec, order) = unsafe {
        match (required_str(prec, "prec"), required_str(order, "order")) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        }
    };
    let kind = match order {
        "lpo" => OrderKind::Lpo,
        "embedding" => OrderKind::StrictEmbedding,
        other => {
            set_error(format!("unknown order {other} (lpo, embedding)"));
            return TgrStatus::InvalidArgument;
        }
    };
    let p = match lookup_precedence(&ws.0, prec) {
        Ok(p) => p,
        Err(s) => return s,
    };
    match orient_grs(&ws.0.grs(), &p, vars_as_constants, kind) {
        Ok(verdicts) => {
            let all = verdicts.iter().all(|v| matches!(v.verdict, Orientation::Decreasing));
            let rules: Vec<Value> = verdicts
                .iter()
                .map(|v| {
                    let (word, reason) = match &v.verdict {
                        Orientation::Decreasing => ("decreasing", None),
                        Orientation::Increasing => ("increasing", None),
                        Orientation::Incomparable => ("incomparable", None),
                        Orientation::Inapplicable(r) => ("inapplicable", Some(r.clone())),
                    };
                    json!({ "rule": v.rule, "verdict": word, "reason": reason })
                })
                .collect();
            out_string(
                out,
                &json!({
                    "command": "orient",
                    "precedence": prec,
                    "order": order,
                    "rules": rules,
                    "all_decreasing": all,
                    "caveat": ORIENTATION_CAVEAT,
                })
                .to_string(),
            );
            if all {
                TgrStatus::Ok
            } else {
                TgrStatus::PropertyFails
            }
        }
        Err(e) => {
            set_error(e.to_string());
            TgrStatus::EvaluationError
        }
    }
}

/// Derive from a graph with the workspace rules; `strategy` is
/// `leftmost-first` or `all-first`. Always `Ok` on success, with the
/// terminal status in the JSON payload.
///
/// # Safety
/// All pointers must be valid as described on [`tgr_workspace_parse`].
#[no_mangle]
pub unsafe extern "C" fn tgr_rewrite(
    ws: *const TgrWorkspace,
    graph: *const c_char,
    strategy: *const c_char,
    max_steps: usize,
    out: *mut *mut c_char,
) -> TgrStatus {
    let Some(ws) = (unsafe { ws.as_ref() }) else {
        set_error("workspace must not be null");
        return TgrStatus::InvalidArgument;
    };
    let (graph, strategy) = unsafe {
        match (required_str(graph, "graph"), required_str(strategy, "strategy")) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        }
    };
    let strat = match strategy {
        "leftmost-first" => Strategy::LeftmostFirst,
        "all-first" => Strategy::AllFirst,
        other => {
            set_error(format!("unknown strategy {other}"));
            return TgrStatus::InvalidArgument;
        }
    };
    let start = match lookup_graph(&ws.0, graph) {
        Ok(g) => g,
        Err(e) => return e,
    };
    let d = derive(start, &ws.0.grs(), strat, max_steps);
    let status = match d.status {
        DerivationStatus::NormalForm => json!({ "kind": "normal-form" }),
        DerivationStatus::BudgetExhausted => json!({ "kind": "budget-exhausted" }),
        DerivationStatus::CycleDetected(i, j) => {
            json!({ "kind": "cycle-detected", "first": i, "second": j })
        }
    };
    let steps: Vec<Value> = d
        .steps
        .iter()
        .enumerate()
        .map(|(k, (rule, node))| {
            json!({ "index": k + 1, "rule": rule, "node": d.graphs[k].name(*node) })
        })
        .collect();
    out_string(
        out,
        &json!({
            "command": "rewrite",
            "start": graph,
            "status": status,
            "steps": steps,
            "final": tgr::parse::graph_text("result", d.graphs.last().unwrap()),
        })
        .to_string(),
    );
    TgrStatus::Ok
}

/// Derive and certify every step for strict descent; `order` is `lpo` or
/// `embedding`. `Ok` when the derivation is descending.
///
/// # Safety
/// All pointers must be valid as described on [`tgr_workspace_parse`].
#[no_mangle]
pub unsafe extern "C" fn tgr_certify(
    ws: *const TgrWorkspace,
    graph: *const c_char,
    prec: *const c_char,
    order: *const c_char,
    max_steps: usize,
    out: *mut *mut c_char,
) -> TgrStatus {
    let Some(ws) = (unsafe { ws.as_ref() }) else {
        set_error("workspace must not be null");
        return TgrStatus::InvalidArgument;
    };
    let (graph, prec, order) = unsafe {
        match (
            required_str(graph, "graph"),
            required_str(prec, "prec"),
            required_str(order, "order"),
        ) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            (Err(s), _, _) | (_, Err(s), _) | (_, _, Err(s)) => return s,
        }
    };
    let kind = match order {
        "lpo" => OrderKind::Lpo,
        "embedding" => OrderKind::StrictEmbedding,
        other => {
            set_error(format!("unknown order {other} (lpo, embedding)"));
            return TgrStatus::InvalidArgument;
        }
    };
    let p = match lookup_precedence(&ws.0, prec) {
        Ok(p) => p,
        Err(s) => return s,
    };
    let start = match lookup_graph(&ws.0, graph) {
        Ok(g) => g,
        Err(e) => return e,
    };
    let d = derive(start, &ws.0.grs(), Strategy::LeftmostFirst, max_steps);
    match certify_derivation(&d, &p, kind) {
        Ok(cert) => {
            let steps: Vec<Value> = cert
                .steps
                .iter()
                .map(|s| {
                    json!({
                        "index": s.index,
                        "rule": s.rule,
                        "decreasing": s.decreasing,
                        "note": s.note,
                    })
                })
                .collect();
            out_string(
                out,
                &json!({
                    "command": "certify",
                    "start": graph,
                    "order": order,
                    "precedence": prec,
                    "steps": steps,
                    "descending": cert.descending,
                })
                .to_string(),
            );
            if cert.descending {
                TgrStatus::Ok
            } else {
                TgrStatus::PropertyFails
            }
        }
        Err(e) => {
            set_error(e.to_string());
            TgrStatus::EvaluationError
        }
    }
}

/// Find the least good pair of a declared sequence. `Ok` when one exists.
///
/// # Safety
/// All pointers must be valid as described on [`tgr_workspace_parse`].
#[no_mangle]
pub unsafe extern "C" fn tgr_good_pair(
    ws: *const TgrWorkspace,
    sequence: *const c_char,
    prec: *const c_char,
    out: *mut *mut c_char,
) -> TgrStatus {
    let Some(ws) = (unsafe { ws.as_ref() }) else {
        set_error("workspace must not be null");
        return TgrStatus::InvalidArgument;
    };
    let (sequence, prec) = unsafe {
        match (required_str(sequence, "sequence"), required_str(prec, "prec")) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        }
    };
    let p = match lookup_precedence(&ws.0, prec) {
        Ok(p) => p,
        Err(s) => return s,
    };
    let Some(names) = ws.0.sequences.get(sequence) else {
        set_error(format!("sequence {sequence} is not defined"));
        return TgrStatus::UnknownName;
    };
    let mut graphs = Vec::new();
    for n in names {
        match lookup_graph(&ws.0, n) {
            Ok(g) => graphs.push(g.clone()),
            Err(e) => return e,
        }
    }
    match good_pair(&graphs, &p) {
        Ok(result) => {
            let payload = match &result {
                Some(gp) => json!({
                    "command": "good-pair",
                    "sequence": sequence,
                    "precedence": prec,
                    "good": true,
                    "i": gp.i,
                    "j": gp.j,
                    "witness": witness_value(
                        &graphs[gp.j - 1],
                        &graphs[gp.i - 1],
                        &gp.witness.morphism,
                    ),
                }),
                None => json!({
                    "command": "good-pair",
                    "sequence": sequence,
                    "precedence": prec,
                    "good": false,
                }),
            };
            out_string(out, &payload.to_string());
            if result.is_some() {
                TgrStatus::Ok
            } else {
                TgrStatus::PropertyFails
            }
        }
        Err(e) => {
            set_error(e.to_string());
            TgrStatus::EvaluationError
        }
    }
}

/// The built-in fixture file text; release with [`tgr_string_free`].
#[no_mangle]
pub extern "C" fn tgr_fixtures() -> *mut c_char {
    CString::new(include_str!("../../../fixtures/examples.tg"))
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn tgr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
