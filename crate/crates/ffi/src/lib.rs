//! C ABI over the `orient-avoid` solver.
//!
//! Handles are opaque and owned by the caller once returned; free them with
//! the matching `*_free` function. Every fallible call returns an
//! [`OaStatus`] and records a message readable through
//! [`oa_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use orient_avoid::constraints::{ConstraintMap, DegreeSet};
use orient_avoid::decision::DecideOptions;
use orient_avoid::graph::MultiGraph;
use orient_avoid::io::{self, InstanceError};
use orient_avoid::orientation::Orientation;
use orient_avoid::Instance;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OaStatus {
    Ok = 0,
    /// A required pointer was null or a string was not UTF-8.
    InvalidArgument = 1,
    /// The instance text or arrays could not be parsed into a graph.
    ParseError = 2,
    /// Some forbidden set contains two consecutive values, or is everything.
    DensityViolation = 3,
    /// A vertex or edge index is out of range.
    OutOfRange = 4,
    /// The result has no orientation because none exists.
    NoOrientation = 5,
    /// A result file did not check out against its instance.
    VerifyFailed = 6,
    /// A bug in the solver; the message has details.
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OaVerdict {
    Exists = 0,
    NotExists = 1,
}

/// A multigraph with allowed out-degree sets.
pub struct OaInstance {
    inner: Instance,
}

/// Outcome of [`oa_orient`].
pub struct OaResult {
    exists: bool,
    tails: Option<Vec<usize>>,
    json: String,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("interior NULs removed"));
}

fn fail(status: OaStatus, msg: impl Into<String>) -> OaStatus {
    set_error(msg);
    status
}

fn instance_status(e: &InstanceError) -> OaStatus {
    match e {
        InstanceError::DensityViolation(_) | InstanceError::Constraint(_) => OaStatus::DensityViolation,
        _ => OaStatus::ParseError,
    }
}

/// Runs `f`, turning panics into [`OaStatus::Internal`].
fn guard(f: impl FnOnce() -> OaStatus) -> OaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == OaStatus::Ok {
                set_error("");
            }
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            fail(OaStatus::Internal, msg)
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, OaStatus> {
    if p.is_null() {
        return Err(fail(OaStatus::InvalidArgument, "null string"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(OaStatus::InvalidArgument, "string is not UTF-8"))
}

fn emit<T>(out: *mut *mut T, value: T) -> OaStatus {
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    OaStatus::Ok
}

/// Parses an instance in the JSON or edge-list format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oa_instance_from_json(text: *const c_char, out: *mut *mut OaInstance) -> OaStatus {
    guard(|| {
        if out.is_null() {
            return fail(OaStatus::InvalidArgument, "null output pointer");
        }
        let text = match str_arg(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match io::parse_instance(text) {
            Ok(inner) => emit(out, OaInstance { inner }),
            Err(e) => fail(instance_status(&e), e.to_json().to_string()),
        }
    })
}

/// Builds an unconstrained instance from `edge_count` pairs stored flat in
/// `edges` (`2 * edge_count` entries).
///
/// # Safety
/// `edges` must point to `2 * edge_count` readable values (or be null when
/// `edge_count` is 0), and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oa_instance_from_edges(
    vertex_count: usize,
    edges: *const usize,
    edge_count: usize,
    out: *mut *mut OaInstance,
) -> OaStatus {
    guard(|| {
        if out.is_null() || (edges.is_null() && edge_count > 0) {
            return fail(OaStatus::InvalidArgument, "null pointer");
        }
        let flat = if edge_count == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(edges, 2 * edge_count)
        };
        let pairs: Vec<(usize, usize)> = flat.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        match MultiGraph::build(vertex_count, &pairs) {
            Ok(graph) => {
                let constraints = ConstraintMap::unconstrained(&graph);
                emit(
                    out,
                    OaInstance {
                        inner: Instance::new(graph, constraints),
                    },
                )
            }
            Err(e) => fail(OaStatus::ParseError, e.to_string()),
        }
    })
}

/// Replaces `H(vertex)` with the given values. Values above the degree are
/// ignored. The instance is unchanged if the new set is not dense.
///
/// # Safety
/// `inst` must come from this library; `values` must point to `len` values
/// (or be null when `len` is 0).
#[no_mangle]
pub unsafe extern "C" fn oa_instance_set_allowed(
    inst: *mut OaInstance,
    vertex: usize,
    values: *const usize,
    len: usize,
) -> OaStatus {
    guard(|| {
        let Some(inst) = inst.as_mut() else {
            return fail(OaStatus::InvalidArgument, "null instance");
        };
        if values.is_null() && len > 0 {
            return fail(OaStatus::InvalidArgument, "null values");
        }
        let g = &inst.inner.graph;
        if vertex >= g.vertex_count() {
            return fail(OaStatus::OutOfRange, format!("vertex {vertex} out of range"));
        }
        let values = if len == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(values, len)
        };
        let mut h = inst.inner.constraints.clone();
        *h.allowed_mut(vertex) = DegreeSet::from_values(g.degree(vertex), values.iter().copied());
        let violations = h.validate_sets(g);
        if !violations.is_empty() {
            let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
            return fail(OaStatus::DensityViolation, text.join("; "));
        }
        inst.inner.constraints = h;
        OaStatus::Ok
    })
}

/// # Safety
/// `inst` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn oa_instance_vertex_count(inst: *const OaInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.graph.vertex_count())
}

/// # Safety
/// `inst` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn oa_instance_edge_count(inst: *const OaInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.graph.edge_count())
}

/// # Safety
/// `inst` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn oa_instance_free(inst: *mut OaInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Decides existence without constructing anything.
///
/// # Safety
/// `inst` must come from this library and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oa_decide(inst: *const OaInstance, out: *mut OaVerdict) -> OaStatus {
    guard(|| {
        let (Some(inst), false) = (inst.as_ref(), out.is_null()) else {
            return fail(OaStatus::InvalidArgument, "null pointer");
        };
        match io::solve(&inst.inner, &DecideOptions::default(), false) {
            Ok(sol) => {
                *out = if sol.exists() {
                    OaVerdict::Exists
                } else {
                    OaVerdict::NotExists
                };
                OaStatus::Ok
            }
            Err(e) => fail(OaStatus::Internal, e.to_string()),
        }
    })
}

/// Builds an orientation or a certificate that none exists.
///
/// # Safety
/// `inst` must come from this library and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oa_orient(inst: *const OaInstance, out: *mut *mut OaResult) -> OaStatus {
    guard(|| {
        let (Some(inst), false) = (inst.as_ref(), out.is_null()) else {
            return fail(OaStatus::InvalidArgument, "null pointer");
        };
        let sol = match io::solve(&inst.inner, &DecideOptions::default(), true) {
            Ok(s) => s,
            Err(e) => return fail(OaStatus::Internal, e.to_string()),
        };
        let g = &inst.inner.graph;
        let tails = io::merged_orientation(&inst.inner, &sol)
            .map(|o: Orientation| (0..g.edge_count()).map(|e| o.tail(g, e)).collect());
        emit(
            out,
            OaResult {
                exists: sol.exists(),
                tails,
                json: io::to_pretty(&io::result_json(&inst.inner, &sol)),
            },
        )
    })
}

/// # Safety
/// `res` must come from [`oa_orient`].
#[no_mangle]
pub unsafe extern "C" fn oa_result_verdict(res: *const OaResult) -> OaVerdict {
    match res.as_ref() {
        Some(r) if r.exists => OaVerdict::Exists,
        _ => OaVerdict::NotExists,
    }
}

/// Tail of `edge` in the constructed orientation.
///
/// # Safety
/// `res` must come from [`oa_orient`] and `tail` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oa_result_edge_tail(res: *const OaResult, edge: usize, tail: *mut usize) -> OaStatus {
    guard(|| {
        let (Some(res), false) = (res.as_ref(), tail.is_null()) else {
            return fail(OaStatus::InvalidArgument, "null pointer");
        };
        let Some(tails) = &res.tails else {
            return fail(OaStatus::NoOrientation, "no orientation exists");
        };
        match tails.get(edge) {
            Some(&t) => {
                *tail = t;
                OaStatus::Ok
            }
            None => fail(OaStatus::OutOfRange, format!("edge {edge} out of range")),
        }
    })
}

/// Result file text; release it with [`oa_string_free`].
///
/// # Safety
/// `res` must come from [`oa_orient`].
#[no_mangle]
pub unsafe extern "C" fn oa_result_to_json(res: *const OaResult) -> *mut c_char {
    match res.as_ref() {
        Some(r) => CString::new(r.json.clone()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `res` must come from [`oa_orient`] or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn oa_result_free(res: *mut OaResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

/// # Safety
/// `s` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn oa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Checks a result file against `inst`: [`OaStatus::Ok`] if the orientation
/// or certificate holds, [`OaStatus::VerifyFailed`] otherwise.
///
/// # Safety
/// `inst` must come from this library and `json` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn oa_verify_result_json(inst: *const OaInstance, json: *const c_char) -> OaStatus {
    guard(|| {
        let Some(inst) = inst.as_ref() else {
            return fail(OaStatus::InvalidArgument, "null instance");
        };
        let text = match str_arg(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let value: serde_json::Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => return fail(OaStatus::ParseError, e.to_string()),
        };
        match io::verify_result(&inst.inner, &value) {
            Ok(()) => OaStatus::Ok,
            Err(e) => fail(OaStatus::VerifyFailed, e.to_string()),
        }
    })
}

/// Message for the last failed call on this thread, empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn oa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static.
#[no_mangle]
pub extern "C" fn oa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
