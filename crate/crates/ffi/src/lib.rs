//! C ABI for the target-controllability analysis library.
//!
//! Conventions: graphs are opaque handles created by [`nc_graph_parse`]
//! and released with [`nc_graph_free`]; strings returned through out
//! parameters are NUL-terminated, allocated by this library, and must be
//! released with [`nc_string_free`]; every fallible call returns an
//! [`NcStatus`] and leaves a human-readable message readable via
//! [`nc_last_error`] on failure. The generated header lives in
//! `include/netctrl.h`.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use netctrl::extensions::GeneralLinearSpec;
use netctrl::graph::Graph;
use netctrl::report::{self, AnalyzeOptions};
use netctrl::steering::{simulate_high_order, steer, SteeringProblem};
use netctrl::Error;

/// Status code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NcStatus {
    NcOk = 0,
    /// A required pointer argument was NULL.
    NcNullPointer = 1,
    /// A string argument was not valid UTF-8.
    NcInvalidUtf8 = 2,
    /// The graph or sidecar text failed to parse or validate.
    NcParseError = 3,
    /// An argument was out of range or dimensionally inconsistent.
    NcInvalidArgument = 4,
    /// A floating-point kernel failed (non-convergence or overflow).
    NcNumericError = 5,
    /// Steering refused: the output Gramian is singular.
    NcSingularGramian = 6,
    /// Unexpected internal failure.
    NcInternalError = 7,
}

/// Opaque graph handle.
pub struct NcGraph {
    inner: Graph,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> NcStatus {
    match err {
        Error::Parse { .. } | Error::InvalidGraph(_) | Error::Sidecar(_) => NcStatus::NcParseError,
        Error::Dimension(_) | Error::InvalidArgument(_) => NcStatus::NcInvalidArgument,
        Error::NonConvergence(_) | Error::Overflow(_) => NcStatus::NcNumericError,
        Error::SingularGramian(_) => NcStatus::NcSingularGramian,
        Error::CrossCheck(_) | Error::Io(_) => NcStatus::NcInternalError,
    }
}

fn fail(err: &Error) -> NcStatus {
    set_error(&err.to_string());
    status_of(err)
}

fn guard(body: impl FnOnce() -> NcStatus) -> NcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            NcStatus::NcInternalError
        }
    }
}

unsafe fn read_utf8<'a>(ptr: *const c_char) -> Result<&'a str, NcStatus> {
    if ptr.is_null() {
        set_error("NULL string argument");
        return Err(NcStatus::NcNullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        NcStatus::NcInvalidUtf8
    })
}

fn hand_out_string(text: String, out: *mut *mut c_char) -> NcStatus {
    match CString::new(text) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            NcStatus::NcOk
        }
        Err(_) => {
            set_error("output contained an interior NUL byte");
            NcStatus::NcInternalError
        }
    }
}

/// Library version as a static NUL-terminated string; never freed.
#[no_mangle]
pub extern "C" fn nc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the most recent error on this thread. The pointer stays
/// valid until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn nc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parses a graph from UTF-8 text in the edge-list format and stores a new
/// handle in `out`.
///
/// # Safety
/// `text` must point to a NUL-terminated string and `out` to a writable
/// pointer slot; on success the caller owns the handle and must release it
/// with [`nc_graph_free`].
#[no_mangle]
pub unsafe extern "C" fn nc_graph_parse(text: *const c_char, out: *mut *mut NcGraph) -> NcStatus {
    guard(|| {
        if out.is_null() {
            set_error("NULL output slot");
            return NcStatus::NcNullPointer;
        }
        let text = match read_utf8(text) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match Graph::parse(text) {
            Ok(graph) => {
                *out = Box::into_raw(Box::new(NcGraph { inner: graph }));
                NcStatus::NcOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a graph handle; NULL is ignored.
///
/// # Safety
/// `graph` must be NULL or a handle from [`nc_graph_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nc_graph_free(graph: *mut NcGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Node count of a graph handle; 0 if the handle is NULL.
///
/// # Safety
/// `graph` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nc_graph_node_count(graph: *const NcGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.node_count())
}

/// Runs the full analysis and stores the JSON report in `out_json`.
/// `general_linear_json` may be NULL or a sidecar spec for general linear
/// agent dynamics.
///
/// # Safety
/// `graph` must be a live handle; `out_json` a writable pointer slot; the
/// returned string must be released with [`nc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn nc_analyze_json(
    graph: *const NcGraph,
    general_linear_json: *const c_char,
    out_json: *mut *mut c_char,
) -> NcStatus {
    guard(|| {
        if graph.is_null() || out_json.is_null() {
            set_error("NULL argument");
            return NcStatus::NcNullPointer;
        }
        let spec = if general_linear_json.is_null() {
            None
        } else {
            let text = match read_utf8(general_linear_json) {
                Ok(t) => t,
                Err(status) => return status,
            };
            match GeneralLinearSpec::from_json(text) {
                Ok(s) => Some(s),
                Err(e) => return fail(&e),
            }
        };
        let g = &(*graph).inner;
        match report::analyze(g, spec.as_ref(), &AnalyzeOptions::default()) {
            Ok(r) => hand_out_string(report::to_json(&r), out_json),
            Err(e) => fail(&e),
        }
    })
}

/// Exit-code style verdict of the full analysis: 0 target controllable,
/// 3 not, -1 on error (see [`nc_last_error`]).
///
/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nc_analyze_verdict(graph: *const NcGraph) -> c_int {
    let mut code = -1;
    let status = guard(|| {
        if graph.is_null() {
            set_error("NULL graph");
            return NcStatus::NcNullPointer;
        }
        let g = &(*graph).inner;
        match report::analyze(g, None, &AnalyzeOptions::default()) {
            Ok(r) => {
                code = r.verdict.exit_code;
                NcStatus::NcOk
            }
            Err(e) => fail(&e),
        }
    });
    if status == NcStatus::NcOk {
        code
    } else {
        -1
    }
}

/// Steers the target outputs to `yf` (length `yf_len` = the target count,
/// for any `order`) from the zero initial state and stores the trajectory
/// CSV in `out_csv`.
///
/// # Safety
/// `graph` must be a live handle, `yf` must point to `yf_len` doubles,
/// and `out_csv` to a writable pointer slot; release the string with
/// [`nc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn nc_simulate_csv(
    graph: *const NcGraph,
    order: usize,
    yf: *const c_double,
    yf_len: usize,
    tf: c_double,
    steps: usize,
    out_csv: *mut *mut c_char,
) -> NcStatus {
    guard(|| {
        if graph.is_null() || yf.is_null() || out_csv.is_null() {
            set_error("NULL argument");
            return NcStatus::NcNullPointer;
        }
        let g = &(*graph).inner;
        let yf = std::slice::from_raw_parts(yf, yf_len).to_vec();
        let t = g.system_triple();
        let order = order.max(1);
        let x0 = vec![0.0; g.node_count() * order];
        let result = if order == 1 {
            match SteeringProblem::new(&t, x0, yf, tf, steps) {
                Ok(p) => steer(&p),
                Err(e) => return fail(&e),
            }
        } else {
            simulate_high_order(&t, order, x0, yf, tf, steps)
        };
        match result {
            Ok(traj) => hand_out_string(traj.to_csv(), out_csv),
            Err(e) => fail(&e),
        }
    })
}

/// Releases a string returned by this library; NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
