//! C ABI over the core library: opaque tree handles, status codes, and
//! string results the caller frees. Every entry point catches panics and
//! reports them as a status; the last error message is kept per thread.

#![allow(non_camel_case_types)]

use arbordyn::embed::{generic_params, GenericMode};
use arbordyn::geometry::{hausdorff_dim, minkowski_dim, DimMode};
use arbordyn::treespec::{make_configuration, ConfigKind, TreeSpec, TreeSpecJson};
use libc::c_char;
use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum arb_status {
    ARB_OK = 0,
    ARB_ERR_NULL_ARG = 1,
    ARB_ERR_UTF8 = 2,
    ARB_ERR_PARSE = 3,
    ARB_ERR_UNSUPPORTED = 4,
    ARB_ERR_PANIC = 5,
}

use arb_status::*;

/// Opaque handle to a parsed tree.
#[repr(C)]
pub struct ArbTree {
    _private: [u8; 0],
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn tree_ref<'a>(tree: *const ArbTree) -> Option<&'a TreeSpec> {
    if tree.is_null() {
        None
    } else {
        // Handles are created exclusively by arb_tree_from_json.
        Some(unsafe { &*(tree as *const TreeSpec) })
    }
}

fn guarded(f: impl FnOnce() -> arb_status) -> arb_status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic".into());
            ARB_ERR_PANIC
        }
    }
}

fn read_str<'a>(p: *const c_char) -> Result<&'a str, arb_status> {
    if p.is_null() {
        set_error("null string argument".into());
        return Err(ARB_ERR_NULL_ARG);
    }
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| {
        set_error("argument is not valid UTF-8".into());
        ARB_ERR_UTF8
    })
}

fn out_string(out: *mut *mut c_char, s: String) -> arb_status {
    let c = match CString::new(s) {
        Ok(c) => c,
        Err(_) => {
            set_error("result contained an interior NUL".into());
            return ARB_ERR_PANIC;
        }
    };
    unsafe { *out = c.into_raw() };
    ARB_OK
}

/// Parses a tree-spec JSON document into a handle. The handle must be
/// released with arb_tree_free.
#[no_mangle]
pub extern "C" fn arb_tree_from_json(json: *const c_char, out: *mut *mut ArbTree) -> arb_status {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer".into());
            return ARB_ERR_NULL_ARG;
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match TreeSpecJson::parse(text).and_then(|j| j.to_spec()) {
            Ok(spec) => {
                let boxed = Box::new(spec);
                unsafe { *out = Box::into_raw(boxed) as *mut ArbTree };
                ARB_OK
            }
            Err(e) => {
                set_error(e.to_string());
                ARB_ERR_PARSE
            }
        }
    })
}

/// Releases a tree handle. Null is ignored.
#[no_mangle]
pub extern "C" fn arb_tree_free(tree: *mut ArbTree) {
    if !tree.is_null() {
        drop(unsafe { Box::from_raw(tree as *mut TreeSpec) });
    }
}

/// Number of vertices at the given level, written as a decimal string.
/// The string must be released with arb_string_free.
#[no_mangle]
pub extern "C" fn arb_tree_level_count(
    tree: *const ArbTree,
    level: usize,
    out: *mut *mut c_char,
) -> arb_status {
    guarded(|| {
        let Some(spec) = tree_ref(tree) else {
            set_error("null tree handle".into());
            return ARB_ERR_NULL_ARG;
        };
        if out.is_null() {
            set_error("null output pointer".into());
            return ARB_ERR_NULL_ARG;
        }
        match spec.level_count(level) {
            Ok(n) => out_string(out, n.to_string()),
            Err(e) => {
                set_error(e.to_string());
                ARB_ERR_UNSUPPORTED
            }
        }
    })
}

/// Releases a string produced by this library. Null is ignored.
#[no_mangle]
pub extern "C" fn arb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Exact box-counting dimension; fails on trees without a closed form.
#[no_mangle]
pub extern "C" fn arb_minkowski_dim_exact(tree: *const ArbTree, out: *mut f64) -> arb_status {
    dim_impl(tree, out, DimMode::Exact)
}

/// Level-count dimension estimate computed down to the given depth.
#[no_mangle]
pub extern "C" fn arb_minkowski_dim_estimate(
    tree: *const ArbTree,
    depth: usize,
    out: *mut f64,
) -> arb_status {
    dim_impl(tree, out, DimMode::Estimate(depth))
}

fn dim_impl(tree: *const ArbTree, out: *mut f64, mode: DimMode) -> arb_status {
    guarded(|| {
        let Some(spec) = tree_ref(tree) else {
            set_error("null tree handle".into());
            return ARB_ERR_NULL_ARG;
        };
        if out.is_null() {
            set_error("null output pointer".into());
            return ARB_ERR_NULL_ARG;
        }
        match minkowski_dim(spec, mode) {
            Ok(d) => {
                unsafe { *out = d.value };
                ARB_OK
            }
            Err(e) => {
                set_error(e.to_string());
                ARB_ERR_UNSUPPORTED
            }
        }
    })
}

/// Hausdorff dimension bracket [lo, hi] from the section bisection.
#[no_mangle]
pub extern "C" fn arb_hausdorff_dim(
    tree: *const ArbTree,
    cut_floor: usize,
    horizon: usize,
    tol: f64,
    out_lo: *mut f64,
    out_hi: *mut f64,
) -> arb_status {
    guarded(|| {
        let Some(spec) = tree_ref(tree) else {
            set_error("null tree handle".into());
            return ARB_ERR_NULL_ARG;
        };
        if out_lo.is_null() || out_hi.is_null() {
            set_error("null output pointer".into());
            return ARB_ERR_NULL_ARG;
        }
        match hausdorff_dim(spec, cut_floor, horizon, tol) {
            Ok(h) => {
                unsafe {
                    *out_lo = h.lo;
                    *out_hi = h.hi;
                }
                ARB_OK
            }
            Err(e) => {
                set_error(e.to_string());
                ARB_ERR_UNSUPPORTED
            }
        }
    })
}

/// Generic parameters of a configuration (shorthand like "F2" or "D2,2"),
/// returned as a JSON array string. mode: 0 = upper density, 1 = Banach.
#[no_mangle]
pub extern "C" fn arb_generic_params(
    tree: *const ArbTree,
    config: *const c_char,
    mode: i32,
    m_max: usize,
    depth: usize,
    out: *mut *mut c_char,
) -> arb_status {
    guarded(|| {
        let Some(spec) = tree_ref(tree) else {
            set_error("null tree handle".into());
            return ARB_ERR_NULL_ARG;
        };
        if out.is_null() {
            set_error("null output pointer".into());
            return ARB_ERR_NULL_ARG;
        }
        let cfg = match read_str(config) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let gm = match mode {
            0 => GenericMode::Upper,
            1 => GenericMode::Banach,
            _ => {
                set_error(format!("unknown mode {mode}; expected 0 or 1"));
                return ARB_ERR_UNSUPPORTED;
            }
        };
        let run = || -> arbordyn::Result<String> {
            let kind = ConfigKind::parse(cfg)?;
            let config = make_configuration(kind, spec.q())?;
            let gp = generic_params(spec, &config, gm, m_max, depth)?;
            let items: Vec<String> = gp.params.iter().map(|m| m.to_string()).collect();
            Ok(format!("[{}]", items.join(",")))
        };
        match run() {
            Ok(s) => out_string(out, s),
            Err(e) => {
                set_error(e.to_string());
                ARB_ERR_UNSUPPORTED
            }
        }
    })
}

/// Last error message on this thread, or null if none. The string must be
/// released with arb_string_free.
#[no_mangle]
pub extern "C" fn arb_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        Some(c) => c.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn arb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
