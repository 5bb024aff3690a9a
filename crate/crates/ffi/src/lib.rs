//! C interface to `attrib-core`.
//!
//! Models are opaque handles created from model-spec or DAG text and freed
//! with [`attrib_model_free`]. Every fallible call returns an
//! [`AttribStatus`]; on failure [`attrib_last_error`] gives a message for the
//! calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use attrib_core::model::{method_from_id, DagModel, ModelSpec};
use attrib_core::{shapley_weight, AttribError, QuadratureConfig, ValuePair};

/// Result codes; `ATTRIB_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttribStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Dimension = 4,
    Domain = 5,
    NonConvergence = 6,
    UnknownMethod = 7,
    InvalidArgument = 8,
    Internal = 9,
}

/// Opaque model handle.
pub struct AttribModel {
    spec: ModelSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &AttribError) -> AttribStatus {
    match e {
        AttribError::Parse { .. } | AttribError::Cycle(_) | AttribError::PathCap(_) | AttribError::Input(_) => {
            AttribStatus::Parse
        }
        AttribError::DimensionMismatch { .. } | AttribError::IndexOutOfRange { .. } => AttribStatus::Dimension,
        AttribError::Domain(_) | AttribError::NonFinite(_) | AttribError::Evaluation(_) => AttribStatus::Domain,
        AttribError::UnknownMethod(_) => AttribStatus::UnknownMethod,
        _ => AttribStatus::InvalidArgument,
    }
}

fn fail(e: AttribError) -> AttribStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn guard<F: FnOnce() -> AttribStatus>(f: F) -> AttribStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == AttribStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => {
            set_error("internal panic");
            AttribStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, AttribStatus> {
    if p.is_null() {
        set_error("null string pointer");
        return Err(AttribStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        AttribStatus::InvalidUtf8
    })
}

unsafe fn build_model(
    text: *const c_char,
    out: *mut *mut AttribModel,
    parse: fn(&str) -> Result<ModelSpec, AttribError>,
) -> AttribStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return AttribStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse(text) {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(AttribModel { spec }));
                AttribStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Parses a model spec. On success `*out` owns a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn attrib_model_parse(text: *const c_char, out: *mut *mut AttribModel) -> AttribStatus {
    build_model(text, out, ModelSpec::parse)
}

/// Parses and compiles a DAG model. On success `*out` owns a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn attrib_model_from_dag(text: *const c_char, out: *mut *mut AttribModel) -> AttribStatus {
    build_model(text, out, |t| DagModel::parse(t)?.compile())
}

/// Frees a handle; null is ignored.
///
/// # Safety
/// `model` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn attrib_model_free(model: *mut AttribModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of variables, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn attrib_model_num_vars(model: *const AttribModel) -> usize {
    model.as_ref().map_or(0, |m| m.spec.names().len())
}

/// Copies the NUL-terminated name of variable `index` into `buf`.
///
/// `*needed` receives the buffer size required including the terminator.
/// If `cap` is too small nothing is written and `ATTRIB_STATUS_INVALID_ARGUMENT` is returned.
///
/// # Safety
/// `model` must be a live handle, `buf` writable for `cap` bytes (may be null when `cap` is 0),
/// `needed` null or writable.
#[no_mangle]
pub unsafe extern "C" fn attrib_model_var_name(
    model: *const AttribModel,
    index: usize,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> AttribStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            set_error("null model");
            return AttribStatus::NullPointer;
        };
        let Some(name) = m.spec.names().get(index) else {
            return fail(AttribError::IndexOutOfRange {
                index,
                n: m.spec.names().len(),
            });
        };
        let len = name.len() + 1;
        if !needed.is_null() {
            *needed = len;
        }
        if cap < len || buf.is_null() {
            set_error("buffer too small");
            return AttribStatus::InvalidArgument;
        }
        ptr::copy_nonoverlapping(name.as_ptr(), buf as *mut u8, name.len());
        *buf.add(name.len()) = 0;
        AttribStatus::Ok
    })
}

/// Attributes `f(s) - f(r)` to the model's variables with `method`
/// (`ass`, `ss-brute`, `as-numeric`, `naive`, `value-variant`, `random-order:<file>`).
///
/// `r`, `s` and `z_out` hold `n` doubles in variable order. `residual_out`
/// may be null. When numerical integration does not converge the estimate
/// is still written and `ATTRIB_STATUS_NON_CONVERGENCE` is returned.
///
/// # Safety
/// `model` must be a live handle, `method` a NUL-terminated string, `r` and `s`
/// readable and `z_out` writable for `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn attrib_attribute(
    model: *const AttribModel,
    method: *const c_char,
    r: *const f64,
    s: *const f64,
    n: usize,
    z_out: *mut f64,
    residual_out: *mut f64,
) -> AttribStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            set_error("null model");
            return AttribStatus::NullPointer;
        };
        if r.is_null() || s.is_null() || z_out.is_null() {
            set_error("null array pointer");
            return AttribStatus::NullPointer;
        }
        let method = match read_str(method) {
            Ok(t) => t,
            Err(st) => return st,
        };
        let dim = m.spec.names().len();
        if n != dim {
            return fail(AttribError::DimensionMismatch { expected: dim, found: n });
        }
        let r = std::slice::from_raw_parts(r, n).to_vec();
        let s = std::slice::from_raw_parts(s, n).to_vec();
        let run = || -> Result<_, AttribError> {
            let vp = ValuePair::new(r, s)?;
            let meth = method_from_id(method, &m.spec, QuadratureConfig::default())?;
            meth.attribute(m.spec.function(), &vp)
        };
        match run() {
            Ok(res) => {
                std::slice::from_raw_parts_mut(z_out, n).copy_from_slice(&res.z);
                if !residual_out.is_null() {
                    *residual_out = res.residual;
                }
                if res.converged {
                    AttribStatus::Ok
                } else {
                    set_error("numerical integration did not converge");
                    AttribStatus::NonConvergence
                }
            }
            Err(e) => fail(e),
        }
    })
}

/// Shapley weight `k! (n-1-k)! / n!` for `0 <= k < n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn attrib_shapley_weight(k: usize, n: usize, out: *mut f64) -> AttribStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return AttribStatus::NullPointer;
        }
        match shapley_weight(k, n) {
            Ok(w) => {
                *out = w;
                AttribStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn attrib_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn attrib_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
