//! C interface to `gl2skein`.
//!
//! Elements live behind opaque handles owned by the caller and released with the
//! matching `*_free`. Every fallible call returns a [`Gl2Status`]; the message of
//! the last failure on the calling thread is available from [`gl2_last_error`].
//! Strings returned through `out` parameters are released with [`gl2_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use gl2skein::action::{act, project};
use gl2skein::annulus::AnnulusElement;
use gl2skein::cli::reduction_json;
use gl2skein::lang::{parse_annulus, parse_lens, parse_torus, print_annulus, print_torus, LangError};
use gl2skein::lens::{gluing_for, reduce_auto, LensError, DEFAULT_BUDGET};
use gl2skein::torus::{self, TorusElement};

/// Status codes; the nonzero values of the command line are reused where they overlap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gl2Status {
    Ok = 0,
    Parse = 2,
    Domain = 3,
    Reduction = 4,
    NullArgument = 5,
    InvalidUtf8 = 6,
    Panic = 7,
}

/// Opaque torus algebra element.
pub struct Gl2Torus(TorusElement);

/// Opaque solid-torus element.
pub struct Gl2Annulus(AnnulusElement);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: Gl2Status, msg: impl AsRef<str>) -> Gl2Status {
    set_error(msg.as_ref());
    status
}

fn guarded(f: impl FnOnce() -> Gl2Status) -> Gl2Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(Gl2Status::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, Gl2Status> {
    if s.is_null() {
        return Err(fail(Gl2Status::NullArgument, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(Gl2Status::InvalidUtf8, "argument is not UTF-8"))
}

fn lang_error(e: LangError) -> Gl2Status {
    fail(Gl2Status::Parse, e.to_string())
}

fn lens_error(e: LensError) -> Gl2Status {
    match e {
        LensError::Domain(m) => fail(Gl2Status::Domain, m),
        other => fail(Gl2Status::Reduction, other.to_string()),
    }
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Gl2Status {
    *out = Box::into_raw(Box::new(value));
    Gl2Status::Ok
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Gl2Status {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            Gl2Status::Ok
        }
        Err(_) => fail(Gl2Status::Panic, "interior nul in output"),
    }
}

/// Message of the last failure on this thread; valid until the next call on the thread.
#[no_mangle]
pub extern "C" fn gl2_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gl2_torus_parse(text: *const c_char, out: *mut *mut Gl2Torus) -> Gl2Status {
    guarded(|| {
        if out.is_null() {
            return fail(Gl2Status::NullArgument, "null output pointer");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_torus(text) {
            Ok(a) => put(out, Gl2Torus(a)),
            Err(e) => lang_error(e),
        }
    })
}

/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gl2_annulus_parse(text: *const c_char, out: *mut *mut Gl2Annulus) -> Gl2Status {
    guarded(|| {
        if out.is_null() {
            return fail(Gl2Status::NullArgument, "null output pointer");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_annulus(text) {
            Ok(u) => put(out, Gl2Annulus(u)),
            Err(e) => lang_error(e),
        }
    })
}

/// `out = a * b` in the torus algebra.
///
/// # Safety
/// Handles must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gl2_torus_mul(a: *const Gl2Torus, b: *const Gl2Torus, out: *mut *mut Gl2Torus) -> Gl2Status {
    guarded(|| {
        if a.is_null() || b.is_null() || out.is_null() {
            return fail(Gl2Status::NullArgument, "null argument");
        }
        put(out, Gl2Torus(torus::mul(&(*a).0, &(*b).0)))
    })
}

/// `out = pi(a)`.
///
/// # Safety
/// `a` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gl2_project(a: *const Gl2Torus, out: *mut *mut Gl2Annulus) -> Gl2Status {
    guarded(|| {
        if a.is_null() || out.is_null() {
            return fail(Gl2Status::NullArgument, "null argument");
        }
        put(out, Gl2Annulus(project(&(*a).0)))
    })
}

/// `out = a . u`.
///
/// # Safety
/// Handles must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gl2_act(a: *const Gl2Torus, u: *const Gl2Annulus, out: *mut *mut Gl2Annulus) -> Gl2Status {
    guarded(|| {
        if a.is_null() || u.is_null() || out.is_null() {
            return fail(Gl2Status::NullArgument, "null argument");
        }
        put(out, Gl2Annulus(act(&(*a).0, &(*u).0)))
    })
}

/// Canonical text of a torus element.
///
/// # Safety
/// `a` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gl2_torus_to_string(a: *const Gl2Torus, out: *mut *mut c_char) -> Gl2Status {
    guarded(|| {
        if a.is_null() || out.is_null() {
            return fail(Gl2Status::NullArgument, "null argument");
        }
        put_string(out, print_torus(&(*a).0))
    })
}

/// Canonical text of a solid-torus element.
///
/// # Safety
/// `u` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gl2_annulus_to_string(u: *const Gl2Annulus, out: *mut *mut c_char) -> Gl2Status {
    guarded(|| {
        if u.is_null() || out.is_null() {
            return fail(Gl2Status::NullArgument, "null argument");
        }
        put_string(out, print_annulus(&(*u).0))
    })
}

/// Reduces a lens expression in `L(p,q)` and writes the JSON document of the `reduce` command.
/// `budget == 0` and `window <= 0` select the defaults.
///
/// # Safety
/// `text` must be a nul-terminated string and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gl2_reduce(
    p: i64,
    q: i64,
    text: *const c_char,
    budget: u64,
    window: i64,
    out_json: *mut *mut c_char,
) -> Gl2Status {
    guarded(|| {
        if out_json.is_null() {
            return fail(Gl2Status::NullArgument, "null output pointer");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let e = match parse_lens(text) {
            Ok(e) => e,
            Err(err) => return lang_error(err),
        };
        let g = match gluing_for(p, q) {
            Ok(g) => g,
            Err(err) => return lens_error(err),
        };
        let budget = if budget == 0 { DEFAULT_BUDGET } else { budget };
        let window = if window <= 0 { 4 * p } else { window };
        match reduce_auto(&e, &g, budget, window) {
            Ok((c, path)) => put_string(out_json, reduction_json(&g, &c, path)),
            Err(err) => lens_error(err),
        }
    })
}

/// # Safety
/// `a` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn gl2_torus_free(a: *mut Gl2Torus) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// # Safety
/// `u` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn gl2_annulus_free(u: *mut Gl2Annulus) {
    if !u.is_null() {
        drop(Box::from_raw(u));
    }
}

/// # Safety
/// `s` must be a string returned by this library or null.
#[no_mangle]
pub unsafe extern "C" fn gl2_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
