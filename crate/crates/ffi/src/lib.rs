//! C interface to `rational_legendrian`.
//!
//! Expressions live behind the opaque `RlExpr` handle. Every fallible call returns an
//! `RlStatus`; on failure a message is kept per thread and read with `rl_last_error`.
//! Strings handed out by the library are freed with `rl_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rational_legendrian::gamma::{gamma_expr, orderedness, GammaPair, OrderStatus};
use rational_legendrian::morse::{oracle_gamma, MorseError, OracleOptions};
use rational_legendrian::notation::{normalize_equivalence, parse_link_expr, rational_value, LinkExpr};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Unsupported = 4,
    Inconclusive = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlOrder {
    Ordered = 0,
    Unordered = 1,
    Unknown = 2,
}

/// Opaque link expression.
pub struct RlExpr {
    inner: LinkExpr,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<Vec<u8>>) {
    let mut bytes = message.into();
    bytes.retain(|&b| b != 0);
    let text = CString::new(bytes).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

struct Failure(RlStatus, String);

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> RlStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            RlStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("panic inside rational_legendrian");
            RlStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(RlStatus::NullArgument, format!("{what} is null"))
}

unsafe fn handle<'a>(e: *const RlExpr) -> Result<&'a LinkExpr, Failure> {
    // SAFETY: the caller passes null or a live handle from this library.
    unsafe { e.as_ref() }.map(|h| &h.inner).ok_or_else(|| null("expression handle"))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: non-null and, by contract, writable.
    unsafe { out.write(value) };
    Ok(())
}

fn owned(text: String) -> *mut c_char {
    CString::new(text).map_or(ptr::null_mut(), CString::into_raw)
}

fn new_handle(inner: LinkExpr) -> *mut RlExpr {
    Box::into_raw(Box::new(RlExpr { inner }))
}

unsafe fn put_gamma(g: GammaPair, minus: *mut *mut c_char, plus: *mut *mut c_char) -> Result<(), Failure> {
    if minus.is_null() || plus.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: both checked non-null above.
    unsafe {
        minus.write(owned(g.minus.to_string()));
        plus.write(owned(g.plus.to_string()));
    }
    Ok(())
}

/// Message for the most recent failed call on this thread, or "" after a success.
/// Valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn rl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses `text` into a new handle stored in `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_expr_parse(text: *const c_char, out: *mut *mut RlExpr) -> RlStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        // SAFETY: non-null and NUL-terminated by contract.
        let s = unsafe { CStr::from_ptr(text) }.to_str().map_err(|e| Failure(RlStatus::InvalidUtf8, e.to_string()))?;
        let e = parse_link_expr(s).map_err(|e| Failure(RlStatus::Parse, e.to_string()))?;
        unsafe { put(out, new_handle(e)) }
    })
}

/// # Safety
/// `e` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rl_expr_free(e: *mut RlExpr) {
    if !e.is_null() {
        // SAFETY: created by Box::into_raw in this library.
        drop(unsafe { Box::from_raw(e) });
    }
}

/// Canonical text of the expression.
///
/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_expr_format(e: *const RlExpr, out: *mut *mut c_char) -> RlStatus {
    guard(|| {
        let e = unsafe { handle(e) }?;
        unsafe { put(out, owned(e.to_string())) }
    })
}

/// New handle for the swapped expression.
///
/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_expr_swap(e: *const RlExpr, out: *mut *mut RlExpr) -> RlStatus {
    guard(|| {
        let e = unsafe { handle(e) }?;
        unsafe { put(out, new_handle(e.swap())) }
    })
}

/// New handle with the proven equivalences applied.
///
/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_expr_normalize(e: *const RlExpr, out: *mut *mut RlExpr) -> RlStatus {
    guard(|| {
        let e = unsafe { handle(e) }?;
        unsafe { put(out, new_handle(normalize_equivalence(e))) }
    })
}

/// `p/q` of a single-vector, unswapped expression.
///
/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_rational(e: *const RlExpr, out: *mut *mut c_char) -> RlStatus {
    guard(|| {
        let e = unsafe { handle(e) }?;
        match e.components.as_slice() {
            [v] if !e.swapped => unsafe { put(out, owned(rational_value(v).to_string())) },
            _ => Err(Failure(RlStatus::Unsupported, "rational value needs a single unswapped vector".into())),
        }
    })
}

/// Closed-form Γ⁻ and Γ⁺ in text form.
///
/// # Safety
/// `e` must be a live handle; `minus` and `plus` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_gamma(e: *const RlExpr, minus: *mut *mut c_char, plus: *mut *mut c_char) -> RlStatus {
    guard(|| {
        let e = unsafe { handle(e) }?;
        let g = gamma_expr(e).map_err(|err| Failure(RlStatus::Internal, err.to_string()))?;
        unsafe { put_gamma(g, minus, plus) }
    })
}

/// Γ⁻ and Γ⁺ counted from the front. `grid = 0` and `tol <= 0` select the defaults.
///
/// # Safety
/// `e` must be a live handle; `minus` and `plus` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_oracle(
    e: *const RlExpr,
    grid: usize,
    tol: f64,
    minus: *mut *mut c_char,
    plus: *mut *mut c_char,
) -> RlStatus {
    guard(|| {
        let e = unsafe { handle(e) }?;
        let mut opts = OracleOptions::default();
        if grid != 0 {
            opts.grid = grid;
        }
        if tol > 0.0 {
            opts.tol = tol;
        }
        let g = oracle_gamma(e, &opts).map_err(|err| match err {
            MorseError::Inconclusive(ladder) => Failure(RlStatus::Inconclusive, ladder.to_string()),
            other => Failure(RlStatus::Internal, other.to_string()),
        })?;
        unsafe { put_gamma(g, minus, plus) }
    })
}

/// Orderedness verdict; `reason` may be null when not wanted.
///
/// # Safety
/// `e` must be a live handle, `status` writable, `reason` null or writable.
#[no_mangle]
pub unsafe extern "C" fn rl_orderedness(e: *const RlExpr, status: *mut RlOrder, reason: *mut *mut c_char) -> RlStatus {
    guard(|| {
        let e = unsafe { handle(e) }?;
        let v = orderedness(e).map_err(|err| Failure(RlStatus::Internal, err.to_string()))?;
        let code = match v.status {
            OrderStatus::Ordered => RlOrder::Ordered,
            OrderStatus::Unordered => RlOrder::Unordered,
            OrderStatus::Unknown => RlOrder::Unknown,
        };
        unsafe { put(status, code) }?;
        if !reason.is_null() {
            unsafe { put(reason, owned(v.reason)) }?;
        }
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rl_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: created by CString::into_raw in this library.
        drop(unsafe { CString::from_raw(s) });
    }
}
