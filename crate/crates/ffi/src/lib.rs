//! C ABI over the exact certificate library.
//!
//! Conventions: every fallible function returns a [`QcrossStatus`] and passes
//! results through out-pointers. Strings written through `char **` are
//! NUL-terminated, heap-allocated, and must be released with
//! [`qcross_string_free`]; certificate handles with
//! [`qcross_certificate_free`]. On failure the out-pointer is left null and a
//! human-readable message is available from [`qcross_last_error_message`]
//! until the next failing call on the same thread. Panics never unwind across
//! the boundary; they surface as `QCROSS_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::time::Duration;

use qcross::certificate::{certify, certify_at, DualCertificate, Verdict};
use qcross::cli::IdentitiesOutput;
use qcross::error::Error;
use qcross::exactnum::{gauss_int, rat_from_str, rat_to_string};
use qcross::families::brute_force_max;
use qcross::lattice::{verify_identities, verify_lemmas, SubspaceLattice, DEFAULT_MAX_ENTRIES};
use qcross::spectrum::Parameters;

/// Result code of every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum QcrossStatus {
    Ok = 0,
    InvalidParameter = 1,
    UnsupportedField = 2,
    SizeGuard = 3,
    RadicandMismatch = 4,
    DivisionByZero = 5,
    SearchExhausted = 6,
    Parse = 7,
    Io = 8,
    Json = 9,
    NullArgument = 10,
    Panic = 11,
}

/// Opaque handle to a verified dual certificate.
pub struct QcrossCertificate {
    cert: DualCertificate,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("error").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(e: &Error) -> QcrossStatus {
    match e {
        Error::InvalidParameter(_) => QcrossStatus::InvalidParameter,
        Error::UnsupportedField(_) => QcrossStatus::UnsupportedField,
        Error::SizeGuard { .. } => QcrossStatus::SizeGuard,
        Error::RadicandMismatch { .. } => QcrossStatus::RadicandMismatch,
        Error::DivisionByZero => QcrossStatus::DivisionByZero,
        Error::SearchExhausted { .. } => QcrossStatus::SearchExhausted,
        Error::Parse(_) => QcrossStatus::Parse,
        Error::Io(_) => QcrossStatus::Io,
        Error::Json(_) => QcrossStatus::Json,
    }
}

fn fail(e: Error) -> QcrossStatus {
    let st = status_of(&e);
    set_last_error(e.to_string());
    st
}

fn null_arg(name: &str) -> QcrossStatus {
    set_last_error(format!("null pointer argument: {name}"));
    QcrossStatus::NullArgument
}

fn guarded<F: FnOnce() -> QcrossStatus + UnwindSafe>(f: F) -> QcrossStatus {
    catch_unwind(f).unwrap_or_else(|_| {
        set_last_error("internal panic".to_string());
        QcrossStatus::Panic
    })
}

/// Write `s` through `out` as a caller-owned C string. JSON and decimal
/// output never contains interior NULs, so the conversion cannot fail.
unsafe fn out_string(s: String, out: *mut *mut c_char) -> QcrossStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            QcrossStatus::Ok
        }
        Err(_) => {
            set_last_error("interior NUL in output".to_string());
            QcrossStatus::Parse
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, QcrossStatus> {
    let c = unsafe { CStr::from_ptr(ptr) };
    c.to_str().map_err(|_| {
        set_last_error("argument is not valid UTF-8".to_string());
        QcrossStatus::Parse
    })
}

unsafe fn emit_certificate(
    q: u64,
    n: i64,
    k: i64,
    l: i64,
    lambda: Option<&str>,
    out: *mut *mut QcrossCertificate,
) -> QcrossStatus {
    unsafe { *out = std::ptr::null_mut() };
    let p = match Parameters::new(q, n, k, l) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let built = match lambda {
        None => certify(&p),
        Some(s) => rat_from_str(s).and_then(|r| certify_at(&p, &r)),
    };
    match built {
        Ok(cert) => {
            unsafe { *out = Box::into_raw(Box::new(QcrossCertificate { cert })) };
            QcrossStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Build a dual certificate for the product bound at parameters
/// (q, n, k, l), searching for a feasible multiplier.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn qcross_certify(
    q: u64,
    n: i64,
    k: i64,
    l: i64,
    out: *mut *mut QcrossCertificate,
) -> QcrossStatus {
    if out.is_null() {
        return null_arg("out");
    }
    guarded(|| {
        clear_last_error();
        unsafe { emit_certificate(q, n, k, l, None, out) }
    })
}

/// Like `qcross_certify`, but probe the single multiplier `lambda`, given
/// as a decimal fraction string such as "3/16". The call succeeds even when
/// the certificate comes out infeasible; inspect it with
/// `qcross_certificate_feasible`.
///
/// # Safety
/// `lambda` must point to a NUL-terminated string and `out` to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn qcross_certify_with_lambda(
    q: u64,
    n: i64,
    k: i64,
    l: i64,
    lambda: *const c_char,
    out: *mut *mut QcrossCertificate,
) -> QcrossStatus {
    if out.is_null() {
        return null_arg("out");
    }
    if lambda.is_null() {
        return null_arg("lambda");
    }
    guarded(|| {
        clear_last_error();
        let s = match unsafe { read_str(lambda) } {
            Ok(s) => s,
            Err(st) => return st,
        };
        unsafe { emit_certificate(q, n, k, l, Some(s), out) }
    })
}

/// Release a certificate handle. Null is ignored.
///
/// # Safety
/// `cert` must be null or a pointer previously returned through
/// `qcross_certify` / `qcross_certify_with_lambda`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qcross_certificate_free(cert: *mut QcrossCertificate) {
    if !cert.is_null() {
        drop(unsafe { Box::from_raw(cert) });
    }
}

/// 1 if the certificate is feasible, 0 if infeasible, -1 if `cert` is null.
///
/// # Safety
/// `cert` must be null or a live certificate handle.
#[no_mangle]
pub unsafe extern "C" fn qcross_certificate_feasible(cert: *const QcrossCertificate) -> i32 {
    if cert.is_null() {
        return -1;
    }
    i32::from(unsafe { &*cert }.cert.verdict == Verdict::Feasible)
}

/// Serialize the full certificate document as pretty-printed JSON.
///
/// # Safety
/// `cert` must be a live certificate handle and `out` writable storage for
/// one pointer. Free the string with `qcross_string_free`.
#[no_mangle]
pub unsafe extern "C" fn qcross_certificate_json(
    cert: *const QcrossCertificate,
    out: *mut *mut c_char,
) -> QcrossStatus {
    if cert.is_null() {
        return null_arg("cert");
    }
    if out.is_null() {
        return null_arg("out");
    }
    guarded(|| {
        clear_last_error();
        unsafe { *out = std::ptr::null_mut() };
        let doc = unsafe { &*cert }.cert.to_document();
        match serde_json::to_string_pretty(&doc) {
            Ok(json) => unsafe { out_string(json, out) },
            Err(e) => fail(Error::Json(e)),
        }
    })
}

/// The certified product bound as a decimal string.
///
/// # Safety
/// `cert` must be a live certificate handle and `out` writable storage for
/// one pointer. Free the string with `qcross_string_free`.
#[no_mangle]
pub unsafe extern "C" fn qcross_certificate_bound(
    cert: *const QcrossCertificate,
    out: *mut *mut c_char,
) -> QcrossStatus {
    if cert.is_null() {
        return null_arg("cert");
    }
    if out.is_null() {
        return null_arg("out");
    }
    guarded(|| {
        clear_last_error();
        let s = unsafe { &*cert }.cert.bound.to_string();
        unsafe { out_string(s, out) }
    })
}

/// The multiplier the certificate was verified at, as "p/q".
///
/// # Safety
/// `cert` must be a live certificate handle and `out` writable storage for
/// one pointer. Free the string with `qcross_string_free`.
#[no_mangle]
pub unsafe extern "C" fn qcross_certificate_lambda(
    cert: *const QcrossCertificate,
    out: *mut *mut c_char,
) -> QcrossStatus {
    if cert.is_null() {
        return null_arg("cert");
    }
    if out.is_null() {
        return null_arg("out");
    }
    guarded(|| {
        clear_last_error();
        let s = rat_to_string(&unsafe { &*cert }.cert.coefficients.lambda);
        unsafe { out_string(s, out) }
    })
}

/// Release a string produced by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string pointer previously written by this library,
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qcross_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Gaussian binomial coefficient [a, b]_q as a decimal string (zero when
/// a < 0, b < 0 or a < b).
///
/// # Safety
/// `out` must be writable storage for one pointer. Free the string with
/// `qcross_string_free`.
#[no_mangle]
pub unsafe extern "C" fn qcross_gauss(
    a: i64,
    b: i64,
    q: u64,
    out: *mut *mut c_char,
) -> QcrossStatus {
    if out.is_null() {
        return null_arg("out");
    }
    guarded(|| {
        clear_last_error();
        unsafe { *out = std::ptr::null_mut() };
        match gauss_int(a, b, q) {
            Ok(v) => unsafe { out_string(v.to_string(), out) },
            Err(e) => fail(e),
        }
    })
}

/// Exhaustively maximize |F||G| over cross-intersecting pairs on an explicit
/// lattice, stopping after `budget_seconds`. Writes the search report as
/// JSON; the `exact` field records whether the search completed.
///
/// # Safety
/// `out` must be writable storage for one pointer. Free the string with
/// `qcross_string_free`.
#[no_mangle]
pub unsafe extern "C" fn qcross_max_product(
    q: u64,
    n: i64,
    k: i64,
    l: i64,
    budget_seconds: u64,
    out: *mut *mut c_char,
) -> QcrossStatus {
    if out.is_null() {
        return null_arg("out");
    }
    guarded(|| {
        clear_last_error();
        unsafe { *out = std::ptr::null_mut() };
        let run = || -> Result<String, Error> {
            let p = Parameters::new(q, n, k, l)?;
            let lat = SubspaceLattice::with_guard(q, n, DEFAULT_MAX_ENTRIES)?;
            let res = brute_force_max(&p, &lat, Duration::from_secs(budget_seconds))?;
            Ok(serde_json::to_string_pretty(&res)?)
        };
        match run() {
            Ok(json) => unsafe { out_string(json, out) },
            Err(e) => fail(e),
        }
    })
}

/// Verify the incidence identities and harmonic-space lemmas on the explicit
/// lattice of F_q^n, exactly. Writes the combined report as JSON; its `pass`
/// field is the overall verdict.
///
/// # Safety
/// `out` must be writable storage for one pointer. Free the string with
/// `qcross_string_free`.
#[no_mangle]
pub unsafe extern "C" fn qcross_check_identities(
    q: u64,
    n: i64,
    out: *mut *mut c_char,
) -> QcrossStatus {
    if out.is_null() {
        return null_arg("out");
    }
    guarded(|| {
        clear_last_error();
        unsafe { *out = std::ptr::null_mut() };
        let run = || -> Result<String, Error> {
            let lat = SubspaceLattice::with_guard(q, n, DEFAULT_MAX_ENTRIES)?;
            let identities = verify_identities(&lat, n, DEFAULT_MAX_ENTRIES)?;
            let lemmas = verify_lemmas(&lat, DEFAULT_MAX_ENTRIES)?;
            let pass = identities.pass && lemmas.pass;
            let doc = IdentitiesOutput {
                identities,
                lemmas,
                pass,
            };
            Ok(serde_json::to_string_pretty(&doc)?)
        };
        match run() {
            Ok(json) => unsafe { out_string(json, out) },
            Err(e) => fail(e),
        }
    })
}

/// Message for the most recent failure on this thread, or null. The pointer
/// is owned by the library and valid until the next failing call on the same
/// thread; do not free it.
#[no_mangle]
pub extern "C" fn qcross_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(c) => c.as_ptr(),
        None => std::ptr::null(),
    })
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn qcross_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    unsafe fn take_string(p: *mut c_char) -> String {
        assert!(!p.is_null());
        let s = CStr::from_ptr(p).to_str().unwrap().to_string();
        qcross_string_free(p);
        s
    }

    #[test]
    fn certify_roundtrip() {
        unsafe {
            let mut cert: *mut QcrossCertificate = ptr::null_mut();
            let st = qcross_certify(2, 4, 2, 2, &mut cert);
            assert_eq!(st, QcrossStatus::Ok);
            assert_eq!(qcross_certificate_feasible(cert), 1);

            let mut s: *mut c_char = ptr::null_mut();
            assert_eq!(qcross_certificate_bound(cert, &mut s), QcrossStatus::Ok);
            assert_eq!(take_string(s), "49");

            let mut j: *mut c_char = ptr::null_mut();
            assert_eq!(qcross_certificate_json(cert, &mut j), QcrossStatus::Ok);
            let json = take_string(j);
            let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
            assert_eq!(doc["verdict"], "feasible");
            assert_eq!(doc["D"], "49");

            qcross_certificate_free(cert);
        }
    }

    #[test]
    fn explicit_lambda_can_be_infeasible() {
        unsafe {
            let lam = CString::new("1/1").unwrap();
            let mut cert: *mut QcrossCertificate = ptr::null_mut();
            let st = qcross_certify_with_lambda(2, 6, 3, 2, lam.as_ptr(), &mut cert);
            assert_eq!(st, QcrossStatus::Ok);
            assert_eq!(qcross_certificate_feasible(cert), 0);

            let mut s: *mut c_char = ptr::null_mut();
            assert_eq!(qcross_certificate_lambda(cert, &mut s), QcrossStatus::Ok);
            assert_eq!(take_string(s), "1/1");
            qcross_certificate_free(cert);
        }
    }

    #[test]
    fn bad_parameters_set_message() {
        unsafe {
            let mut cert: *mut QcrossCertificate = ptr::null_mut();
            let st = qcross_certify(2, 3, 2, 1, &mut cert);
            assert_eq!(st, QcrossStatus::InvalidParameter);
            assert!(cert.is_null());
            let msg = CStr::from_ptr(qcross_last_error_message());
            assert!(msg.to_str().unwrap().contains("n >= 2 max(k,l)"));
        }
    }

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            assert_eq!(
                qcross_certify(2, 4, 2, 2, ptr::null_mut()),
                QcrossStatus::NullArgument
            );
            assert_eq!(qcross_certificate_feasible(ptr::null()), -1);
            let mut s: *mut c_char = ptr::null_mut();
            assert_eq!(
                qcross_certificate_bound(ptr::null(), &mut s),
                QcrossStatus::NullArgument
            );
            qcross_certificate_free(ptr::null_mut());
            qcross_string_free(ptr::null_mut());
        }
    }

    #[test]
    fn gauss_values() {
        unsafe {
            let mut s: *mut c_char = ptr::null_mut();
            assert_eq!(qcross_gauss(5, 2, 2, &mut s), QcrossStatus::Ok);
            assert_eq!(take_string(s), "155");
            let mut z: *mut c_char = ptr::null_mut();
            assert_eq!(qcross_gauss(2, 3, 2, &mut z), QcrossStatus::Ok);
            assert_eq!(take_string(z), "0");
            let mut e: *mut c_char = ptr::null_mut();
            assert_eq!(qcross_gauss(5, 2, 1, &mut e), QcrossStatus::InvalidParameter);
            assert!(e.is_null());
        }
    }

    #[test]
    fn max_product_trivial() {
        unsafe {
            let mut s: *mut c_char = ptr::null_mut();
            let st = qcross_max_product(2, 2, 1, 1, 10, &mut s);
            assert_eq!(st, QcrossStatus::Ok);
            let doc: serde_json::Value = serde_json::from_str(&take_string(s)).unwrap();
            assert_eq!(doc["max_product"], "1");
            assert_eq!(doc["exact"], true);
        }
    }

    #[test]
    fn check_identities_small() {
        unsafe {
            let mut s: *mut c_char = ptr::null_mut();
            let st = qcross_check_identities(2, 2, &mut s);
            assert_eq!(st, QcrossStatus::Ok);
            let doc: serde_json::Value = serde_json::from_str(&take_string(s)).unwrap();
            assert_eq!(doc["pass"], true);
        }
    }

    #[test]
    fn non_prime_field_is_reported() {
        unsafe {
            let mut s: *mut c_char = ptr::null_mut();
            let st = qcross_check_identities(4, 2, &mut s);
            assert_eq!(st, QcrossStatus::UnsupportedField);
            assert!(s.is_null());
            assert!(!qcross_last_error_message().is_null());
        }
    }

    #[test]
    fn version_is_static() {
        let v = unsafe { CStr::from_ptr(qcross_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn generated_header_exists() {
        let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/qcross.h");
        let text = std::fs::read_to_string(header).expect("header generated at build time");
        for symbol in [
            "qcross_certify",
            "qcross_certificate_free",
            "qcross_string_free",
            "QCROSS_STATUS_OK",
            "typedef struct QcrossCertificate QcrossCertificate;",
        ] {
            assert!(text.contains(symbol), "missing {symbol}");
        }
    }
}
