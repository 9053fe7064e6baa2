//! C ABI over `hyperion-core`.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free`. Every fallible call returns a [`HyperionStatus`]; the
//! message of the last failure on the calling thread is available from
//! [`hyperion_last_error`]. Strings returned by the library are freed with
//! [`hyperion_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hyperion_core::interval::{IVec, Interval};
use hyperion_core::model::ModelParams;
use hyperion_core::poincare::poincare_map;
use hyperion_core::proofs::{ProofReport, ProofSettings, Prover, Verdict};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HyperionStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnknownTheorem = 3,
    IntegrationFailed = 4,
    Panic = 5,
}

/// Proof engine with its parameters and image cache.
pub struct HyperionProver(Prover);

/// Result of one theorem.
pub struct HyperionReport(ProofReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

fn guard(f: impl FnOnce() -> Result<(), (HyperionStatus, String)>) -> HyperionStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            HyperionStatus::Ok
        }
        Ok(Err((code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            HyperionStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (HyperionStatus, String)> {
    if p.is_null() {
        return Err((HyperionStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (HyperionStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn hyperion_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a prover for the eccentricity `e` and `omega2`, both decimal
/// strings; null selects the default value.
///
/// # Safety
/// `e` and `omega2` are null or NUL-terminated strings; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn hyperion_prover_new(
    e: *const c_char,
    omega2: *const c_char,
    out: *mut *mut HyperionProver,
) -> HyperionStatus {
    guard(|| {
        if out.is_null() {
            return Err((HyperionStatus::NullPointer, "out is null".into()));
        }
        let d = ModelParams::default();
        let e = if e.is_null() { d.e.clone() } else { str_arg(e, "e")?.to_string() };
        let w = if omega2.is_null() { d.omega2.clone() } else { str_arg(omega2, "omega2")?.to_string() };
        let params = ModelParams::new(&e, &w).map_err(|x| (HyperionStatus::InvalidArgument, x.to_string()))?;
        let settings = ProofSettings {
            params,
            ..ProofSettings::default()
        };
        let p = Prover::new(settings).map_err(|x| (HyperionStatus::InvalidArgument, x.to_string()))?;
        *out = Box::into_raw(Box::new(HyperionProver(p)));
        Ok(())
    })
}

/// # Safety
/// `p` is null or a handle from [`hyperion_prover_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hyperion_prover_free(p: *mut HyperionProver) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Runs the theorem `id` (`p1p2`, `p1p1`, `p2p2`, `p3p3`, `p1p3`, `p2p3`).
/// A failed verification is not an error: inspect the report's verdict.
///
/// # Safety
/// `p` is a live prover, `id` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hyperion_prove_theorem(
    p: *const HyperionProver,
    id: *const c_char,
    out: *mut *mut HyperionReport,
) -> HyperionStatus {
    guard(|| {
        if p.is_null() || out.is_null() {
            return Err((HyperionStatus::NullPointer, "prover or out is null".into()));
        }
        let id = str_arg(id, "id")?;
        let r = (*p)
            .0
            .prove_theorem(id)
            .ok_or_else(|| (HyperionStatus::UnknownTheorem, format!("unknown theorem {id}")))?;
        *out = Box::into_raw(Box::new(HyperionReport(r)));
        Ok(())
    })
}

/// 1 if the theorem was proved, 0 if not, -1 for a null report.
///
/// # Safety
/// `r` is null or a live report.
#[no_mangle]
pub unsafe extern "C" fn hyperion_report_proved(r: *const HyperionReport) -> i32 {
    match r.as_ref() {
        None => -1,
        Some(r) => i32::from(r.0.verdict == Verdict::Proved),
    }
}

/// Number of covering certificates (forward and derived), 0 for null.
///
/// # Safety
/// `r` is null or a live report.
#[no_mangle]
pub unsafe extern "C" fn hyperion_report_certificate_count(r: *const HyperionReport) -> usize {
    r.as_ref().map_or(0, |r| r.0.certificates.len())
}

/// The certificate document as JSON; free with [`hyperion_string_free`].
/// Null for a null report.
///
/// # Safety
/// `r` is null or a live report.
#[no_mangle]
pub unsafe extern "C" fn hyperion_report_json(r: *const HyperionReport) -> *mut c_char {
    match r.as_ref() {
        None => ptr::null_mut(),
        Some(r) => to_c_string(r.0.to_json()),
    }
}

/// # Safety
/// `r` is null or a report not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hyperion_report_free(r: *mut HyperionReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Fixed-point proofs of P1, P2, P3 as a JSON document in `*json`; the
/// verdict in `*proved` (1 or 0).
///
/// # Safety
/// `p` is a live prover; `json` and `proved` are writable.
#[no_mangle]
pub unsafe extern "C" fn hyperion_prove_fixed_points(
    p: *const HyperionProver,
    json: *mut *mut c_char,
    proved: *mut i32,
) -> HyperionStatus {
    guard(|| {
        if p.is_null() || json.is_null() || proved.is_null() {
            return Err((HyperionStatus::NullPointer, "null argument".into()));
        }
        let f = (*p).0.prove_fixed_points();
        *json = to_c_string(f.to_json());
        *proved = i32::from(f.verdict == Verdict::Proved);
        Ok(())
    })
}

/// Rigorous enclosure of `P^k` of the box `[theta_lo, theta_hi] x
/// [phi_lo, phi_hi]`, written to `out` as `theta_lo, theta_hi, phi_lo,
/// phi_hi` (theta not reduced).
///
/// # Safety
/// `p` is a live prover; `out` points to four writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hyperion_poincare_map(
    p: *const HyperionProver,
    theta_lo: f64,
    theta_hi: f64,
    phi_lo: f64,
    phi_hi: f64,
    k: u32,
    out: *mut f64,
) -> HyperionStatus {
    guard(|| {
        if p.is_null() || out.is_null() {
            return Err((HyperionStatus::NullPointer, "prover or out is null".into()));
        }
        let bad = |m: String| (HyperionStatus::InvalidArgument, m);
        let th = Interval::try_new(theta_lo, theta_hi).map_err(|e| bad(e.to_string()))?;
        let ph = Interval::try_new(phi_lo, phi_hi).map_err(|e| bad(e.to_string()))?;
        if k == 0 {
            return Err(bad("k must be positive".into()));
        }
        let img = poincare_map(&IVec([th, ph]), k, (*p).0.integrator())
            .map_err(|e| (HyperionStatus::IntegrationFailed, e.to_string()))?;
        let s = img.state;
        let vals = [s[0].lo(), s[0].hi(), s[1].lo(), s[1].hi()];
        ptr::copy_nonoverlapping(vals.as_ptr(), out, 4);
        Ok(())
    })
}

/// # Safety
/// `s` is null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hyperion_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
