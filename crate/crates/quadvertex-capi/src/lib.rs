//! C ABI for the vertex computation engine: opaque handles, status codes,
//! and JSON strings across the boundary so other languages can bind without
//! knowing any internal layout.
//!
//! Ownership rules: every `char *` returned by this library is owned by the
//! caller and must be released with [`qv_string_free`]; every handle must be
//! released with its matching `_free` function. Passing null where a pointer
//! is required yields `QV_USAGE`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use quadvertex::partitions::{PlanePartition, DEFAULT_NODE_CAP};
use quadvertex::series::{dt_vertex_series, pt_vertex_series, series_equal, QSeries};
use quadvertex::signs::SignRule;
use quadvertex::verify::{
    verify_coho1, verify_coho2, verify_conifold, verify_dimred, verify_dtpt_sweep,
    verify_nekrasov, verify_properties, VerifyOptions,
};
use quadvertex::QvError;

/// Status codes mirroring the command-line exit contract.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum QvStatus {
    Ok = 0,
    VerifyFailed = 1,
    Usage = 2,
    Budget = 3,
    Internal = 4,
}

/// Opaque handle to a computed series.
pub struct QvSeries {
    inner: QSeries,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(err: &QvError) -> QvStatus {
    match err {
        QvError::BudgetExceeded { .. } | QvError::SearchCapExceeded { .. } => QvStatus::Budget,
        QvError::InvalidInput(_) | QvError::Json(_) => QvStatus::Usage,
        _ => QvStatus::Internal,
    }
}

fn write_status(out: *mut QvStatus, status: QvStatus) {
    if !out.is_null() {
        // SAFETY: non-null pointers to a status slot are required valid.
        unsafe { *out = status };
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Option<&'a str> {
    if ptr.is_null() {
        return None;
    }
    CStr::from_ptr(ptr).to_str().ok()
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

fn parse_legs(text: &str) -> Result<[PlanePartition; 4], QvError> {
    let raw: Vec<Vec<Vec<u32>>> = serde_json::from_str(text)?;
    if raw.len() != 4 {
        return Err(QvError::InvalidInput("expected four legs".into()));
    }
    let mut legs = Vec::new();
    for rows in raw {
        legs.push(PlanePartition::new(rows)?);
    }
    Ok([legs[0].clone(), legs[1].clone(), legs[2].clone(), legs[3].clone()])
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn qv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the most recent error on this thread; do not free. Null when
/// no error has occurred.
#[no_mangle]
pub extern "C" fn qv_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|c| c.as_ptr())
            .unwrap_or(ptr::null())
    })
}

/// Compute a vertex series.
///
/// `mode` is "dt" or "pt"; `legs_json` gives four plane partitions as row
/// lists (e.g. `[[[1]],[],[],[]]`); `sign_rule` is "sigma", "dimred" or
/// "plus". Returns null on error with `status` and `qv_last_error` set.
///
/// # Safety
/// `mode`, `legs_json` and `sign_rule` must be valid NUL-terminated strings;
/// `status` must be null or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qv_vertex_series(
    mode: *const c_char,
    legs_json: *const c_char,
    q_max: i64,
    sign_rule: *const c_char,
    status: *mut QvStatus,
) -> *mut QvSeries {
    let (Some(mode), Some(legs), Some(rule)) =
        (read_str(mode), read_str(legs_json), read_str(sign_rule))
    else {
        set_error("null or non-UTF-8 argument");
        write_status(status, QvStatus::Usage);
        return ptr::null_mut();
    };
    let result = (|| -> Result<QSeries, QvError> {
        let legs = parse_legs(legs)?;
        let rule = SignRule::parse(rule)?;
        match mode {
            "dt" => dt_vertex_series(&legs, q_max, rule, DEFAULT_NODE_CAP),
            "pt" => pt_vertex_series(&legs, q_max, rule, DEFAULT_NODE_CAP),
            other => Err(QvError::InvalidInput(format!("unknown mode {other:?}"))),
        }
    })();
    match result {
        Ok(series) => {
            write_status(status, QvStatus::Ok);
            Box::into_raw(Box::new(QvSeries { inner: series }))
        }
        Err(e) => {
            set_error(&e.to_string());
            write_status(status, status_of(&e));
            ptr::null_mut()
        }
    }
}

/// Serialize a series handle to JSON. Free the result with
/// [`qv_string_free`].
///
/// # Safety
/// `series` must be a live handle from [`qv_vertex_series`].
#[no_mangle]
pub unsafe extern "C" fn qv_series_to_json(series: *const QvSeries) -> *mut c_char {
    if series.is_null() {
        set_error("null series handle");
        return ptr::null_mut();
    }
    match serde_json::to_string(&(*series).inner) {
        Ok(text) => to_c_string(text),
        Err(e) => {
            set_error(&e.to_string());
            ptr::null_mut()
        }
    }
}

/// Exact randomized equality of two series; 1 equal, 0 different, negative
/// status code on error.
///
/// # Safety
/// Both handles must be live.
#[no_mangle]
pub unsafe extern "C" fn qv_series_equal(
    a: *const QvSeries,
    b: *const QvSeries,
    seed: u64,
    points: usize,
) -> i32 {
    if a.is_null() || b.is_null() {
        set_error("null series handle");
        return -(QvStatus::Usage as i32);
    }
    match series_equal(&(*a).inner, &(*b).inner, seed, points.max(1)) {
        Ok(cert) => {
            if cert.pass {
                1
            } else {
                0
            }
        }
        Err(e) => {
            set_error(&e.to_string());
            -(status_of(&e) as i32)
        }
    }
}

/// Release a series handle.
///
/// # Safety
/// `series` must be a handle from this library, not yet freed; null is a
/// no-op.
#[no_mangle]
pub unsafe extern "C" fn qv_series_free(series: *mut QvSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed; null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn qv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[derive(serde::Deserialize, Default)]
#[serde(default)]
struct VerifyRequest {
    qmax: Option<i64>,
    dmax: Option<i64>,
    total: Option<u32>,
    seed: Option<u64>,
    points: Option<usize>,
}

/// Run a verification target ("nekrasov", "dtpt", "conifold", "dimred",
/// "coho1", "coho2", "properties") with options as JSON (null for
/// defaults). On success writes the JSON report into `report_json` when it
/// is non-null (caller frees) and returns `QV_OK` or `QV_VERIFY_FAILED`.
///
/// # Safety
/// `target` must be a valid NUL-terminated string; `options_json` null or
/// valid; `report_json` null or a valid pointer to receive the string.
#[no_mangle]
pub unsafe extern "C" fn qv_verify(
    target: *const c_char,
    options_json: *const c_char,
    report_json: *mut *mut c_char,
) -> QvStatus {
    let Some(target) = read_str(target) else {
        set_error("null or non-UTF-8 target");
        return QvStatus::Usage;
    };
    let request: VerifyRequest = match read_str(options_json) {
        None => VerifyRequest::default(),
        Some(text) => match serde_json::from_str(text) {
            Ok(r) => r,
            Err(e) => {
                set_error(&e.to_string());
                return QvStatus::Usage;
            }
        },
    };
    let mut opts = VerifyOptions::default();
    if let Some(seed) = request.seed {
        opts.seed = seed;
    }
    if let Some(points) = request.points {
        opts.points = points.max(1);
    }
    let report = match target {
        "nekrasov" => verify_nekrasov(request.qmax.unwrap_or(4), &opts),
        "dtpt" => {
            let budgets = match request.qmax {
                Some(q) => vec![(request.total.unwrap_or(2), q)],
                None => vec![(0, 3), (1, 3), (2, 3), (3, 2)],
            };
            verify_dtpt_sweep(&budgets, &opts)
        }
        "conifold" => verify_conifold(request.dmax.unwrap_or(2), request.qmax.unwrap_or(3), &opts),
        "dimred" => verify_dimred(request.total.unwrap_or(3), request.qmax.unwrap_or(2), &opts),
        "coho1" => verify_coho1(request.qmax.unwrap_or(3), &opts),
        "coho2" => verify_coho2(request.qmax.unwrap_or(3), &opts),
        "properties" => verify_properties(&opts),
        other => {
            set_error(&format!("unknown verify target {other:?}"));
            return QvStatus::Usage;
        }
    };
    match report {
        Ok(report) => {
            if !report_json.is_null() {
                let text = serde_json::to_string(&report).unwrap_or_default();
                *report_json = to_c_string(text);
            }
            if report.pass {
                QvStatus::Ok
            } else {
                QvStatus::VerifyFailed
            }
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    #[test]
    fn series_roundtrip_through_the_abi() {
        let mode = CString::new("dt").unwrap();
        let legs = CString::new("[[],[],[],[]]").unwrap();
        let rule = CString::new("sigma").unwrap();
        let mut status = QvStatus::Internal;
        let handle = unsafe {
            qv_vertex_series(mode.as_ptr(), legs.as_ptr(), 2, rule.as_ptr(), &mut status)
        };
        assert!(status == QvStatus::Ok && !handle.is_null());
        let json = unsafe { qv_series_to_json(handle) };
        assert!(!json.is_null());
        let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
        assert!(text.contains("coeffs"));
        assert_eq!(unsafe { qv_series_equal(handle, handle, 7, 3) }, 1);
        unsafe {
            qv_string_free(json);
            qv_series_free(handle);
        }
    }

    #[test]
    fn bad_input_reports_usage() {
        let mode = CString::new("dt").unwrap();
        let legs = CString::new("[[1,2],[],[]]").unwrap();
        let rule = CString::new("sigma").unwrap();
        let mut status = QvStatus::Ok;
        let handle = unsafe {
            qv_vertex_series(mode.as_ptr(), legs.as_ptr(), 1, rule.as_ptr(), &mut status)
        };
        assert!(handle.is_null());
        assert!(status == QvStatus::Usage);
        assert!(!qv_last_error().is_null());
    }

    #[test]
    fn verify_through_the_abi() {
        let target = CString::new("coho2").unwrap();
        let mut report: *mut c_char = std::ptr::null_mut();
        let status = unsafe { qv_verify(target.as_ptr(), std::ptr::null(), &mut report) };
        assert!(status == QvStatus::Ok);
        assert!(!report.is_null());
        unsafe { qv_string_free(report) };
    }
}
