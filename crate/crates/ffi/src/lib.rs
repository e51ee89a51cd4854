//! C ABI for the articulate engine.
//!
//! A catalog is loaded into an opaque `ArtCatalog` handle. Requests and
//! results cross the boundary as UTF-8 JSON strings using the same shapes
//! as the HTTP service. Every function returns an `ArtStatus`; on failure
//! `art_last_error` describes the problem. Strings returned through `out`
//! parameters belong to the caller and are released with
//! `art_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use articulate::analyzer::{audit_program, estimate_national_loss, plan_program, whatif};
use articulate::service::{AuditRequest, PlanRequest, WhatifRequest};
use articulate::{
    count_pathways, ingest_catalog, translate_transcript, CatalogDocument, CatalogSnapshot, Error, ErrorClass,
    InstitutionId, LossAssumptions, PathwayScenario, Transcript,
};
use serde::Serialize;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidJson = 3,
    Validation = 4,
    NotFound = 5,
    Engine = 6,
    Internal = 7,
    Panic = 8,
}

/// Opaque handle to an immutable catalog snapshot.
pub struct ArtCatalog {
    snapshot: CatalogSnapshot,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    let c = CString::new(msg).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(ArtStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.class() {
            ErrorClass::Validation => ArtStatus::Validation,
            ErrorClass::NotFound => ArtStatus::NotFound,
            ErrorClass::Engine => ArtStatus::Engine,
            ErrorClass::Internal => ArtStatus::Internal,
        };
        Failure(status, format!("{}: {e}", e.code()))
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ArtStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ArtStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ArtStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(ArtStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(ArtStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn parse<T: serde::de::DeserializeOwned>(s: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(s).map_err(|e| Failure(ArtStatus::InvalidJson, format!("{what}: {e}")))
}

unsafe fn catalog<'a>(p: *const ArtCatalog) -> Result<&'a ArtCatalog, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(ArtStatus::NullPointer, "catalog handle is null".into()))
}

unsafe fn write_json<T: Serialize>(out: *mut *mut c_char, value: &T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(ArtStatus::NullPointer, "out is null".into()));
    }
    let json = serde_json::to_string(value).map_err(|e| Failure(ArtStatus::Internal, e.to_string()))?;
    let c = CString::new(json).map_err(|e| Failure(ArtStatus::Internal, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn write_handle(out: *mut *mut ArtCatalog, snapshot: CatalogSnapshot) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(ArtStatus::NullPointer, "out is null".into()));
    }
    *out = Box::into_raw(Box::new(ArtCatalog { snapshot }));
    Ok(())
}

/// Loads every `*.json` file in directory `dir`.
///
/// # Safety
/// `dir` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn art_catalog_open(dir: *const c_char, out: *mut *mut ArtCatalog) -> ArtStatus {
    guard(|| {
        let dir = text(dir, "dir")?;
        let snapshot = ingest_catalog(Path::new(dir)).map_err(Error::from)?;
        write_handle(out, snapshot)
    })
}

/// Builds a catalog from one JSON catalog document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn art_catalog_from_json(json: *const c_char, out: *mut *mut ArtCatalog) -> ArtStatus {
    guard(|| {
        let json = text(json, "json")?;
        let doc = CatalogDocument::parse(json, "<ffi>").map_err(Error::from)?;
        let snapshot = CatalogSnapshot::from_documents(vec![doc]).map_err(Error::from)?;
        write_handle(out, snapshot)
    })
}

/// Releases a catalog. Null is ignored.
///
/// # Safety
/// `catalog` must come from `art_catalog_open` or `art_catalog_from_json`
/// and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn art_catalog_free(catalog: *mut ArtCatalog) {
    if !catalog.is_null() {
        drop(Box::from_raw(catalog));
    }
}

/// Snapshot version of the catalog, or 0 for a null handle.
///
/// # Safety
/// `catalog` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn art_catalog_version(catalog: *const ArtCatalog) -> u64 {
    catalog.as_ref().map_or(0, |c| c.snapshot.version())
}

/// Audits a transcript against one program. `request` is
/// `{"program_id", "transcript", "policy"?}`.
///
/// # Safety
/// Pointers must be valid; `out` receives a string for `art_string_free`.
#[no_mangle]
pub unsafe extern "C" fn art_audit(
    catalog: *const ArtCatalog,
    request: *const c_char,
    out: *mut *mut c_char,
) -> ArtStatus {
    guard(|| {
        let cat = self::catalog(catalog)?;
        let req: AuditRequest = parse(text(request, "request")?, "request")?;
        let result = audit_program(&req.transcript, &req.program_id, &cat.snapshot, &req.policy)?;
        write_json(out, &result)
    })
}

/// What-if analysis. `request` is `{"transcript", "target_program_ids"?,
/// "constraints"?, "cost_model"?, "policy"?}`.
///
/// # Safety
/// Pointers must be valid; `out` receives a string for `art_string_free`.
#[no_mangle]
pub unsafe extern "C" fn art_whatif(
    catalog: *const ArtCatalog,
    request: *const c_char,
    out: *mut *mut c_char,
) -> ArtStatus {
    guard(|| {
        let cat = self::catalog(catalog)?;
        let req: WhatifRequest = parse(text(request, "request")?, "request")?;
        let targets = req.targets(&cat.snapshot);
        let report = whatif(&req.transcript, &targets, &cat.snapshot, &req.options(), 1)?;
        write_json(out, &report)
    })
}

/// Completion courses and plan. `request` is `{"program_id",
/// "transcript", "constraints"?, "policy"?}`.
///
/// # Safety
/// Pointers must be valid; `out` receives a string for `art_string_free`.
#[no_mangle]
pub unsafe extern "C" fn art_plan(
    catalog: *const ArtCatalog,
    request: *const c_char,
    out: *mut *mut c_char,
) -> ArtStatus {
    guard(|| {
        let cat = self::catalog(catalog)?;
        let req: PlanRequest = parse(text(request, "request")?, "request")?;
        let plan = plan_program(
            &req.transcript,
            &req.program_id,
            &cat.snapshot,
            &req.constraints,
            &req.policy,
        )?;
        write_json(out, &plan)
    })
}

/// Translates a transcript to `institution`.
///
/// # Safety
/// Pointers must be valid; `out` receives a string for `art_string_free`.
#[no_mangle]
pub unsafe extern "C" fn art_translate(
    catalog: *const ArtCatalog,
    transcript: *const c_char,
    institution: *const c_char,
    out: *mut *mut c_char,
) -> ArtStatus {
    guard(|| {
        let cat = self::catalog(catalog)?;
        let t: Transcript = parse(text(transcript, "transcript")?, "transcript")?;
        let to = InstitutionId::new(text(institution, "institution")?);
        cat.snapshot.check_transcript(&t).map_err(Error::from)?;
        let records = translate_transcript(&t, &to, &cat.snapshot).map_err(Error::from)?;
        write_json(out, &records)
    })
}

/// Pathways per university and statewide.
///
/// # Safety
/// Both out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn art_count_pathways(
    num_ccs: u32,
    programs_per_cc: u32,
    targets_per_program: u32,
    num_universities: u32,
    out_per_university: *mut u64,
    out_statewide: *mut u64,
) -> ArtStatus {
    guard(|| {
        if out_per_university.is_null() || out_statewide.is_null() {
            return Err(Failure(ArtStatus::NullPointer, "out is null".into()));
        }
        let c = count_pathways(&PathwayScenario {
            num_ccs,
            programs_per_cc,
            targets_per_program,
            num_universities,
        });
        let fit = |v: u128| u64::try_from(v).map_err(|_| Failure(ArtStatus::Engine, "count exceeds u64".into()));
        *out_per_university = fit(c.per_university)?;
        *out_statewide = fit(c.statewide)?;
        Ok(())
    })
}

/// National tuition-loss estimate from a JSON assumption set.
///
/// # Safety
/// Pointers must be valid; `out` receives a string for `art_string_free`.
#[no_mangle]
pub unsafe extern "C" fn art_estimate_loss(assumptions: *const c_char, out: *mut *mut c_char) -> ArtStatus {
    guard(|| {
        let a: LossAssumptions = parse(text(assumptions, "assumptions")?, "assumptions")?;
        a.validate().map_err(|m| Failure(ArtStatus::Validation, m))?;
        write_json(out, &estimate_national_loss(&a))
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn art_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failure on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn art_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn art_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
