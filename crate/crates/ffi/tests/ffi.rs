use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::ptr;

use articulate::{ingest_catalog, whatif, ProgramId, Transcript, WhatifOptions};
use articulate_ffi::*;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn open(dir: &str) -> *mut ArtCatalog {
    let path = cstr(root().join(dir).to_str().unwrap());
    let mut cat = ptr::null_mut();
    assert_eq!(unsafe { art_catalog_open(path.as_ptr(), &mut cat) }, ArtStatus::Ok);
    assert!(!cat.is_null());
    cat
}

fn take(out: *mut c_char) -> String {
    let s = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_string();
    unsafe { art_string_free(out) };
    s
}

fn last_error() -> String {
    let p = art_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn julia_transcript() -> String {
    std::fs::read_to_string(root().join("fixtures/julia/transcript.json")).unwrap()
}

#[test]
fn whatif_matches_the_library() {
    let cat = open("fixtures/julia/catalog");
    let request = cstr(&format!(r#"{{"transcript": {}}}"#, julia_transcript()));
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { art_whatif(cat, request.as_ptr(), &mut out) }, ArtStatus::Ok);
    let got: serde_json::Value = serde_json::from_str(&take(out)).unwrap();

    let snapshot = ingest_catalog(&root().join("fixtures/julia/catalog")).unwrap();
    let t: Transcript = serde_json::from_str(&julia_transcript()).unwrap();
    let targets: Vec<ProgramId> = snapshot.bachelor_programs().map(|p| p.id.clone()).collect();
    let expected = whatif(&t, &targets, &snapshot, &WhatifOptions::default(), 1).unwrap();
    assert_eq!(got, serde_json::to_value(&expected).unwrap());
    assert!(unsafe { art_catalog_version(cat) } > 0);
    unsafe { art_catalog_free(cat) };
}

#[test]
fn audit_translate_and_plan() {
    let cat = open("fixtures/julia/catalog");
    let t = julia_transcript();
    let mut out = ptr::null_mut();

    let req = cstr(&format!(r#"{{"program_id": "csu-cs-bs", "transcript": {t}}}"#));
    assert_eq!(unsafe { art_audit(cat, req.as_ptr(), &mut out) }, ArtStatus::Ok);
    let audit: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(audit["applied_credit_hours"], 0);

    let (tc, to) = (cstr(&t), cstr("csu"));
    assert_eq!(
        unsafe { art_translate(cat, tc.as_ptr(), to.as_ptr(), &mut out) },
        ArtStatus::Ok
    );
    let records: Vec<serde_json::Value> = serde_json::from_str(&take(out)).unwrap();
    let statuses: Vec<&str> = records.iter().map(|r| r["status"].as_str().unwrap()).collect();
    assert_eq!(statuses, ["ELECTIVE", "UNEVALUATED", "UNEVALUATED", "ELECTIVE"]);

    let req = cstr(&format!(r#"{{"program_id": "csu-cs-bs", "transcript": {t}}}"#));
    assert_eq!(unsafe { art_plan(cat, req.as_ptr(), &mut out) }, ArtStatus::Ok);
    let plan: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(plan["completion"]["credit_hours"], 49);
    unsafe { art_catalog_free(cat) };
}

#[test]
fn errors_map_to_status_codes() {
    let mut cat = ptr::null_mut();
    assert_eq!(
        unsafe { art_catalog_open(ptr::null(), &mut cat) },
        ArtStatus::NullPointer
    );
    assert!(last_error().contains("null"));

    let bad = cstr(r#"{"institutions": [{"id": 1}]}"#);
    assert_eq!(
        unsafe { art_catalog_from_json(bad.as_ptr(), &mut cat) },
        ArtStatus::Validation
    );

    let cat = open("fixtures/julia/catalog");
    let mut out = ptr::null_mut();
    let junk = cstr("{not json");
    assert_eq!(
        unsafe { art_audit(cat, junk.as_ptr(), &mut out) },
        ArtStatus::InvalidJson
    );
    let unknown = cstr(r#"{"program_id": "nope", "transcript": {"records": []}}"#);
    assert_eq!(
        unsafe { art_audit(cat, unknown.as_ptr(), &mut out) },
        ArtStatus::NotFound
    );
    assert!(last_error().contains("unknown_program"));
    let ok = cstr(r#"{"program_id": "csu-cs-bs", "transcript": {"records": []}}"#);
    assert_eq!(unsafe { art_audit(cat, ok.as_ptr(), &mut out) }, ArtStatus::Ok);
    assert!(art_last_error().is_null());
    take(out);
    assert_eq!(
        unsafe { art_audit(ptr::null(), ok.as_ptr(), &mut out) },
        ArtStatus::NullPointer
    );
    unsafe { art_catalog_free(cat) };
    unsafe { art_catalog_free(ptr::null_mut()) };
    unsafe { art_string_free(ptr::null_mut()) };
}

#[test]
fn infeasible_plan_is_an_engine_error() {
    let cat = open("fixtures/julia/catalog");
    let req = cstr(r#"{"program_id": "csu-cs-bs", "transcript": {"records": []}, "constraints": {"num_terms": 3}}"#);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { art_plan(cat, req.as_ptr(), &mut out) }, ArtStatus::Engine);
    assert!(last_error().starts_with("infeasible"));
    unsafe { art_catalog_free(cat) };
}

#[test]
fn pathways_and_loss() {
    let (mut per, mut state) = (0u64, 0u64);
    assert_eq!(
        unsafe { art_count_pathways(15, 100, 5, 6, &mut per, &mut state) },
        ArtStatus::Ok
    );
    assert_eq!((per, state), (7_500, 45_000));
    assert_eq!(
        unsafe { art_count_pathways(1, 1, 1, 1, ptr::null_mut(), &mut state) },
        ArtStatus::NullPointer
    );

    let text = std::fs::read_to_string(root().join("fixtures/loss_assumptions.json")).unwrap();
    let a = cstr(&text);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { art_estimate_loss(a.as_ptr(), &mut out) }, ArtStatus::Ok);
    let loss: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(loss["total"], 5_278_500_000_000i64);
    let v = unsafe { CStr::from_ptr(art_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header =
        std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/articulate.h")).unwrap();
    for name in [
        "art_catalog_open",
        "art_catalog_from_json",
        "art_catalog_free",
        "art_catalog_version",
        "art_audit",
        "art_whatif",
        "art_plan",
        "art_translate",
        "art_count_pathways",
        "art_estimate_loss",
        "art_string_free",
        "art_last_error",
        "art_version",
        "typedef struct ArtCatalog ArtCatalog",
        "ART_STATUS_PANIC = 8",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/articulate.h"))
        .status()
    else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(status.success());
}
