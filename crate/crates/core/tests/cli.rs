mod common;

use std::path::Path;
use std::process::{Command, Output};

use articulate::analyzer::{estimate_national_loss, pathway_report};
use articulate::{
    audit_program, check_plan_input, ingest_catalog, plan_count_report, plan_program, translate_transcript, whatif,
    AuditPolicy, CatalogDocument, CostModel, CourseCatalog, InstitutionId, LossAssumptions, PathwayScenario,
    PlanConstraints, ProgramId, Transcript, WhatifOptions,
};
use common::fixtures;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_articulate"))
        .current_dir(fixtures())
        .env_remove("CATALOG_DIR")
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn read<T: DeserializeOwned>(rel: &str) -> T {
    serde_json::from_str(&std::fs::read_to_string(fixtures().join(rel)).unwrap()).unwrap()
}

fn golden(rel: &str) -> String {
    std::fs::read_to_string(fixtures().join(rel)).unwrap()
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).unwrap() + "\n"
}

const JULIA: [&str; 2] = ["--catalog", "julia/catalog"];
const T: &str = "julia/transcript.json";

#[test]
fn julia_commands_match_golden_files_and_the_library() {
    let snap = ingest_catalog(&fixtures().join("julia/catalog")).unwrap();
    let t: Transcript = read(T);
    let csu = ProgramId::new("csu-cs-bs");

    let out = stdout(&cli(&[
        JULIA[0],
        JULIA[1],
        "translate",
        "--transcript",
        T,
        "--to",
        "csu",
    ]));
    assert_eq!(out, golden("julia/golden/translate_csu.json"));
    assert_eq!(
        out,
        pretty(&translate_transcript(&t, &InstitutionId::new("csu"), &snap).unwrap())
    );

    let out = stdout(&cli(&[
        JULIA[0],
        JULIA[1],
        "audit",
        "--program",
        "csu-cs-bs",
        "--transcript",
        T,
    ]));
    assert_eq!(out, golden("julia/golden/audit_csu.json"));
    assert_eq!(
        out,
        pretty(&audit_program(&t, &csu, &snap, &AuditPolicy::default()).unwrap())
    );

    let out = stdout(&cli(&[JULIA[0], JULIA[1], "whatif", "--transcript", T]));
    assert_eq!(out, golden("julia/golden/whatif.json"));
    let targets: Vec<_> = snap.bachelor_programs().map(|p| p.id.clone()).collect();
    let report = whatif(&t, &targets, &snap, &WhatifOptions::default(), 1).unwrap();
    assert_eq!(out, pretty(&report));

    let parallel = stdout(&cli(&[JULIA[0], JULIA[1], "--jobs", "4", "whatif", "--transcript", T]));
    assert_eq!(parallel, out);

    let out = stdout(&cli(&[
        JULIA[0],
        JULIA[1],
        "plan",
        "--program",
        "csu-cs-bs",
        "--transcript",
        T,
    ]));
    assert_eq!(out, golden("julia/golden/plan_csu.json"));
    let plan = plan_program(&t, &csu, &snap, &PlanConstraints::default(), &AuditPolicy::default()).unwrap();
    assert_eq!(out, pretty(&plan));
}

#[test]
fn catalog_dir_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_articulate"))
        .current_dir(fixtures())
        .env("CATALOG_DIR", "julia/catalog")
        .args(["translate", "--transcript", T, "--to", "csu"])
        .output()
        .unwrap();
    assert_eq!(stdout(&out), golden("julia/golden/translate_csu.json"));
}

#[test]
fn count_pathways_prints_exact_counts() {
    let out = stdout(&cli(&[
        "count-pathways",
        "--ccs",
        "15",
        "--programs",
        "100",
        "--targets",
        "5",
        "--universities",
        "6",
    ]));
    assert_eq!(out, golden("golden/count_pathways.json"));
    let scenario = PathwayScenario {
        num_ccs: 15,
        programs_per_cc: 100,
        targets_per_program: 5,
        num_universities: 6,
    };
    assert_eq!(out, pretty(&pathway_report(&scenario, &CostModel::default())));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pathways"]["per_university"], 7500);
    assert_eq!(v["pathways"]["statewide"], 45000);
}

#[test]
fn count_plans_flags_more_than_a_million() {
    let out = stdout(&cli(&[
        "count-plans",
        "--curriculum",
        "curriculum40.json",
        "--terms",
        "8",
        "--per-term",
        "5",
    ]));
    assert_eq!(out, golden("golden/count_plans40.json"));
    let doc: CatalogDocument = read("curriculum40.json");
    let catalog = CourseCatalog::new(doc.courses, doc.exams);
    let ids = catalog.courses.keys().cloned().collect();
    let c = PlanConstraints {
        num_terms: 8,
        exact_courses_per_term: Some(5),
        ..PlanConstraints::default()
    };
    assert_eq!(out, pretty(&plan_count_report(&ids, &c, &catalog).unwrap()));
    let table = stdout(&cli(&[
        "count-plans",
        "--curriculum",
        "curriculum40.json",
        "--terms",
        "8",
        "--per-term",
        "5",
        "--format",
        "table",
    ]));
    assert!(table.contains("> 1,000,000"));
}

#[test]
fn estimate_loss_and_check_plan() {
    let out = stdout(&cli(&["estimate-loss", "--assumptions", "loss_assumptions.json"]));
    assert_eq!(out, golden("golden/estimate_loss.json"));
    let a: LossAssumptions = read("loss_assumptions.json");
    assert_eq!(out, pretty(&estimate_national_loss(&a)));

    let out = stdout(&cli(&[
        "check-plan",
        "--plan",
        "plans/gen_ed_plan.json",
        "--catalog",
        "gen_ed/catalog",
    ]));
    assert_eq!(out, golden("golden/check_plan.json"));
    let snap = ingest_catalog(&fixtures().join("gen_ed/catalog")).unwrap();
    assert_eq!(
        out,
        pretty(&check_plan_input(&read("plans/gen_ed_plan.json"), snap.catalog()))
    );
}

#[test]
fn audit_of_empty_transcript_applies_nothing() {
    let out = stdout(&cli(&[
        "--catalog",
        "gen_ed/catalog",
        "audit",
        "--program",
        "vcc-gen-ed",
        "--transcript",
        "empty_transcript.json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["applied_credit_hours"], 0);
}

#[test]
fn table_format_is_human_readable() {
    let out = stdout(&cli(&[
        JULIA[0],
        JULIA[1],
        "whatif",
        "--transcript",
        T,
        "--format",
        "table",
    ]));
    assert!(out.starts_with("RANK"));
    assert!(out.contains("has not yet been evaluated"));
    let out = stdout(&cli(&[
        JULIA[0],
        JULIA[1],
        "plan",
        "--program",
        "csu-cs-bs",
        "--transcript",
        T,
        "--format",
        "table",
    ]));
    assert!(out.contains("term 1"));
}

#[test]
fn exit_codes_and_streams() {
    let usage = cli(&["audit", "--program"]);
    assert_eq!(usage.status.code(), Some(1));
    assert!(usage.stdout.is_empty());
    assert_eq!(cli(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));

    let unknown = cli(&[JULIA[0], JULIA[1], "audit", "--program", "nope", "--transcript", T]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(unknown.stdout.is_empty());
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("unknown program"));

    let missing = cli(&["audit", "--program", "csu-cs-bs", "--transcript", T]);
    assert_eq!(missing.status.code(), Some(2));

    let bad_file = cli(&[
        JULIA[0],
        JULIA[1],
        "audit",
        "--program",
        "csu-cs-bs",
        "--transcript",
        "curriculum40.json",
    ]);
    assert_eq!(bad_file.status.code(), Some(2));

    let infeasible = cli(&[
        JULIA[0],
        JULIA[1],
        "plan",
        "--program",
        "csu-cs-bs",
        "--transcript",
        T,
        "--terms",
        "3",
    ]);
    assert_eq!(infeasible.status.code(), Some(3));
    assert!(infeasible.stdout.is_empty());
    assert!(String::from_utf8_lossy(&infeasible.stderr).contains("prerequisite chain"));

    let tmp = tempfile::tempdir().unwrap();
    let broken = tmp.path().join("plan.json");
    let mut input: serde_json::Value = read("plans/gen_ed_plan.json");
    input["plan"]["terms"] = serde_json::json!([
        ["VCC-ENG-102", "VCC-MAT-151"],
        ["VCC-ENG-101", "VCC-MAT-220"],
        ["VCC-ART-100"]
    ]);
    std::fs::write(&broken, input.to_string()).unwrap();
    let out = cli(&[
        "--catalog",
        "gen_ed/catalog",
        "check-plan",
        "--plan",
        broken.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["valid"], false);
    assert_eq!(v["violations"][0]["violation"], "prerequisite_order");
}

#[test]
fn gen_ed_transcripts_audit() {
    for (file, satisfied) in [
        ("gen_ed/transcripts/complete.json", true),
        ("gen_ed/transcripts/exam_only.json", false),
    ] {
        let out = stdout(&cli(&[
            "--catalog",
            "gen_ed/catalog",
            "audit",
            "--program",
            "vcc-gen-ed",
            "--transcript",
            file,
        ]));
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["node_status"]["gen-ed"] == "SATISFIED", satisfied, "{file}");
        assert_eq!(v["node_status"]["math-core"], "SATISFIED", "{file}");
    }
    assert!(Path::new(&fixtures().join("rules35/catalog/rules35.json")).exists());
}
