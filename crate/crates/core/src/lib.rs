//! Transfer-articulation engine.
//!
//! Degree requirements are Boolean trees over courses, exams and credit
//! pools. The crate audits transcripts against them with an optimal
//! record-to-requirement assignment, translates transcripts between
//! institutions, separates recognized from applied credit, schedules and
//! counts degree plans, and ranks target programs by what it would take
//! to finish them.

pub mod analyzer;
pub mod audit;
pub mod catalog;
pub mod equivalence;
pub mod error;
pub mod ids;
pub mod model;
pub mod planner;
pub mod rational;
pub mod requirements;
pub mod service;

pub use analyzer::{
    audit_program, count_pathways, estimate_effort, estimate_national_loss, pathway_report, plan_program,
    rank_programs, whatif, Cents, CostModel, LossAssumptions, PathwayReport, PathwayScenario, ProgramAudit,
    ProgramPlan, TransferAnalysis, WhatifOptions, WhatifReport,
};
pub use audit::{
    audit, brute_force_audit, evaluate, find_satisfying_assignment, Assignment, AuditPolicy, AuditResult, NodeStatus,
};
pub use catalog::{ingest_catalog, CatalogDocument, CatalogSnapshot};
pub use equivalence::{
    applied_vs_recognized, translate_transcript, Disposition, EquivalenceRule, TranslatedRecord, TranslationStatus,
};
pub use error::{AuditError, CatalogError, Error, ErrorClass, PlanError, Violation};
pub use ids::{CourseId, ExamId, InstitutionId, NodeId, ProgramId};
pub use model::{
    Course, Credential, ElectiveLevel, Grade, Institution, InstitutionKind, NodeKind, Program, RequirementNode,
    Transcript, TranscriptRecord,
};
pub use planner::{
    check_plan, check_plan_input, count_plans, generate_plan, plan_count_report, select_completion_courses, DegreePlan,
    PlanConstraints,
};
pub use rational::Rational;
pub use requirements::{parse_program, serialize_program, validate_tree, CourseCatalog};
