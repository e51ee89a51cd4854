use serde::Serialize;

use crate::ids::{CourseId, InstitutionId, NodeId, ProgramId};
use crate::planner::InfeasibleReason;

/// A single structural problem found while validating a requirement tree
/// or course catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    EmptyComposite {
        node: NodeId,
    },
    NonPositiveChoose {
        node: NodeId,
    },
    ChooseExceedsChildren {
        node: NodeId,
        choose_k: u32,
        children: usize,
    },
    NonPositiveCredits {
        node: NodeId,
    },
    EmptyCoursePool {
        node: NodeId,
    },
    DuplicateNodeId {
        node: NodeId,
    },
    DanglingCourse {
        node: NodeId,
        course_id: CourseId,
    },
    ForeignCourse {
        node: NodeId,
        course_id: CourseId,
        institution_id: InstitutionId,
    },
    DanglingExam {
        node: NodeId,
        exam_id: String,
    },
    TotalHoursBelowMinimum {
        program: ProgramId,
        total: String,
        minimum: String,
    },
    NonPositiveCourseCredits {
        course: CourseId,
    },
    DanglingPrerequisite {
        course: CourseId,
        prerequisite: CourseId,
    },
    PrerequisiteCycle {
        courses: Vec<CourseId>,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::EmptyComposite { node } => write!(f, "{node}: composite has no children"),
            Violation::NonPositiveChoose { node } => write!(f, "{node}: choose_k must be positive"),
            Violation::ChooseExceedsChildren {
                node,
                choose_k,
                children,
            } => {
                write!(f, "{node}: choose_k {choose_k} exceeds {children} children")
            }
            Violation::NonPositiveCredits { node } => {
                write!(f, "{node}: min_credit_hours must be positive")
            }
            Violation::EmptyCoursePool { node } => write!(f, "{node}: course_pool is empty"),
            Violation::DuplicateNodeId { node } => write!(f, "duplicate node id {node}"),
            Violation::DanglingCourse { node, course_id } => {
                write!(f, "{node}: unknown course {course_id}")
            }
            Violation::ForeignCourse {
                node,
                course_id,
                institution_id,
            } => {
                write!(f, "{node}: course {course_id} is not offered by {institution_id}")
            }
            Violation::DanglingExam { node, exam_id } => write!(f, "{node}: unknown exam {exam_id}"),
            Violation::TotalHoursBelowMinimum {
                program,
                total,
                minimum,
            } => write!(
                f,
                "{program}: total_credit_hours {total} is below the {minimum} hours any completion needs"
            ),
            Violation::NonPositiveCourseCredits { course } => {
                write!(f, "{course}: credit_hours must be positive")
            }
            Violation::DanglingPrerequisite { course, prerequisite } => {
                write!(f, "{course}: unknown prerequisite {prerequisite}")
            }
            Violation::PrerequisiteCycle { courses } => {
                let names: Vec<_> = courses.iter().map(|c| c.as_str()).collect();
                write!(f, "prerequisite cycle through {}", names.join(" -> "))
            }
        }
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("schema error in {origin}: {message}")]
    Schema { origin: String, message: String },
    #[error("validation failed: {}", join_violations(.0))]
    Validation(Vec<Violation>),
    #[error("duplicate {kind} id {id}")]
    DuplicateId { kind: &'static str, id: String },
    #[error("unresolved reference: {0}")]
    CrossRef(String),
    #[error("unknown institution {0}")]
    UnknownInstitution(InstitutionId),
    #[error("unknown program {0}")]
    UnknownProgram(ProgramId),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum AuditError {
    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),
    #[error("transcript does not match catalog: {0}")]
    CatalogMismatch(String),
    #[error("instance exceeds exact-search limits: {0}")]
    LimitExceeded(String),
    #[error("oracle limited to 12 records and 16 leaves, got {records} records and {leaves} leaves")]
    OracleTooLarge { records: usize, leaves: usize },
}

#[derive(Debug, thiserror::Error)]
pub enum PlanError {
    #[error("no feasible plan: {0}")]
    Infeasible(InfeasibleReason),
    #[error("{courses} courses exceeds the exact counting limit of {limit}")]
    TooLarge { courses: usize, limit: usize },
    #[error("requirements cannot be completed: {0}")]
    Unsatisfiable(String),
    #[error("search limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("unknown course {0}")]
    UnknownCourse(CourseId),
    #[error("invalid constraints: {0}")]
    InvalidConstraints(String),
}

/// How an error should be reported to callers outside the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    NotFound,
    Engine,
    Internal,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Audit(#[from] AuditError),
    #[error(transparent)]
    Plan(#[from] PlanError),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Catalog(e) => match e {
                CatalogError::Schema { .. } => "schema_error",
                CatalogError::Validation(_) => "validation_error",
                CatalogError::DuplicateId { .. } => "duplicate_id",
                CatalogError::CrossRef(_) => "cross_ref_error",
                CatalogError::UnknownInstitution(_) => "unknown_institution",
                CatalogError::UnknownProgram(_) => "unknown_program",
                CatalogError::Io { .. } => "io_error",
            },
            Error::Audit(e) => match e {
                AuditError::InvalidAssignment(_) => "invalid_assignment",
                AuditError::CatalogMismatch(_) => "catalog_mismatch",
                AuditError::LimitExceeded(_) => "limit_exceeded",
                AuditError::OracleTooLarge { .. } => "oracle_too_large",
            },
            Error::Plan(e) => match e {
                PlanError::Infeasible(_) => "infeasible",
                PlanError::TooLarge { .. } => "too_large",
                PlanError::Unsatisfiable(_) => "unsatisfiable",
                PlanError::LimitExceeded(_) => "limit_exceeded",
                PlanError::UnknownCourse(_) => "unknown_course",
                PlanError::InvalidConstraints(_) => "invalid_constraints",
            },
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Catalog(CatalogError::UnknownInstitution(_))
            | Error::Catalog(CatalogError::UnknownProgram(_))
            | Error::Plan(PlanError::UnknownCourse(_)) => ErrorClass::NotFound,
            Error::Catalog(CatalogError::Io { .. }) => ErrorClass::Internal,
            Error::Catalog(_)
            | Error::Audit(AuditError::CatalogMismatch(_))
            | Error::Audit(AuditError::InvalidAssignment(_))
            | Error::Plan(PlanError::InvalidConstraints(_)) => ErrorClass::Validation,
            Error::Audit(_) | Error::Plan(_) => ErrorClass::Engine,
        }
    }

    /// Structured detail for machine consumers, when there is any.
    pub fn detail(&self) -> serde_json::Value {
        match self {
            Error::Catalog(CatalogError::Validation(v)) => serde_json::to_value(v).unwrap_or(serde_json::Value::Null),
            Error::Plan(PlanError::Infeasible(reason)) => {
                serde_json::to_value(reason).unwrap_or(serde_json::Value::Null)
            }
            _ => serde_json::Value::Null,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
