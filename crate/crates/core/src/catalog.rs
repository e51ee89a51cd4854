//! Catalog files and immutable catalog snapshots.
//!
//! A catalog directory holds one or more UTF-8 JSON files, each with any of
//! the top-level arrays `institutions`, `courses`, `programs`,
//! `equivalences` and `exams`. Ids are unique per entity kind across the
//! whole directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::equivalence::{Disposition, EquivalenceRule};
use crate::error::{AuditError, CatalogError};
use crate::ids::{CourseId, ExamId, InstitutionId, ProgramId};
use crate::model::{Course, Credential, Exam, Institution, InstitutionKind, Program, Transcript, TranscriptRecord};
use crate::requirements::{check_program, CourseCatalog};

static NEXT_VERSION: AtomicU64 = AtomicU64::new(1);

/// Contents of one catalog file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogDocument {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub institutions: Vec<Institution>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub courses: Vec<Course>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub programs: Vec<Program>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub equivalences: Vec<EquivalenceRule>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exams: Vec<Exam>,
}

impl CatalogDocument {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CatalogError> {
        serde_json::from_str(text).map_err(|e| CatalogError::Schema {
            origin: origin.to_string(),
            message: e.to_string(),
        })
    }
}

/// A fully resolved, immutable view of a catalog directory.
#[derive(Debug, Clone)]
pub struct CatalogSnapshot {
    version: u64,
    institutions: BTreeMap<InstitutionId, Institution>,
    catalog: CourseCatalog,
    programs: BTreeMap<ProgramId, Program>,
    equivalences: BTreeMap<(CourseId, InstitutionId), EquivalenceRule>,
    sources: Vec<PathBuf>,
}

fn insert_unique<K: Ord + ToString, V>(
    map: &mut BTreeMap<K, V>,
    key: K,
    value: V,
    kind: &'static str,
) -> Result<(), CatalogError> {
    if map.contains_key(&key) {
        return Err(CatalogError::DuplicateId {
            kind,
            id: key.to_string(),
        });
    }
    map.insert(key, value);
    Ok(())
}

impl CatalogSnapshot {
    /// Merges documents, resolves cross references and validates every
    /// program. The snapshot receives a fresh version number.
    pub fn from_documents(documents: Vec<CatalogDocument>) -> Result<Self, CatalogError> {
        let mut institutions = BTreeMap::new();
        let mut courses = BTreeMap::new();
        let mut exams = BTreeMap::new();
        let mut programs = Vec::new();
        let mut rules = Vec::new();
        for doc in documents {
            for inst in doc.institutions {
                insert_unique(&mut institutions, inst.id.clone(), inst, "institution")?;
            }
            for course in doc.courses {
                insert_unique(&mut courses, course.id.clone(), course, "course")?;
            }
            for exam in doc.exams {
                insert_unique(&mut exams, exam.id.clone(), exam, "exam")?;
            }
            programs.extend(doc.programs);
            rules.extend(doc.equivalences);
        }

        for course in courses.values() {
            if !institutions.contains_key(&course.institution_id) {
                return Err(CatalogError::CrossRef(format!(
                    "course {} names unknown institution {}",
                    course.id, course.institution_id
                )));
            }
        }
        let catalog = CourseCatalog { courses, exams };
        let violations = catalog.validate();
        if !violations.is_empty() {
            return Err(CatalogError::Validation(violations));
        }

        let mut by_id = BTreeMap::new();
        for program in programs {
            if !institutions.contains_key(&program.institution_id) {
                return Err(CatalogError::CrossRef(format!(
                    "program {} names unknown institution {}",
                    program.id, program.institution_id
                )));
            }
            let program = check_program(program, &catalog)?;
            insert_unique(&mut by_id, program.id.clone(), program, "program")?;
        }

        let mut equivalences = BTreeMap::new();
        for rule in rules {
            let Some(source) = catalog.courses.get(&rule.source_course_id) else {
                return Err(CatalogError::CrossRef(format!(
                    "equivalence source {} is not a known course",
                    rule.source_course_id
                )));
            };
            if !institutions.contains_key(&rule.target_institution_id) {
                return Err(CatalogError::CrossRef(format!(
                    "equivalence for {} targets unknown institution {}",
                    rule.source_course_id, rule.target_institution_id
                )));
            }
            if source.institution_id == rule.target_institution_id {
                return Err(CatalogError::CrossRef(format!(
                    "equivalence for {} targets its own institution",
                    rule.source_course_id
                )));
            }
            if let Disposition::Equivalent { target_course_id } = &rule.disposition {
                match catalog.courses.get(target_course_id) {
                    Some(target) if target.institution_id == rule.target_institution_id => {}
                    _ => {
                        return Err(CatalogError::CrossRef(format!(
                            "equivalence target {} is not a course at {}",
                            target_course_id, rule.target_institution_id
                        )))
                    }
                }
            }
            let key = (rule.source_course_id.clone(), rule.target_institution_id.clone());
            if equivalences.contains_key(&key) {
                return Err(CatalogError::DuplicateId {
                    kind: "equivalence",
                    id: format!("{}->{}", key.0, key.1),
                });
            }
            equivalences.insert(key, rule);
        }

        Ok(CatalogSnapshot {
            version: NEXT_VERSION.fetch_add(1, Ordering::SeqCst),
            institutions,
            catalog,
            programs: by_id,
            equivalences,
            sources: Vec::new(),
        })
    }

    pub fn empty() -> Self {
        Self::from_documents(Vec::new()).expect("empty catalog is valid")
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn sources(&self) -> &[PathBuf] {
        &self.sources
    }

    pub fn catalog(&self) -> &CourseCatalog {
        &self.catalog
    }

    pub fn institutions(&self) -> impl Iterator<Item = &Institution> {
        self.institutions.values()
    }

    pub fn institution(&self, id: &str) -> Option<&Institution> {
        self.institutions.get(id)
    }

    pub fn courses(&self) -> impl Iterator<Item = &Course> {
        self.catalog.courses.values()
    }

    pub fn course(&self, id: &str) -> Option<&Course> {
        self.catalog.courses.get(id)
    }

    pub fn exams(&self) -> impl Iterator<Item = &Exam> {
        self.catalog.exams.values()
    }

    pub fn exam(&self, id: &ExamId) -> Option<&Exam> {
        self.catalog.exams.get(id)
    }

    pub fn programs(&self) -> impl Iterator<Item = &Program> {
        self.programs.values()
    }

    pub fn program(&self, id: &str) -> Result<&Program, CatalogError> {
        self.programs
            .get(id)
            .ok_or_else(|| CatalogError::UnknownProgram(ProgramId::new(id)))
    }

    pub fn programs_at(&self, institution: &str) -> impl Iterator<Item = &Program> + '_ {
        let institution = institution.to_string();
        self.programs
            .values()
            .filter(move |p| p.institution_id.as_str() == institution)
    }

    pub fn bachelor_programs(&self) -> impl Iterator<Item = &Program> {
        self.programs.values().filter(|p| p.credential == Credential::Bachelor)
    }

    pub fn equivalences(&self) -> impl Iterator<Item = &EquivalenceRule> {
        self.equivalences.values()
    }

    pub fn equivalence(&self, source: &CourseId, target: &InstitutionId) -> Option<&EquivalenceRule> {
        self.equivalences.get(&(source.clone(), target.clone()))
    }

    pub fn institution_kind(&self, id: &InstitutionId) -> Option<InstitutionKind> {
        self.institutions.get(id).map(|i| i.kind)
    }

    /// Catalog courses on the transcript must carry the catalog's credit
    /// hours and institution.
    pub fn check_transcript(&self, transcript: &Transcript) -> Result<(), AuditError> {
        for (index, record) in transcript.records.iter().enumerate() {
            let TranscriptRecord::Course(rec) = record else {
                continue;
            };
            if !rec.credit_hours.is_positive() {
                return Err(AuditError::CatalogMismatch(format!(
                    "record {index}: credit_hours must be positive"
                )));
            }
            if let Some(course) = self.catalog.courses.get(&rec.course_id) {
                if course.credit_hours != rec.credit_hours {
                    return Err(AuditError::CatalogMismatch(format!(
                        "record {index}: {} carries {} hours but the catalog lists {}",
                        rec.course_id, rec.credit_hours, course.credit_hours
                    )));
                }
                if course.institution_id != rec.institution_id {
                    return Err(AuditError::CatalogMismatch(format!(
                        "record {index}: {} is offered by {}, not {}",
                        rec.course_id, course.institution_id, rec.institution_id
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Reads every `*.json` file in `dir` (sorted by name) into a new snapshot.
pub fn ingest_catalog(dir: &Path) -> Result<CatalogSnapshot, CatalogError> {
    let io_err = |path: &Path, source| CatalogError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| io_err(dir, e))? {
        let path = entry.map_err(|e| io_err(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|ext| ext == "json") {
            files.push(path);
        }
    }
    files.sort();
    let mut documents = Vec::with_capacity(files.len());
    for path in &files {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        documents.push(CatalogDocument::parse(&text, &path.display().to_string())?);
    }
    let mut snapshot = CatalogSnapshot::from_documents(documents)?;
    snapshot.sources = files;
    Ok(snapshot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn doc(text: &str) -> CatalogDocument {
        CatalogDocument::parse(text, "test").unwrap()
    }

    const BASE: &str = r#"{
        "institutions": [
            {"id": "CC", "name": "Community College", "kind": "COMMUNITY_COLLEGE"},
            {"id": "U", "name": "University", "kind": "UNIVERSITY"}
        ],
        "courses": [
            {"id": "CC-1", "institution_id": "CC", "subject_code": "CS", "number": "1", "title": "Intro", "credit_hours": 3},
            {"id": "U-1", "institution_id": "U", "subject_code": "CS", "number": "1", "title": "Intro", "credit_hours": 3}
        ]
    }"#;

    #[test]
    fn empty_snapshot_gets_version() {
        let a = CatalogSnapshot::empty();
        let b = CatalogSnapshot::empty();
        assert_eq!(a.courses().count(), 0);
        assert!(b.version() > a.version());
    }

    #[test]
    fn equivalence_to_unknown_course_is_cross_ref_error() {
        let rules = doc(
            r#"{"equivalences": [{"source_course_id": "CC-1", "target_institution_id": "U",
                "disposition": "equivalent", "target_course_id": "U-404", "evaluated_on": "2021-05-01"}]}"#,
        );
        let err = CatalogSnapshot::from_documents(vec![doc(BASE), rules]).unwrap_err();
        assert!(matches!(err, CatalogError::CrossRef(_)), "{err}");
    }

    #[test]
    fn duplicate_rule_and_duplicate_course() {
        let rule = r#"{"source_course_id": "CC-1", "target_institution_id": "U",
            "disposition": "denied", "evaluated_on": "2021-05-01"}"#;
        let rules = doc(&format!(r#"{{"equivalences": [{rule}, {rule}]}}"#));
        assert!(matches!(
            CatalogSnapshot::from_documents(vec![doc(BASE), rules]),
            Err(CatalogError::DuplicateId {
                kind: "equivalence",
                ..
            })
        ));
        assert!(matches!(
            CatalogSnapshot::from_documents(vec![doc(BASE), doc(BASE)]),
            Err(CatalogError::DuplicateId {
                kind: "institution",
                ..
            })
        ));
    }

    #[test]
    fn transcript_hours_must_match_catalog() {
        let snap = CatalogSnapshot::from_documents(vec![doc(BASE)]).unwrap();
        let ok = Transcript::new(vec![TranscriptRecord::course(
            "CC-1",
            "CC",
            crate::model::Grade::B,
            Rational::integer(3),
        )]);
        assert!(snap.check_transcript(&ok).is_ok());
        let bad = Transcript::new(vec![TranscriptRecord::course(
            "CC-1",
            "CC",
            crate::model::Grade::B,
            Rational::integer(4),
        )]);
        assert!(matches!(
            snap.check_transcript(&bad),
            Err(AuditError::CatalogMismatch(_))
        ));
    }

    #[test]
    fn prerequisite_cycle_rejected() {
        let text = r#"{
            "institutions": [{"id": "U", "name": "U", "kind": "UNIVERSITY"}],
            "courses": [
                {"id": "A", "institution_id": "U", "subject_code": "X", "number": "1", "title": "A", "credit_hours": 3, "prerequisites": ["B"]},
                {"id": "B", "institution_id": "U", "subject_code": "X", "number": "2", "title": "B", "credit_hours": 3, "prerequisites": ["A"]}
            ]}"#;
        match CatalogSnapshot::from_documents(vec![doc(text)]) {
            Err(CatalogError::Validation(v)) => assert!(v
                .iter()
                .any(|v| matches!(v, crate::error::Violation::PrerequisiteCycle { .. }))),
            other => panic!("expected cycle, got {other:?}"),
        }
    }
}
