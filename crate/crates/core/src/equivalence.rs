//! Cross-institution course equivalences and transcript translation.
//!
//! Translation decides *recognition*: whether the receiving institution
//! puts a course on its transcript at all. Whether recognized credit
//! *applies* to a program is decided afterwards by the audit.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::audit::{audit, AuditPolicy};
use crate::catalog::CatalogSnapshot;
use crate::error::{CatalogError, Error};
use crate::ids::{CourseId, InstitutionId};
use crate::model::{CourseRecord, ElectiveLevel, ElectiveRecord, Program, Transcript, TranscriptRecord};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Disposition {
    Equivalent { target_course_id: CourseId },
    Elective(ElectiveLevel),
    Denied,
}

/// How one source course is treated by one receiving institution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceRule {
    pub source_course_id: CourseId,
    pub target_institution_id: InstitutionId,
    pub disposition: Disposition,
    pub evaluated_on: NaiveDate,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawDisposition {
    Equivalent,
    ElectiveLower,
    ElectiveUpper,
    Denied,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    source_course_id: CourseId,
    target_institution_id: InstitutionId,
    disposition: RawDisposition,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target_course_id: Option<CourseId>,
    evaluated_on: NaiveDate,
}

impl Serialize for EquivalenceRule {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let (disposition, target_course_id) = match &self.disposition {
            Disposition::Equivalent { target_course_id } => {
                (RawDisposition::Equivalent, Some(target_course_id.clone()))
            }
            Disposition::Elective(ElectiveLevel::Lower) => (RawDisposition::ElectiveLower, None),
            Disposition::Elective(ElectiveLevel::Upper) => (RawDisposition::ElectiveUpper, None),
            Disposition::Denied => (RawDisposition::Denied, None),
        };
        RawRule {
            source_course_id: self.source_course_id.clone(),
            target_institution_id: self.target_institution_id.clone(),
            disposition,
            target_course_id,
            evaluated_on: self.evaluated_on,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EquivalenceRule {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawRule::deserialize(deserializer)?;
        let disposition = match (raw.disposition, raw.target_course_id) {
            (RawDisposition::Equivalent, Some(target_course_id)) => Disposition::Equivalent { target_course_id },
            (RawDisposition::Equivalent, None) => {
                return Err(D::Error::custom("equivalent disposition requires target_course_id"))
            }
            (_, Some(_)) => {
                return Err(D::Error::custom(
                    "target_course_id is only valid for equivalent dispositions",
                ))
            }
            (RawDisposition::ElectiveLower, None) => Disposition::Elective(ElectiveLevel::Lower),
            (RawDisposition::ElectiveUpper, None) => Disposition::Elective(ElectiveLevel::Upper),
            (RawDisposition::Denied, None) => Disposition::Denied,
        };
        Ok(EquivalenceRule {
            source_course_id: raw.source_course_id,
            target_institution_id: raw.target_institution_id,
            disposition,
            evaluated_on: raw.evaluated_on,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TranslationStatus {
    /// Already a record of the receiving institution, or an exam result.
    Native,
    Equivalent {
        target_course_id: CourseId,
    },
    Elective {
        level: ElectiveLevel,
    },
    /// No rule exists yet; the student can request an evaluation.
    Unevaluated,
    Denied,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslatedRecord {
    pub source: TranscriptRecord,
    #[serde(flatten)]
    pub status: TranslationStatus,
    pub recognized_credit_hours: Rational,
}

impl TranslatedRecord {
    /// The record as it appears on the receiving transcript, if it appears.
    pub fn receiving_record(&self, target: &InstitutionId) -> Option<TranscriptRecord> {
        match (&self.status, &self.source) {
            (TranslationStatus::Native, source) => Some(source.clone()),
            (TranslationStatus::Equivalent { target_course_id }, TranscriptRecord::Course(src)) => {
                Some(TranscriptRecord::Course(CourseRecord {
                    course_id: target_course_id.clone(),
                    institution_id: target.clone(),
                    grade: src.grade,
                    term_index: src.term_index,
                    credit_hours: self.recognized_credit_hours,
                }))
            }
            (TranslationStatus::Elective { level }, TranscriptRecord::Course(src)) => {
                Some(TranscriptRecord::Elective(ElectiveRecord {
                    elective_level: *level,
                    source_course_id: src.course_id.clone(),
                    institution_id: target.clone(),
                    grade: src.grade,
                    term_index: src.term_index,
                    credit_hours: self.recognized_credit_hours,
                }))
            }
            _ => None,
        }
    }
}

fn translate_record(record: &TranscriptRecord, target: &InstitutionId, snapshot: &CatalogSnapshot) -> TranslatedRecord {
    let native = |record: &TranscriptRecord| TranslatedRecord {
        source: record.clone(),
        status: TranslationStatus::Native,
        recognized_credit_hours: record.credit_hours(),
    };
    let unrecognized = |status| TranslatedRecord {
        source: record.clone(),
        status,
        recognized_credit_hours: Rational::ZERO,
    };
    match record {
        TranscriptRecord::Exam(_) => native(record),
        TranscriptRecord::Elective(e) if &e.institution_id == target => native(record),
        TranscriptRecord::Elective(_) => unrecognized(TranslationStatus::Unevaluated),
        TranscriptRecord::Course(c) if &c.institution_id == target => native(record),
        TranscriptRecord::Course(c) => match snapshot.equivalence(&c.course_id, target) {
            None => unrecognized(TranslationStatus::Unevaluated),
            Some(rule) => match &rule.disposition {
                Disposition::Denied => unrecognized(TranslationStatus::Denied),
                Disposition::Equivalent { target_course_id } => TranslatedRecord {
                    source: record.clone(),
                    status: TranslationStatus::Equivalent {
                        target_course_id: target_course_id.clone(),
                    },
                    recognized_credit_hours: c.credit_hours,
                },
                Disposition::Elective(level) => TranslatedRecord {
                    source: record.clone(),
                    status: TranslationStatus::Elective { level: *level },
                    recognized_credit_hours: c.credit_hours,
                },
            },
        },
    }
}

/// One translated record per source record, in order.
pub fn translate_transcript(
    transcript: &Transcript,
    target_institution: &InstitutionId,
    snapshot: &CatalogSnapshot,
) -> Result<Vec<TranslatedRecord>, CatalogError> {
    if snapshot.institution(target_institution.as_str()).is_none() {
        return Err(CatalogError::UnknownInstitution(target_institution.clone()));
    }
    Ok(transcript
        .records
        .iter()
        .map(|r| translate_record(r, target_institution, snapshot))
        .collect())
}

/// The transcript the receiving institution would audit. Unevaluated and
/// denied records are left off.
pub fn receiving_transcript(translated: &[TranslatedRecord], target: &InstitutionId) -> Transcript {
    Transcript::new(translated.iter().filter_map(|t| t.receiving_record(target)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CreditSummary {
    pub total_hours: Rational,
    pub recognized_hours: Rational,
    pub applied_hours: Rational,
}

/// Recognized transfer hours versus the hours that actually apply to
/// `program` under the optimal audit.
pub fn applied_vs_recognized(
    transcript: &Transcript,
    program: &Program,
    snapshot: &CatalogSnapshot,
    policy: &AuditPolicy,
) -> Result<CreditSummary, Error> {
    let translated = translate_transcript(transcript, &program.institution_id, snapshot)?;
    let recognized_hours = translated.iter().map(|t| t.recognized_credit_hours).sum();
    let receiving = receiving_transcript(&translated, &program.institution_id);
    let result = audit(&receiving, program, policy)?;
    Ok(CreditSummary {
        total_hours: transcript.total_credit_hours(),
        recognized_hours,
        applied_hours: result.applied_credit_hours,
    })
}
