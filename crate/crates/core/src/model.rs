//! Domain types shared by every engine component: grades, institutions,
//! courses, requirement trees, programs and transcripts.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ids::{CourseId, ExamId, InstitutionId, NodeId, ProgramId};
use crate::rational::Rational;

/// Letter grade on the five-letter 4.0 scale. The derived order is the
/// points order: `F < D < C < B < A`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Grade {
    F,
    #[default]
    D,
    C,
    B,
    A,
}

impl Grade {
    pub const ALL: [Grade; 5] = [Grade::F, Grade::D, Grade::C, Grade::B, Grade::A];

    pub fn points(self) -> Rational {
        Rational::integer(match self {
            Grade::A => 4,
            Grade::B => 3,
            Grade::C => 2,
            Grade::D => 1,
            Grade::F => 0,
        })
    }

    pub fn letter(self) -> char {
        match self {
            Grade::A => 'A',
            Grade::B => 'B',
            Grade::C => 'C',
            Grade::D => 'D',
            Grade::F => 'F',
        }
    }

    pub fn is_passing(self) -> bool {
        self >= Grade::D
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Grade {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(Grade::A),
            "B" | "b" => Ok(Grade::B),
            "C" | "c" => Ok(Grade::C),
            "D" | "d" => Ok(Grade::D),
            "F" | "f" => Ok(Grade::F),
            other => Err(format!("unknown grade {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InstitutionKind {
    CommunityCollege,
    University,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Institution {
    pub id: InstitutionId,
    pub name: String,
    pub kind: InstitutionKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Course {
    pub id: CourseId,
    pub institution_id: InstitutionId,
    pub subject_code: String,
    pub number: String,
    pub title: String,
    pub credit_hours: Rational,
    #[serde(default)]
    pub prerequisites: BTreeSet<CourseId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exam {
    pub id: ExamId,
    pub title: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Credential {
    Associate,
    Bachelor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ElectiveLevel {
    Lower,
    Upper,
}

/// One node of a degree-requirement tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequirementNode {
    pub id: NodeId,
    pub label: String,
    /// A shareable leaf is evaluated against the whole transcript and does
    /// not consume the records it uses.
    pub shareable: bool,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    All(Vec<RequirementNode>),
    Any(Vec<RequirementNode>),
    Choose {
        choose_k: u32,
        children: Vec<RequirementNode>,
    },
    Credits {
        min_credit_hours: Rational,
        course_pool: BTreeSet<CourseId>,
        /// Elective transfer credit may count toward this pool.
        accepts_electives: bool,
        min_grade: Grade,
    },
    Course {
        course_id: CourseId,
        min_grade: Grade,
    },
    Exam {
        exam_id: ExamId,
        min_score: Rational,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NodeKindTag {
    All,
    Any,
    Choose,
    Credits,
    Course,
    Exam,
}

impl RequirementNode {
    pub fn all(id: &str, label: &str, children: Vec<RequirementNode>) -> Self {
        Self::composite(id, label, NodeKind::All(children))
    }

    pub fn any(id: &str, label: &str, children: Vec<RequirementNode>) -> Self {
        Self::composite(id, label, NodeKind::Any(children))
    }

    pub fn choose(id: &str, label: &str, choose_k: u32, children: Vec<RequirementNode>) -> Self {
        Self::composite(id, label, NodeKind::Choose { choose_k, children })
    }

    pub fn course(id: &str, course_id: &str, min_grade: Grade) -> Self {
        Self::composite(
            id,
            course_id,
            NodeKind::Course {
                course_id: CourseId::new(course_id),
                min_grade,
            },
        )
    }

    pub fn credits(id: &str, label: &str, min_credit_hours: Rational, pool: &[&str]) -> Self {
        Self::composite(
            id,
            label,
            NodeKind::Credits {
                min_credit_hours,
                course_pool: pool.iter().map(|c| CourseId::new(*c)).collect(),
                accepts_electives: false,
                min_grade: Grade::D,
            },
        )
    }

    pub fn exam(id: &str, exam_id: &str, min_score: Rational) -> Self {
        Self::composite(
            id,
            exam_id,
            NodeKind::Exam {
                exam_id: ExamId::new(exam_id),
                min_score,
            },
        )
    }

    fn composite(id: &str, label: &str, kind: NodeKind) -> Self {
        RequirementNode {
            id: NodeId::new(id),
            label: label.to_string(),
            shareable: false,
            kind,
        }
    }

    pub fn shared(mut self) -> Self {
        self.shareable = true;
        self
    }

    pub fn tag(&self) -> NodeKindTag {
        match self.kind {
            NodeKind::All(_) => NodeKindTag::All,
            NodeKind::Any(_) => NodeKindTag::Any,
            NodeKind::Choose { .. } => NodeKindTag::Choose,
            NodeKind::Credits { .. } => NodeKindTag::Credits,
            NodeKind::Course { .. } => NodeKindTag::Course,
            NodeKind::Exam { .. } => NodeKindTag::Exam,
        }
    }

    pub fn children(&self) -> &[RequirementNode] {
        match &self.kind {
            NodeKind::All(c) | NodeKind::Any(c) => c,
            NodeKind::Choose { children, .. } => children,
            _ => &[],
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(
            self.kind,
            NodeKind::Credits { .. } | NodeKind::Course { .. } | NodeKind::Exam { .. }
        )
    }

    /// Pre-order traversal.
    pub fn walk(&self) -> Vec<&RequirementNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            out.push(node);
            for child in node.children().iter().rev() {
                stack.push(child);
            }
        }
        out
    }

    pub fn leaves(&self) -> Vec<&RequirementNode> {
        self.walk().into_iter().filter(|n| n.is_leaf()).collect()
    }

    pub fn find(&self, id: &str) -> Option<&RequirementNode> {
        self.walk().into_iter().find(|n| n.id.as_str() == id)
    }

    /// Every course id mentioned by a COURSE leaf or CREDITS pool.
    pub fn referenced_courses(&self) -> BTreeSet<CourseId> {
        let mut out = BTreeSet::new();
        for node in self.walk() {
            match &node.kind {
                NodeKind::Course { course_id, .. } => {
                    out.insert(course_id.clone());
                }
                NodeKind::Credits { course_pool, .. } => {
                    out.extend(course_pool.iter().cloned());
                }
                _ => {}
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub id: ProgramId,
    pub institution_id: InstitutionId,
    pub credential: Credential,
    pub title: String,
    pub root: RequirementNode,
    pub total_credit_hours: Rational,
}

/// A graded course on a transcript.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CourseRecord {
    pub course_id: CourseId,
    pub institution_id: InstitutionId,
    pub grade: Grade,
    #[serde(default)]
    pub term_index: u32,
    pub credit_hours: Rational,
}

/// A placement or proficiency exam result. Exams carry no credit hours.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExamRecord {
    pub exam_id: ExamId,
    pub score: Rational,
    #[serde(default)]
    pub term_index: u32,
}

/// Transfer credit recognized only as generic elective hours at
/// `institution_id`. Produced by transcript translation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElectiveRecord {
    pub elective_level: ElectiveLevel,
    pub source_course_id: CourseId,
    pub institution_id: InstitutionId,
    pub grade: Grade,
    #[serde(default)]
    pub term_index: u32,
    pub credit_hours: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TranscriptRecord {
    Course(CourseRecord),
    Exam(ExamRecord),
    Elective(ElectiveRecord),
}

impl TranscriptRecord {
    pub fn course(course_id: &str, institution_id: &str, grade: Grade, hours: Rational) -> Self {
        TranscriptRecord::Course(CourseRecord {
            course_id: CourseId::new(course_id),
            institution_id: InstitutionId::new(institution_id),
            grade,
            term_index: 0,
            credit_hours: hours,
        })
    }

    pub fn exam(exam_id: &str, score: Rational) -> Self {
        TranscriptRecord::Exam(ExamRecord {
            exam_id: ExamId::new(exam_id),
            score,
            term_index: 0,
        })
    }

    pub fn credit_hours(&self) -> Rational {
        match self {
            TranscriptRecord::Course(r) => r.credit_hours,
            TranscriptRecord::Elective(r) => r.credit_hours,
            TranscriptRecord::Exam(_) => Rational::ZERO,
        }
    }

    pub fn grade(&self) -> Option<Grade> {
        match self {
            TranscriptRecord::Course(r) => Some(r.grade),
            TranscriptRecord::Elective(r) => Some(r.grade),
            TranscriptRecord::Exam(_) => None,
        }
    }

    pub fn course_id(&self) -> Option<&CourseId> {
        match self {
            TranscriptRecord::Course(r) => Some(&r.course_id),
            _ => None,
        }
    }

    pub fn institution_id(&self) -> Option<&InstitutionId> {
        match self {
            TranscriptRecord::Course(r) => Some(&r.institution_id),
            TranscriptRecord::Elective(r) => Some(&r.institution_id),
            TranscriptRecord::Exam(_) => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transcript {
    #[serde(default)]
    pub records: Vec<TranscriptRecord>,
}

impl Transcript {
    pub fn new(records: Vec<TranscriptRecord>) -> Self {
        Transcript { records }
    }

    pub fn total_credit_hours(&self) -> Rational {
        self.records.iter().map(TranscriptRecord::credit_hours).sum()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Courses passed with at least a D, the set that discharges prerequisites.
    pub fn passed_courses(&self) -> BTreeSet<CourseId> {
        self.records
            .iter()
            .filter_map(|r| match r {
                TranscriptRecord::Course(c) if c.grade.is_passing() => Some(c.course_id.clone()),
                _ => None,
            })
            .collect()
    }
}
