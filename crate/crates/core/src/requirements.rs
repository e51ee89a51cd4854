//! Text encoding, parsing and validation of degree-requirement trees.
//!
//! Nodes are encoded as flat JSON objects whose `kind` selects which of
//! the optional fields must be present:
//!
//! ```json
//! {"id": "math", "label": "Math Core", "kind": "ANY", "children": [
//!   {"id": "stat", "label": "Statistics", "kind": "COURSE", "course_id": "U-STAT-101", "min_grade": "C"},
//!   {"id": "place", "label": "Placement", "kind": "EXAM", "exam_id": "MATH-PLACE", "min_score": 70}
//! ]}
//! ```

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{CatalogError, Violation};
use crate::ids::{CourseId, ExamId, InstitutionId, NodeId, ProgramId};
use crate::model::{Course, Credential, Exam, Grade, NodeKind, NodeKindTag, Program, RequirementNode};
use crate::rational::Rational;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    id: NodeId,
    #[serde(default)]
    label: String,
    kind: NodeKindTag,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    children: Vec<RawNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    choose_k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min_credit_hours: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    course_pool: Option<BTreeSet<CourseId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    accepts_electives: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    course_id: Option<CourseId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min_grade: Option<Grade>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exam_id: Option<ExamId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min_score: Option<Rational>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    shareable: bool,
}

impl TryFrom<RawNode> for RequirementNode {
    type Error = String;

    fn try_from(raw: RawNode) -> Result<Self, String> {
        let id = raw.id.clone();
        let fail = |what: &str| Err(format!("node {id}: {what}"));
        let is_composite = matches!(raw.kind, NodeKindTag::All | NodeKindTag::Any | NodeKindTag::Choose);
        if !is_composite && !raw.children.is_empty() {
            return fail("leaf nodes cannot have children");
        }
        if raw.kind != NodeKindTag::Choose && raw.choose_k.is_some() {
            return fail("choose_k is only valid on CHOOSE");
        }
        if raw.kind != NodeKindTag::Credits
            && (raw.min_credit_hours.is_some() || raw.course_pool.is_some() || raw.accepts_electives.is_some())
        {
            return fail("credit pool fields are only valid on CREDITS");
        }
        if raw.kind != NodeKindTag::Course && raw.course_id.is_some() {
            return fail("course_id is only valid on COURSE");
        }
        if !matches!(raw.kind, NodeKindTag::Course | NodeKindTag::Credits) && raw.min_grade.is_some() {
            return fail("min_grade is only valid on COURSE or CREDITS");
        }
        if raw.kind != NodeKindTag::Exam && (raw.exam_id.is_some() || raw.min_score.is_some()) {
            return fail("exam fields are only valid on EXAM");
        }
        if is_composite && raw.shareable {
            return fail("only leaves can be shareable");
        }

        let children = raw
            .children
            .into_iter()
            .map(RequirementNode::try_from)
            .collect::<Result<Vec<_>, _>>()?;
        let kind = match raw.kind {
            NodeKindTag::All => NodeKind::All(children),
            NodeKindTag::Any => NodeKind::Any(children),
            NodeKindTag::Choose => match raw.choose_k {
                Some(choose_k) => NodeKind::Choose { choose_k, children },
                None => return fail("CHOOSE requires choose_k"),
            },
            NodeKindTag::Credits => match (raw.min_credit_hours, raw.course_pool) {
                (Some(min_credit_hours), Some(course_pool)) => NodeKind::Credits {
                    min_credit_hours,
                    course_pool,
                    accepts_electives: raw.accepts_electives.unwrap_or(false),
                    min_grade: raw.min_grade.unwrap_or_default(),
                },
                _ => return fail("CREDITS requires min_credit_hours and course_pool"),
            },
            NodeKindTag::Course => match raw.course_id {
                Some(course_id) => NodeKind::Course {
                    course_id,
                    min_grade: raw.min_grade.unwrap_or_default(),
                },
                None => return fail("COURSE requires course_id"),
            },
            NodeKindTag::Exam => match (raw.exam_id, raw.min_score) {
                (Some(exam_id), Some(min_score)) => NodeKind::Exam { exam_id, min_score },
                _ => return fail("EXAM requires exam_id and min_score"),
            },
        };
        Ok(RequirementNode {
            id: raw.id,
            label: raw.label,
            shareable: raw.shareable,
            kind,
        })
    }
}

impl From<&RequirementNode> for RawNode {
    fn from(node: &RequirementNode) -> Self {
        let mut raw = RawNode {
            id: node.id.clone(),
            label: node.label.clone(),
            kind: node.tag(),
            children: node.children().iter().map(RawNode::from).collect(),
            choose_k: None,
            min_credit_hours: None,
            course_pool: None,
            accepts_electives: None,
            course_id: None,
            min_grade: None,
            exam_id: None,
            min_score: None,
            shareable: node.shareable,
        };
        match &node.kind {
            NodeKind::All(_) | NodeKind::Any(_) => {}
            NodeKind::Choose { choose_k, .. } => raw.choose_k = Some(*choose_k),
            NodeKind::Credits {
                min_credit_hours,
                course_pool,
                accepts_electives,
                min_grade,
            } => {
                raw.min_credit_hours = Some(*min_credit_hours);
                raw.course_pool = Some(course_pool.clone());
                raw.accepts_electives = accepts_electives.then_some(true);
                raw.min_grade = Some(*min_grade);
            }
            NodeKind::Course { course_id, min_grade } => {
                raw.course_id = Some(course_id.clone());
                raw.min_grade = Some(*min_grade);
            }
            NodeKind::Exam { exam_id, min_score } => {
                raw.exam_id = Some(exam_id.clone());
                raw.min_score = Some(*min_score);
            }
        }
        raw
    }
}

impl Serialize for RequirementNode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawNode::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RequirementNode {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawNode::deserialize(deserializer)?;
        RequirementNode::try_from(raw).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProgram {
    id: ProgramId,
    institution_id: InstitutionId,
    credential: Credential,
    title: String,
    total_credit_hours: Rational,
    root: RequirementNode,
}

impl Serialize for Program {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawProgram {
            id: self.id.clone(),
            institution_id: self.institution_id.clone(),
            credential: self.credential,
            title: self.title.clone(),
            total_credit_hours: self.total_credit_hours,
            root: self.root.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Program {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawProgram::deserialize(deserializer)?;
        Ok(Program {
            id: raw.id,
            institution_id: raw.institution_id,
            credential: raw.credential,
            title: raw.title,
            root: raw.root,
            total_credit_hours: raw.total_credit_hours,
        })
    }
}

/// Courses and exams against which requirement references are resolved.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CourseCatalog {
    pub courses: BTreeMap<CourseId, Course>,
    pub exams: BTreeMap<ExamId, Exam>,
}

impl CourseCatalog {
    pub fn new(courses: impl IntoIterator<Item = Course>, exams: impl IntoIterator<Item = Exam>) -> Self {
        CourseCatalog {
            courses: courses.into_iter().map(|c| (c.id.clone(), c)).collect(),
            exams: exams.into_iter().map(|e| (e.id.clone(), e)).collect(),
        }
    }

    pub fn course(&self, id: &str) -> Option<&Course> {
        self.courses.get(id)
    }

    pub fn credit_hours(&self, id: &str) -> Option<Rational> {
        self.courses.get(id).map(|c| c.credit_hours)
    }

    /// Course-level violations: non-positive hours, dangling or cyclic
    /// prerequisites.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for course in self.courses.values() {
            if !course.credit_hours.is_positive() {
                out.push(Violation::NonPositiveCourseCredits {
                    course: course.id.clone(),
                });
            }
            for pre in &course.prerequisites {
                if !self.courses.contains_key(pre) {
                    out.push(Violation::DanglingPrerequisite {
                        course: course.id.clone(),
                        prerequisite: pre.clone(),
                    });
                }
            }
        }
        if let Some(cycle) = self.prerequisite_cycle() {
            out.push(Violation::PrerequisiteCycle { courses: cycle });
        }
        out
    }

    /// Returns one prerequisite cycle (first course repeated at the end),
    /// or `None` when the relation is acyclic.
    pub fn prerequisite_cycle(&self) -> Option<Vec<CourseId>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Open,
            Done,
        }
        let ids: Vec<&CourseId> = self.courses.keys().collect();
        let index: BTreeMap<&CourseId, usize> = ids.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let edges: Vec<Vec<usize>> = ids
            .iter()
            .map(|id| {
                self.courses[*id]
                    .prerequisites
                    .iter()
                    .filter_map(|p| index.get(p).copied())
                    .collect()
            })
            .collect();
        let mut mark = vec![Mark::New; ids.len()];
        for start in 0..ids.len() {
            if mark[start] != Mark::New {
                continue;
            }
            // Iterative DFS keeping the open path so a back edge yields the cycle.
            let mut path: Vec<(usize, usize)> = vec![(start, 0)];
            mark[start] = Mark::Open;
            while let Some(&mut (node, ref mut next)) = path.last_mut() {
                if *next < edges[node].len() {
                    let succ = edges[node][*next];
                    *next += 1;
                    match mark[succ] {
                        Mark::New => {
                            mark[succ] = Mark::Open;
                            path.push((succ, 0));
                        }
                        Mark::Open => {
                            let pos = path.iter().position(|(n, _)| *n == succ).unwrap_or(0);
                            let mut cycle: Vec<CourseId> = path[pos..].iter().map(|(n, _)| ids[*n].clone()).collect();
                            cycle.push(ids[succ].clone());
                            return Some(cycle);
                        }
                        Mark::Done => {}
                    }
                } else {
                    mark[node] = Mark::Done;
                    path.pop();
                }
            }
        }
        None
    }
}

/// Checks the structural invariants of a requirement tree and resolves its
/// course and exam references against `catalog`. Returns every violation
/// found; an empty list means the tree is valid.
pub fn validate_tree(root: &RequirementNode, catalog: &CourseCatalog) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for node in root.walk() {
        if !seen.insert(node.id.as_str()) {
            out.push(Violation::DuplicateNodeId { node: node.id.clone() });
        }
        match &node.kind {
            NodeKind::All(children) | NodeKind::Any(children) => {
                if children.is_empty() {
                    out.push(Violation::EmptyComposite { node: node.id.clone() });
                }
            }
            NodeKind::Choose { choose_k, children } => {
                if children.is_empty() {
                    out.push(Violation::EmptyComposite { node: node.id.clone() });
                }
                if *choose_k == 0 {
                    out.push(Violation::NonPositiveChoose { node: node.id.clone() });
                } else if *choose_k as usize > children.len() {
                    out.push(Violation::ChooseExceedsChildren {
                        node: node.id.clone(),
                        choose_k: *choose_k,
                        children: children.len(),
                    });
                }
            }
            NodeKind::Credits {
                min_credit_hours,
                course_pool,
                ..
            } => {
                if !min_credit_hours.is_positive() {
                    out.push(Violation::NonPositiveCredits { node: node.id.clone() });
                }
                if course_pool.is_empty() {
                    out.push(Violation::EmptyCoursePool { node: node.id.clone() });
                }
                for course_id in course_pool {
                    if !catalog.courses.contains_key(course_id) {
                        out.push(Violation::DanglingCourse {
                            node: node.id.clone(),
                            course_id: course_id.clone(),
                        });
                    }
                }
            }
            NodeKind::Course { course_id, .. } => {
                if !catalog.courses.contains_key(course_id) {
                    out.push(Violation::DanglingCourse {
                        node: node.id.clone(),
                        course_id: course_id.clone(),
                    });
                }
            }
            NodeKind::Exam { exam_id, .. } => {
                if !catalog.exams.contains_key(exam_id) {
                    out.push(Violation::DanglingExam {
                        node: node.id.clone(),
                        exam_id: exam_id.to_string(),
                    });
                }
            }
        }
    }
    out
}

/// Lower bound on the credit hours needed to satisfy `node`: ALL sums,
/// ANY takes the cheapest child, CHOOSE the k cheapest. Shareable leaves
/// and exams demand nothing because they never consume records.
pub fn minimum_credit_demand(node: &RequirementNode, catalog: &CourseCatalog) -> Rational {
    if node.shareable {
        return Rational::ZERO;
    }
    match &node.kind {
        NodeKind::All(children) => children.iter().map(|c| minimum_credit_demand(c, catalog)).sum(),
        NodeKind::Any(children) => children
            .iter()
            .map(|c| minimum_credit_demand(c, catalog))
            .min()
            .unwrap_or(Rational::ZERO),
        NodeKind::Choose { choose_k, children } => {
            let mut costs: Vec<Rational> = children.iter().map(|c| minimum_credit_demand(c, catalog)).collect();
            costs.sort();
            costs.into_iter().take(*choose_k as usize).sum()
        }
        NodeKind::Credits { min_credit_hours, .. } => *min_credit_hours,
        NodeKind::Course { course_id, .. } => catalog.credit_hours(course_id.as_str()).unwrap_or(Rational::ZERO),
        NodeKind::Exam { .. } => Rational::ZERO,
    }
}

/// Tree validation plus program-level checks: referenced courses must be
/// offered by the program's institution and the declared total must cover
/// the minimum demand of the tree.
pub fn validate_program(program: &Program, catalog: &CourseCatalog) -> Vec<Violation> {
    let mut out = validate_tree(&program.root, catalog);
    for node in program.root.walk() {
        let refs: Vec<&CourseId> = match &node.kind {
            NodeKind::Course { course_id, .. } => vec![course_id],
            NodeKind::Credits { course_pool, .. } => course_pool.iter().collect(),
            _ => continue,
        };
        for course_id in refs {
            if let Some(course) = catalog.courses.get(course_id) {
                if course.institution_id != program.institution_id {
                    out.push(Violation::ForeignCourse {
                        node: node.id.clone(),
                        course_id: course_id.clone(),
                        institution_id: program.institution_id.clone(),
                    });
                }
            }
        }
    }
    let minimum = minimum_credit_demand(&program.root, catalog);
    if program.total_credit_hours < minimum {
        out.push(Violation::TotalHoursBelowMinimum {
            program: program.id.clone(),
            total: program.total_credit_hours.to_string(),
            minimum: minimum.to_string(),
        });
    }
    out
}

/// Parses one program object and validates it against `catalog`.
pub fn parse_program(document: &str, catalog: &CourseCatalog) -> Result<Program, CatalogError> {
    let program: Program = serde_json::from_str(document).map_err(|e| CatalogError::Schema {
        origin: "program".to_string(),
        message: e.to_string(),
    })?;
    check_program(program, catalog)
}

pub(crate) fn check_program(program: Program, catalog: &CourseCatalog) -> Result<Program, CatalogError> {
    let mut violations = validate_program(&program, catalog);
    if let Some(pos) = violations
        .iter()
        .position(|v| matches!(v, Violation::DuplicateNodeId { .. }))
    {
        let Violation::DuplicateNodeId { node } = violations.swap_remove(pos) else {
            unreachable!()
        };
        return Err(CatalogError::DuplicateId {
            kind: "node",
            id: node.to_string(),
        });
    }
    if violations.is_empty() {
        Ok(program)
    } else {
        Err(CatalogError::Validation(violations))
    }
}

pub fn serialize_program(program: &Program) -> String {
    serde_json::to_string_pretty(program).expect("program serialization is infallible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Grade;

    fn course(id: &str, hours: i64, prereqs: &[&str]) -> Course {
        Course {
            id: CourseId::new(id),
            institution_id: InstitutionId::new("U"),
            subject_code: "X".into(),
            number: "100".into(),
            title: id.into(),
            credit_hours: Rational::integer(hours),
            prerequisites: prereqs.iter().map(|p| CourseId::new(*p)).collect(),
        }
    }

    fn math_catalog() -> CourseCatalog {
        CourseCatalog::new(
            vec![
                course("STAT", 3, &[]),
                course("PRECALC", 3, &[]),
                course("CALC1", 4, &["PRECALC"]),
            ],
            vec![Exam {
                id: ExamId::new("PLACE"),
                title: "Placement".into(),
            }],
        )
    }

    fn math_core() -> RequirementNode {
        RequirementNode::any(
            "math",
            "Math Core",
            vec![
                RequirementNode::course("stat", "STAT", Grade::C),
                RequirementNode::course("precalc", "PRECALC", Grade::C),
                RequirementNode::course("calc", "CALC1", Grade::C),
                RequirementNode::exam("place", "PLACE", Rational::integer(70)),
            ],
        )
    }

    #[test]
    fn math_core_is_valid() {
        assert_eq!(validate_tree(&math_core(), &math_catalog()), vec![]);
    }

    #[test]
    fn dangling_course_reported() {
        let tree = RequirementNode::course("x", "NOPE", Grade::C);
        assert_eq!(
            validate_tree(&tree, &math_catalog()),
            vec![Violation::DanglingCourse {
                node: NodeId::new("x"),
                course_id: CourseId::new("NOPE")
            }]
        );
    }

    #[test]
    fn empty_composite_reported() {
        let tree = RequirementNode::all("root", "Root", vec![]);
        assert_eq!(
            validate_tree(&tree, &math_catalog()),
            vec![Violation::EmptyComposite {
                node: NodeId::new("root")
            }]
        );
    }

    #[test]
    fn choose_more_than_children_rejected_at_parse() {
        let doc = r#"{"id": "p", "institution_id": "U", "credential": "BACHELOR", "title": "P",
            "total_credit_hours": 120,
            "root": {"id": "c", "kind": "CHOOSE", "choose_k": 3, "children": [
                {"id": "a", "kind": "COURSE", "course_id": "STAT"},
                {"id": "b", "kind": "COURSE", "course_id": "PRECALC"}]}}"#;
        match parse_program(doc, &math_catalog()) {
            Err(CatalogError::Validation(v)) => assert!(matches!(
                v.as_slice(),
                [Violation::ChooseExceedsChildren {
                    choose_k: 3,
                    children: 2,
                    ..
                }]
            )),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_node_ids_rejected() {
        let doc = r#"{"id": "p", "institution_id": "U", "credential": "BACHELOR", "title": "P",
            "total_credit_hours": 120,
            "root": {"id": "a", "kind": "ALL", "children": [
                {"id": "a", "kind": "COURSE", "course_id": "STAT"}]}}"#;
        assert!(matches!(
            parse_program(doc, &math_catalog()),
            Err(CatalogError::DuplicateId { kind: "node", .. })
        ));
    }

    #[test]
    fn schema_errors() {
        for doc in [
            r#"{"id": "p"}"#,
            r#"{"id": "p", "institution_id": "U", "credential": "BACHELOR", "title": "P",
                "total_credit_hours": 1, "root": {"id": "c", "kind": "CHOOSE", "children": []}}"#,
            r#"{"id": "p", "institution_id": "U", "credential": "BACHELOR", "title": "P",
                "total_credit_hours": 1, "root": {"id": "c", "kind": "COURSE", "course_id": "STAT",
                "children": [{"id": "d", "kind": "COURSE", "course_id": "STAT"}]}}"#,
            r#"{"id": "p", "institution_id": "U", "credential": "BACHELOR", "title": "P",
                "total_credit_hours": 1, "root": {"id": "c", "kind": "COURSE", "course_id": "STAT",
                "bogus": 1}}"#,
        ] {
            assert!(
                matches!(parse_program(doc, &math_catalog()), Err(CatalogError::Schema { .. })),
                "{doc}"
            );
        }
    }

    #[test]
    fn single_leaf_program_round_trips() {
        let program = Program {
            id: ProgramId::new("leaf"),
            institution_id: InstitutionId::new("U"),
            credential: Credential::Associate,
            title: "Leaf".into(),
            root: RequirementNode::course("only", "STAT", Grade::D),
            total_credit_hours: Rational::integer(3),
        };
        let text = serialize_program(&program);
        assert_eq!(parse_program(&text, &math_catalog()).unwrap(), program);
    }

    #[test]
    fn foreign_course_and_short_total() {
        let mut catalog = math_catalog();
        catalog.courses.insert(CourseId::new("CC-1"), {
            let mut c = course("CC-1", 3, &[]);
            c.institution_id = InstitutionId::new("CC");
            c
        });
        let program = Program {
            id: ProgramId::new("p"),
            institution_id: InstitutionId::new("U"),
            credential: Credential::Bachelor,
            title: "P".into(),
            root: RequirementNode::all(
                "root",
                "Root",
                vec![
                    RequirementNode::course("a", "CC-1", Grade::D),
                    RequirementNode::course("b", "CALC1", Grade::D),
                ],
            ),
            total_credit_hours: Rational::integer(6),
        };
        let v = validate_program(&program, &catalog);
        assert!(v.iter().any(|v| matches!(v, Violation::ForeignCourse { .. })));
        assert!(v.iter().any(|v| matches!(v, Violation::TotalHoursBelowMinimum { .. })));
    }

    #[test]
    fn detects_prerequisite_cycle() {
        let catalog = CourseCatalog::new(
            vec![course("A", 3, &["C"]), course("B", 3, &["A"]), course("C", 3, &["B"])],
            vec![],
        );
        let cycle = catalog.prerequisite_cycle().expect("cycle");
        assert_eq!(cycle.first(), cycle.last());
        assert_eq!(cycle.len(), 4);
        assert!(math_catalog().prerequisite_cycle().is_none());
    }
}
