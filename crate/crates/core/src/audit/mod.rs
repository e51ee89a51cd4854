//! Degree audits: which requirements a transcript satisfies under the best
//! assignment of transcript records to requirement leaves.
//!
//! An assignment maps record indices to non-shareable COURSE or CREDITS
//! leaves. It is valid when
//!
//! * every pair is compatible (course id or pool membership, grade at least
//!   the leaf's minimum; elective credit only for pools that accept it),
//! * a COURSE leaf holds at most one record,
//! * a CREDITS leaf holds no superfluous record: dropping its smallest
//!   record must leave it below `min_credit_hours`,
//! * an ANY node has at most one child subtree holding assigned records and
//!   a CHOOSE(k) node at most k.
//!
//! Shareable leaves and EXAM leaves are evaluated against the whole
//! transcript and never take part in the assignment. A record counts as
//! applied when it is assigned or used by a shareable leaf.
//!
//! The audit optimum maximizes applied hours, then the number of satisfied
//! leaves, then prefers the lexicographically smallest assignment when
//! records are read in index order and each record prefers the smallest
//! leaf id over staying unassigned.

mod heuristic;
mod instance;
mod oracle;
mod satisfy;
mod search;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::AuditError;
use crate::ids::{InstitutionId, NodeId, ProgramId};
use crate::model::{NodeKind, Program, RequirementNode, Transcript, TranscriptRecord};
use crate::rational::Rational;

pub use oracle::{brute_force_audit, ORACLE_MAX_LEAVES, ORACLE_MAX_RECORDS};
pub use satisfy::find_satisfying_assignment;

pub(crate) use instance::Instance;
pub(crate) use satisfy::{satisfiable, Satisfiability};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NodeStatus {
    Satisfied,
    Unsatisfied,
    /// Unsatisfied composite with at least one satisfied child. Advisory.
    Partial,
}

/// Partial map from transcript-record index to requirement leaf.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Assignment(BTreeMap<usize, NodeId>);

#[derive(Serialize, Deserialize)]
struct AssignmentEntry {
    record: usize,
    leaf: NodeId,
}

impl Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<AssignmentEntry> = self
            .0
            .iter()
            .map(|(record, leaf)| AssignmentEntry {
                record: *record,
                leaf: leaf.clone(),
            })
            .collect();
        entries.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let entries = Vec::<AssignmentEntry>::deserialize(deserializer)?;
        let mut map = BTreeMap::new();
        for e in entries {
            if map.insert(e.record, e.leaf).is_some() {
                return Err(serde::de::Error::custom(format!("record {} assigned twice", e.record)));
            }
        }
        Ok(Assignment(map))
    }
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, record: usize, leaf: impl Into<NodeId>) -> Option<NodeId> {
        self.0.insert(record, leaf.into())
    }

    pub fn get(&self, record: usize) -> Option<&NodeId> {
        self.0.get(&record)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &NodeId)> {
        self.0.iter().map(|(r, l)| (*r, l))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn records_for<'a>(&'a self, leaf: &'a str) -> impl Iterator<Item = usize> + 'a {
        self.0.iter().filter(move |(_, l)| l.as_str() == leaf).map(|(r, _)| *r)
    }
}

impl FromIterator<(usize, NodeId)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (usize, NodeId)>>(iter: I) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditResult {
    pub program_id: ProgramId,
    /// False when the result came from the heuristic fallback.
    pub exact: bool,
    pub applied_credit_hours: Rational,
    pub unapplied_credit_hours: Rational,
    pub satisfied_leaf_count: usize,
    pub node_status: BTreeMap<NodeId, NodeStatus>,
    pub assignment: Assignment,
    /// Records used by each shareable leaf.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub shared: BTreeMap<NodeId, Vec<usize>>,
}

impl AuditResult {
    pub fn root_satisfied(&self, program: &Program) -> bool {
        self.node_status.get(&program.root.id) == Some(&NodeStatus::Satisfied)
    }

    pub fn unsatisfied_leaves(&self, program: &Program) -> Vec<NodeId> {
        program
            .root
            .leaves()
            .into_iter()
            .filter(|l| self.node_status.get(&l.id) != Some(&NodeStatus::Satisfied))
            .map(|l| l.id.clone())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditPolicy {
    pub max_exact_records: usize,
    pub max_exact_leaves: usize,
    /// Search nodes the exact optimizer may expand before giving up.
    pub node_budget: u64,
    /// When false, instances beyond the exact limits fail with
    /// `LimitExceeded` instead of falling back to the heuristic.
    pub allow_heuristic: bool,
}

impl Default for AuditPolicy {
    fn default() -> Self {
        AuditPolicy {
            max_exact_records: 200,
            max_exact_leaves: 200,
            node_budget: 2_000_000,
            allow_heuristic: true,
        }
    }
}

/// Whether `record` may be assigned to (or used by) `leaf`. Ignores
/// capacity and structure.
pub fn compatible(record: &TranscriptRecord, leaf: &RequirementNode) -> bool {
    match (record, &leaf.kind) {
        (TranscriptRecord::Course(r), NodeKind::Course { course_id, min_grade }) => {
            &r.course_id == course_id && r.grade >= *min_grade
        }
        (
            TranscriptRecord::Course(r),
            NodeKind::Credits {
                course_pool, min_grade, ..
            },
        ) => course_pool.contains(&r.course_id) && r.grade >= *min_grade,
        (
            TranscriptRecord::Elective(r),
            NodeKind::Credits {
                accepts_electives,
                min_grade,
                ..
            },
        ) => *accepts_electives && r.grade >= *min_grade,
        _ => false,
    }
}

fn exam_satisfied(transcript: &Transcript, leaf: &RequirementNode) -> bool {
    let NodeKind::Exam { exam_id, min_score } = &leaf.kind else {
        return false;
    };
    transcript.records.iter().any(|r| match r {
        TranscriptRecord::Exam(e) => &e.exam_id == exam_id && e.score >= *min_score,
        _ => false,
    })
}

/// Checks every assignment invariant directly against the tree.
pub fn check_assignment(
    root: &RequirementNode,
    transcript: &Transcript,
    assignment: &Assignment,
) -> Result<(), AuditError> {
    let invalid = |msg: String| Err(AuditError::InvalidAssignment(msg));
    let nodes: BTreeMap<&str, &RequirementNode> = root.walk().into_iter().map(|n| (n.id.as_str(), n)).collect();
    let mut per_leaf: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (record, leaf_id) in assignment.iter() {
        let Some(rec) = transcript.records.get(record) else {
            return invalid(format!("record {record} is not on the transcript"));
        };
        let Some(leaf) = nodes.get(leaf_id.as_str()) else {
            return invalid(format!("unknown node {leaf_id}"));
        };
        if !matches!(leaf.kind, NodeKind::Course { .. } | NodeKind::Credits { .. }) {
            return invalid(format!("node {leaf_id} does not take assignments"));
        }
        if leaf.shareable {
            return invalid(format!("shareable leaf {leaf_id} does not take assignments"));
        }
        if !compatible(rec, leaf) {
            return invalid(format!("record {record} cannot satisfy {leaf_id}"));
        }
        per_leaf.entry(leaf_id.as_str()).or_default().push(record);
    }
    for (leaf_id, records) in &per_leaf {
        match &nodes[leaf_id].kind {
            NodeKind::Course { .. } if records.len() > 1 => {
                return invalid(format!("{leaf_id} holds {} records", records.len()));
            }
            NodeKind::Credits { min_credit_hours, .. } => {
                let hours: Vec<Rational> = records.iter().map(|r| transcript.records[*r].credit_hours()).collect();
                let total: Rational = hours.iter().sum();
                let smallest = hours.iter().min().copied().unwrap_or(Rational::ZERO);
                if total - smallest >= *min_credit_hours {
                    return invalid(format!("{leaf_id} holds a superfluous record"));
                }
            }
            _ => {}
        }
    }
    fn holds_assignment(node: &RequirementNode, per_leaf: &BTreeMap<&str, Vec<usize>>) -> bool {
        per_leaf.contains_key(node.id.as_str()) || node.children().iter().any(|c| holds_assignment(c, per_leaf))
    }
    for node in root.walk() {
        let limit = match &node.kind {
            NodeKind::Any(_) => 1,
            NodeKind::Choose { choose_k, .. } => *choose_k as usize,
            _ => continue,
        };
        let active = node
            .children()
            .iter()
            .filter(|c| holds_assignment(c, &per_leaf))
            .count();
        if active > limit {
            return invalid(format!("{} draws on {active} children but allows {limit}", node.id));
        }
    }
    Ok(())
}

/// Boolean evaluation of the tree under a valid assignment.
pub fn evaluate(
    root: &RequirementNode,
    assignment: &Assignment,
    transcript: &Transcript,
) -> Result<BTreeMap<NodeId, NodeStatus>, AuditError> {
    check_assignment(root, transcript, assignment)?;
    let mut out = BTreeMap::new();
    evaluate_node(root, assignment, transcript, &mut out);
    Ok(out)
}

fn evaluate_node(
    node: &RequirementNode,
    assignment: &Assignment,
    transcript: &Transcript,
    out: &mut BTreeMap<NodeId, NodeStatus>,
) -> bool {
    let satisfied = match &node.kind {
        NodeKind::All(children) | NodeKind::Any(children) | NodeKind::Choose { children, .. } => {
            let results: Vec<bool> = children
                .iter()
                .map(|c| evaluate_node(c, assignment, transcript, out))
                .collect();
            let count = results.iter().filter(|b| **b).count();
            let needed = match &node.kind {
                NodeKind::All(_) => children.len(),
                NodeKind::Any(_) => 1,
                NodeKind::Choose { choose_k, .. } => *choose_k as usize,
                _ => unreachable!(),
            };
            let satisfied = count >= needed;
            let status = if satisfied {
                NodeStatus::Satisfied
            } else if count > 0 {
                NodeStatus::Partial
            } else {
                NodeStatus::Unsatisfied
            };
            out.insert(node.id.clone(), status);
            return satisfied;
        }
        NodeKind::Exam { .. } => exam_satisfied(transcript, node),
        NodeKind::Course { .. } if node.shareable => transcript.records.iter().any(|r| compatible(r, node)),
        NodeKind::Course { .. } => assignment.records_for(node.id.as_str()).next().is_some(),
        NodeKind::Credits { min_credit_hours, .. } => {
            let hours: Rational = if node.shareable {
                transcript
                    .records
                    .iter()
                    .filter(|r| compatible(r, node))
                    .map(TranscriptRecord::credit_hours)
                    .sum()
            } else {
                assignment
                    .records_for(node.id.as_str())
                    .map(|r| transcript.records[r].credit_hours())
                    .sum()
            };
            hours >= *min_credit_hours
        }
    };
    out.insert(
        node.id.clone(),
        if satisfied {
            NodeStatus::Satisfied
        } else {
            NodeStatus::Unsatisfied
        },
    );
    satisfied
}

/// Records used by each shareable leaf.
pub(crate) fn shared_usage(root: &RequirementNode, transcript: &Transcript) -> BTreeMap<NodeId, Vec<usize>> {
    root.leaves()
        .into_iter()
        .filter(|l| l.shareable)
        .filter_map(|l| {
            let used: Vec<usize> = transcript
                .records
                .iter()
                .enumerate()
                .filter(|(_, r)| compatible(r, l))
                .map(|(i, _)| i)
                .collect();
            (!used.is_empty()).then(|| (l.id.clone(), used))
        })
        .collect()
}

/// Assembles the full result for a chosen assignment.
pub(crate) fn build_result(
    program: &Program,
    transcript: &Transcript,
    assignment: Assignment,
    exact: bool,
) -> Result<AuditResult, AuditError> {
    let node_status = evaluate(&program.root, &assignment, transcript)?;
    let shared = shared_usage(&program.root, transcript);
    let mut applied = vec![false; transcript.len()];
    for (r, _) in assignment.iter() {
        applied[r] = true;
    }
    for records in shared.values() {
        for r in records {
            applied[*r] = true;
        }
    }
    let applied_credit_hours: Rational = transcript
        .records
        .iter()
        .zip(&applied)
        .filter(|(_, a)| **a)
        .map(|(r, _)| r.credit_hours())
        .sum();
    let satisfied_leaf_count = program
        .root
        .leaves()
        .iter()
        .filter(|l| node_status.get(&l.id) == Some(&NodeStatus::Satisfied))
        .count();
    Ok(AuditResult {
        program_id: program.id.clone(),
        exact,
        applied_credit_hours,
        unapplied_credit_hours: transcript.total_credit_hours() - applied_credit_hours,
        satisfied_leaf_count,
        node_status,
        assignment,
        shared,
    })
}

/// Records for another institution must be translated before auditing.
pub(crate) fn check_institution(transcript: &Transcript, institution: &InstitutionId) -> Result<(), AuditError> {
    for (index, record) in transcript.records.iter().enumerate() {
        if let Some(inst) = record.institution_id() {
            if inst != institution {
                return Err(AuditError::CatalogMismatch(format!(
                    "record {index} is from {inst}; translate it to {institution} before auditing"
                )));
            }
        }
        if !record.credit_hours().is_positive() && !matches!(record, TranscriptRecord::Exam(_)) {
            return Err(AuditError::CatalogMismatch(format!(
                "record {index}: credit_hours must be positive"
            )));
        }
    }
    Ok(())
}

/// Optimal audit of `transcript` against `program`.
pub fn audit(transcript: &Transcript, program: &Program, policy: &AuditPolicy) -> Result<AuditResult, AuditError> {
    check_institution(transcript, &program.institution_id)?;
    let instance = Instance::build(&program.root, transcript);
    let within_limits =
        transcript.len() <= policy.max_exact_records && instance.leaf_count() <= policy.max_exact_leaves;
    if !within_limits && !policy.allow_heuristic {
        return Err(AuditError::LimitExceeded(format!(
            "{} records and {} leaves exceed the exact limits of {} and {}",
            transcript.len(),
            instance.leaf_count(),
            policy.max_exact_records,
            policy.max_exact_leaves
        )));
    }
    let incumbent = heuristic::greedy_with_exchange(&instance);
    let (choice, exact) = if within_limits {
        match search::branch_and_bound(&instance, incumbent, policy.node_budget) {
            search::Outcome::Optimal(choice) => (choice, true),
            search::Outcome::BudgetExhausted(best) => {
                if !policy.allow_heuristic {
                    return Err(AuditError::LimitExceeded(format!(
                        "exact search exceeded {} nodes",
                        policy.node_budget
                    )));
                }
                (best, false)
            }
        }
    } else {
        (incumbent, false)
    };
    let assignment = instance.to_assignment(&choice);
    build_result(program, transcript, assignment, exact)
}

#[cfg(test)]
mod tests;
