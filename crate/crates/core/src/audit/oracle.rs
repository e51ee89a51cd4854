//! Exhaustive audit used as a test oracle.
//!
//! Enumerates every valid assignment directly on the requirement tree,
//! checking validity with [`check_assignment`] and scoring each candidate
//! on its own; shares nothing with the branch-and-bound search.

use crate::error::AuditError;
use crate::ids::NodeId;
use crate::model::{NodeKind, Program, RequirementNode, Transcript};
use crate::rational::Rational;

use super::{
    build_result, check_assignment, check_institution, compatible, evaluate, Assignment, AuditResult, NodeStatus,
};

pub const ORACLE_MAX_RECORDS: usize = 12;
pub const ORACLE_MAX_LEAVES: usize = 16;

/// Per-record comparison key: assigned (to the smaller id first) before
/// unassigned.
type Key = Vec<(u8, NodeId)>;

struct Best {
    applied: Rational,
    satisfied: usize,
    key: Key,
    assignment: Assignment,
}

pub fn brute_force_audit(transcript: &Transcript, program: &Program) -> Result<AuditResult, AuditError> {
    let leaves = program.root.leaves();
    if transcript.len() > ORACLE_MAX_RECORDS || leaves.len() > ORACLE_MAX_LEAVES {
        return Err(AuditError::OracleTooLarge {
            records: transcript.len(),
            leaves: leaves.len(),
        });
    }
    check_institution(transcript, &program.institution_id)?;

    let mut assignable: Vec<&RequirementNode> = leaves
        .iter()
        .copied()
        .filter(|l| !l.shareable && matches!(l.kind, NodeKind::Course { .. } | NodeKind::Credits { .. }))
        .collect();
    assignable.sort_by(|a, b| a.id.cmp(&b.id));
    let options: Vec<Vec<NodeId>> = transcript
        .records
        .iter()
        .map(|rec| {
            assignable
                .iter()
                .filter(|l| compatible(rec, l))
                .map(|l| l.id.clone())
                .collect()
        })
        .collect();
    let shared: Vec<bool> = transcript
        .records
        .iter()
        .map(|rec| leaves.iter().any(|l| l.shareable && compatible(rec, l)))
        .collect();

    let mut best: Option<Best> = None;
    let mut partial = Assignment::new();
    enumerate(0, &options, &program.root, transcript, &shared, &mut partial, &mut best);
    let best = best.expect("the empty assignment is always valid");
    build_result(program, transcript, best.assignment, true)
}

fn enumerate(
    record: usize,
    options: &[Vec<NodeId>],
    root: &RequirementNode,
    transcript: &Transcript,
    shared: &[bool],
    partial: &mut Assignment,
    best: &mut Option<Best>,
) {
    if record == options.len() {
        score(root, transcript, shared, partial, best);
        return;
    }
    for leaf in &options[record] {
        partial.insert(record, leaf.clone());
        // Validity is preserved under removing pairs, so invalid prefixes
        // cannot extend to valid assignments.
        if check_assignment(root, transcript, partial).is_ok() {
            enumerate(record + 1, options, root, transcript, shared, partial, best);
        }
        partial.0.remove(&record);
    }
    enumerate(record + 1, options, root, transcript, shared, partial, best);
}

fn score(
    root: &RequirementNode,
    transcript: &Transcript,
    shared: &[bool],
    assignment: &Assignment,
    best: &mut Option<Best>,
) {
    let status = evaluate(root, assignment, transcript).expect("enumerated assignments are valid");
    let applied: Rational = transcript
        .records
        .iter()
        .enumerate()
        .filter(|(i, _)| shared[*i] || assignment.get(*i).is_some())
        .map(|(_, r)| r.credit_hours())
        .sum();
    let satisfied = root
        .leaves()
        .iter()
        .filter(|l| status[&l.id] == NodeStatus::Satisfied)
        .count();
    let key: Key = (0..transcript.len())
        .map(|i| match assignment.get(i) {
            Some(leaf) => (0, leaf.clone()),
            None => (1, NodeId::new("")),
        })
        .collect();
    let better = match best {
        None => true,
        Some(b) => {
            (applied, satisfied) > (b.applied, b.satisfied)
                || ((applied, satisfied) == (b.applied, b.satisfied) && key < b.key)
        }
    };
    if better {
        *best = Some(Best {
            applied,
            satisfied,
            key,
            assignment: assignment.clone(),
        });
    }
}
