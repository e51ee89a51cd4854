use super::*;
use crate::ids::{CourseId, InstitutionId};
use crate::model::{Credential, ElectiveLevel, ElectiveRecord, Grade, Program, RequirementNode as N};

fn r(n: i64) -> Rational {
    Rational::integer(n)
}

fn program(root: N) -> Program {
    Program {
        id: ProgramId::new("P"),
        institution_id: InstitutionId::new("U"),
        credential: Credential::Bachelor,
        title: "Test".into(),
        root,
        total_credit_hours: r(120),
    }
}

fn rec(course: &str, grade: Grade, hours: i64) -> TranscriptRecord {
    TranscriptRecord::course(course, "U", grade, r(hours))
}

fn elective(hours: i64) -> TranscriptRecord {
    TranscriptRecord::Elective(ElectiveRecord {
        elective_level: ElectiveLevel::Lower,
        source_course_id: CourseId::new("CC-101"),
        institution_id: InstitutionId::new("U"),
        grade: Grade::B,
        term_index: 0,
        credit_hours: r(hours),
    })
}

fn math_core() -> N {
    N::any(
        "math",
        "Math Core",
        vec![
            N::course("stat", "STAT", Grade::D),
            N::course("precalc", "PRECALC", Grade::D),
            N::course("calc", "CALC1", Grade::D),
            N::exam("placement", "MATH-PLACE", r(70)),
        ],
    )
}

fn run(t: &[TranscriptRecord], p: &Program) -> AuditResult {
    audit(&Transcript::new(t.to_vec()), p, &AuditPolicy::default()).unwrap()
}

#[test]
fn math_core_satisfied_by_statistics_alone() {
    let p = program(math_core());
    let res = run(&[rec("STAT", Grade::C, 3)], &p);
    assert_eq!(res.node_status[&NodeId::new("math")], NodeStatus::Satisfied);
    assert_eq!(res.applied_credit_hours, r(3));
    assert_eq!(res.assignment.get(0), Some(&NodeId::new("stat")));
    assert!(res.exact);
}

#[test]
fn math_core_satisfied_by_exam_alone() {
    let p = program(math_core());
    let res = run(&[TranscriptRecord::exam("MATH-PLACE", r(85))], &p);
    assert!(res.root_satisfied(&p));
    assert_eq!(res.applied_credit_hours, r(0));
    let low = run(&[TranscriptRecord::exam("MATH-PLACE", r(60))], &p);
    assert!(!low.root_satisfied(&p));
}

#[test]
fn empty_transcript_leaves_everything_unsatisfied() {
    let p = program(math_core());
    let res = run(&[], &p);
    assert_eq!(res.applied_credit_hours, r(0));
    assert_eq!(res.unapplied_credit_hours, r(0));
    assert!(res.node_status.values().all(|s| *s == NodeStatus::Unsatisfied));
    assert!(res.assignment.is_empty());
}

#[test]
fn choose_two_of_three_applies_six() {
    let p = program(N::choose(
        "hum",
        "Humanities",
        2,
        vec![
            N::course("h1", "H1", Grade::D),
            N::course("h2", "H2", Grade::D),
            N::course("h3", "H3", Grade::D),
        ],
    ));
    let t = [rec("H1", Grade::A, 3), rec("H2", Grade::B, 3), rec("H3", Grade::C, 3)];
    let res = run(&t, &p);
    assert_eq!(res.applied_credit_hours, r(6));
    assert_eq!(res.unapplied_credit_hours, r(3));
    assert_eq!(res.assignment.len(), 2);
    assert_eq!(res.assignment.get(0), Some(&NodeId::new("h1")));
    assert_eq!(res.assignment.get(1), Some(&NodeId::new("h2")));
    assert!(res.root_satisfied(&p));
}

#[test]
fn grade_below_minimum_does_not_apply() {
    let p = program(N::course("w", "ENG101", Grade::C));
    let res = run(&[rec("ENG101", Grade::D, 3)], &p);
    assert_eq!(res.applied_credit_hours, r(0));
    assert!(!res.root_satisfied(&p));
}

#[test]
fn electives_only_fill_accepting_pools() {
    let closed = program(N::all(
        "root",
        "Major",
        vec![
            N::course("c1", "CS101", Grade::C),
            N::credits("pool", "Upper", r(6), &["CS301", "CS302"]),
        ],
    ));
    let res = run(&[elective(3), elective(3)], &closed);
    assert_eq!(res.applied_credit_hours, r(0));
    assert!(res.node_status.values().all(|s| *s == NodeStatus::Unsatisfied));

    let mut open = N::credits("free", "Free electives", r(6), &["CS301"]);
    if let NodeKind::Credits { accepts_electives, .. } = &mut open.kind {
        *accepts_electives = true;
    }
    let p = program(open);
    let res = run(&[elective(3), elective(3)], &p);
    assert_eq!(res.applied_credit_hours, r(6));
    assert!(res.root_satisfied(&p));
}

#[test]
fn credits_pool_takes_no_superfluous_record() {
    let p = program(N::credits("pool", "Pool", r(6), &["A", "B", "C"]));
    let res = run(
        &[rec("A", Grade::A, 3), rec("B", Grade::A, 3), rec("C", Grade::A, 3)],
        &p,
    );
    assert_eq!(res.applied_credit_hours, r(6));
    assert!(res.root_satisfied(&p));

    let p = program(N::credits("pool", "Pool", r(7), &["A", "B"]));
    let res = run(&[rec("A", Grade::A, 4), rec("B", Grade::A, 4)], &p);
    assert_eq!(res.applied_credit_hours, r(8));
}

#[test]
fn shareable_leaf_counts_record_once() {
    let p = program(N::all(
        "root",
        "Both",
        vec![
            N::course("major", "CS101", Grade::C),
            N::course("gened", "CS101", Grade::D).shared(),
        ],
    ));
    let res = run(&[rec("CS101", Grade::B, 3)], &p);
    assert!(res.root_satisfied(&p));
    assert_eq!(res.applied_credit_hours, r(3));
    assert_eq!(res.shared[&NodeId::new("gened")], vec![0]);
}

#[test]
fn adding_a_record_can_unsatisfy_the_root_under_the_hours_objective() {
    let p = program(N::all(
        "root",
        "Root",
        vec![
            N::any(
                "alt",
                "Alternatives",
                vec![
                    N::course("x", "X", Grade::D),
                    N::credits("pool", "Pool", r(7), &["Q", "W"]),
                ],
            ),
            N::course("w", "W", Grade::D),
        ],
    ));
    let before = [rec("X", Grade::A, 3), rec("W", Grade::A, 3)];
    let res = run(&before, &p);
    assert!(res.root_satisfied(&p));
    assert_eq!(res.applied_credit_hours, r(6));

    let after = [rec("X", Grade::A, 3), rec("W", Grade::A, 3), rec("Q", Grade::A, 4)];
    let res = run(&after, &p);
    assert_eq!(res.applied_credit_hours, r(7));
    assert!(!res.root_satisfied(&p));
    let t = Transcript::new(after.to_vec());
    let witness = find_satisfying_assignment(&p.root, &t).expect("root is still attainable");
    let status = evaluate(&p.root, &witness, &t).unwrap();
    assert_eq!(status[&p.root.id], NodeStatus::Satisfied);
}

#[test]
fn partial_marks_composites_with_some_progress() {
    let p = program(N::all(
        "root",
        "Root",
        vec![N::course("a", "A", Grade::D), N::course("b", "B", Grade::D)],
    ));
    let res = run(&[rec("A", Grade::C, 3)], &p);
    assert_eq!(res.node_status[&NodeId::new("root")], NodeStatus::Partial);
}

#[test]
fn check_assignment_rejects_each_violation() {
    let root = N::all(
        "root",
        "Root",
        vec![
            N::any(
                "alt",
                "Alt",
                vec![N::course("a", "A", Grade::D), N::course("b", "B", Grade::D)],
            ),
            N::course("c", "C", Grade::C),
            N::exam("e", "EX", r(1)),
            N::credits("pool", "Pool", r(3), &["A", "B"]),
        ],
    );
    let t = Transcript::new(vec![
        rec("A", Grade::A, 3),
        rec("B", Grade::A, 3),
        rec("C", Grade::D, 3),
        rec("A", Grade::A, 3),
    ]);
    let bad = |pairs: &[(usize, &str)]| {
        let a: Assignment = pairs.iter().map(|(r, l)| (*r, NodeId::new(*l))).collect();
        matches!(check_assignment(&root, &t, &a), Err(AuditError::InvalidAssignment(_)))
    };
    assert!(bad(&[(0, "a"), (1, "b")]), "ANY with two active children");
    assert!(bad(&[(0, "a"), (3, "a")]), "COURSE leaf holding two records");
    assert!(bad(&[(2, "c")]), "grade below minimum");
    assert!(bad(&[(0, "b")]), "course mismatch");
    assert!(bad(&[(0, "e")]), "exam leaf");
    assert!(bad(&[(0, "alt")]), "composite node");
    assert!(bad(&[(0, "nope")]), "unknown leaf");
    assert!(bad(&[(9, "a")]), "record out of range");
    assert!(bad(&[(0, "pool"), (1, "pool")]), "superfluous pool record");
    let ok: Assignment = [(0, NodeId::new("a")), (1, NodeId::new("pool"))].into_iter().collect();
    assert!(check_assignment(&root, &t, &ok).is_ok());
    assert!(matches!(
        evaluate(&root, &[(2, NodeId::new("c"))].into_iter().collect(), &t),
        Err(AuditError::InvalidAssignment(_))
    ));
}

#[test]
fn foreign_records_are_rejected() {
    let p = program(math_core());
    let t = Transcript::new(vec![TranscriptRecord::course("STAT", "CC", Grade::A, r(3))]);
    assert!(matches!(
        audit(&t, &p, &AuditPolicy::default()),
        Err(AuditError::CatalogMismatch(_))
    ));
}

#[test]
fn limits_fall_back_or_fail() {
    let p = program(math_core());
    let t = Transcript::new(vec![rec("STAT", Grade::A, 3), rec("CALC1", Grade::A, 4)]);
    let tight = AuditPolicy {
        max_exact_records: 1,
        ..AuditPolicy::default()
    };
    let res = audit(&t, &p, &tight).unwrap();
    assert!(!res.exact);
    assert_eq!(res.applied_credit_hours, r(4));
    let strict = AuditPolicy {
        allow_heuristic: false,
        ..tight
    };
    assert!(matches!(audit(&t, &p, &strict), Err(AuditError::LimitExceeded(_))));
}

#[test]
fn results_serialize_deterministically() {
    let p = program(math_core());
    let t = [rec("STAT", Grade::A, 3), rec("CALC1", Grade::B, 4)];
    let a = serde_json::to_string(&run(&t, &p)).unwrap();
    let b = serde_json::to_string(&run(&t, &p)).unwrap();
    assert_eq!(a, b);
    let back: AuditResult = serde_json::from_str(&a).unwrap();
    assert_eq!(back, run(&t, &p));
}

#[test]
fn oracle_agrees_on_small_cases() {
    let p = program(N::all(
        "root",
        "Root",
        vec![
            math_core(),
            N::choose(
                "hum",
                "Humanities",
                2,
                vec![
                    N::course("h1", "H1", Grade::D),
                    N::course("h2", "H2", Grade::D),
                    N::credits("hp", "Hum pool", r(4), &["H1", "H3"]),
                ],
            ),
        ],
    ));
    let t = Transcript::new(vec![
        rec("H1", Grade::A, 3),
        rec("STAT", Grade::B, 3),
        rec("H3", Grade::C, 3),
        rec("CALC1", Grade::A, 4),
        rec("H2", Grade::A, 3),
    ]);
    let fast = audit(&t, &p, &AuditPolicy::default()).unwrap();
    let slow = brute_force_audit(&t, &p).unwrap();
    assert_eq!(fast, slow);
}
