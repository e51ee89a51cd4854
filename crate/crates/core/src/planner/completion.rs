//! Cheapest coursework that completes a program.
//!
//! A candidate set costs the credit hours of its prerequisite closure minus
//! courses already passed. Hypothetical courses are added to the transcript
//! with grade A and catalog hours, and the set is accepted when some valid
//! assignment satisfies the root.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::audit::{satisfiable, AuditResult, Instance, Satisfiability};
use crate::error::PlanError;
use crate::ids::CourseId;
use crate::model::{CourseRecord, Grade, NodeKind, Program, Transcript, TranscriptRecord};
use crate::rational::Rational;
use crate::requirements::CourseCatalog;

pub const MAX_EXACT_CANDIDATES: usize = 30;
const SEARCH_NODES: u64 = 200_000;
const PROBE_BUDGET: u64 = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionSet {
    /// Courses to take, prerequisites included.
    pub courses: BTreeSet<CourseId>,
    pub credit_hours: Rational,
    /// False when the heuristic was used or the exact search ran out of budget.
    pub exact: bool,
}

impl CompletionSet {
    fn empty() -> Self {
        CompletionSet {
            courses: BTreeSet::new(),
            credit_hours: Rational::ZERO,
            exact: true,
        }
    }
}

struct Context<'a> {
    transcript: &'a Transcript,
    program: &'a Program,
    catalog: &'a CourseCatalog,
    completed: BTreeSet<CourseId>,
    candidates: Vec<CourseId>,
    unknown: bool,
}

impl Context<'_> {
    fn closure(&self, chosen: impl IntoIterator<Item = CourseId>) -> BTreeSet<CourseId> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<CourseId> = chosen.into_iter().collect();
        while let Some(c) = stack.pop() {
            if self.completed.contains(&c) && !self.candidates.contains(&c) {
                continue;
            }
            if !out.insert(c.clone()) {
                continue;
            }
            if let Some(course) = self.catalog.course(c.as_str()) {
                for p in &course.prerequisites {
                    if !self.completed.contains(p) {
                        stack.push(p.clone());
                    }
                }
            }
        }
        out
    }

    fn cost(&self, courses: &BTreeSet<CourseId>) -> Rational {
        courses
            .iter()
            .filter_map(|c| self.catalog.credit_hours(c.as_str()))
            .sum()
    }

    fn check(&mut self, courses: &BTreeSet<CourseId>) -> Satisfiability {
        let mut records = self.transcript.records.clone();
        for c in courses {
            if let Some(course) = self.catalog.course(c.as_str()) {
                records.push(TranscriptRecord::Course(CourseRecord {
                    course_id: c.clone(),
                    institution_id: self.program.institution_id.clone(),
                    grade: Grade::A,
                    term_index: 0,
                    credit_hours: course.credit_hours,
                }));
            }
        }
        let inst = Instance::build(&self.program.root, &Transcript::new(records));
        let result = satisfiable(&inst, PROBE_BUDGET);
        if matches!(result, Satisfiability::Unknown) {
            self.unknown = true;
        }
        result
    }

    fn satisfies(&mut self, chosen: &[CourseId]) -> bool {
        let closure = self.closure(chosen.iter().cloned());
        matches!(self.check(&closure), Satisfiability::Satisfiable(_))
    }
}

/// Minimum-credit set of courses whose addition satisfies the program root.
pub fn select_completion_courses(
    transcript: &Transcript,
    audit_result: &AuditResult,
    program: &Program,
    catalog: &CourseCatalog,
) -> Result<CompletionSet, PlanError> {
    let candidates = candidate_courses(transcript, program, catalog);
    let mut ctx = Context {
        transcript,
        program,
        catalog,
        completed: transcript.passed_courses(),
        candidates,
        unknown: false,
    };
    if audit_result.root_satisfied(program) || ctx.satisfies(&[]) {
        return Ok(CompletionSet::empty());
    }
    let all = ctx.candidates.clone();
    if !ctx.satisfies(&all) {
        if ctx.unknown {
            return Err(PlanError::LimitExceeded(format!(
                "could not decide whether {} can be completed",
                program.id
            )));
        }
        return Err(PlanError::Unsatisfiable(format!(
            "no combination of {} catalog courses completes {}",
            all.len(),
            program.id
        )));
    }

    let greedy = drop_greedily(&mut ctx, all);
    let greedy_closure = ctx.closure(greedy.iter().cloned());
    let greedy_cost = ctx.cost(&greedy_closure);
    if ctx.candidates.len() > MAX_EXACT_CANDIDATES {
        return Ok(CompletionSet {
            courses: greedy_closure,
            credit_hours: greedy_cost,
            exact: false,
        });
    }

    let mut search = Search {
        best: greedy_closure,
        best_cost: greedy_cost,
        included: Vec::new(),
        expanded: 0,
        exhausted: false,
    };
    search.run(&mut ctx, 0);
    Ok(CompletionSet {
        credit_hours: search.best_cost,
        courses: search.best,
        exact: !search.exhausted && !ctx.unknown,
    })
}

/// Courses the program references that the transcript does not already
/// cover with a good-enough grade and full hours.
fn candidate_courses(transcript: &Transcript, program: &Program, catalog: &CourseCatalog) -> Vec<CourseId> {
    let mut needed: BTreeMap<&CourseId, Grade> = BTreeMap::new();
    for leaf in program.root.leaves() {
        match &leaf.kind {
            NodeKind::Course { course_id, min_grade } => {
                let g = needed.entry(course_id).or_insert(*min_grade);
                *g = (*g).max(*min_grade);
            }
            NodeKind::Credits {
                course_pool, min_grade, ..
            } => {
                for c in course_pool {
                    let g = needed.entry(c).or_insert(*min_grade);
                    *g = (*g).max(*min_grade);
                }
            }
            _ => {}
        }
    }
    needed
        .into_iter()
        .filter(|(course, grade)| {
            let Some(hours) = catalog.credit_hours(course.as_str()) else {
                return false;
            };
            !transcript.records.iter().any(|r| match r {
                TranscriptRecord::Course(c) => &c.course_id == *course && c.grade >= *grade && c.credit_hours >= hours,
                _ => false,
            })
        })
        .map(|(c, _)| c.clone())
        .collect()
}

/// Starting from a satisfying set, drops the most expensive courses first
/// while the rest still satisfies the root.
fn drop_greedily(ctx: &mut Context<'_>, mut chosen: Vec<CourseId>) -> Vec<CourseId> {
    let mut order = chosen.clone();
    order.sort_by(|a, b| {
        let ha = ctx.catalog.credit_hours(a.as_str()).unwrap_or(Rational::ZERO);
        let hb = ctx.catalog.credit_hours(b.as_str()).unwrap_or(Rational::ZERO);
        hb.cmp(&ha).then(b.cmp(a))
    });
    for c in order {
        let trial: Vec<CourseId> = chosen.iter().filter(|x| **x != c).cloned().collect();
        if ctx.satisfies(&trial) {
            chosen = trial;
        }
    }
    chosen
}

struct Search {
    best: BTreeSet<CourseId>,
    best_cost: Rational,
    included: Vec<CourseId>,
    expanded: u64,
    exhausted: bool,
}

impl Search {
    /// Include/exclude branching over candidates in id order.
    fn run(&mut self, ctx: &mut Context<'_>, index: usize) {
        self.expanded += 1;
        if self.expanded > SEARCH_NODES {
            self.exhausted = true;
            return;
        }
        let closure = ctx.closure(self.included.iter().cloned());
        let cost = ctx.cost(&closure);
        if cost >= self.best_cost {
            return;
        }
        if let Satisfiability::Satisfiable(_) = ctx.check(&closure) {
            self.best = closure;
            self.best_cost = cost;
            return;
        }
        if index == ctx.candidates.len() {
            return;
        }
        let optimistic: Vec<CourseId> = self.included.iter().chain(&ctx.candidates[index..]).cloned().collect();
        let optimistic = ctx.closure(optimistic);
        if let Satisfiability::Unsatisfiable = ctx.check(&optimistic) {
            return;
        }
        self.included.push(ctx.candidates[index].clone());
        self.run(ctx, index + 1);
        self.included.pop();
        if self.exhausted {
            return;
        }
        self.run(ctx, index + 1);
    }
}
