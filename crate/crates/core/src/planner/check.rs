//! Stand-alone plan checker. Works straight from the catalog and the plan
//! text and shares no logic with the generator.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::ids::CourseId;
use crate::rational::Rational;
use crate::requirements::CourseCatalog;

use super::{DegreePlan, PlanConstraints};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum PlanViolation {
    UnknownCourse {
        course: CourseId,
    },
    DuplicateCourse {
        course: CourseId,
    },
    /// In the curriculum, not completed, not planned.
    MissingCourse {
        course: CourseId,
    },
    /// Planned but outside the curriculum or already completed.
    UnexpectedCourse {
        course: CourseId,
    },
    PrerequisiteOrder {
        course: CourseId,
        prerequisite: CourseId,
    },
    TooManyTerms {
        terms: usize,
        num_terms: u32,
    },
    OverCapacity {
        term: usize,
        credit_hours: Rational,
        max_credits_per_term: Rational,
    },
    UnderMinimum {
        term: usize,
        credit_hours: Rational,
        min_credits_per_term: Rational,
    },
    TooManyCourses {
        term: usize,
        courses: usize,
        limit: u32,
    },
    ToxicPair {
        term: usize,
        first: CourseId,
        second: CourseId,
    },
    LoadMismatch {
        term: usize,
        stated: Rational,
        actual: Rational,
    },
    TotalMismatch {
        stated: Rational,
        actual: Rational,
    },
}

pub fn check_plan(
    plan: &DegreePlan,
    curriculum: &BTreeSet<CourseId>,
    completed: &BTreeSet<CourseId>,
    constraints: &PlanConstraints,
    catalog: &CourseCatalog,
) -> Vec<PlanViolation> {
    let mut out = Vec::new();
    let mut term_of: BTreeMap<&CourseId, usize> = BTreeMap::new();
    for (t, term) in plan.terms.iter().enumerate() {
        for c in term {
            if term_of.insert(c, t).is_some() {
                out.push(PlanViolation::DuplicateCourse { course: c.clone() });
            }
        }
    }

    for c in curriculum {
        if !completed.contains(c) && !term_of.contains_key(c) {
            out.push(PlanViolation::MissingCourse { course: c.clone() });
        }
    }
    for c in term_of.keys() {
        if !curriculum.contains(*c) || completed.contains(*c) {
            out.push(PlanViolation::UnexpectedCourse { course: (*c).clone() });
        }
    }

    if plan.terms.len() > constraints.num_terms as usize {
        out.push(PlanViolation::TooManyTerms {
            terms: plan.terms.len(),
            num_terms: constraints.num_terms,
        });
    }

    let limit = [constraints.exact_courses_per_term, constraints.max_courses_per_term]
        .into_iter()
        .flatten()
        .min();
    let mut total = Rational::ZERO;
    for (t, term) in plan.terms.iter().enumerate() {
        let mut load = Rational::ZERO;
        for c in term {
            match catalog.course(c.as_str()) {
                None => out.push(PlanViolation::UnknownCourse { course: c.clone() }),
                Some(course) => {
                    load += course.credit_hours;
                    for p in &course.prerequisites {
                        let ok = completed.contains(p) || term_of.get(p).is_some_and(|pt| *pt < t);
                        if !ok {
                            out.push(PlanViolation::PrerequisiteOrder {
                                course: c.clone(),
                                prerequisite: p.clone(),
                            });
                        }
                    }
                }
            }
        }
        if load > constraints.max_credits_per_term {
            out.push(PlanViolation::OverCapacity {
                term: t,
                credit_hours: load,
                max_credits_per_term: constraints.max_credits_per_term,
            });
        }
        if load < constraints.min_credits_per_term {
            out.push(PlanViolation::UnderMinimum {
                term: t,
                credit_hours: load,
                min_credits_per_term: constraints.min_credits_per_term,
            });
        }
        if let Some(limit) = limit {
            if term.len() > limit as usize {
                out.push(PlanViolation::TooManyCourses {
                    term: t,
                    courses: term.len(),
                    limit,
                });
            }
        }
        for (i, a) in term.iter().enumerate() {
            for b in &term[i + 1..] {
                if constraints.is_toxic(a, b) {
                    out.push(PlanViolation::ToxicPair {
                        term: t,
                        first: a.clone(),
                        second: b.clone(),
                    });
                }
            }
        }
        if let Some(stated) = plan.term_credit_hours.get(t) {
            if *stated != load {
                out.push(PlanViolation::LoadMismatch {
                    term: t,
                    stated: *stated,
                    actual: load,
                });
            }
        }
        total += load;
    }
    if plan.total_credit_hours != total {
        out.push(PlanViolation::TotalMismatch {
            stated: plan.total_credit_hours,
            actual: total,
        });
    }
    out
}

/// A plan file: the plan plus everything needed to check it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanCheckInput {
    pub curriculum: BTreeSet<CourseId>,
    #[serde(default)]
    pub completed: BTreeSet<CourseId>,
    #[serde(default)]
    pub constraints: PlanConstraints,
    pub plan: DegreePlan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanCheck {
    pub valid: bool,
    pub violations: Vec<PlanViolation>,
}

pub fn check_plan_input(input: &PlanCheckInput, catalog: &CourseCatalog) -> PlanCheck {
    let violations = check_plan(
        &input.plan,
        &input.curriculum,
        &input.completed,
        &input.constraints,
        catalog,
    );
    PlanCheck {
        valid: violations.is_empty(),
        violations,
    }
}
