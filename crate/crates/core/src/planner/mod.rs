//! Degree plans: term-by-term schedules of a curriculum under prerequisite,
//! capacity and toxic-pair constraints, plan counting, and selection of
//! the cheapest coursework that completes a program.

mod check;
mod completion;
mod count;
mod generate;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::PlanError;
use crate::ids::CourseId;
use crate::rational::Rational;
use crate::requirements::CourseCatalog;

pub use check::{check_plan, check_plan_input, PlanCheck, PlanCheckInput, PlanViolation};
pub use completion::{select_completion_courses, CompletionSet, MAX_EXACT_CANDIDATES};
pub use count::{count_plans, plan_count_report, PlanCount, MAX_DAG_COURSES};
pub use generate::generate_plan;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlanConstraints {
    /// Upper bound on the number of terms.
    pub num_terms: u32,
    pub min_credits_per_term: Rational,
    pub max_credits_per_term: Rational,
    /// For counting, every term holds exactly this many courses and the
    /// credit bounds are ignored. For generation it caps courses per term.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_courses_per_term: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_courses_per_term: Option<u32>,
    /// Unordered pairs that may not share a term.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub toxic_pairs: Vec<(CourseId, CourseId)>,
}

impl Default for PlanConstraints {
    fn default() -> Self {
        PlanConstraints {
            num_terms: 12,
            min_credits_per_term: Rational::ZERO,
            max_credits_per_term: Rational::integer(15),
            exact_courses_per_term: None,
            max_courses_per_term: None,
            toxic_pairs: Vec::new(),
        }
    }
}

impl PlanConstraints {
    pub fn validate(&self) -> Result<(), PlanError> {
        let bad = |m: &str| Err(PlanError::InvalidConstraints(m.to_string()));
        if self.num_terms == 0 {
            return bad("num_terms must be positive");
        }
        if self.min_credits_per_term.is_negative() {
            return bad("min_credits_per_term must be non-negative");
        }
        if !self.max_credits_per_term.is_positive() {
            return bad("max_credits_per_term must be positive");
        }
        if self.min_credits_per_term > self.max_credits_per_term {
            return bad("min_credits_per_term exceeds max_credits_per_term");
        }
        if self.exact_courses_per_term == Some(0) {
            return bad("exact_courses_per_term must be positive");
        }
        if self.max_courses_per_term == Some(0) {
            return bad("max_courses_per_term must be positive");
        }
        if self.toxic_pairs.iter().any(|(a, b)| a == b) {
            return bad("a toxic pair needs two distinct courses");
        }
        Ok(())
    }

    pub fn is_toxic(&self, a: &CourseId, b: &CourseId) -> bool {
        self.toxic_pairs
            .iter()
            .any(|(x, y)| (x == a && y == b) || (x == b && y == a))
    }

    /// Course cap per term for plan generation.
    pub(crate) fn course_cap(&self) -> Option<u32> {
        match (self.exact_courses_per_term, self.max_courses_per_term) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreePlan {
    /// Course ids per term, each term sorted.
    pub terms: Vec<Vec<CourseId>>,
    pub term_credit_hours: Vec<Rational>,
    pub total_credit_hours: Rational,
    /// False when the search budget ran out before optimality was proven.
    #[serde(default = "yes")]
    pub optimal: bool,
}

fn yes() -> bool {
    true
}

impl DegreePlan {
    pub fn empty() -> Self {
        DegreePlan {
            terms: Vec::new(),
            term_credit_hours: Vec::new(),
            total_credit_hours: Rational::ZERO,
            optimal: true,
        }
    }

    pub fn courses(&self) -> impl Iterator<Item = &CourseId> {
        self.terms.iter().flatten()
    }

    pub fn max_load(&self) -> Rational {
        self.term_credit_hours.iter().copied().max().unwrap_or(Rational::ZERO)
    }
}

/// Why no plan exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum InfeasibleReason {
    /// A prerequisite is neither planned nor completed.
    MissingPrerequisite { course: CourseId, prerequisite: CourseId },
    /// One course alone exceeds the per-term credit limit.
    CourseExceedsCapacity {
        course: CourseId,
        credit_hours: Rational,
        max_credits_per_term: Rational,
    },
    /// The longest prerequisite chain needs more terms than allowed.
    PrerequisiteDepth { chain: Vec<CourseId>, num_terms: u32 },
    /// The courses do not fit into the allowed terms.
    Capacity {
        courses: usize,
        credit_hours: Rational,
        num_terms: u32,
    },
    /// Some term cannot reach the minimum load.
    MinimumLoad { min_credits_per_term: Rational },
    /// A minimal set of toxic pairs that alone makes the plan impossible.
    ToxicPairs { pairs: Vec<(CourseId, CourseId)> },
}

impl std::fmt::Display for InfeasibleReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InfeasibleReason::MissingPrerequisite { course, prerequisite } => {
                write!(
                    f,
                    "{course} needs {prerequisite}, which is neither planned nor completed"
                )
            }
            InfeasibleReason::CourseExceedsCapacity {
                course,
                credit_hours,
                max_credits_per_term,
            } => write!(
                f,
                "{course} carries {credit_hours} credit hours, above the {max_credits_per_term} per-term limit"
            ),
            InfeasibleReason::PrerequisiteDepth { chain, num_terms } => {
                let names: Vec<&str> = chain.iter().map(|c| c.as_str()).collect();
                write!(
                    f,
                    "prerequisite chain {} needs {} terms, only {num_terms} allowed",
                    names.join(" -> "),
                    chain.len()
                )
            }
            InfeasibleReason::Capacity {
                courses,
                credit_hours,
                num_terms,
            } => write!(
                f,
                "{courses} courses ({credit_hours} credit hours) do not fit in {num_terms} terms"
            ),
            InfeasibleReason::MinimumLoad { min_credits_per_term } => {
                write!(f, "terms cannot all reach {min_credits_per_term} credit hours")
            }
            InfeasibleReason::ToxicPairs { pairs } => {
                let names: Vec<String> = pairs.iter().map(|(a, b)| format!("{{{a}, {b}}}")).collect();
                write!(f, "toxic pairs {} cannot be kept apart", names.join(", "))
            }
        }
    }
}

/// Indexed view of a course set: ids sorted, hours, and the prerequisite
/// edges that stay inside the set.
#[derive(Debug, Clone)]
pub(crate) struct CourseGraph {
    pub ids: Vec<CourseId>,
    pub hours: Vec<Rational>,
    /// Direct in-set prerequisites of each course.
    pub preds: Vec<Vec<usize>>,
    pub succs: Vec<Vec<usize>>,
}

impl CourseGraph {
    pub fn build(courses: &BTreeSet<CourseId>, catalog: &CourseCatalog) -> Result<CourseGraph, PlanError> {
        let ids: Vec<CourseId> = courses.iter().cloned().collect();
        let mut hours = Vec::with_capacity(ids.len());
        let mut preds = vec![Vec::new(); ids.len()];
        let mut succs = vec![Vec::new(); ids.len()];
        for (i, id) in ids.iter().enumerate() {
            let course = catalog
                .course(id.as_str())
                .ok_or_else(|| PlanError::UnknownCourse(id.clone()))?;
            hours.push(course.credit_hours);
            for p in &course.prerequisites {
                if let Ok(j) = ids.binary_search(p) {
                    preds[i].push(j);
                    succs[j].push(i);
                }
            }
        }
        Ok(CourseGraph {
            ids,
            hours,
            preds,
            succs,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn index(&self, id: &CourseId) -> Option<usize> {
        self.ids.binary_search(id).ok()
    }

    /// Topological order, smallest index first among ready courses.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut indegree: Vec<usize> = self.preds.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..self.len()).filter(|i| indegree[*i] == 0).collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(i) = ready.pop_first() {
            order.push(i);
            for &s in &self.succs[i] {
                indegree[s] -= 1;
                if indegree[s] == 0 {
                    ready.insert(s);
                }
            }
        }
        order
    }

    /// `dist[a][b]`: edges on the longest path from `a` to `b`, if any.
    pub fn longest_paths(&self) -> Vec<Vec<Option<u32>>> {
        let n = self.len();
        let order = self.topological_order();
        let mut dist = vec![vec![None; n]; n];
        for (a, row) in dist.iter_mut().enumerate() {
            row[a] = Some(0);
            for &u in &order {
                let Some(du) = row[u] else { continue };
                for &v in &self.succs[u] {
                    if row[v].is_none_or(|dv| dv < du + 1) {
                        row[v] = Some(du + 1);
                    }
                }
            }
        }
        dist
    }

    /// A longest prerequisite chain, earliest course first.
    pub fn longest_chain(&self) -> Vec<usize> {
        let order = self.topological_order();
        let mut depth = vec![0usize; self.len()];
        let mut prev = vec![None; self.len()];
        for &u in &order {
            for &p in &self.preds[u] {
                if depth[p] + 1 > depth[u] {
                    depth[u] = depth[p] + 1;
                    prev[u] = Some(p);
                }
            }
        }
        let Some(mut end) = (0..self.len()).max_by_key(|i| (depth[*i], std::cmp::Reverse(*i))) else {
            return Vec::new();
        };
        let mut chain = vec![end];
        while let Some(p) = prev[end] {
            chain.push(p);
            end = p;
        }
        chain.reverse();
        chain
    }
}
